//! Factorial and raw moments, mean, variance and covariance.

use super::DerivedConstants;
use crate::error::{invalid, Error, Result};
use crate::mc::{par_collect, McConfig};
use crate::process::{RateSpec, TimeChange};
use crate::quad::{integrate_points, QuadConfig};
use crate::specfun::{beta, beta_reg, factorial, falling, gamma, incomplete_beta, rising, KahanSum};
use crate::subordinate::{
    frac_moment, inverse_sample_path, sample_at, MomentEstimate, MomentMethod, SubordinatorSpec,
};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Largest moment order handled by the composition sums.
pub const MAX_ORDER: usize = 12;

/// Moments E[X^q] of the outer clock X at a fixed time: X = t (no time
/// change), D_f(t) or H_f(t). Monte Carlo draws of H_f(t) are made once and
/// shared across orders.
pub(crate) struct ClockMoments<'a> {
    tc: &'a TimeChange,
    t: f64,
    mc: &'a McConfig,
    draws: OnceLock<Result<Vec<f64>>>,
}

impl<'a> ClockMoments<'a> {
    pub(crate) fn new(tc: &'a TimeChange, t: f64, mc: &'a McConfig) -> Self {
        ClockMoments { tc, t, mc, draws: OnceLock::new() }
    }

    pub(crate) fn get(&self, q: f64) -> Result<MomentEstimate> {
        let exact = |value| MomentEstimate { value, error: 0.0, method: MomentMethod::ClosedForm, warning: None };
        if self.t == 0.0 {
            return Ok(exact(0.0));
        }
        match *self.tc {
            TimeChange::None => Ok(exact(self.t.powf(q))),
            TimeChange::Subordinator(s) => {
                let method = match s {
                    SubordinatorSpec::Gamma { .. } | SubordinatorSpec::Stable { .. } => MomentMethod::ClosedForm,
                    _ if q.fract() == 0.0 && q <= 170.0 => MomentMethod::ClosedForm,
                    _ => MomentMethod::Quadrature,
                };
                frac_moment(&s, q, self.t, method)
            }
            TimeChange::InverseSubordinator(SubordinatorSpec::Stable { alpha }) => {
                // E H^q = Γ(1+q) t^{qβ}/Γ(1+qβ) for the inverse β-stable clock
                Ok(exact(gamma(1.0 + q) * self.t.powf(q * alpha) / gamma(1.0 + q * alpha)))
            }
            TimeChange::InverseSubordinator(s) => {
                let draws = self.draws.get_or_init(|| {
                    self.mc.validate()?;
                    par_collect(self.mc.n_paths, self.mc.seed, |rng, _| {
                        Ok(inverse_sample_path(&s, &[self.t], self.mc.dt, rng)?.values[0])
                    })
                });
                let draws = draws.as_ref().map_err(|e| e.clone())?;
                let w: crate::stats::Welford = draws.iter().map(|h| h.powf(q)).collect();
                Ok(MomentEstimate {
                    value: w.mean,
                    error: w.se(),
                    method: MomentMethod::MonteCarlo { n: self.mc.n_paths, seed: self.mc.seed },
                    warning: None,
                })
            }
        }
    }
}

/// E[X^q] of the outer clock at time t.
pub fn clock_moment(tc: &TimeChange, q: f64, t: f64, mc: &McConfig) -> Result<MomentEstimate> {
    ClockMoments::new(tc, t, mc).get(q)
}

/// Coefficients of εᵐ, m = 1..=r, in G(1+ε) (factorial) or K(ε) (raw).
fn weights(rates: &RateSpec, r: usize, factorial_kind: bool) -> Vec<f64> {
    let mut w = vec![0.0; r + 1];
    w[1] = rates.m1();
    for (m, wm) in w.iter_mut().enumerate().skip(2) {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let s: f64 = rates
            .lambda
            .iter()
            .zip(&rates.mu)
            .enumerate()
            .map(|(i, (l, mu))| {
                let j = (i + 1) as f64;
                if factorial_kind {
                    falling(j, m) * l + sign * rising(j, m) * mu
                } else {
                    j.powi(m as i32) * (l + sign * mu)
                }
            })
            .sum();
        *wm = s / factorial(m);
    }
    w
}

/// c[n][r'] = Σ over compositions (m₁..m_n) of r' of Π w(m_l), i.e. the
/// coefficient of ε^{r'} in (Σ_m w(m)εᵐ)ⁿ.
fn composition_sums(w: &[f64], r: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; r + 1]; r + 1];
    c[1][1..=r].copy_from_slice(&w[1..=r]);
    for n in 2..=r {
        for total in n..=r {
            let mut s = KahanSum::new();
            for last in 1..=(total - (n - 1)) {
                s.add(c[n - 1][total - last] * w[last]);
            }
            c[n][total] = s.value();
        }
    }
    c
}

fn check_order(r: usize) -> Result<()> {
    if r == 0 {
        return invalid("moment order must be at least 1");
    }
    if r > MAX_ORDER {
        return Err(Error::OrderLimit { r, max: MAX_ORDER });
    }
    Ok(())
}

fn moment_stack(
    rates: &RateSpec,
    alpha: f64,
    tc: &TimeChange,
    r_max: usize,
    t: f64,
    mc: &McConfig,
    factorial_kind: bool,
) -> Result<Vec<f64>> {
    rates.validate()?;
    check_order(r_max)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(t >= 0.0) {
        return invalid(format!("t must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(vec![0.0; r_max]);
    }
    let clock = ClockMoments::new(tc, t, mc);
    let ex: Vec<f64> = (1..=r_max).map(|n| Ok(clock.get(n as f64 * alpha)?.value)).collect::<Result<_>>()?;
    let c = composition_sums(&weights(rates, r_max, factorial_kind), r_max);
    let mut out = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let mut s = KahanSum::new();
        for n in 1..=r {
            s.add(ex[n - 1] * (c[n][r] / gamma(n as f64 * alpha + 1.0)));
        }
        out.push(factorial(r) * s.value());
    }
    Ok(out)
}

/// E[Z(Z−1)…(Z−r+1)] for r = 1..=r_max, sharing the clock moments.
pub fn factorial_moments(
    rates: &RateSpec,
    alpha: f64,
    tc: &TimeChange,
    r_max: usize,
    t: f64,
    mc: &McConfig,
) -> Result<Vec<f64>> {
    moment_stack(rates, alpha, tc, r_max, t, mc, true)
}

/// r-th factorial moment r!·Σₙ E[X^{nα}]/Γ(nα+1)·Σ_{compositions} Π w(m_l)
/// with w(m) = Σⱼ((j)_m λⱼ + (−1)^m j^{(m)} μⱼ)/m!.
pub fn factorial_moment(rates: &RateSpec, alpha: f64, tc: &TimeChange, r: usize, t: f64, mc: &McConfig) -> Result<f64> {
    check_order(r)?;
    Ok(factorial_moments(rates, alpha, tc, r, t, mc)?[r - 1])
}

/// E[Z^r] for r = 1..=r_max.
pub fn raw_moments(rates: &RateSpec, alpha: f64, tc: &TimeChange, r_max: usize, t: f64, mc: &McConfig) -> Result<Vec<f64>> {
    moment_stack(rates, alpha, tc, r_max, t, mc, false)
}

/// r-th raw moment, same structure with w(m) = Σⱼ jᵐ(λⱼ + (−1)^m μⱼ)/m!.
pub fn raw_moment(rates: &RateSpec, alpha: f64, tc: &TimeChange, r: usize, t: f64, mc: &McConfig) -> Result<f64> {
    check_order(r)?;
    Ok(raw_moments(rates, alpha, tc, r, t, mc)?[r - 1])
}

/// Mean at s and t, variance at t and Cov(Z(s), Z(t)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsSummary {
    pub s: f64,
    pub t: f64,
    pub mean_s: f64,
    pub mean_t: f64,
    pub var_t: f64,
    pub cov_st: f64,
    /// E[X(t)^{2α}·B(α, α+1; X(s)/X(t))].
    pub beta_term: f64,
    /// Standard error of the Monte Carlo parts (0 when exact).
    pub std_error: f64,
    pub exact: bool,
    pub warning: Option<String>,
}

/// ∫₀¹ u^{α−1}(1−u)^α P(U > u) du for U ~ Beta(p, q), with u = v^{1/α}.
/// `marks` are (center, spread) pairs of the Beta laws involved, used as
/// breakpoints.
pub(crate) fn beta_weight_integral<F: Fn(f64) -> f64>(alpha: f64, marks: &[(f64, f64)], g: F) -> Result<f64> {
    let f = |v: f64| {
        if v <= 0.0 || v >= 1.0 {
            return 0.0;
        }
        let u = v.powf(1.0 / alpha);
        (1.0 - u).powf(alpha) * g(u) / alpha
    };
    let mut pts = vec![0.0, 1.0];
    for &(center, spread) in marks {
        for k in [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0] {
            let u = center + k * spread;
            if u > 0.0 && u < 1.0 {
                pts.push(u.powf(alpha));
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    Ok(integrate_points(f, &pts, QuadConfig::with_tol(1e-15, 1e-11))?.value)
}

/// Mean and standard deviation of Beta(p, q).
pub(crate) fn beta_mark(p: f64, q: f64) -> (f64, f64) {
    (p / (p + q), (p * q / ((p + q).powi(2) * (p + q + 1.0))).sqrt())
}

/// Beta-weighted term for the gamma clock: Z(s)/Z(t) ~ Beta(bs, b(t−s)) is
/// independent of Z(t), so the expectation factorizes.
fn gamma_beta_term(alpha: f64, b: f64, s: f64, t: f64, e2t: f64) -> Result<f64> {
    let (p, q) = (b * s, b * (t - s));
    let j = beta_weight_integral(alpha, &[beta_mark(p, q)], |u| 1.0 - beta_reg(p, q, u))?;
    Ok(e2t * j)
}

/// Joint-path Monte Carlo estimate of the beta term, with X(t)^{2α} as a
/// control variate when its mean is known exactly.
fn mc_beta_term(alpha: f64, tc: &TimeChange, s: f64, t: f64, e2t: &MomentEstimate, mc: &McConfig) -> Result<(f64, f64)> {
    mc.validate()?;
    let pairs: Vec<(f64, f64)> = par_collect(mc.n_paths, mc.seed ^ 0x00be_7a00, |rng, _| {
        let (xs, xt) = match *tc {
            TimeChange::Subordinator(sub) => {
                let a = sample_at(&sub, s, rng)?;
                (a, a + sample_at(&sub, t - s, rng)?)
            }
            TimeChange::InverseSubordinator(sub) => {
                let p = inverse_sample_path(&sub, &[s, t], mc.dt, rng)?;
                (p.values[0], p.values[1])
            }
            TimeChange::None => (s, t),
        };
        if xt <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let z = xt.powf(2.0 * alpha);
        let ratio = (xs / xt).clamp(0.0, 1.0);
        Ok((z * incomplete_beta(alpha, alpha + 1.0, ratio)?, z))
    })?;
    let n = pairs.len() as f64;
    let my = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mz = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut syz, mut szz, mut syy) = (0.0, 0.0, 0.0);
    for (y, z) in &pairs {
        syz += (y - my) * (z - mz);
        szz += (z - mz) * (z - mz);
        syy += (y - my) * (y - my);
    }
    let use_cv = e2t.error == 0.0 && szz > 0.0;
    let c = if use_cv { syz / szz } else { 0.0 };
    let est = if use_cv { my - c * (mz - e2t.value) } else { my };
    let var = (syy - 2.0 * c * syz + c * c * szz) / (n - 1.0);
    Ok((est, (var / n).sqrt()))
}

/// Mean, variance and covariance of the time-changed GFSP.
///
/// mean = l₁E[X^α], Var = E[X^α](l₂ − l₁²E[X^α]) + 2d·E[X^{2α}] and
/// Cov(s,t) = l₂E[X^α(s)] + d·E[X^{2α}(s)] − l₁²E[X^α(s)]E[X^α(t)] +
/// l₁²α·E[X^{2α}(t)·B(α, α+1; X(s)/X(t))].
/// The last expectation is exact for no time change, the gamma clock and
/// α = 1 subordinators; joint-path Monte Carlo otherwise.
pub fn moments_summary(
    rates: &RateSpec,
    alpha: f64,
    tc: &TimeChange,
    s: f64,
    t: f64,
    mc: &McConfig,
) -> Result<MomentsSummary> {
    rates.validate()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(s > 0.0 && s <= t) || !t.is_finite() {
        return invalid(format!("need 0 < s <= t, got s={s}, t={t}"));
    }
    let k = DerivedConstants::new(rates, alpha);
    let cs = ClockMoments::new(tc, s, mc);
    let ct = ClockMoments::new(tc, t, mc);
    let (e1s, e2s) = (cs.get(alpha)?, cs.get(2.0 * alpha)?);
    let (e1t, e2t) = (ct.get(alpha)?, ct.get(2.0 * alpha)?);
    let mut se = e1s.error.max(e1t.error).max(e2s.error).max(e2t.error);
    let mut exact = [&e1s, &e2s, &e1t, &e2t].iter().all(|m| !matches!(m.method, MomentMethod::MonteCarlo { .. }));
    let big_b = beta(alpha, alpha + 1.0);
    let beta_term = if s == t {
        big_b * e2t.value
    } else {
        match *tc {
            TimeChange::None => t.powf(2.0 * alpha) * incomplete_beta(alpha, alpha + 1.0, s / t)?,
            TimeChange::Subordinator(SubordinatorSpec::Gamma { b, .. }) => gamma_beta_term(alpha, b, s, t, e2t.value)?,
            TimeChange::Subordinator(sub) if alpha == 1.0 => {
                // X(t)²B(1,2;X(s)/X(t)) = X(s)X(t) − X(s)²/2, independent increments
                let m1 = |x| clock_moment(&TimeChange::Subordinator(sub), 1.0, x, mc).map(|m| m.value);
                e2s.value / 2.0 + e1s.value * m1(t - s)?
            }
            _ => {
                let (v, e) = mc_beta_term(alpha, tc, s, t, &e2t, mc)?;
                se = se.max(e);
                exact = false;
                v
            }
        }
    };
    let mean_s = k.l1 * e1s.value;
    let mean_t = k.l1 * e1t.value;
    let var_t = e1t.value * (k.l2 - k.l1 * k.l1 * e1t.value) + 2.0 * k.d * e2t.value;
    let cov_st = if s == t {
        var_t
    } else {
        k.l2 * e1s.value + k.d * e2s.value - k.l1 * k.l1 * e1s.value * e1t.value + k.l1 * k.l1 * alpha * beta_term
    };
    let warning = (!exact && se > 1e-2 * cov_st.abs()).then(|| {
        format!("Monte Carlo standard error {se:.3e} exceeds 1% of the covariance; widen n_paths")
    });
    Ok(MomentsSummary { s, t, mean_s, mean_t, var_t, cov_st, beta_term, std_error: se, exact, warning })
}

/// Var(Z(t)) − E Z(t).
pub fn overdispersion(rates: &RateSpec, alpha: f64, tc: &TimeChange, t: f64, mc: &McConfig) -> Result<f64> {
    let m = moments_summary(rates, alpha, tc, t, t, mc)?;
    Ok(m.var_t - m.mean_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::par_welford_vec;
    use crate::process::{sample_process, ProcessSpec};

    fn gamma11() -> TimeChange {
        TimeChange::Subordinator(SubordinatorSpec::Gamma { a: 1.0, b: 1.0 })
    }

    #[test]
    fn first_moments_coincide_exactly() {
        let mc = McConfig::default();
        let r = RateSpec::new(vec![1.3, 0.4], vec![0.7, 0.2]).unwrap();
        for tc in [TimeChange::None, gamma11()] {
            for alpha in [0.45, 0.8, 1.0] {
                let f = factorial_moment(&r, alpha, &tc, 1, 2.3, &mc).unwrap();
                let raw = raw_moment(&r, alpha, &tc, 1, 2.3, &mc).unwrap();
                let m = moments_summary(&r, alpha, &tc, 2.3, 2.3, &mc).unwrap();
                assert_eq!(f, raw);
                assert_eq!(f, m.mean_t);
            }
        }
    }

    #[test]
    fn skellam_second_moment() {
        let mc = McConfig::default();
        let r = RateSpec::skellam(2.0, 0.5);
        let t = 1.7;
        let m2 = raw_moment(&r, 1.0, &TimeChange::None, 2, t, &mc).unwrap();
        let want = (1.5 * t).powi(2) + 2.5 * t;
        assert!((m2 - want).abs() < 1e-12);
        assert_eq!(raw_moment(&r, 1.0, &TimeChange::None, 1, 0.0, &mc).unwrap(), 0.0);
    }

    #[test]
    fn factorial_second_moment_reference() {
        // gamma(1,1), α=1, λ=2, μ=1, t=1: E Z(Z−1) = 4
        let mc = McConfig::default();
        let v = factorial_moment(&RateSpec::skellam(2.0, 1.0), 1.0, &gamma11(), 2, 1.0, &mc).unwrap();
        assert!((v - 4.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn factorial_from_raw_moments() {
        // E Z(Z−1)(Z−2) = E Z³ − 3E Z² + 2E Z
        let mc = McConfig::default();
        let r = RateSpec::new(vec![1.0, 0.5, 0.25], vec![0.5, 0.3, 0.1]).unwrap();
        let raw = raw_moments(&r, 0.7, &gamma11(), 3, 2.0, &mc).unwrap();
        let fac = factorial_moments(&r, 0.7, &gamma11(), 3, 2.0, &mc).unwrap();
        assert!((fac[1] - (raw[1] - raw[0])).abs() < 1e-11);
        assert!((fac[2] - (raw[2] - 3.0 * raw[1] + 2.0 * raw[0])).abs() < 1e-10);
    }

    #[test]
    fn order_limit() {
        let mc = McConfig::default();
        let e = factorial_moment(&RateSpec::skellam(1.0, 1.0), 0.5, &gamma11(), 13, 1.0, &mc).unwrap_err();
        assert_eq!(e, Error::OrderLimit { r: 13, max: MAX_ORDER });
    }

    #[test]
    fn variance_matches_raw_moments() {
        let mc = McConfig::default();
        let r = RateSpec::new(vec![1.0, 0.5], vec![0.5, 0.3]).unwrap();
        for tc in [TimeChange::None, gamma11()] {
            let raw = raw_moments(&r, 0.6, &tc, 2, 1.5, &mc).unwrap();
            let m = moments_summary(&r, 0.6, &tc, 1.5, 1.5, &mc).unwrap();
            assert!((m.var_t - (raw[1] - raw[0] * raw[0])).abs() < 1e-10, "{tc:?}");
        }
    }

    #[test]
    fn gamma_beta_term_matches_monte_carlo() {
        let mc = McConfig { n_paths: 200_000, dt: 1e-3, seed: 3 };
        let e2t = clock_moment(&gamma11(), 1.2, 3.0, &mc).unwrap();
        let exact = gamma_beta_term(0.6, 1.0, 1.0, 3.0, e2t.value).unwrap();
        let (v, se) = mc_beta_term(0.6, &gamma11(), 1.0, 3.0, &e2t, &mc).unwrap();
        assert!((v - exact).abs() < 4.0 * se, "{v} ± {se} vs {exact}");
    }

    #[test]
    fn alpha_one_subordinator_covariance_is_exact() {
        // Cov = m₂E D(s) + m₁² Var D(s)
        let mc = McConfig::default();
        let ig = SubordinatorSpec::InverseGaussian { delta: 1.0, gam: 2.0 };
        let r = RateSpec::skellam(2.0, 0.5);
        let m = moments_summary(&r, 1.0, &TimeChange::Subordinator(ig), 0.7, 2.0, &mc).unwrap();
        assert!(m.exact);
        let var_d = 1.0 * 0.7 / 8.0; // δs/γ³
        let want = r.m2() * 0.35 + r.m1().powi(2) * var_d;
        assert!((m.cov_st - want).abs() < 1e-8, "{} vs {want}", m.cov_st);
    }

    #[test]
    fn tcgfsp1_covariance_vs_simulation() {
        let r = RateSpec::skellam(2.0, 1.0);
        let spec = ProcessSpec { rates: r.clone(), alpha: 0.7, time_change: gamma11() };
        let mc = McConfig { n_paths: 200_000, dt: 1e-3, seed: 41 };
        let m = moments_summary(&r, 0.7, &spec.time_change, 1.0, 2.0, &mc).unwrap();
        let ws = par_welford_vec(mc.n_paths, mc.seed, 3, |rng, out| {
            let p = sample_process(&spec, &[1.0, 2.0], rng, &mc)?;
            let (a, b) = (p.values[0] as f64, p.values[1] as f64);
            out[0] = a;
            out[1] = b;
            out[2] = a * b;
            Ok(())
        })
        .unwrap();
        let cov = ws[2].mean - ws[0].mean * ws[1].mean;
        // crude SE of the product moment
        assert!((cov - m.cov_st).abs() < 4.0 * ws[2].se() + 0.02, "{cov} vs {}", m.cov_st);
        assert!((ws[1].mean - m.mean_t).abs() < 3.0 * ws[1].se());
    }

    #[test]
    fn gfsp_covariance_vs_simulation() {
        let r = RateSpec::skellam(1.5, 0.5);
        let spec = ProcessSpec { rates: r.clone(), alpha: 0.5, time_change: TimeChange::None };
        let mc = McConfig { n_paths: 100_000, dt: 2e-3, seed: 5 };
        let m = moments_summary(&r, 0.5, &TimeChange::None, 0.5, 1.0, &mc).unwrap();
        assert!(m.exact);
        let ws = par_welford_vec(mc.n_paths, mc.seed, 3, |rng, out| {
            let p = sample_process(&spec, &[0.5, 1.0], rng, &mc)?;
            let (a, b) = (p.values[0] as f64, p.values[1] as f64);
            out[0] = a;
            out[1] = b;
            out[2] = a * b;
            Ok(())
        })
        .unwrap();
        let cov = ws[2].mean - ws[0].mean * ws[1].mean;
        assert!((cov - m.cov_st).abs() < 4.0 * ws[2].se() + 0.02, "{cov} vs {}", m.cov_st);
    }

    #[test]
    fn variance_nondecreasing_in_t() {
        let mc = McConfig { n_paths: 20_000, dt: 1e-2, seed: 1 };
        let r = RateSpec::skellam(1.0, 0.5);
        for tc in [
            TimeChange::None,
            gamma11(),
            TimeChange::Subordinator(SubordinatorSpec::InverseGaussian { delta: 1.0, gam: 1.0 }),
            TimeChange::InverseSubordinator(SubordinatorSpec::Stable { alpha: 0.7 }),
        ] {
            let mut prev = 0.0;
            for i in 1..=8 {
                let t = 0.5 * i as f64;
                let v = moments_summary(&r, 0.6, &tc, t, t, &mc).unwrap().var_t;
                assert!(v >= prev, "{tc:?} t={t}");
                prev = v;
            }
        }
    }
}
