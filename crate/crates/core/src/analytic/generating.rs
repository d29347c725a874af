//! Probability and moment generating functions.

use super::moments::clock_moment;
use crate::error::{invalid, Error, Result};
use crate::mc::McConfig;
use crate::process::{RateSpec, TimeChange};
use crate::specfun::{ln_gamma, mittag_leffler, KahanSum, SeriesConfig};
use crate::subordinate::{bernstein_ext, scaled_integer_moments, SubordinatorSpec};

/// G(u) = Σⱼ λⱼ(uʲ − 1) + μⱼ(u^{−j} − 1), so that E u^{S(t)} = e^{tG(u)}.
pub fn pgf_exponent(rates: &RateSpec, u: f64) -> f64 {
    if u > 0.0 {
        return mgf_exponent(rates, u.ln());
    }
    rates
        .lambda
        .iter()
        .zip(&rates.mu)
        .enumerate()
        .map(|(i, (l, m))| {
            let j = (i + 1) as i32;
            l * (u.powi(j) - 1.0) + m * (u.powi(-j) - 1.0)
        })
        .sum()
}

/// K(v) = Σⱼ λⱼ(e^{vj} − 1) + μⱼ(e^{−vj} − 1), so that E e^{vS(t)} = e^{tK(v)}.
pub fn mgf_exponent(rates: &RateSpec, v: f64) -> f64 {
    rates
        .lambda
        .iter()
        .zip(&rates.mu)
        .enumerate()
        .map(|(i, (l, m))| {
            let j = (i + 1) as f64;
            l * (v * j).exp_m1() + m * (-v * j).exp_m1()
        })
        .sum()
}

pub fn gsp_pgf(rates: &RateSpec, u: f64, t: f64) -> f64 {
    (t * pgf_exponent(rates, u)).exp()
}

fn check_u(u: f64) -> Result<()> {
    if u == 0.0 || !u.is_finite() {
        return invalid(format!("pgf argument must be finite and nonzero, got {u}"));
    }
    Ok(())
}

/// GFSP pgf E_{α,1}(G(u) t^α).
pub fn gfsp_pgf(rates: &RateSpec, alpha: f64, u: f64, t: f64, cfg: &SeriesConfig) -> Result<f64> {
    check_u(u)?;
    mittag_leffler(alpha, 1.0, 1.0, pgf_exponent(rates, u) * t.powf(alpha), cfg)
}

/// GFSP mgf E_{α,1}(K(v) t^α).
pub fn gfsp_mgf(rates: &RateSpec, alpha: f64, v: f64, t: f64, cfg: &SeriesConfig) -> Result<f64> {
    mittag_leffler(alpha, 1.0, 1.0, mgf_exponent(rates, v) * t.powf(alpha), cfg)
}

/// Σ_{n ≤ n_max} xⁿ/Γ(nα+1)·E[X^{nα}], the generating-function series of a
/// time-changed GFSP. `ln_moment(q)` returns ln E[X^q].
fn clock_series<M: Fn(f64) -> Result<f64>>(x: f64, alpha: f64, ln_moment: M, n_max: usize, cfg: &SeriesConfig) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let mut s = KahanSum::new();
    s.add(1.0);
    let lx = x.abs().ln();
    let mut small = 0;
    let mut last = f64::INFINITY;
    for n in 1..=n_max {
        let nf = n as f64;
        let mag = (nf * lx - ln_gamma(nf * alpha + 1.0) + ln_moment(nf * alpha)?).exp();
        if !mag.is_finite() {
            return Err(Error::Truncation { partial: s.value(), bound: f64::INFINITY, terms: n });
        }
        let term = if x < 0.0 && n % 2 == 1 { -mag } else { mag };
        s.add(term);
        last = mag;
        if mag <= cfg.rel_tol * s.value().abs() {
            small += 1;
            if small >= 2 {
                return Ok(s.value());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Truncation { partial: s.value(), bound: last, terms: n_max })
}

/// ln E[D(t)^q]; integer orders come from the cumulant recursion, which
/// stays finite past the point where the moments themselves overflow.
fn subordinator_moments(sub: &SubordinatorSpec, t: f64, alpha: f64, n_max: usize) -> impl Fn(f64) -> Result<f64> + '_ {
    let tc = TimeChange::Subordinator(*sub);
    let mc = McConfig::default();
    let top = (n_max as f64 * alpha).floor() as usize;
    let scaled = if t > 0.0 { scaled_integer_moments(sub, t, top) } else { None };
    move |q| match &scaled {
        Some(mu) if q.fract() == 0.0 && (q as usize) < mu.len() => Ok(mu[q as usize].ln() + ln_gamma(q + 1.0)),
        _ => Ok(clock_moment(&tc, q, t, &mc)?.value.ln()),
    }
}

/// TCGFSP-I pgf Σₙ G(u)ⁿ/Γ(nα+1)·E[D_f(t)^{nα}].
///
/// The series converges while |G(u)| is inside the clock's Laplace radius;
/// otherwise a truncation error is returned after `n_max` terms.
pub fn tcgfsp1_pgf(
    rates: &RateSpec,
    alpha: f64,
    sub: &SubordinatorSpec,
    u: f64,
    t: f64,
    n_max: usize,
    cfg: &SeriesConfig,
) -> Result<f64> {
    check_u(u)?;
    clock_series(pgf_exponent(rates, u), alpha, subordinator_moments(sub, t, alpha, n_max), n_max, cfg)
}

/// TCGFSP-I mgf Σₙ K(v)ⁿ/Γ(nα+1)·E[D_f(t)^{nα}].
pub fn tcgfsp1_mgf(
    rates: &RateSpec,
    alpha: f64,
    sub: &SubordinatorSpec,
    v: f64,
    t: f64,
    n_max: usize,
    cfg: &SeriesConfig,
) -> Result<f64> {
    clock_series(mgf_exponent(rates, v), alpha, subordinator_moments(sub, t, alpha, n_max), n_max, cfg)
}

/// TCGFSP-II pgf Σₙ G(u)ⁿ/Γ(nα+1)·E[H_f(t)^{nα}]. The inverse moments are
/// exact for a stable clock and Monte Carlo otherwise.
#[allow(clippy::too_many_arguments)]
pub fn tcgfsp2_pgf(
    rates: &RateSpec,
    alpha: f64,
    sub: &SubordinatorSpec,
    u: f64,
    t: f64,
    n_max: usize,
    cfg: &SeriesConfig,
    mc: &McConfig,
) -> Result<f64> {
    check_u(u)?;
    let tc = TimeChange::InverseSubordinator(*sub);
    clock_series(pgf_exponent(rates, u), alpha, |q| Ok(clock_moment(&tc, q, t, mc)?.value.ln()), n_max, cfg)
}

/// α = 1 closed form exp(−t·f(−G(u))).
pub fn tcgsp1_pgf_closed(rates: &RateSpec, sub: &SubordinatorSpec, u: f64, t: f64) -> Result<f64> {
    check_u(u)?;
    let s = -pgf_exponent(rates, u);
    match bernstein_ext(sub, s) {
        Some(f) => Ok((-t * f).exp()),
        None => invalid(format!("pgf at u={u} lies outside the Laplace domain of {}", sub.name())),
    }
}

/// α = 1 closed form exp(−t·f(−K(v))).
pub fn tcgsp1_mgf_closed(rates: &RateSpec, sub: &SubordinatorSpec, v: f64, t: f64) -> Result<f64> {
    let s = -mgf_exponent(rates, v);
    match bernstein_ext(sub, s) {
        Some(f) => Ok((-t * f).exp()),
        None => invalid(format!("mgf at v={v} lies outside the Laplace domain of {}", sub.name())),
    }
}

/// r-th derivative of f at x0 by central differences, Richardson-extrapolated
/// over step halvings. Returns (value, error estimate).
pub fn richardson_derivative<F: Fn(f64) -> Result<f64>>(f: F, x0: f64, r: usize, h0: f64) -> Result<(f64, f64)> {
    if r == 0 {
        return Ok((f(x0)?, 0.0));
    }
    const LEVELS: usize = 7;
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let diff = |h: f64| -> Result<f64> {
        let mut s = KahanSum::new();
        for i in 0..=r {
            let x = x0 + (r as f64 / 2.0 - i as f64) * h;
            let c = binom(r, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
            s.add(c * f(x)?);
        }
        Ok(s.value() / h.powi(r as i32))
    };
    let mut tab: Vec<Vec<f64>> = Vec::new();
    let (mut best, mut err) = (f64::NAN, f64::INFINITY);
    let mut h = h0;
    for i in 0..LEVELS {
        let mut row = vec![diff(h)?];
        for j in 1..=i {
            let p = 4f64.powi(j as i32);
            let v = row[j - 1] + (row[j - 1] - tab[i - 1][j - 1]) / (p - 1.0);
            row.push(v);
            let e = (v - row[j - 1]).abs().max((v - tab[i - 1][j - 1]).abs());
            if e < err {
                err = e;
                best = v;
            }
        }
        // stop once roundoff makes the new row worse than the previous best
        if i > 1 && (row[i] - tab[i - 1][i - 1]).abs() > 2.0 * err {
            break;
        }
        tab.push(row);
        h /= 2.0;
    }
    Ok((best, err))
}

/// r-th factorial moment from the pgf: d^r/du^r pgf at u = 1.
pub fn pgf_derivative<F: Fn(f64) -> Result<f64>>(pgf: F, r: usize) -> Result<(f64, f64)> {
    richardson_derivative(pgf, 1.0, r, 0.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::QuadConfig;
    use crate::subordinate::integrate_against_density;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    #[test]
    fn exponent_forms_agree() {
        let r = RateSpec::new(vec![1.0, 0.5, 0.2], vec![0.3, 0.4, 0.1]).unwrap();
        for u in [0.3_f64, 0.9, 1.0, 1.2] {
            let direct: f64 = (0..3)
                .map(|i| {
                    let j = (i + 1) as i32;
                    r.lambda[i] * (u.powi(j) - 1.0) + r.mu[i] * (u.powi(-j) - 1.0)
                })
                .sum();
            assert!((pgf_exponent(&r, u) - direct).abs() < 1e-14);
        }
        assert_eq!(pgf_exponent(&r, 1.0), 0.0);
        let u: f64 = -0.5;
        let neg: f64 = (0..3)
            .map(|i| {
                let j = (i + 1) as i32;
                r.lambda[i] * (u.powi(j) - 1.0) + r.mu[i] * (u.powi(-j) - 1.0)
            })
            .sum();
        assert!((pgf_exponent(&r, u) - neg).abs() < 1e-14);
    }

    #[test]
    fn pgf_at_one_is_one() {
        let r = RateSpec::skellam(2.0, 1.0);
        let g = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
        assert!((gfsp_pgf(&r, 0.6, 1.0, 2.0, &cfg()).unwrap() - 1.0).abs() < 1e-15);
        assert!((tcgfsp1_pgf(&r, 0.6, &g, 1.0, 2.0, 200, &cfg()).unwrap() - 1.0).abs() < 1e-15);
        assert!((gfsp_mgf(&r, 0.6, 0.0, 2.0, &cfg()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_series_matches_closed_form() {
        let r = RateSpec::new(vec![1.0, 0.5], vec![0.4, 0.2]).unwrap();
        for sub in [
            SubordinatorSpec::Gamma { a: 1.0, b: 1.0 },
            SubordinatorSpec::Gamma { a: 3.0, b: 0.5 },
            SubordinatorSpec::InverseGaussian { delta: 1.0, gam: 2.0 },
            SubordinatorSpec::TemperedStable { eta: 2.0, theta: 0.5 },
        ] {
            for u in [0.8, 0.9, 0.95] {
                let s = tcgfsp1_pgf(&r, 1.0, &sub, u, 1.0, 300, &cfg()).unwrap();
                let c = tcgsp1_pgf_closed(&r, &sub, u, 1.0).unwrap();
                assert!((s - c).abs() < 1e-8, "{sub:?} u={u}: {s} vs {c}");
            }
        }
    }

    #[test]
    fn tcgfsp1_pgf_matches_mixture_quadrature() {
        // E[E_α(G·D^α)] against the gamma density
        let r = RateSpec::skellam(2.0, 1.0);
        let g = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
        let u = 0.9;
        let x = pgf_exponent(&r, u);
        let q = integrate_against_density(
            &g,
            1.0,
            |d| mittag_leffler(0.7, 1.0, 1.0, x * d.powf(0.7), &cfg()).unwrap(),
            QuadConfig::with_tol(1e-15, 1e-12),
        )
        .unwrap()
        .0;
        let s = tcgfsp1_pgf(&r, 0.7, &g, u, 1.0, 300, &cfg()).unwrap();
        assert!((s - q).abs() < 1e-10, "{s} vs {q}");
    }

    #[test]
    fn divergent_series_is_reported() {
        // |G(u)| beyond the gamma radius a = 1
        let r = RateSpec::skellam(2.0, 1.0);
        let g = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
        let e = tcgfsp1_pgf(&r, 1.0, &g, 0.2, 1.0, 100, &cfg()).unwrap_err();
        assert!(matches!(e, Error::Truncation { .. }));
        assert!(tcgsp1_pgf_closed(&r, &g, 0.2, 1.0).is_err());
    }

    #[test]
    fn k1_mgf_is_fractional_skellam_form() {
        // k = 1: E_α((λ(e^v − 1) + μ(e^{−v} − 1)) t^α)
        let r = RateSpec::skellam(1.5, 0.7);
        let v: f64 = 0.3;
        let x = (1.5 * (v.exp() - 1.0) + 0.7 * ((-v).exp() - 1.0)) * 2f64.powf(0.6);
        let want = mittag_leffler(0.6, 1.0, 1.0, x, &cfg()).unwrap();
        assert!((gfsp_mgf(&r, 0.6, v, 2.0, &cfg()).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn alpha_one_mgf_closed_form() {
        let r = RateSpec::skellam(1.0, 0.5);
        let g = SubordinatorSpec::Gamma { a: 2.0, b: 1.0 };
        let s = tcgfsp1_mgf(&r, 1.0, &g, 0.2, 1.5, 300, &cfg()).unwrap();
        let c = tcgsp1_mgf_closed(&r, &g, 0.2, 1.5).unwrap();
        assert!((s - c).abs() < 1e-10);
    }

    #[test]
    fn richardson_recovers_polynomial_and_exp_derivatives() {
        let (d, _) = richardson_derivative(|x| Ok(x.exp()), 0.5, 3, 0.1).unwrap();
        assert!((d - 0.5f64.exp()).abs() < 1e-9);
        let (d, _) = richardson_derivative(|x| Ok(x.powi(4)), 1.0, 2, 0.1).unwrap();
        assert!((d - 12.0).abs() < 1e-9);
    }
}
