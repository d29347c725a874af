//! Correlation decay: long- and short-range dependence exponents.

use super::moments::{beta_mark, beta_weight_integral, moments_summary};
use super::DerivedConstants;
use crate::error::{invalid, Error, Result};
use crate::mc::McConfig;
use crate::process::{RateSpec, TimeChange};
use crate::specfun::{beta_reg, ln_gamma_ratio};
use crate::stats::linear_fit;
use crate::subordinate::{frac_moment, MomentMethod, SubordinatorSpec};
use serde::{Deserialize, Serialize};

/// E D^{iα}(t) ~ kᵢ t^{iρ}, i = 1, 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSpec {
    pub rho: f64,
    pub k1: f64,
    pub k2: f64,
}

impl AsymptoticSpec {
    /// k₂ ≥ k₁² up to a relative tolerance.
    pub fn hypothesis_holds(&self, rel_tol: f64) -> bool {
        self.k2 >= self.k1 * self.k1 * (1.0 - rel_tol)
    }
}

/// Fits (ρ, k₁, k₂) from the clock moments on a t-grid.
pub fn fit_asymptotic(sub: &SubordinatorSpec, alpha: f64, t_grid: &[f64]) -> Result<AsymptoticSpec> {
    if t_grid.len() < 2 {
        return invalid("need at least two times to fit the moment asymptotics");
    }
    let method = |s: &SubordinatorSpec| match s {
        SubordinatorSpec::Gamma { .. } => MomentMethod::ClosedForm,
        _ => MomentMethod::Quadrature,
    };
    let lt: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    for &t in t_grid {
        l1.push(frac_moment(sub, alpha, t, method(sub))?.value.ln());
        l2.push(frac_moment(sub, 2.0 * alpha, t, method(sub))?.value.ln());
    }
    let f1 = linear_fit(&lt, &l1);
    let rho = f1.slope / alpha;
    let k2 = (l2.iter().zip(&lt).map(|(y, x)| y - 2.0 * f1.slope * x).sum::<f64>() / lt.len() as f64).exp();
    Ok(AsymptoticSpec { rho, k1: f1.intercept.exp(), k2 })
}

/// Which covariance is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CorrMode {
    /// Corr(Z(s), Z(t)).
    Process,
    /// Corr(Z(s+h) − Z(s), Z(t+h) − Z(t)).
    Increment { h: f64 },
}

/// Result of a log-log correlation decay fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// γ in Corr ~ c(s)·t^{−γ}.
    pub exponent: f64,
    pub c_s: f64,
    pub fit_r2: f64,
    pub t_grid: Vec<f64>,
    pub corr: Vec<f64>,
    pub exact: bool,
}

/// Cov(Z(s), Z(t)) of the time-changed GFSP.
pub fn covariance(rates: &RateSpec, alpha: f64, tc: &TimeChange, s: f64, t: f64, mc: &McConfig) -> Result<f64> {
    Ok(moments_summary(rates, alpha, tc, s, t, mc)?.cov_st)
}

struct GammaClock {
    a: f64,
    b: f64,
    alpha: f64,
}

impl GammaClock {
    fn ln_e1(&self, x: f64) -> f64 {
        ln_gamma_ratio(self.b * x, self.alpha) - self.alpha * self.a.ln()
    }

    fn e2(&self, x: f64) -> f64 {
        (ln_gamma_ratio(self.b * x, 2.0 * self.alpha) - 2.0 * self.alpha * self.a.ln()).exp()
    }

    /// E Z^α(x+h) − E Z^α(x) without cancellation.
    fn delta_e1(&self, x: f64, h: f64) -> f64 {
        let l = self.ln_e1(x);
        l.exp() * (self.ln_e1(x + h) - l).exp_m1()
    }
}

/// Increment covariance under the gamma clock (a, b), with s + h ≤ t.
/// Returns (Cov(S_h(s), S_h(t)), Var S_h(s), Var S_h(t)).
///
/// The l₂ and d terms of the four process covariances cancel exactly and
/// are removed before evaluation; what remains is
/// −l₁²ΔE(s)ΔE(t) + l₁²α∫w(u)[E₂(t+h)(I_u(bs, b(t+h−s)) − I_u(b(s+h), b(t−s)))
///   − E₂(t)(I_u(bs, b(t−s)) − I_u(b(s+h), b(t−s−h)))] du
/// with w(u) = u^{α−1}(1−u)^α and I the regularized incomplete beta.
pub fn increment_covariance(
    rates: &RateSpec,
    alpha: f64,
    a: f64,
    b: f64,
    s: f64,
    t: f64,
    h: f64,
) -> Result<(f64, f64, f64)> {
    rates.validate()?;
    if !(h > 0.0 && s > 0.0 && s + h <= t) {
        return invalid(format!("increment covariance needs h > 0 and 0 < s, s + h <= t (s={s}, t={t}, h={h})"));
    }
    let k = DerivedConstants::new(rates, alpha);
    let g = GammaClock { a, b, alpha };
    let l1sq = k.l1 * k.l1;
    let var = |x: f64| -> Result<f64> {
        let de = g.delta_e1(x, h);
        let (p, q) = (b * x, b * h);
        let j = beta_weight_integral(alpha, &[beta_mark(p, q)], |u| beta_reg(p, q, u))?;
        Ok(k.l2 * de - l1sq * de * de + 2.0 * l1sq * alpha * g.e2(x + h) * j)
    };
    let (e2th, e2t) = (g.e2(t + h), g.e2(t));
    let marks = [
        beta_mark(b * s, b * (t + h - s)),
        beta_mark(b * (s + h), b * (t - s)),
        beta_mark(b * s, b * (t - s)),
    ];
    let tail_sh = t - s - h;
    let j = beta_weight_integral(alpha, &marks, |u| {
        let first = beta_reg(b * s, b * (t + h - s), u) - beta_reg(b * (s + h), b * (t - s), u);
        let last = if tail_sh > 0.0 { beta_reg(b * (s + h), b * tail_sh, u) } else { 1.0 };
        let second = beta_reg(b * s, b * (t - s), u) - last;
        e2th * first - e2t * second
    })?;
    let cov = -l1sq * g.delta_e1(s, h) * g.delta_e1(t, h) + l1sq * alpha * j;
    Ok((cov, var(s)?, var(t)?))
}

fn check_grid(t_grid: &[f64], s: f64) -> Result<()> {
    if t_grid.len() < 3 {
        return invalid("t_grid needs at least three points");
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("t_grid must be strictly increasing");
    }
    if t_grid[0] < s {
        return invalid(format!("t_grid must start at or after s = {s}"));
    }
    let decades = (t_grid[t_grid.len() - 1] / t_grid[0]).log10();
    if decades < 1.5 {
        return invalid(format!("t_grid spans {decades:.2} decades, at least 1.5 are required"));
    }
    Ok(())
}

/// Fits log|Corr| against log t and reports the decay exponent.
///
/// Correlations are exact for the gamma clock and no time change, and from
/// joint-path Monte Carlo otherwise. Increment mode needs the gamma clock.
/// Non-monotone correlations or r² < 0.95 give a fit-quality error.
pub fn corr_decay_fit(
    rates: &RateSpec,
    alpha: f64,
    tc: &TimeChange,
    s_fixed: f64,
    t_grid: &[f64],
    mode: CorrMode,
    mc: &McConfig,
) -> Result<DecayFit> {
    rates.validate()?;
    let mut exact = true;
    let corr: Vec<f64> = match mode {
        CorrMode::Process => {
            check_grid(t_grid, s_fixed)?;
            let vs = moments_summary(rates, alpha, tc, s_fixed, s_fixed, mc)?.var_t;
            t_grid
                .iter()
                .map(|&t| {
                    let m = moments_summary(rates, alpha, tc, s_fixed, t, mc)?;
                    exact &= m.exact;
                    Ok(m.cov_st / (vs * m.var_t).sqrt())
                })
                .collect::<Result<_>>()?
        }
        CorrMode::Increment { h } => {
            let TimeChange::Subordinator(SubordinatorSpec::Gamma { a, b }) = *tc else {
                return invalid("increment mode is implemented for the gamma clock");
            };
            check_grid(t_grid, s_fixed + h)?;
            t_grid
                .iter()
                .map(|&t| {
                    let (c, vs, vt) = increment_covariance(rates, alpha, a, b, s_fixed, t, h)?;
                    Ok(c / (vs * vt).sqrt())
                })
                .collect::<Result<_>>()?
        }
    };
    let mags: Vec<f64> = corr.iter().map(|c| c.abs()).collect();
    if mags.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::FitQuality("correlation vanished or is not finite on the grid".into()));
    }
    if mags.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-9)) {
        return Err(Error::FitQuality("correlations are not monotone in t".into()));
    }
    let lx: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = mags.iter().map(|c| c.ln()).collect();
    let fit = linear_fit(&lx, &ly);
    if fit.r2 < 0.95 {
        return Err(Error::FitQuality(format!("fit r² = {:.4} < 0.95", fit.r2)));
    }
    Ok(DecayFit { exponent: -fit.slope, c_s: fit.intercept.exp(), fit_r2: fit.r2, t_grid: t_grid.to_vec(), corr, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::geomspace;

    fn gamma11() -> TimeChange {
        TimeChange::Subordinator(SubordinatorSpec::Gamma { a: 1.0, b: 1.0 })
    }

    #[test]
    fn increment_covariance_matches_process_covariances() {
        // moderate t, where the four-term difference is still accurate
        let r = RateSpec::skellam(2.0, 1.0);
        let mc = McConfig::default();
        let (alpha, s, t, h) = (0.6, 1.0, 4.0, 1.0);
        let c = |x: f64, y: f64| covariance(&r, alpha, &gamma11(), x, y, &mc).unwrap();
        let four = c(s + h, t + h) - c(s + h, t) - c(s, t + h) + c(s, t);
        let (cov, vs, vt) = increment_covariance(&r, alpha, 1.0, 1.0, s, t, h).unwrap();
        assert!((cov - four).abs() < 1e-9 * four.abs().max(1.0), "{cov} vs {four}");
        let var_s = c(s + h, s + h) - 2.0 * c(s, s + h) + c(s, s);
        assert!((vs - var_s).abs() < 1e-9 * var_s);
        let var_t = c(t + h, t + h) - 2.0 * c(t, t + h) + c(t, t);
        assert!((vt - var_t).abs() < 1e-9 * var_t);
    }

    #[test]
    fn lrd_exponents_for_gamma_clock() {
        let r = RateSpec::skellam(5.0, 1.0);
        let grid = geomspace(10.0, 1000.0, 25);
        let mc = McConfig::default();
        for (alpha, want) in [(0.5, 0.482), (0.7, 0.671)] {
            let f = corr_decay_fit(&r, alpha, &gamma11(), 1.0, &grid, CorrMode::Process, &mc).unwrap();
            assert!((f.exponent - want).abs() < 5e-3, "alpha={alpha}: {}", f.exponent);
            assert!(f.fit_r2 > 0.99 && f.exact);
        }
    }

    #[test]
    fn srd_exponent_for_gamma_increments() {
        let r = RateSpec::skellam(5.0, 1.0);
        let grid = geomspace(10.0, 1000.0, 25);
        let f = corr_decay_fit(&r, 0.6, &gamma11(), 1.0, &grid, CorrMode::Increment { h: 1.0 }, &McConfig::default())
            .unwrap();
        assert!((f.exponent - 1.216).abs() < 0.01, "{}", f.exponent);
        assert!(f.fit_r2 > 0.999);
    }

    #[test]
    fn gfsp_is_long_range_dependent() {
        let r = RateSpec::skellam(2.0, 1.0);
        let grid = geomspace(10.0, 1000.0, 20);
        let f = corr_decay_fit(&r, 0.5, &TimeChange::None, 1.0, &grid, CorrMode::Process, &McConfig::default()).unwrap();
        assert!(f.exponent > 0.0 && f.exponent < 1.0, "{}", f.exponent);
    }

    #[test]
    fn grid_requirements() {
        let r = RateSpec::skellam(2.0, 1.0);
        let mc = McConfig::default();
        let short = geomspace(10.0, 100.0, 10);
        assert!(corr_decay_fit(&r, 0.5, &gamma11(), 1.0, &short, CorrMode::Process, &mc).is_err());
        let grid = geomspace(10.0, 1000.0, 10);
        let e = corr_decay_fit(&r, 0.5, &TimeChange::None, 1.0, &grid, CorrMode::Increment { h: 1.0 }, &mc);
        assert!(e.is_err());
    }

    #[test]
    fn gamma_moment_asymptotics() {
        let g = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
        let f = fit_asymptotic(&g, 0.6, &geomspace(100.0, 10_000.0, 20)).unwrap();
        assert!((f.rho - 1.0).abs() < 0.01, "{f:?}");
        assert!(f.hypothesis_holds(1e-2));
    }
}
