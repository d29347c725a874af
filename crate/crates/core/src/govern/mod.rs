//! Fractional derivative operators on uniform grids and residual checks of
//! the forward equations satisfied by the state probabilities.

mod residuals;

pub use residuals::{
    residual_gamma_shift, residual_gfsp_mgf_eigen, residual_gsp_system, residual_igs_pde, residual_tcgsp1_pgf_ode,
    residual_tcgsp2_generalized, residual_tss_integer, ShiftResiduals,
};

use crate::error::{invalid, Error, Result};
use crate::specfun::gamma;
use crate::subordinate::{integrated_tail, SubordinatorSpec};
use serde::{Deserialize, Serialize};

/// Residuals are reported from this time on; fractional kernels are
/// singular at the lower terminal.
pub const EPS: f64 = 0.05;

/// Minimum number of grid points accepted by the derivative operators.
pub const MIN_POINTS: usize = 16;

/// Values on the uniform grid t₀, t₀ + Δt, ... The fractional operators take
/// t₀ as the lower terminal of their integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFn {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl GridFn {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(t0 >= 0.0 && t0.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("grid needs t0 >= 0 and dt > 0, got t0={t0}, dt={dt}"));
        }
        Ok(GridFn { t0, dt, values })
    }

    pub fn sample<F: Fn(f64) -> f64>(t0: f64, dt: f64, n: usize, f: F) -> Result<Self> {
        let g = GridFn::new(t0, dt, Vec::new())?;
        let values = (0..n).map(|i| f(g.t(i))).collect();
        Ok(GridFn { values, ..g })
    }

    pub fn try_sample<F: Fn(f64) -> Result<f64>>(t0: f64, dt: f64, n: usize, f: F) -> Result<Self> {
        let g = GridFn::new(t0, dt, Vec::new())?;
        let values = (0..n).map(|i| f(g.t(i))).collect::<Result<_>>()?;
        Ok(GridFn { values, ..g })
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.t(i))
    }
}

/// Outcome of a residual check, normalized by the size of the right side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation_id: String,
    pub max_abs_residual: f64,
    /// max |right-hand side| over the checked cells.
    pub scale: f64,
    /// max_abs_residual / scale, or the absolute residual when the scale is 0.
    pub relative: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub dt: f64,
    pub cells: usize,
    /// Observed convergence ratio |r(Δt) − r(Δt/2)| / |r(Δt/2) − r(Δt/4)|;
    /// 4 for a second-order scheme.
    pub richardson_ratio: Option<f64>,
}

impl ResidualReport {
    /// Builds a report from (residual, rhs) pairs.
    pub(crate) fn from_cells(id: &str, cells: &[(f64, f64)], times: (f64, f64), dt: f64) -> Self {
        let max_abs = cells.iter().fold(0.0_f64, |m, c| m.max(c.0.abs()));
        let scale = cells.iter().fold(0.0_f64, |m, c| m.max(c.1.abs()));
        ResidualReport {
            equation_id: id.to_string(),
            max_abs_residual: max_abs,
            scale,
            relative: if scale > 0.0 { max_abs / scale } else { max_abs },
            t_min: times.0,
            t_max: times.1,
            dt,
            cells: cells.len(),
            richardson_ratio: None,
        }
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.relative.is_finite() && self.relative < threshold
    }
}

/// Σ_{j<i} (f_{j+1} − f_j)·w_{i−j}, the shared form of both product-integration schemes.
fn convolve_increments(f: &GridFn, w: &[f64]) -> Vec<f64> {
    let df: Vec<f64> = f.values.windows(2).map(|p| p[1] - p[0]).collect();
    let mut out = vec![f64::NAN; f.len()];
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let mut s = 0.0;
        for j in 0..i {
            s += df[j] * w[i - j];
        }
        *o = s;
    }
    out
}

fn check_points(f: &GridFn) -> Result<()> {
    if f.len() < MIN_POINTS {
        return invalid(format!("grid has {} points, at least {MIN_POINTS} are required", f.len()));
    }
    Ok(())
}

/// Caputo derivative of order α ∈ (0,1) by the L1 scheme, O(Δt^{2−α}) for
/// smooth functions. The value at t₀ is undefined and set to NaN.
pub fn caputo_derivative(f: &GridFn, alpha: f64) -> Result<GridFn> {
    check_points(f)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("Caputo order must lie in (0,1), got {alpha}"));
    }
    let c = f.dt.powf(-alpha) / gamma(2.0 - alpha);
    let e = 1.0 - alpha;
    let w: Vec<f64> = (0..f.len()).map(|m| if m == 0 { 0.0 } else { c * ((m as f64).powf(e) - (m as f64 - 1.0).powf(e)) }).collect();
    Ok(GridFn { t0: f.t0, dt: f.dt, values: convolve_increments(f, &w) })
}

/// ∫₀ᵗ f'(t − s) ν̄(s, ∞) ds by product integration: f' is piecewise constant
/// and the tail is integrated exactly through N(s) = ∫₀ˢ ν̄. For the stable
/// tail this is the L1 scheme. The value at t₀ is NaN.
pub fn generalized_caputo(f: &GridFn, sub: &SubordinatorSpec) -> Result<GridFn> {
    check_points(f)?;
    sub.validate()?;
    let n: Vec<f64> = (0..f.len()).map(|m| integrated_tail(sub, m as f64 * f.dt)).collect();
    let mut w = vec![0.0; f.len()];
    for m in 1..f.len() {
        w[m] = (n[m] - n[m - 1]) / f.dt;
        if !w[m].is_finite() {
            return Err(Error::Quadrature { estimate: w[m], error: f64::INFINITY });
        }
    }
    Ok(GridFn { t0: f.t0, dt: f.dt, values: convolve_increments(f, &w) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadConfig};
    use crate::specfun::{expint_e1, mittag_leffler, SeriesConfig};

    #[test]
    fn constant_has_zero_derivative() {
        let f = GridFn::sample(0.0, 0.01, 100, |_| 3.0).unwrap();
        let d = caputo_derivative(&f, 0.4).unwrap();
        assert!(d.values[1..].iter().all(|v| *v == 0.0));
        let g = generalized_caputo(&f, &SubordinatorSpec::Gamma { a: 1.0, b: 2.0 }).unwrap();
        assert!(g.values[1..].iter().all(|v| *v == 0.0));
        assert!(d.values[0].is_nan());
    }

    #[test]
    fn linear_function_is_exact() {
        let alpha = 0.3;
        let f = GridFn::sample(0.0, 0.01, 201, |t| t).unwrap();
        let d = caputo_derivative(&f, alpha).unwrap();
        for i in [1, 50, 200] {
            let t = f.t(i);
            let want = t.powf(1.0 - alpha) / gamma(2.0 - alpha);
            assert!((d.values[i] - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn mittag_leffler_eigenfunction() {
        let (alpha, c, dt) = (0.6, -0.8, 1e-3);
        let cfg = SeriesConfig::default();
        let f = GridFn::try_sample(0.0, dt, 2001, |t| mittag_leffler(alpha, 1.0, 1.0, c * t.powf(alpha), &cfg)).unwrap();
        let d = caputo_derivative(&f, alpha).unwrap();
        let mut worst: f64 = 0.0;
        for i in (EPS / dt) as usize..f.len() {
            worst = worst.max((d.values[i] - c * f.values[i]).abs());
        }
        assert!(worst < 1e-3 * c.abs(), "{worst}");
    }

    #[test]
    fn stable_tail_reproduces_caputo() {
        let alpha = 0.7;
        let f = GridFn::sample(0.0, 2e-3, 500, |t| t * t + t.powf(1.0 + alpha)).unwrap();
        let a = caputo_derivative(&f, alpha).unwrap();
        let b = generalized_caputo(&f, &SubordinatorSpec::Stable { alpha }).unwrap();
        for i in 1..f.len() {
            assert!((a.values[i] - b.values[i]).abs() < 1e-11 * a.values[i].abs().max(1.0));
        }
    }

    #[test]
    fn gamma_tail_on_linear_function() {
        let (a, b) = (2.0, 1.5);
        let f = GridFn::sample(0.0, 0.01, 101, |t| t).unwrap();
        let d = generalized_caputo(&f, &SubordinatorSpec::Gamma { a, b }).unwrap();
        let q = integrate(|s| b * expint_e1(a * s), 0.0, 1.0, QuadConfig::with_tol(1e-14, 1e-12)).unwrap();
        assert!((d.values[100] - q.value).abs() < 1e-10, "{} vs {}", d.values[100], q.value);
    }

    #[test]
    fn coarse_grid_rejected() {
        let f = GridFn::sample(0.0, 0.1, 8, |t| t).unwrap();
        assert!(caputo_derivative(&f, 0.5).is_err());
    }
}
