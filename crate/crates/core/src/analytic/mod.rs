//! Closed-form evaluators: state probabilities, generating functions,
//! factorial and raw moments, covariances and dependence exponents.

mod dependence;
mod generating;
mod moments;
mod pmf;

pub use dependence::{
    corr_decay_fit, covariance, fit_asymptotic, increment_covariance, AsymptoticSpec, CorrMode, DecayFit,
};
pub use generating::{
    gfsp_mgf, gfsp_pgf, gsp_pgf, mgf_exponent, pgf_derivative, pgf_exponent, richardson_derivative,
    tcgfsp1_mgf, tcgfsp1_pgf, tcgfsp2_pgf, tcgsp1_mgf_closed, tcgsp1_pgf_closed,
};
pub use moments::{
    clock_moment, factorial_moment, factorial_moments, moments_summary, overdispersion, raw_moment, raw_moments,
    MomentsSummary, MAX_ORDER,
};
pub use pmf::{
    gfsp_pmf, gfsp_pmf_ml_series, gfsp_pmf_table, gsp_pmf, gsp_pmf_table, mixture_weights_gamma, pmf_table,
    poisson_pmf, skellam_pmf, tcgsp1_pmf, tcgsp1_pmf_quadrature, tcgsp1_pmf_table, tcgsp2_pmf_table, tilted_moment,
    MWrightRule, MixtureWeights,
};
pub(crate) use pmf::gfsp_pmf_table_with;

use crate::process::RateSpec;
use crate::specfun::{beta, gamma};
use serde::{Deserialize, Serialize};

/// l₁ = m₁/Γ(1+α), l₂ = m₂/Γ(1+α), d = α·l₁²·B(α, 1+α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub l1: f64,
    pub l2: f64,
    pub d: f64,
}

impl DerivedConstants {
    pub fn new(rates: &RateSpec, alpha: f64) -> Self {
        let g = gamma(1.0 + alpha);
        let l1 = rates.m1() / g;
        DerivedConstants { l1, l2: rates.m2() / g, d: alpha * l1 * l1 * beta(alpha, 1.0 + alpha) }
    }
}

/// Probabilities on the integer window [n_min, n_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfTable {
    pub t: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub probs: Vec<f64>,
    /// Certified upper bound on the mass outside the window.
    pub tail_mass_bound: f64,
}

impl PmfTable {
    pub fn get(&self, n: i64) -> f64 {
        if n < self.n_min || n > self.n_max {
            return 0.0;
        }
        self.probs[(n - self.n_min) as usize]
    }

    pub fn total(&self) -> f64 {
        crate::specfun::ksum(self.probs.iter().copied())
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, p)| (self.n_min + i as i64, *p))
    }

    pub fn mean(&self) -> f64 {
        crate::specfun::ksum(self.support().map(|(n, p)| n as f64 * p))
    }

    /// Σ uⁿ p(n) over the window.
    pub fn pgf(&self, u: f64) -> f64 {
        crate::specfun::ksum(self.support().map(|(n, p)| u.powi(n as i32) * p))
    }

    /// Drops edge cells below `eps`, moving their mass into the tail bound.
    pub(crate) fn trim(mut self, eps: f64) -> Self {
        let lo = self.probs.iter().position(|p| *p >= eps).unwrap_or(0);
        let hi = self.probs.iter().rposition(|p| *p >= eps).unwrap_or(self.probs.len().saturating_sub(1));
        if lo > hi {
            return self;
        }
        let dropped: f64 = self.probs[..lo].iter().chain(&self.probs[hi + 1..]).sum();
        self.probs = self.probs[lo..=hi].to_vec();
        self.n_max = self.n_min + hi as i64;
        self.n_min += lo as i64;
        self.tail_mass_bound += dropped;
        self
    }
}
