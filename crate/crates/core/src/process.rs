//! Counting and Skellam processes and their time-changed variants.
//!
//! Hierarchy: GCP → GSP (difference of two GCPs) → GFSP (inverse stable
//! clock of order α) → TCGFSP-I (Lévy subordinator outside) or TCGFSP-II
//! (inverse subordinator outside). α = 1 drops the inverse stable layer.

use crate::error::{invalid, Result};
use crate::mc::McConfig;
use crate::subordinate::{inverse_sample_path, inverse_stable_sample, sample_at, SubordinatorSpec};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

/// Jump rates λ₁..λ_k (up-jumps of size j) and μ₁..μ_k (down-jumps of size j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSpec {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl RateSpec {
    pub fn new(lambda: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        let r = RateSpec { lambda, mu };
        r.validate()?;
        Ok(r)
    }

    /// k = 1 Skellam rates.
    pub fn skellam(lambda: f64, mu: f64) -> Self {
        RateSpec { lambda: vec![lambda], mu: vec![mu] }
    }

    /// Order-k rates with λⱼ = λ, μⱼ = μ.
    pub fn uniform(k: usize, lambda: f64, mu: f64) -> Self {
        RateSpec { lambda: vec![lambda; k], mu: vec![mu; k] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_empty() || self.lambda.len() != self.mu.len() {
            return invalid(format!(
                "rate families must be non-empty and equally long (got {} and {})",
                self.lambda.len(),
                self.mu.len()
            ));
        }
        if self.lambda.iter().chain(&self.mu).any(|r| !(*r > 0.0) || !r.is_finite()) {
            return invalid("all jump rates must be finite and strictly positive");
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.lambda.len()
    }

    /// Λ = Σ λⱼ.
    pub fn lambda_total(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Λ̄ = Σ μⱼ.
    pub fn mu_total(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// m₁ = Σ j(λⱼ − μⱼ).
    pub fn m1(&self) -> f64 {
        self.lambda.iter().zip(&self.mu).enumerate().map(|(i, (l, m))| (i + 1) as f64 * l - (i + 1) as f64 * m).sum()
    }

    /// m₂ = Σ j²(λⱼ + μⱼ).
    pub fn m2(&self) -> f64 {
        self.lambda.iter().zip(&self.mu).enumerate().map(|(i, (l, m))| ((i + 1) * (i + 1)) as f64 * (l + m)).sum()
    }

    /// Rates with the two families exchanged (S ↦ −S).
    pub fn swapped(&self) -> Self {
        RateSpec { lambda: self.mu.clone(), mu: self.lambda.clone() }
    }
}

/// Outer time change applied to the (fractional) Skellam process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "clock", rename_all = "snake_case")]
pub enum TimeChange {
    None,
    Subordinator(SubordinatorSpec),
    InverseSubordinator(SubordinatorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub rates: RateSpec,
    /// Order of the inverse stable layer; 1 means no layer.
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "no_time_change")]
    pub time_change: TimeChange,
}

fn one() -> f64 {
    1.0
}

fn no_time_change() -> TimeChange {
    TimeChange::None
}

impl ProcessSpec {
    pub fn gsp(rates: RateSpec) -> Self {
        ProcessSpec { rates, alpha: 1.0, time_change: TimeChange::None }
    }

    pub fn validate(&self) -> Result<()> {
        self.rates.validate()?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return invalid(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        match self.time_change {
            TimeChange::None => Ok(()),
            TimeChange::Subordinator(s) | TimeChange::InverseSubordinator(s) => s.validate(),
        }
    }

    /// Short label (GSP, GFSP, TCGSP-I, TCGFSP-II, …).
    pub fn label(&self) -> &'static str {
        let frac = self.alpha < 1.0;
        match (self.time_change, frac) {
            (TimeChange::None, false) => "GSP",
            (TimeChange::None, true) => "GFSP",
            (TimeChange::Subordinator(_), false) => "TCGSP-I",
            (TimeChange::Subordinator(_), true) => "TCGFSP-I",
            (TimeChange::InverseSubordinator(_), false) => "TCGSP-II",
            (TimeChange::InverseSubordinator(_), true) => "TCGFSP-II",
        }
    }
}

/// Integer-valued path on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkellamPath {
    pub grid: Vec<f64>,
    pub values: Vec<i64>,
}

/// GSP simulation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Two independent counting processes, subtracted.
    Difference,
    /// One compound Poisson stream of ±j jumps at rate Λ + Λ̄.
    Compound,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return invalid("times must be finite and nonnegative");
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return invalid("times must be nondecreasing");
    }
    Ok(())
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Event-driven compound Poisson walk evaluated at nondecreasing times.
/// `jumps[i]` occurs with probability `weights[i] / total`.
fn compound_walk<R: Rng + ?Sized>(jumps: &[i64], weights: &[f64], times: &[f64], rng: &mut R) -> Vec<i64> {
    let total: f64 = weights.iter().sum();
    let mut cum = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w / total;
        cum.push(acc);
    }
    let mut out = Vec::with_capacity(times.len());
    let mut clock = 0.0;
    let mut value = 0i64;
    let mut next = clock + exp1(rng) / total;
    for &t in times {
        while next <= t {
            let u: f64 = rng.random();
            let idx = cum.iter().position(|c| u < *c).unwrap_or(jumps.len() - 1);
            value += jumps[idx];
            clock = next;
            next = clock + exp1(rng) / total;
        }
        out.push(value);
    }
    out
}

/// Generalized counting process: jumps of size j at rate λⱼ.
pub fn sample_gcp<R: Rng + ?Sized>(rates: &[f64], grid: &[f64], rng: &mut R) -> Result<SkellamPath> {
    if rates.is_empty() || rates.iter().any(|r| !(*r > 0.0)) {
        return invalid("counting rates must be non-empty and positive");
    }
    check_times(grid)?;
    let jumps: Vec<i64> = (1..=rates.len() as i64).collect();
    Ok(SkellamPath { grid: grid.to_vec(), values: compound_walk(&jumps, rates, grid, rng) })
}

/// GSP at nondecreasing times in the compound representation.
pub fn gsp_at_times<R: Rng + ?Sized>(rates: &RateSpec, times: &[f64], rng: &mut R) -> Vec<i64> {
    let k = rates.k() as i64;
    let mut jumps: Vec<i64> = (1..=k).collect();
    jumps.extend((1..=k).map(|j| -j));
    let mut w = rates.lambda.clone();
    w.extend_from_slice(&rates.mu);
    compound_walk(&jumps, &w, times, rng)
}

/// Generalized Skellam process path.
pub fn sample_gsp<R: Rng + ?Sized>(
    rates: &RateSpec,
    grid: &[f64],
    rng: &mut R,
    representation: Representation,
) -> Result<SkellamPath> {
    rates.validate()?;
    check_times(grid)?;
    let values = match representation {
        Representation::Compound => gsp_at_times(rates, grid, rng),
        Representation::Difference => {
            let up = sample_gcp(&rates.lambda, grid, rng)?;
            let down = sample_gcp(&rates.mu, grid, rng)?;
            up.values.iter().zip(&down.values).map(|(a, b)| a - b).collect()
        }
    };
    Ok(SkellamPath { grid: grid.to_vec(), values })
}

/// One composed realization with its operational clock.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessDraw {
    pub path: SkellamPath,
    /// Outer clock values at the target times.
    pub outer: Vec<f64>,
    /// Operational times fed to the GSP.
    pub operational: Vec<f64>,
}

/// Subordinator values at nondecreasing times (independent increments).
fn subordinator_at<R: Rng + ?Sized>(spec: &SubordinatorSpec, times: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let (mut prev_t, mut acc) = (0.0, 0.0);
    for &t in times {
        if t > prev_t {
            acc += sample_at(spec, t - prev_t, rng)?;
            prev_t = t;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Draws one realization of the process at `target_times`, layer by layer.
pub fn sample_process_detailed<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    target_times: &[f64],
    rng: &mut R,
    mc_nested: &McConfig,
) -> Result<ProcessDraw> {
    spec.validate()?;
    check_times(target_times)?;
    let outer = match spec.time_change {
        TimeChange::None => target_times.to_vec(),
        TimeChange::Subordinator(s) => subordinator_at(&s, target_times, rng)?,
        TimeChange::InverseSubordinator(s) => inverse_sample_path(&s, target_times, mc_nested.dt, rng)?.values,
    };
    let operational = if spec.alpha < 1.0 {
        if outer.len() == 1 {
            vec![inverse_stable_sample(spec.alpha, outer[0], rng)]
        } else {
            let cmax = outer.iter().cloned().fold(0.0, f64::max);
            let dt = mc_nested.dt * cmax.powf(spec.alpha).max(1e-300);
            let stable = SubordinatorSpec::Stable { alpha: spec.alpha };
            inverse_sample_path(&stable, &outer, dt, rng)?.values
        }
    } else {
        outer.clone()
    };
    let values = gsp_at_times(&spec.rates, &operational, rng);
    Ok(ProcessDraw { path: SkellamPath { grid: target_times.to_vec(), values }, outer, operational })
}

/// One realization of the process at `target_times`.
pub fn sample_process<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    target_times: &[f64],
    rng: &mut R,
    mc_nested: &McConfig,
) -> Result<SkellamPath> {
    Ok(sample_process_detailed(spec, target_times, rng, mc_nested)?.path)
}

/// Terminal values of `n` independent paths at time t (parallel, reproducible).
pub fn sample_terminal(spec: &ProcessSpec, t: f64, mc: &McConfig) -> Result<Vec<i64>> {
    crate::mc::par_collect(mc.n_paths, mc.seed, |rng, _| Ok(sample_process(spec, &[t], rng, mc)?.values[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{chunk_rng, par_welford};

    #[test]
    fn aggregates() {
        let r = RateSpec::new(vec![1.0, 2.0, 0.5], vec![0.3, 0.4, 0.2]).unwrap();
        assert!((r.lambda_total() - 3.5).abs() < 1e-15);
        assert!((r.m1() - (1.0 * 0.7 + 2.0 * 1.6 + 3.0 * 0.3)).abs() < 1e-14);
        assert!((r.m2() - (1.3 + 4.0 * 2.4 + 9.0 * 0.7)).abs() < 1e-14);
        assert!(RateSpec::new(vec![1.0], vec![0.0]).is_err());
        assert!(RateSpec::new(vec![1.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn gcp_means() {
        // k = 1 is Poisson; k = 2 with λ = (1,1) has mean 3t
        let w = par_welford(200_000, 1, |r| Ok(sample_gcp(&[2.0], &[0.0, 1.5], r)?.values[1] as f64)).unwrap();
        assert!((w.mean - 3.0).abs() < 3.0 * w.se());
        let w = par_welford(200_000, 2, |r| Ok(sample_gcp(&[1.0, 1.0], &[1.0], r)?.values[0] as f64)).unwrap();
        assert!((w.mean - 3.0).abs() < 3.0 * w.se());
        let mut rng = chunk_rng(0, 0);
        let p = sample_gcp(&[1.0, 3.0], &[0.0, 0.5, 1.0, 2.0], &mut rng).unwrap();
        assert_eq!(p.values[0], 0);
        assert!(p.values.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn tiny_down_rates_give_no_negative_values() {
        let rates = RateSpec::new(vec![1.0, 1.0], vec![1e-12, 1e-12]).unwrap();
        let mut rng = chunk_rng(3, 0);
        for _ in 0..100_000 {
            let p = sample_gsp(&rates, &[1.0], &mut rng, Representation::Compound).unwrap();
            assert!(p.values[0] >= 0);
        }
    }

    #[test]
    fn clocks_are_monotone() {
        let mc = McConfig { n_paths: 1, dt: 1e-3, seed: 0 };
        let times = [0.0, 0.2, 0.5, 0.5, 1.0, 2.0];
        let mut rng = chunk_rng(8, 0);
        for tc in [
            TimeChange::None,
            TimeChange::Subordinator(SubordinatorSpec::Gamma { a: 1.0, b: 1.0 }),
            TimeChange::InverseSubordinator(SubordinatorSpec::InverseGaussian { delta: 1.0, gam: 1.0 }),
        ] {
            for alpha in [1.0, 0.6] {
                let spec = ProcessSpec { rates: RateSpec::skellam(2.0, 1.0), alpha, time_change: tc };
                for _ in 0..50 {
                    let d = sample_process_detailed(&spec, &times, &mut rng, &mc).unwrap();
                    assert!(d.operational.windows(2).all(|w| w[1] >= w[0]));
                    assert!(d.outer.windows(2).all(|w| w[1] >= w[0]));
                    assert_eq!(d.path.values[0], 0);
                }
            }
        }
    }

    #[test]
    fn plain_spec_is_the_gsp_sampler() {
        let spec = ProcessSpec::gsp(RateSpec::skellam(1.0, 2.0));
        let mc = McConfig::default();
        let times = [0.1, 0.7, 1.3];
        let a = sample_process(&spec, &times, &mut chunk_rng(4, 4), &mc).unwrap();
        let b = sample_gsp(&spec.rates, &times, &mut chunk_rng(4, 4), Representation::Compound).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tcgsp1_gamma_mean_is_wald() {
        let rates = RateSpec::new(vec![1.5, 0.5], vec![0.7, 0.2]).unwrap();
        let spec = ProcessSpec {
            rates: rates.clone(),
            alpha: 1.0,
            time_change: TimeChange::Subordinator(SubordinatorSpec::Gamma { a: 1.0, b: 1.0 }),
        };
        let mc = McConfig { n_paths: 200_000, dt: 1e-3, seed: 17 };
        let w = par_welford(mc.n_paths, mc.seed, |r| Ok(sample_process(&spec, &[2.0], r, &mc)?.values[0] as f64)).unwrap();
        assert!((w.mean - rates.m1() * 2.0).abs() < 3.0 * w.se());
    }

    #[test]
    fn law_of_large_numbers() {
        let rates = RateSpec::new(vec![2.0, 1.0], vec![1.0, 0.5]).unwrap();
        let w = par_welford(2_000, 5, |r| {
            Ok(sample_gsp(&rates, &[200.0], r, Representation::Compound)?.values[0] as f64 / 200.0)
        })
        .unwrap();
        assert!((w.mean - rates.m1()).abs() < 0.05);
        assert!(w.var().sqrt() < 0.25);
    }

    #[test]
    fn labels() {
        let r = RateSpec::skellam(1.0, 1.0);
        let g = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
        assert_eq!(ProcessSpec::gsp(r.clone()).label(), "GSP");
        assert_eq!(ProcessSpec { rates: r.clone(), alpha: 0.5, time_change: TimeChange::Subordinator(g) }.label(), "TCGFSP-I");
        assert_eq!(ProcessSpec { rates: r, alpha: 1.0, time_change: TimeChange::InverseSubordinator(g) }.label(), "TCGSP-II");
    }
}
