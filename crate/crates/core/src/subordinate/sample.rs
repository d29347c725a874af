use super::{zolotarev_a, MomentEstimate, MomentMethod, SubordinatorSpec};
use crate::error::{invalid, Error, Result};
use crate::mc::{par_welford, McConfig};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Rejection cap for the tempered stable sampler, per piece.
pub const TSS_MAX_ITER: usize = 1_000_000;
/// Upper limit on operational-time steps in one inverse path.
pub const INVERSE_MAX_STEPS: u64 = 200_000_000;

/// A clock path: nondecreasing values on a time grid, value 0 at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Unit stable draw with E e^{−sD} = e^{−s^α} (Kanter's representation).
pub fn stable_unit<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let mut u = 0.0;
    while u == 0.0 {
        u = rng.random::<f64>() * PI;
    }
    let e: f64 = Exp1.sample(rng);
    (zolotarev_a(alpha, u) / e).powf((1.0 - alpha) / alpha)
}

fn inverse_gaussian<R: Rng + ?Sized>(mu: f64, lambda: f64, rng: &mut R) -> f64 {
    let nu: f64 = StandardNormal.sample(rng);
    let y = nu * nu;
    // larger root first; the smaller one is μ²/x₂ (no cancellation)
    let x2 = mu + mu * mu * y / (2.0 * lambda) + mu / (2.0 * lambda) * (4.0 * mu * lambda * y + mu * mu * y * y).sqrt();
    let x1 = mu * mu / x2;
    if rng.random::<f64>() <= mu / (mu + x1) {
        x1
    } else {
        x2
    }
}

fn tempered_stable<R: Rng + ?Sized>(eta: f64, theta: f64, t: f64, rng: &mut R) -> Result<f64> {
    // split so that each piece accepts with probability e^{−t_p η^θ} ≥ 1/2
    let load = t * eta.powf(theta);
    let pieces = (load / std::f64::consts::LN_2).ceil().max(1.0) as usize;
    let tp = t / pieces as f64;
    let scale = tp.powf(1.0 / theta);
    let mut total = 0.0;
    for _ in 0..pieces {
        let mut accepted = false;
        for _ in 0..TSS_MAX_ITER {
            let x = scale * stable_unit(theta, rng);
            if rng.random::<f64>() < (-eta * x).exp() {
                total += x;
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::SamplerFailure { iterations: TSS_MAX_ITER });
        }
    }
    Ok(total)
}

/// Exact draw of D_f(t).
pub fn sample_at<R: Rng + ?Sized>(spec: &SubordinatorSpec, t: f64, rng: &mut R) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return invalid(format!("sample_at: need finite t >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    match *spec {
        SubordinatorSpec::Stable { alpha } => Ok(t.powf(1.0 / alpha) * stable_unit(alpha, rng)),
        SubordinatorSpec::Gamma { a, b } => {
            let g = Gamma::new(b * t, 1.0 / a).map_err(|e| Error::InvalidInput(e.to_string()))?;
            Ok(g.sample(rng))
        }
        SubordinatorSpec::TemperedStable { eta, theta } => tempered_stable(eta, theta, t, rng),
        SubordinatorSpec::InverseGaussian { delta, gam } => Ok(inverse_gaussian(delta * t / gam, delta * delta * t * t, rng)),
    }
}

fn check_grid(grid: &[f64], from_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return invalid("empty time grid");
    }
    if from_zero && grid[0] != 0.0 {
        return invalid(format!("grid must start at 0, starts at {}", grid[0]));
    }
    if grid[0] < 0.0 || !grid.iter().all(|x| x.is_finite()) {
        return invalid("grid values must be finite and nonnegative");
    }
    Ok(())
}

/// Subordinator path with independent increments per grid cell.
pub fn sample_path<R: Rng + ?Sized>(spec: &SubordinatorSpec, grid: &[f64], rng: &mut R) -> Result<PathSample> {
    check_grid(grid, true)?;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("grid must be strictly increasing");
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    values.push(0.0);
    for w in grid.windows(2) {
        acc += sample_at(spec, w[1] - w[0], rng)?;
        values.push(acc);
    }
    Ok(PathSample { grid: grid.to_vec(), values })
}

/// First-passage clock H_f(t) = inf{x : D_f(x) > t} at each target time.
///
/// D_f is simulated on operational steps of size `dt` and H is linearly
/// interpolated inside the crossing cell, so H(0) = 0 and the output is
/// nondecreasing. The discretization bias is O(dt).
pub fn inverse_sample_path<R: Rng + ?Sized>(
    spec: &SubordinatorSpec,
    target_times: &[f64],
    dt: f64,
    rng: &mut R,
) -> Result<PathSample> {
    check_grid(target_times, false)?;
    if target_times.windows(2).any(|w| w[1] < w[0]) {
        return invalid("target times must be nondecreasing");
    }
    if !(dt > 0.0) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    let mut k: u64 = 0;
    let mut d0 = 0.0;
    let mut d1 = sample_at(spec, dt, rng)?;
    let mut values = Vec::with_capacity(target_times.len());
    for &tau in target_times {
        if tau == 0.0 {
            // D_f leaves 0 immediately; underflowed increments must not move H(0)
            values.push(0.0);
            continue;
        }
        while d1 <= tau {
            k += 1;
            if k > INVERSE_MAX_STEPS {
                return Err(Error::SamplerFailure { iterations: k as usize });
            }
            d0 = d1;
            d1 = d0 + sample_at(spec, dt, rng)?;
        }
        let frac = if d1 > d0 { (tau - d0) / (d1 - d0) } else { 0.0 };
        values.push((k as f64 + frac.clamp(0.0, 1.0)) * dt);
    }
    Ok(PathSample { grid: target_times.to_vec(), values })
}

/// Exact draw of the inverse stable clock Y_α(t) = (t / D_α(1))^α.
pub fn inverse_stable_sample<R: Rng + ?Sized>(alpha: f64, t: f64, rng: &mut R) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (t / stable_unit(alpha, rng)).powf(alpha)
}

/// Monte Carlo E[H_f(t)^order] over `inverse_sample_path` draws.
pub fn inverse_frac_moment(spec: &SubordinatorSpec, order: f64, t: f64, mc: &McConfig) -> Result<MomentEstimate> {
    spec.validate()?;
    mc.validate()?;
    let method = MomentMethod::MonteCarlo { n: mc.n_paths, seed: mc.seed };
    if t == 0.0 {
        return Ok(MomentEstimate { value: 0.0, error: 0.0, method, warning: None });
    }
    let w = par_welford(mc.n_paths, mc.seed, |rng| {
        let p = inverse_sample_path(spec, &[t], mc.dt, rng)?;
        Ok(p.values[0].powf(order))
    })?;
    Ok(MomentEstimate { value: w.mean, error: w.se(), method, warning: None })
}
