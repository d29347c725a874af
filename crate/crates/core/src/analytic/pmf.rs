//! State probabilities.
//!
//! Every time-changed law here is a mixture of compound Poisson laws: given
//! the operational time T, the number of jumps is Poisson(cT) with
//! c = Λ + Λ̄ and each jump is ±j with probability λⱼ/c, μⱼ/c. Tables are
//! built from the mixing weights w_N = P(Poisson(cT) = N).

use super::generating::mgf_exponent;
use super::PmfTable;
use crate::error::{invalid, Error, Result};
use crate::mc::McConfig;
use crate::process::{ProcessSpec, RateSpec, TimeChange};
use crate::quad::{GaussLegendre, QuadConfig};
use crate::specfun::{beta_reg, bessel_i_log, ln_gamma, mittag_leffler, KahanSum, SeriesConfig};
use crate::subordinate::{integrate_against_density, inverse_sample_path, mwright, SubordinatorSpec};

/// Cells below this are folded into the tail bound when tables are trimmed.
const TRIM: f64 = 1e-30;

/// Poisson(x) probability of n.
pub fn poisson_pmf(n: u64, x: f64) -> f64 {
    if x <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    (nf * x.ln() - x - ln_gamma(nf + 1.0)).exp()
}

/// Law of N₁ − N₂ with N₁ ~ Poisson(a), N₂ ~ Poisson(b):
/// e^{−(a+b)} (a/b)^{n/2} I_|n|(2√(ab)), evaluated in log space.
pub fn skellam_pmf(n: i64, a: f64, b: f64, cfg: &SeriesConfig) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return invalid(format!("skellam_pmf: need finite a, b >= 0, got ({a}, {b})"));
    }
    if b == 0.0 {
        return Ok(if n < 0 { 0.0 } else { poisson_pmf(n as u64, a) });
    }
    if a == 0.0 {
        return Ok(if n > 0 { 0.0 } else { poisson_pmf(n.unsigned_abs(), b) });
    }
    let ln = -(a + b) + 0.5 * n as f64 * (a.ln() - b.ln()) + bessel_i_log(n.abs(), 2.0 * (a * b).sqrt(), cfg)?;
    Ok(ln.exp())
}

/// P(S(t) = n) for the GSP.
///
/// For k = 1 this is the Skellam law with means λt and μt. For k ≥ 2 the
/// process is Σⱼ j·Xⱼ with independent Skellam(λⱼt, μⱼt) components and the
/// value is read from the exact convolution table.
pub fn gsp_pmf(rates: &RateSpec, n: i64, t: f64, cfg: &SeriesConfig) -> Result<f64> {
    rates.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return invalid(format!("gsp_pmf: need finite t >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if rates.k() == 1 {
        return skellam_pmf(n, rates.lambda[0] * t, rates.mu[0] * t, cfg);
    }
    Ok(gsp_pmf_table(rates, t, cfg)?.get(n))
}

/// Full GSP law at time t by convolving the j-scaled Skellam components.
pub fn gsp_pmf_table(rates: &RateSpec, t: f64, cfg: &SeriesConfig) -> Result<PmfTable> {
    rates.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return invalid(format!("gsp_pmf_table: need finite t > 0, got {t}"));
    }
    let mut off: i64 = 0;
    let mut acc = vec![1.0];
    for (i, (&l, &m)) in rates.lambda.iter().zip(&rates.mu).enumerate() {
        let j = (i + 1) as i64;
        let (a, b) = (l * t, m * t);
        let sd = (a + b).sqrt();
        let lo = (a - b - 12.0 * sd - 20.0).floor() as i64;
        let hi = (a - b + 12.0 * sd + 20.0).ceil() as i64;
        let comp: Vec<f64> = (lo..=hi).map(|x| skellam_pmf(x, a, b, cfg)).collect::<Result<_>>()?;
        let mut out = vec![0.0; acc.len() + (j as usize) * (comp.len() - 1)];
        for (p, &pa) in acc.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for (x, &pc) in comp.iter().enumerate() {
                out[p + j as usize * x] += pa * pc;
            }
        }
        acc = out;
        off += j * lo;
    }
    let n_max = off + acc.len() as i64 - 1;
    let table = PmfTable { t, n_min: off, n_max, probs: acc, tail_mass_bound: 0.0 };
    let mut table = table.trim(TRIM);
    let mean = rates.m1() * t;
    let var = rates.m2() * t;
    let cheb = chebyshev(mean, var, table.n_min, table.n_max);
    let chern = chernoff(|th| Some(t * mgf_exponent(rates, th)), table.n_min, table.n_max);
    table.tail_mass_bound += cheb.min(chern);
    Ok(table)
}

/// P(|X − mean| ≥ d) ≤ var/d² for the region outside [n_min, n_max].
fn chebyshev(mean: f64, var: f64, n_min: i64, n_max: i64) -> f64 {
    let d = (n_max as f64 + 1.0 - mean).min(mean - (n_min as f64 - 1.0));
    if d <= 0.0 {
        return 1.0;
    }
    (var / (d * d)).min(1.0)
}

/// Chernoff bound on P(X > n_max) + P(X < n_min) from a log-mgf.
pub(crate) fn chernoff<F: Fn(f64) -> Option<f64>>(log_mgf: F, n_min: i64, n_max: i64) -> f64 {
    let (up, lo) = (n_max as f64 + 1.0, n_min as f64 - 1.0);
    let mut best_up = 0.0f64;
    let mut best_lo = 0.0f64;
    for i in 0..400 {
        let th = 1e-4 * (2e5f64).powf(i as f64 / 399.0);
        if let Some(v) = log_mgf(th) {
            best_up = best_up.min(v - th * up);
        }
        if let Some(v) = log_mgf(-th) {
            best_lo = best_lo.min(v + th * lo);
        }
    }
    (best_up.exp() + best_lo.exp()).min(1.0)
}

/// Mixing weights w_N = P(Poisson(cT) = N), N = 0..len, and a bound on the
/// neglected mass Σ_{N ≥ len} w_N plus any quadrature error.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights {
    pub weights: Vec<f64>,
    pub tail: f64,
}

fn weight_cap(cfg: &SeriesConfig) -> usize {
    cfg.max_terms.min(20_000)
}

/// Negative binomial weights of the gamma clock: T = D(t), D gamma(a, b).
pub fn mixture_weights_gamma(a: f64, b: f64, c: f64, t: f64, cfg: &SeriesConfig) -> Result<MixtureWeights> {
    let r = b * t;
    let p = a / (a + c);
    let (lp, lq) = (p.ln(), (c / (a + c)).ln());
    let mean = r * c / a;
    let mut w = Vec::new();
    for n in 0..=weight_cap(cfg) {
        let nf = n as f64;
        w.push((ln_gamma(r + nf) - ln_gamma(r) - ln_gamma(nf + 1.0) + r * lp + nf * lq).exp());
        if nf > mean && n % 8 == 0 {
            // P(N > n) = I_{1−p}(n+1, r)
            let tail = beta_reg(nf + 1.0, r, 1.0 - p);
            if tail < 1e-17 {
                return Ok(MixtureWeights { weights: w, tail });
            }
        }
    }
    let tail = beta_reg(w.len() as f64, r, 1.0 - p);
    Ok(MixtureWeights { weights: w, tail })
}

/// Weights for a general subordinator clock, one quadrature per N.
fn mixture_weights_quadrature(sub: &SubordinatorSpec, c: f64, t: f64, cfg: &SeriesConfig) -> Result<MixtureWeights> {
    let qc = QuadConfig::with_tol(1e-17, 1e-10);
    let center = match *sub {
        SubordinatorSpec::Stable { alpha } => c * t.powf(1.0 / alpha),
        _ => c * sub.mean(t),
    };
    let mut w = Vec::new();
    let mut cum = KahanSum::new();
    let mut qerr = 0.0;
    for n in 0..=weight_cap(cfg).min(2_000) {
        let (v, e) = integrate_against_density(sub, t, |x| poisson_pmf(n as u64, c * x), qc)?;
        w.push(v.max(0.0));
        cum.add(v);
        qerr += e;
        if (n as f64) > 2.0 * center + 10.0 && (1.0 - cum.value() < 1e-13 || v < 1e-18) {
            break;
        }
    }
    Ok(MixtureWeights { weights: w, tail: (1.0 - cum.value()).max(0.0) + qerr })
}

/// Mixing weights from sampled operational times (Rao–Blackwellized).
fn mixture_weights_samples(samples: &[f64], c: f64, cfg: &SeriesConfig) -> MixtureWeights {
    let mut w = Vec::new();
    let mut cum = 0.0;
    let nf = samples.len() as f64;
    for n in 0..=weight_cap(cfg) {
        let v = samples.iter().map(|h| poisson_pmf(n as u64, c * h)).sum::<f64>() / nf;
        w.push(v);
        cum += v;
        if 1.0 - cum < 1e-14 {
            break;
        }
    }
    MixtureWeights { weights: w, tail: (1.0 - cum).max(0.0) }
}

/// Gauss–Legendre rule against the M-Wright density M_α, the law of the
/// inverse stable clock at time 1 (Y_α(t) = t^α Y_α(1) in law).
///
/// The nodes are fixed, so values computed from the rule are smooth in t.
#[derive(Debug, Clone, PartialEq)]
pub struct MWrightRule {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    /// Quadrature weight times M_α at each node.
    pub weights: Vec<f64>,
}

impl MWrightRule {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("M-Wright rule needs alpha in (0,1), got {alpha}"));
        }
        let m0 = mwright(alpha, 0.0)?;
        let mut ymax = 1.0;
        while mwright(alpha, ymax)? > 1e-22 * m0 && ymax < 500.0 {
            ymax += 0.5;
        }
        let gl = GaussLegendre::new(16);
        let panels = 64;
        let h = ymax / panels as f64;
        let mut nodes = Vec::with_capacity(16 * panels);
        let mut weights = Vec::with_capacity(16 * panels);
        for p in 0..panels {
            let (x, w) = gl.mapped(p as f64 * h, (p + 1) as f64 * h);
            for (xi, wi) in x.into_iter().zip(w) {
                weights.push(wi * mwright(alpha, xi)?);
                nodes.push(xi);
            }
        }
        Ok(MWrightRule { alpha, nodes, weights })
    }

    /// Σ weights, which should be 1 up to the rule error.
    pub fn mass(&self) -> f64 {
        crate::specfun::ksum(self.weights.iter().copied())
    }

    /// E g(Y_α(t)) by the rule.
    pub fn expect<G: Fn(f64) -> f64>(&self, t: f64, g: G) -> f64 {
        let s = t.powf(self.alpha);
        crate::specfun::ksum(self.nodes.iter().zip(&self.weights).map(|(y, w)| w * g(s * y)))
    }

    /// Mixing weights for T = Y_α(x).
    pub fn mixture_weights(&self, c: f64, x: f64, cfg: &SeriesConfig) -> MixtureWeights {
        let s = c * x.powf(self.alpha);
        let mass = self.mass();
        let mut w = Vec::new();
        let mut cum = KahanSum::new();
        // Poisson(c·x^α·y) probabilities per node, advanced by recurrence;
        // large means restart from the direct formula to avoid underflow
        let means: Vec<f64> = self.nodes.iter().map(|y| s * y).collect();
        let mut cur: Vec<f64> = means.iter().map(|m| (-m).exp()).collect();
        for n in 0..=weight_cap(cfg) {
            if n > 0 {
                for (p, m) in cur.iter_mut().zip(&means) {
                    *p = if *m < 600.0 { *p * m / n as f64 } else { poisson_pmf(n as u64, *m) };
                }
            }
            let v = crate::specfun::ksum(cur.iter().zip(&self.weights).map(|(p, w)| p * w));
            w.push(v);
            cum.add(v);
            if (n as f64) > s && mass - cum.value() < 1e-15 {
                break;
            }
        }
        MixtureWeights { weights: w, tail: (mass - cum.value()).max(0.0) + (1.0 - mass).abs() }
    }
}

/// Table Σ_N w_N π^{*N}(n) for the jump law π of the rates.
fn mixture_table(rates: &RateSpec, mw: &MixtureWeights, t: f64) -> PmfTable {
    let k = rates.k();
    let c = rates.lambda_total() + rates.mu_total();
    let mut jump = vec![0.0; 2 * k + 1];
    for j in 0..k {
        jump[k + j + 1] = rates.lambda[j] / c;
        jump[k - j - 1] = rates.mu[j] / c;
    }
    let nmax = mw.weights.len().saturating_sub(1);
    let half = k * nmax;
    let mut probs = vec![0.0; 2 * half + 1];
    // cur holds π^{*N} on [−kN, kN]
    let mut cur = vec![1.0];
    for (n, &w) in mw.weights.iter().enumerate() {
        let off = half - k * n;
        if w > 0.0 {
            for (i, p) in cur.iter().enumerate() {
                probs[off + i] += w * p;
            }
        }
        if n < nmax {
            let mut next = vec![0.0; cur.len() + 2 * k];
            for (i, &p) in cur.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (d, &q) in jump.iter().enumerate() {
                    next[i + d] += p * q;
                }
            }
            cur = next;
        }
    }
    let table = PmfTable { t, n_min: -(half as i64), n_max: half as i64, probs, tail_mass_bound: mw.tail };
    table.trim(TRIM)
}

/// E[e^{−cD_f(t)} D_f(t)^q].
pub fn tilted_moment(sub: &SubordinatorSpec, c: f64, q: f64, t: f64) -> Result<f64> {
    Ok(ln_tilted(sub, c, q, t)?.exp())
}

fn ln_tilted(sub: &SubordinatorSpec, c: f64, q: f64, t: f64) -> Result<f64> {
    if let SubordinatorSpec::Gamma { a, b } = *sub {
        let r = b * t;
        return Ok(r * a.ln() + ln_gamma(r + q) - ln_gamma(r) - (r + q) * (a + c).ln());
    }
    let g = |x: f64| if q == 0.0 { (-c * x).exp() } else { (-c * x + q * x.ln()).exp() };
    let (v, _) = integrate_against_density(sub, t, g, QuadConfig::with_tol(1e-300, 1e-11))?;
    Ok(v.ln())
}

/// TCGSP-I state probability P(S(D_f(t)) = n).
///
/// For k = 1 this sums Σ_m Λ^{m+n}Λ̄^m/((m+n)! m!)·E[e^{−(Λ+Λ̄)D}D^{2m+n}]
/// until the terms have peaked and fallen below `rel_tol` of the sum. For
/// k ≥ 2 it reads the mixture table.
pub fn tcgsp1_pmf(rates: &RateSpec, sub: &SubordinatorSpec, n: i64, t: f64, cfg: &SeriesConfig) -> Result<f64> {
    rates.validate()?;
    sub.validate()?;
    cfg.validate()?;
    if !(t > 0.0) {
        return invalid(format!("tcgsp1_pmf: t must be positive, got {t}"));
    }
    if rates.k() > 1 {
        return Ok(tcgsp1_pmf_table(rates, sub, t, cfg)?.get(n));
    }
    let (lam, mu) = (rates.lambda[0], rates.mu[0]);
    let c = lam + mu;
    let m0 = (-n).max(0);
    let mut s = KahanSum::new();
    let mut prev = 0.0;
    let mut small = 0;
    for i in 0..cfg.max_terms {
        let m = m0 + i as i64;
        let (mf, nf) = (m as f64, n as f64);
        let q = 2.0 * mf + nf;
        let ln = (mf + nf) * lam.ln() + mf * mu.ln() - ln_gamma(mf + nf + 1.0) - ln_gamma(mf + 1.0)
            + ln_tilted(sub, c, q, t)?;
        let term = ln.exp();
        s.add(term);
        if term <= prev && geometric_tail(term, prev) <= cfg.rel_tol * s.value() {
            small += 1;
            if small >= 3 {
                return Ok(s.value());
            }
        } else {
            small = 0;
        }
        prev = term;
    }
    Err(Error::Truncation { partial: s.value(), bound: prev, terms: cfg.max_terms })
}

/// Tail of a series whose terms shrink at least geometrically from here on.
fn geometric_tail(term: f64, prev: f64) -> f64 {
    let r = if prev > 0.0 && prev.is_finite() { term / prev } else { 0.0 };
    if r >= 1.0 { f64::INFINITY } else { term / (1.0 - r) }
}

/// ∫ gsp_pmf(n, x) density(x, t) dx, the quadrature cross-check of `tcgsp1_pmf`.
pub fn tcgsp1_pmf_quadrature(
    rates: &RateSpec,
    sub: &SubordinatorSpec,
    n: i64,
    t: f64,
    cfg: &SeriesConfig,
) -> Result<f64> {
    rates.validate()?;
    let f = |x: f64| gsp_pmf(rates, n, x, cfg).unwrap_or(f64::NAN);
    let (v, _) = integrate_against_density(sub, t, f, QuadConfig::with_tol(1e-16, 1e-11))?;
    Ok(v)
}

/// TCGSP-I law at time t.
pub fn tcgsp1_pmf_table(rates: &RateSpec, sub: &SubordinatorSpec, t: f64, cfg: &SeriesConfig) -> Result<PmfTable> {
    rates.validate()?;
    sub.validate()?;
    if !(t > 0.0) {
        return invalid(format!("tcgsp1_pmf_table: t must be positive, got {t}"));
    }
    let c = rates.lambda_total() + rates.mu_total();
    let mw = match *sub {
        SubordinatorSpec::Gamma { a, b } => mixture_weights_gamma(a, b, c, t, cfg)?,
        _ => mixture_weights_quadrature(sub, c, t, cfg)?,
    };
    Ok(mixture_table(rates, &mw, t))
}

/// GFSP law at time t (inverse stable clock of order α).
pub fn gfsp_pmf_table(rates: &RateSpec, alpha: f64, t: f64, cfg: &SeriesConfig) -> Result<PmfTable> {
    rates.validate()?;
    if alpha == 1.0 {
        return gsp_pmf_table(rates, t, cfg);
    }
    let rule = MWrightRule::new(alpha)?;
    gfsp_pmf_table_with(rates, &rule, t, cfg)
}

pub(crate) fn gfsp_pmf_table_with(rates: &RateSpec, rule: &MWrightRule, t: f64, cfg: &SeriesConfig) -> Result<PmfTable> {
    if !(t > 0.0) {
        return invalid(format!("gfsp_pmf_table: t must be positive, got {t}"));
    }
    let c = rates.lambda_total() + rates.mu_total();
    Ok(mixture_table(rates, &rule.mixture_weights(c, t, cfg), t))
}

/// P(S(Y_α(t)) = n).
pub fn gfsp_pmf(rates: &RateSpec, alpha: f64, n: i64, t: f64, cfg: &SeriesConfig) -> Result<f64> {
    Ok(gfsp_pmf_table(rates, alpha, t, cfg)?.get(n))
}

/// k = 1 GFSP probability by the three-parameter Mittag-Leffler series
/// Σ_m Λ^{m+n}Λ̄^m t^{αq}/(m!(m+n)!)·q!·E^{q+1}_{α,αq+1}(−(Λ+Λ̄)t^α), q = 2m+n.
///
/// Only usable while (Λ+Λ̄)t^α stays inside the Mittag-Leffler series
/// branch; used to cross-check the M-Wright route.
pub fn gfsp_pmf_ml_series(rates: &RateSpec, alpha: f64, n: i64, t: f64, cfg: &SeriesConfig) -> Result<f64> {
    rates.validate()?;
    if rates.k() != 1 {
        return invalid("gfsp_pmf_ml_series is the k = 1 formula");
    }
    let (lam, mu) = (rates.lambda[0], rates.mu[0]);
    let x = -(lam + mu) * t.powf(alpha);
    // cancellation in the alternating ML series caps its certified accuracy
    let ml_cfg = SeriesConfig { rel_tol: cfg.rel_tol.max(1e-9), ..*cfg };
    let m0 = (-n).max(0);
    let mut s = KahanSum::new();
    let mut small = 0;
    let mut prev = 0.0;
    for i in 0..cfg.max_terms {
        let m = (m0 + i as i64) as f64;
        let nf = n as f64;
        let q = 2.0 * m + nf;
        let ml = match mittag_leffler(alpha, alpha * q + 1.0, q + 1.0, x, &ml_cfg) {
            // a tiny value whose absolute error is still negligible for the sum
            Err(Error::Truncation { partial, bound, .. }) if partial.is_finite() && bound < 1e-13 => partial,
            r => r?,
        };
        let ln = (m + nf) * lam.ln() + m * mu.ln() + alpha * q * t.ln() - ln_gamma(m + 1.0) - ln_gamma(m + nf + 1.0)
            + ln_gamma(q + 1.0);
        let term = ln.exp() * ml;
        s.add(term);
        if term.abs() <= prev && geometric_tail(term.abs(), prev) <= cfg.rel_tol * s.value().abs() {
            small += 1;
            if small >= 3 {
                return Ok(s.value());
            }
        } else {
            small = 0;
        }
        prev = term.abs();
    }
    Err(Error::Truncation { partial: s.value(), bound: prev, terms: cfg.max_terms })
}

/// TCGSP-II law at time t. The stable case is exact (the inverse stable
/// clock); other clocks mix over Monte Carlo draws of H_f(t).
pub fn tcgsp2_pmf_table(
    rates: &RateSpec,
    sub: &SubordinatorSpec,
    t: f64,
    cfg: &SeriesConfig,
    mc: &McConfig,
) -> Result<PmfTable> {
    rates.validate()?;
    sub.validate()?;
    if let SubordinatorSpec::Stable { alpha } = *sub {
        return gfsp_pmf_table(rates, alpha, t, cfg);
    }
    mc.validate()?;
    let h = crate::mc::par_collect(mc.n_paths, mc.seed, |rng, _| Ok(inverse_sample_path(sub, &[t], mc.dt, rng)?.values[0]))?;
    let c = rates.lambda_total() + rates.mu_total();
    Ok(mixture_table(rates, &mixture_weights_samples(&h, c, cfg), t))
}

/// Law of the process at time t for every composition with a pmf evaluator:
/// GSP, GFSP, TCGSP-I and TCGSP-II.
pub fn pmf_table(spec: &ProcessSpec, t: f64, cfg: &SeriesConfig, mc: &McConfig) -> Result<PmfTable> {
    spec.validate()?;
    match (spec.time_change, spec.alpha < 1.0) {
        (TimeChange::None, false) => gsp_pmf_table(&spec.rates, t, cfg),
        (TimeChange::None, true) => gfsp_pmf_table(&spec.rates, spec.alpha, t, cfg),
        (TimeChange::Subordinator(s), false) => tcgsp1_pmf_table(&spec.rates, &s, t, cfg),
        (TimeChange::InverseSubordinator(s), false) => tcgsp2_pmf_table(&spec.rates, &s, t, cfg, mc),
        _ => invalid(format!("no pmf evaluator for {}", spec.label())),
    }
}
