use super::{caputo_derivative, generalized_caputo, GridFn, ResidualReport, EPS};
use crate::analytic::{
    gfsp_mgf, gsp_pmf, gsp_pmf_table, mgf_exponent, pgf_exponent, tcgsp1_pgf_closed, tcgsp1_pmf_table, MWrightRule,
    PmfTable,
};
use crate::error::{invalid, Result};
use crate::process::RateSpec;
use crate::quad::GaussLegendre;
use crate::specfun::SeriesConfig;
use crate::subordinate::{bernstein_ext, density, SubordinatorSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Σⱼ λⱼ(p(n−j) − p(n)) + μⱼ(p(n+j) − p(n)), the jump generator of the GSP.
fn generator<P: Fn(i64) -> f64>(rates: &RateSpec, p: &P, n: i64) -> f64 {
    let p0 = p(n);
    (0..rates.k())
        .map(|i| {
            let j = (i + 1) as i64;
            rates.lambda[i] * (p(n - j) - p0) + rates.mu[i] * (p(n + j) - p0)
        })
        .sum()
}

fn time_span(ts: &[f64]) -> (f64, f64) {
    (ts.iter().copied().fold(f64::INFINITY, f64::min), ts.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

fn check_stencil(ts: &[f64], dt: f64, width: f64) -> Result<()> {
    if ts.is_empty() {
        return invalid("empty time grid");
    }
    if !(dt > 0.0) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    let (lo, _) = time_span(ts);
    if !(lo - width * dt > 0.0) {
        return invalid(format!("stencil reaches t <= 0 (t_min={lo}, dt={dt})"));
    }
    Ok(())
}

/// dp/dt = L p for the GSP, with central differences of step dt.
pub fn residual_gsp_system(rates: &RateSpec, ns: &[i64], ts: &[f64], dt: f64) -> Result<ResidualReport> {
    rates.validate()?;
    check_stencil(ts, dt, 1.0)?;
    let cfg = SeriesConfig::default();
    let mut cells = Vec::new();
    for &t in ts {
        let lo = gsp_pmf_table(rates, t - dt, &cfg)?;
        let mid = gsp_pmf_table(rates, t, &cfg)?;
        let hi = gsp_pmf_table(rates, t + dt, &cfg)?;
        for &n in ns {
            let lhs = (hi.get(n) - lo.get(n)) / (2.0 * dt);
            let rhs = generator(rates, &|m| mid.get(m), n);
            cells.push((lhs - rhs, rhs));
        }
    }
    Ok(ResidualReport::from_cells("gsp_system", &cells, time_span(ts), dt))
}

/// ∂G/∂t = −f(−G_exp(u))·G for the TCGSP-I pgf G(u,t) = exp(−t f(−G_exp(u))).
pub fn residual_tcgsp1_pgf_ode(
    rates: &RateSpec,
    sub: &SubordinatorSpec,
    us: &[f64],
    ts: &[f64],
    dt: f64,
) -> Result<ResidualReport> {
    rates.validate()?;
    sub.validate()?;
    check_stencil(ts, dt, 1.0)?;
    let mut cells = Vec::new();
    for &u in us {
        let Some(f) = bernstein_ext(sub, -pgf_exponent(rates, u)) else {
            return invalid(format!("u={u} lies outside the Laplace domain of {}", sub.name()));
        };
        for &t in ts {
            let g = |x| tcgsp1_pgf_closed(rates, sub, u, x);
            let lhs = (g(t + dt)? - g(t - dt)?) / (2.0 * dt);
            let rhs = -f * g(t)?;
            cells.push((lhs - rhs, rhs));
        }
    }
    Ok(ResidualReport::from_cells("tcgsp1_pgf_ode", &cells, time_span(ts), dt))
}

/// Caputo derivative of the GFSP mgf against K(v)·mgf, on [EPS, t_end].
pub fn residual_gfsp_mgf_eigen(rates: &RateSpec, alpha: f64, vs: &[f64], t_end: f64, dt: f64) -> Result<ResidualReport> {
    rates.validate()?;
    if !(t_end > EPS) {
        return invalid(format!("t_end must exceed {EPS}, got {t_end}"));
    }
    let cfg = SeriesConfig::default();
    let n = (t_end / dt).round() as usize + 1;
    let mut cells = Vec::new();
    for &v in vs {
        let k = mgf_exponent(rates, v);
        let f = GridFn::try_sample(0.0, dt, n, |t| gfsp_mgf(rates, alpha, v, t, &cfg))?;
        let d = caputo_derivative(&f, alpha)?;
        for i in 0..f.len() {
            if f.t(i) >= EPS - 1e-12 {
                let rhs = k * f.values[i];
                cells.push((d.values[i] - rhs, rhs));
            }
        }
    }
    Ok(ResidualReport::from_cells("gfsp_mgf_eigen", &cells, (EPS, t_end), dt))
}

/// p(n,t) = ∫ P(S(x) = n) g(x,t) dx on a fixed Gauss–Legendre rule in x, so
/// that the rule error is smooth in t and cancels in differences.
struct FixedMixture {
    sub: SubordinatorSpec,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    n_lo: i64,
    /// pmf[n − n_lo][node]
    pmf: Vec<Vec<f64>>,
}

impl FixedMixture {
    fn new(rates: &RateSpec, sub: SubordinatorSpec, n_lo: i64, n_hi: i64, t_max: f64) -> Result<Self> {
        let mean = sub.mean(t_max);
        // the upper limit follows the exponential tilt of both densities
        let rate = match sub {
            SubordinatorSpec::InverseGaussian { gam, .. } => 0.5 * gam * gam,
            SubordinatorSpec::TemperedStable { eta, .. } => eta,
            _ => return invalid("fixed mixture rule is implemented for the IGS and TSS clocks"),
        };
        let x_max = 4.0 * mean + 60.0 / rate;
        let gl = GaussLegendre::new(16);
        let panels = 200;
        // quadratic panel edges: fine near 0 where both densities switch on
        let edge = |i: usize| x_max * (i as f64 / panels as f64).powi(2);
        let mut nodes = Vec::with_capacity(16 * panels);
        let mut weights = Vec::with_capacity(16 * panels);
        for p in 0..panels {
            let (x, w) = gl.mapped(edge(p), edge(p + 1));
            nodes.extend(x);
            weights.extend(w);
        }
        let cfg = SeriesConfig::default();
        let cols: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|&x| -> Result<Vec<f64>> {
                if rates.k() == 1 {
                    (n_lo..=n_hi).map(|n| gsp_pmf(rates, n, x, &cfg)).collect()
                } else {
                    let tab = gsp_pmf_table(rates, x, &cfg)?;
                    Ok((n_lo..=n_hi).map(|n| tab.get(n)).collect())
                }
            })
            .collect::<Result<_>>()?;
        let pmf = (0..=(n_hi - n_lo) as usize).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        Ok(FixedMixture { sub, nodes, weights, n_lo, pmf })
    }

    fn eval(&self, n: i64, t: f64) -> Result<f64> {
        let row = &self.pmf[(n - self.n_lo) as usize];
        let mut s = 0.0;
        for ((x, w), p) in self.nodes.iter().zip(&self.weights).zip(row) {
            if *p != 0.0 {
                s += w * p * density(&self.sub, *x, t)?;
            }
        }
        Ok(s)
    }
}

/// Central first and second differences of p(n,·) at t.
fn differences(m: &FixedMixture, n: i64, t: f64, h: f64) -> Result<(f64, f64, f64)> {
    let (a, b, c) = (m.eval(n, t - h)?, m.eval(n, t)?, m.eval(n, t + h)?);
    Ok((b, (c - a) / (2.0 * h), (c - 2.0 * b + a) / (h * h)))
}

/// Residual cells of a second-order equation at step h; `lhs(p, p', p'')`.
fn second_order_cells<F: Fn(f64, f64, f64) -> f64 + Sync>(
    rates: &RateSpec,
    m: &FixedMixture,
    ns: &[i64],
    ts: &[f64],
    h: f64,
    lhs: F,
) -> Result<Vec<(f64, f64)>> {
    let k = rates.k() as i64;
    let jobs: Vec<(i64, f64)> = ts.iter().flat_map(|&t| ns.iter().map(move |&n| (n, t))).collect();
    jobs.par_iter()
        .map(|&(n, t)| {
            let (p, d1, d2) = differences(m, n, t, h)?;
            let near: Vec<f64> = (n - k..=n + k).map(|j| m.eval(j, t)).collect::<Result<_>>()?;
            let rhs = generator(rates, &|j| near[(j - n + k) as usize], n);
            Ok((lhs(p, d1, d2) - rhs, rhs))
        })
        .collect()
}

/// max |r(h) − r(h/2)| / max |r(h/2) − r(h/4)| over the residual cells.
fn richardson_ratio(r1: &[(f64, f64)], r2: &[(f64, f64)], r4: &[(f64, f64)]) -> f64 {
    let diff = |a: &[(f64, f64)], b: &[(f64, f64)]| a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x.0 - y.0).abs()));
    diff(r1, r2) / diff(r2, r4)
}

fn second_order_report<F: Fn(f64, f64, f64) -> f64 + Sync + Copy>(
    id: &str,
    rates: &RateSpec,
    m: &FixedMixture,
    ns: &[i64],
    ts: &[f64],
    dt: f64,
    lhs: F,
) -> Result<ResidualReport> {
    let r1 = second_order_cells(rates, m, ns, ts, dt, lhs)?;
    let r2 = second_order_cells(rates, m, ns, ts, dt / 2.0, lhs)?;
    let r4 = second_order_cells(rates, m, ns, ts, dt / 4.0, lhs)?;
    let mut rep = ResidualReport::from_cells(id, &r1, time_span(ts), dt);
    rep.richardson_ratio = Some(richardson_ratio(&r1, &r2, &r4));
    Ok(rep)
}

fn mixture_for(rates: &RateSpec, sub: SubordinatorSpec, ns: &[i64], ts: &[f64], dt: f64) -> Result<FixedMixture> {
    let k = rates.k() as i64;
    let n_lo = ns.iter().min().copied().unwrap_or(0) - k;
    let n_hi = ns.iter().max().copied().unwrap_or(0) + k;
    FixedMixture::new(rates, sub, n_lo, n_hi, time_span(ts).1 + dt)
}

/// (∂²/∂t² − 2δγ ∂/∂t) p = −2δ² L p for the GSP on an inverse Gaussian clock.
/// The report carries the observed Richardson ratio of the difference scheme.
pub fn residual_igs_pde(
    rates: &RateSpec,
    delta: f64,
    gam: f64,
    ns: &[i64],
    ts: &[f64],
    dt: f64,
) -> Result<ResidualReport> {
    rates.validate()?;
    let sub = SubordinatorSpec::InverseGaussian { delta, gam };
    sub.validate()?;
    check_stencil(ts, dt, 1.0)?;
    let m = mixture_for(rates, sub, ns, ts, dt)?;
    let scale = -1.0 / (2.0 * delta * delta);
    second_order_report("igs_pde", rates, &m, ns, ts, dt, move |_, d1, d2| scale * (d2 - 2.0 * delta * gam * d1))
}

/// Σ_{k=1}^{m} (−1)^k C(m,k) η^{1−k/m} ∂ᵏp/∂tᵏ = −L p for the GSP on a
/// tempered stable clock with θ = 1/m. The k = 0 term ηp cancels against
/// the same term on the right. Only m = 2 is implemented.
pub fn residual_tss_integer(
    rates: &RateSpec,
    eta: f64,
    m: u32,
    ns: &[i64],
    ts: &[f64],
    dt: f64,
) -> Result<ResidualReport> {
    rates.validate()?;
    if m != 2 {
        return invalid(format!("tempered stable residual is implemented for m = 2, got {m}"));
    }
    let sub = SubordinatorSpec::TemperedStable { eta, theta: 0.5 };
    sub.validate()?;
    check_stencil(ts, dt, 1.0)?;
    let mix = mixture_for(rates, sub, ns, ts, dt)?;
    let se = eta.sqrt();
    // the equation reads −(Σ ...) = L p
    second_order_report("tss_integer", rates, &mix, ns, ts, dt, move |_, d1, d2| -(d2 - 2.0 * se * d1))
}

/// Both sign conventions of the gamma shift relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftResiduals {
    /// b(p(n, t − 1/a) − p(n,t)) = −L p.
    pub derivation: ResidualReport,
    /// b(p(n, t − 1/a) − p(n,t)) = Σⱼ λⱼ(p(n−j) − p(n)) − μⱼ(p(n+j) − p(n)).
    pub stated: ResidualReport,
}

/// Gamma clock shift relation under both sign conventions. Needs t > 1/a.
pub fn residual_gamma_shift(rates: &RateSpec, a: f64, b: f64, ns: &[i64], ts: &[f64]) -> Result<ShiftResiduals> {
    rates.validate()?;
    let sub = SubordinatorSpec::Gamma { a, b };
    sub.validate()?;
    if ts.is_empty() || time_span(ts).0 <= 1.0 / a {
        return invalid(format!("gamma shift needs every t > 1/a = {}", 1.0 / a));
    }
    let cfg = SeriesConfig::default();
    let mut der = Vec::new();
    let mut st = Vec::new();
    for &t in ts {
        let now = tcgsp1_pmf_table(rates, &sub, t, &cfg)?;
        let before = tcgsp1_pmf_table(rates, &sub, t - 1.0 / a, &cfg)?;
        for &n in ns {
            let lhs = b * (before.get(n) - now.get(n));
            let p = |m| now.get(m);
            let p0 = p(n);
            let mut up = 0.0;
            let mut down = 0.0;
            for i in 0..rates.k() {
                let j = (i + 1) as i64;
                up += rates.lambda[i] * (p(n - j) - p0);
                down += rates.mu[i] * (p(n + j) - p0);
            }
            let d = -(up + down);
            let s = up - down;
            der.push((lhs - d, d));
            st.push((lhs - s, s));
        }
    }
    let span = time_span(ts);
    Ok(ShiftResiduals {
        derivation: ResidualReport::from_cells("gamma_shift_derivation", &der, span, 1.0 / a),
        stated: ResidualReport::from_cells("gamma_shift_stated", &st, span, 1.0 / a),
    })
}

/// Generalized Caputo derivative (stable tail) of the TCGSP-II pmf against
/// L p, on [EPS, t_end]. With the stable clock the TCGSP-II law is the GFSP
/// law, evaluated on a fixed M-Wright rule.
pub fn residual_tcgsp2_generalized(
    rates: &RateSpec,
    sub: &SubordinatorSpec,
    ns: &[i64],
    t_end: f64,
    dt: f64,
) -> Result<ResidualReport> {
    rates.validate()?;
    let SubordinatorSpec::Stable { alpha } = *sub else {
        return invalid("generalized Caputo residual is checked for the stable subordinator only");
    };
    if !(t_end > EPS) {
        return invalid(format!("t_end must exceed {EPS}, got {t_end}"));
    }
    let cfg = SeriesConfig::default();
    let rule = MWrightRule::new(alpha)?;
    let n_pts = (t_end / dt).round() as usize + 1;
    let tables: Vec<Option<PmfTable>> = (0..n_pts)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * dt;
            if i == 0 {
                Ok(None)
            } else {
                crate::analytic::gfsp_pmf_table_with(rates, &rule, t, &cfg).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    let p = |i: usize, n: i64| match &tables[i] {
        None => f64::from(u8::from(n == 0)),
        Some(tab) => tab.get(n),
    };
    let mut cells = Vec::new();
    for &n in ns {
        let f = GridFn::new(0.0, dt, (0..n_pts).map(|i| p(i, n)).collect())?;
        let d = generalized_caputo(&f, sub)?;
        for i in 0..n_pts {
            if f.t(i) >= EPS - 1e-12 {
                let rhs = generator(rates, &|m| p(i, m), n);
                cells.push((d.values[i] - rhs, rhs));
            }
        }
    }
    Ok(ResidualReport::from_cells("tcgsp2_generalized", &cells, (EPS, t_end), dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::linspace;

    fn skellam(l: f64, m: f64) -> RateSpec {
        RateSpec::skellam(l, m)
    }

    #[test]
    fn gsp_system_k1_and_k3() {
        let ts = linspace(0.2, 2.0, 10);
        let ns: Vec<i64> = (-6..=6).collect();
        let r = residual_gsp_system(&skellam(1.0, 1.0), &ns, &ts, 1e-3).unwrap();
        assert!(r.relative < 1e-5, "{r:?}");
        let k3 = RateSpec::new(vec![0.8, 0.4, 0.3], vec![0.5, 0.2, 0.1]).unwrap();
        let r = residual_gsp_system(&k3, &ns, &ts, 1e-3).unwrap();
        assert!(r.relative < 1e-5, "{r:?}");
        let tail = residual_gsp_system(&skellam(1.0, 1.0), &[60, -60], &ts, 1e-3).unwrap();
        assert!(tail.max_abs_residual < 1e-12);
    }

    #[test]
    fn pgf_ode() {
        let ts = linspace(0.2, 3.0, 8);
        let r = skellam(2.0, 1.0);
        let g = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
        assert!(residual_tcgsp1_pgf_ode(&r, &g, &[0.8], &ts, 1e-4).unwrap().relative < 1e-6);
        let ig = SubordinatorSpec::InverseGaussian { delta: 1.0, gam: 1.0 };
        assert!(residual_tcgsp1_pgf_ode(&r, &ig, &[0.9], &ts, 1e-4).unwrap().relative < 1e-6);
        let one = residual_tcgsp1_pgf_ode(&r, &g, &[1.0], &ts, 1e-4).unwrap();
        assert_eq!(one.max_abs_residual, 0.0);
    }

    #[test]
    fn mgf_eigen() {
        let r = skellam(1.0, 0.5);
        let rep = residual_gfsp_mgf_eigen(&r, 0.6, &[0.3], 1.0, 1e-3).unwrap();
        assert!(rep.relative < 5e-3, "{rep:?}");
        let zero = residual_gfsp_mgf_eigen(&r, 0.6, &[0.0], 1.0, 1e-3).unwrap();
        assert_eq!(zero.max_abs_residual, 0.0);
        let near_one = residual_gfsp_mgf_eigen(&r, 0.99, &[0.3], 1.0, 1e-3).unwrap();
        assert!(near_one.relative < 1e-3, "{near_one:?}");
    }

    #[test]
    fn igs_pde_converges_at_second_order() {
        let ns: Vec<i64> = (-5..=5).collect();
        let ts = linspace(0.5, 2.0, 7);
        let rep = residual_igs_pde(&skellam(2.0, 1.0), 1.0, 1.0, &ns, &ts, 1e-3).unwrap();
        assert!(rep.relative < 1e-3, "{rep:?}");
        let ratio = rep.richardson_ratio.unwrap();
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
    }

    #[test]
    fn tss_integer_m2() {
        let ns: Vec<i64> = (-4..=4).collect();
        let ts = linspace(0.5, 2.0, 7);
        let rep = residual_tss_integer(&skellam(2.0, 1.0), 1.0, 2, &ns, &ts, 1e-3).unwrap();
        assert!(rep.relative < 5e-3, "{rep:?}");
        let ratio = rep.richardson_ratio.unwrap();
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
        assert!(residual_tss_integer(&skellam(2.0, 1.0), 1.0, 3, &ns, &ts, 1e-3).is_err());
    }

    #[test]
    fn gamma_shift_sign() {
        let r = skellam(1.0, 1.0);
        let s = residual_gamma_shift(&r, 1.0, 1.0, &[0], &[2.0]).unwrap();
        assert!(s.derivation.relative < 1e-6, "{s:?}");
        assert!(s.stated.max_abs_residual > 1e-2, "{s:?}");
        let r2 = skellam(2.0, 0.5);
        let a = residual_gamma_shift(&r2, 1.0, 1.0, &[3], &[1.5, 2.5]).unwrap();
        let b = residual_gamma_shift(&r2.swapped(), 1.0, 1.0, &[-3], &[1.5, 2.5]).unwrap();
        assert!((a.derivation.max_abs_residual - b.derivation.max_abs_residual).abs() < 1e-15);
        let tail = residual_gamma_shift(&r, 1.0, 1.0, &[80], &[2.0]).unwrap();
        assert!(tail.derivation.max_abs_residual < 1e-12 && tail.stated.max_abs_residual < 1e-12);
        assert!(residual_gamma_shift(&r, 1.0, 1.0, &[0], &[0.5]).is_err());
    }

    #[test]
    fn tcgsp2_stable() {
        let ns: Vec<i64> = (-3..=3).collect();
        let rep = residual_tcgsp2_generalized(&skellam(2.0, 1.0), &SubordinatorSpec::Stable { alpha: 0.6 }, &ns, 1.0, 1e-3)
            .unwrap();
        assert!(rep.relative < 1e-2, "{rep:?}");
        let tail = residual_tcgsp2_generalized(&skellam(2.0, 1.0), &SubordinatorSpec::Stable { alpha: 0.6 }, &[60], 1.0, 1e-2)
            .unwrap();
        assert!(tail.max_abs_residual < 1e-12);
        let near_one =
            residual_tcgsp2_generalized(&skellam(2.0, 1.0), &SubordinatorSpec::Stable { alpha: 0.99 }, &ns, 1.0, 1e-3)
                .unwrap();
        assert!(near_one.relative < 1e-2, "{near_one:?}");
        let g = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
        assert!(residual_tcgsp2_generalized(&skellam(2.0, 1.0), &g, &ns, 1.0, 1e-3).is_err());
    }
}
