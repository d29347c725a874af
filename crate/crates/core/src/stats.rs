//! Small statistics toolkit used by the Monte Carlo checks.

use crate::specfun::{gamma_q, KahanSum};
use serde::{Deserialize, Serialize};

/// Streaming mean/variance (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Welford {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Welford) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64;
        self.n = n;
    }

    /// Unbiased sample variance.
    pub fn var(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        (self.var() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut w = Welford::new();
        for x in iter {
            w.push(x);
        }
        w
    }
}

/// Sample covariance accumulator for pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct CoMoment {
    pub n: u64,
    mx: f64,
    my: f64,
    cxy: f64,
}

impl CoMoment {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let dx = x - self.mx;
        self.mx += dx / self.n as f64;
        self.my += (y - self.my) / self.n as f64;
        self.cxy += dx * (y - self.my);
    }

    pub fn merge(&mut self, o: &CoMoment) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = (self.n + o.n) as f64;
        let dx = o.mx - self.mx;
        let dy = o.my - self.my;
        self.cxy += o.cxy + dx * dy * self.n as f64 * o.n as f64 / n;
        self.mx += dx * o.n as f64 / n;
        self.my += dy * o.n as f64 / n;
        self.n += o.n;
    }

    pub fn cov(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.cxy / (self.n - 1) as f64
    }
}

/// Result of a chi-square test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Upper tail of the chi-square distribution.
pub fn chi2_sf(x: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    gamma_q(dof as f64 / 2.0, x / 2.0)
}

/// Goodness of fit of integer samples against a pmf over `support_min..`.
///
/// Cells with expected count below `min_expected` are pooled with their
/// neighbours; the residual mass outside the table forms one extra cell.
pub fn chi2_gof(counts: &[u64], probs: &[f64], n: u64, min_expected: f64) -> ChiSquare {
    assert_eq!(counts.len(), probs.len());
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        o += c as f64;
        e += p * nf;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    let used_o: f64 = counts.iter().map(|&c| c as f64).sum();
    let used_p = probs.iter().sum::<f64>();
    o += nf - used_o;
    e += (1.0 - used_p).max(0.0) * nf;
    if e > 0.0 || o > 0.0 {
        if e >= min_expected || cells.is_empty() {
            cells.push((o, e));
        } else if let Some(last) = cells.last_mut() {
            last.0 += o;
            last.1 += e;
        }
    }
    let stat = ksum_cells(&cells);
    let dof = cells.len().saturating_sub(1);
    ChiSquare { statistic: stat, dof, p_value: chi2_sf(stat, dof) }
}

fn ksum_cells(cells: &[(f64, f64)]) -> f64 {
    let s: KahanSum = cells
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .collect();
    s.value()
}

/// Two-sample chi-square homogeneity test on integer samples.
pub fn chi2_two_sample(a: &[i64], b: &[i64], min_expected: f64) -> ChiSquare {
    use std::collections::BTreeMap;
    let mut ca: BTreeMap<i64, f64> = BTreeMap::new();
    let mut cb: BTreeMap<i64, f64> = BTreeMap::new();
    for &x in a {
        *ca.entry(x).or_default() += 1.0;
    }
    for &x in b {
        *cb.entry(x).or_default() += 1.0;
    }
    let keys: std::collections::BTreeSet<i64> = ca.keys().chain(cb.keys()).copied().collect();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut xa, mut xb) = (0.0, 0.0);
    for k in keys {
        xa += ca.get(&k).copied().unwrap_or(0.0);
        xb += cb.get(&k).copied().unwrap_or(0.0);
        let tot = xa + xb;
        if tot * na.min(nb) / n >= min_expected {
            cells.push((xa, xb));
            xa = 0.0;
            xb = 0.0;
        }
    }
    if xa + xb > 0.0 {
        if let Some(last) = cells.last_mut() {
            last.0 += xa;
            last.1 += xb;
        } else {
            cells.push((xa, xb));
        }
    }
    let mut stat = KahanSum::new();
    for &(oa, ob) in &cells {
        let tot = oa + ob;
        let ea = tot * na / n;
        let eb = tot * nb / n;
        stat.add((oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb);
    }
    let dof = cells.len().saturating_sub(1);
    let s = stat.value();
    ChiSquare { statistic: s, dof, p_value: chi2_sf(s, dof) }
}

/// Two-sample Kolmogorov–Smirnov statistic D and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.partial_cmp(q).unwrap());
    y.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lam = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_sf(lam))
}

/// Critical value of the two-sample KS statistic at significance `level`
/// (asymptotic, c(level)·sqrt((n+m)/(nm))).
pub fn ks_critical(n: usize, m: usize, level: f64) -> f64 {
    let c = (-0.5 * (level / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

fn kolmogorov_sf(lam: f64) -> f64 {
    if lam < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let t = 2.0 * (-2.0 * kf * kf * lam * lam).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-16 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}

/// Ordinary least squares y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LinearFit { slope, intercept, r2 }
}

/// `n` log-spaced points on [lo, hi].
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `n` equally spaced points on [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let all: Welford = xs.iter().copied().collect();
        let mut a: Welford = xs[..300].iter().copied().collect();
        let b: Welford = xs[300..].iter().copied().collect();
        a.merge(&b);
        assert!((a.mean - all.mean).abs() < 1e-12);
        assert!((a.var() - all.var()).abs() < 1e-10);
    }

    #[test]
    fn chi2_sf_known_values() {
        // median of chi2(2) is 2 ln 2
        assert!((chi2_sf(2.0 * 2f64.ln(), 2) - 0.5).abs() < 1e-14);
        assert!((chi2_sf(6.634_896_601_021_214, 1) - 0.01).abs() < 1e-10);
    }

    #[test]
    fn fit_recovers_line() {
        let x: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -0.7 * v + 2.0).collect();
        let f = linear_fit(&x, &y);
        assert!((f.slope + 0.7).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_identical_samples() {
        let a: Vec<f64> = (0..500).map(|i| i as f64).collect();
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert!(p > 0.99);
        assert!((ks_critical(100, 100, 0.01) - 1.627_6 * (0.02f64).sqrt()).abs() < 1e-3);
    }
}
