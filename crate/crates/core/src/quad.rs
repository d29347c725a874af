//! Quadrature: globally adaptive Gauss–Kronrod (7/15) and fixed Gauss–Legendre rules.

use crate::error::{Error, Result};
use crate::specfun::KahanSum;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// One 15-point Kronrod panel: (integral, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Seg {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive integral over [a,b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadResult> {
    integrate_points(f, &[a, b], cfg)
}

/// Adaptive integral over [p₀, p_last] with forced breakpoints at every p_i.
pub fn integrate_points<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: QuadConfig) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (val, err) = gk15(&f, w[0], w[1]);
            heap.push(Seg { a: w[0], b: w[1], val, err });
        }
    }
    if heap.is_empty() {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    let totals = |h: &BinaryHeap<Seg>| {
        let v: KahanSum = h.iter().map(|s| s.val).collect();
        let e: KahanSum = h.iter().map(|s| s.err).collect();
        (v.value(), e.value())
    };
    let (mut total, mut err) = totals(&heap);
    let mut since_resum = 0;
    while err > cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
        if heap.len() >= cfg.max_intervals {
            let (v, e) = totals(&heap);
            if e <= cfg.abs_tol.max(cfg.rel_tol * v.abs()) {
                return Ok(QuadResult { value: v, error: e, intervals: heap.len() });
            }
            return Err(Error::Quadrature { estimate: v, error: e });
        }
        let worst = heap.pop().expect("non-empty heap");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // interval cannot be split further; keep it and stop refining
            heap.push(worst);
            let (v, e) = totals(&heap);
            return Err(Error::Quadrature { estimate: v, error: e });
        }
        let (v1, e1) = gk15(&f, worst.a, m);
        let (v2, e2) = gk15(&f, m, worst.b);
        total += v1 + v2 - worst.val;
        err += e1 + e2 - worst.err;
        heap.push(Seg { a: worst.a, b: m, val: v1, err: e1 });
        heap.push(Seg { a: m, b: worst.b, val: v2, err: e2 });
        since_resum += 1;
        if since_resum >= 64 {
            let (v, e) = totals(&heap);
            total = v;
            err = e;
            since_resum = 0;
        }
    }
    let (value, error) = totals(&heap);
    Ok(QuadResult { value, error, intervals: heap.len() })
}

/// Adaptive integral over [a, ∞) through x = a + u/(1−u).
pub fn integrate_semi_inf<F: Fn(f64) -> f64>(f: F, a: f64, cfg: QuadConfig) -> Result<QuadResult> {
    let g = |u: f64| {
        let w = 1.0 - u;
        let x = a + u / w;
        let v = f(x) / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_points(g, &[0.0, 0.5, 0.9, 1.0], cfg)
}

/// Fixed n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let x = self.nodes.iter().map(|t| c + h * t).collect();
        let w = self.weights.iter().map(|w| w * h).collect();
        (x, w)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let s: KahanSum = self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(c + h * t)).collect();
        s.value() * h
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn composite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let s: KahanSum = (0..panels)
            .map(|i| self.integrate(&f, a + i as f64 * h, a + (i + 1) as f64 * h))
            .collect();
        s.value()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
