//! Reproducible parallel Monte Carlo.
//!
//! Paths are grouped in fixed-size chunks; chunk `c` draws from a ChaCha8
//! stream keyed by `(seed, c)`. Results depend on the seed and path count
//! only, never on how many worker threads rayon happens to use.

use crate::error::Result;
use crate::stats::Welford;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Rng = ChaCha8Rng;

/// Paths per RNG stream.
pub const CHUNK: usize = 4096;

/// Monte Carlo controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: usize,
    /// Operational-time step for discretized paths.
    pub dt: f64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n_paths: 100_000, dt: 1e-3, seed: 20_240_501 }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return crate::error::invalid("n_paths must be at least 1");
        }
        if !(self.dt > 0.0) {
            return crate::error::invalid(format!("dt must be positive, got {}", self.dt));
        }
        Ok(())
    }
}

/// RNG for one chunk.
pub fn chunk_rng(seed: u64, chunk: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(chunk);
    r
}

fn chunks(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK)).map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(n))).collect()
}

/// Runs `f(rng, path_index)` for every path and returns the results in path order.
pub fn par_collect<T, F>(n: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut Rng, usize) -> Result<T> + Sync,
{
    let parts: Vec<Result<Vec<T>>> = chunks(n)
        .into_par_iter()
        .enumerate()
        .map(|(c, (lo, hi))| {
            let mut rng = chunk_rng(seed, c as u64);
            (lo..hi).map(|i| f(&mut rng, i)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Mean/variance of a scalar functional over `n` paths.
pub fn par_welford<F>(n: usize, seed: u64, f: F) -> Result<Welford>
where
    F: Fn(&mut Rng) -> Result<f64> + Sync,
{
    let parts: Vec<Result<Welford>> = chunks(n)
        .into_par_iter()
        .enumerate()
        .map(|(c, (lo, hi))| {
            let mut rng = chunk_rng(seed, c as u64);
            let mut w = Welford::new();
            for _ in lo..hi {
                w.push(f(&mut rng)?);
            }
            Ok(w)
        })
        .collect();
    let mut w = Welford::new();
    for p in parts {
        w.merge(&p?);
    }
    Ok(w)
}

/// Several scalar functionals of the same draw, accumulated jointly.
pub fn par_welford_vec<F>(n: usize, seed: u64, k: usize, f: F) -> Result<Vec<Welford>>
where
    F: Fn(&mut Rng, &mut [f64]) -> Result<()> + Sync,
{
    let parts: Vec<Result<Vec<Welford>>> = chunks(n)
        .into_par_iter()
        .enumerate()
        .map(|(c, (lo, hi))| {
            let mut rng = chunk_rng(seed, c as u64);
            let mut ws = vec![Welford::new(); k];
            let mut buf = vec![0.0; k];
            for _ in lo..hi {
                f(&mut rng, &mut buf)?;
                for (w, x) in ws.iter_mut().zip(&buf) {
                    w.push(*x);
                }
            }
            Ok(ws)
        })
        .collect();
    let mut ws = vec![Welford::new(); k];
    for p in parts {
        for (w, q) in ws.iter_mut().zip(p?) {
            w.merge(&q);
        }
    }
    Ok(ws)
}
