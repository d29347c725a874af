//! Paths of a GSP, a GFSP and both time-changed variants on a common grid,
//! and the terminal mean against l₁·E[X^α].

use fracskellam::analytic::moments_summary;
use fracskellam::mc::{chunk_rng, par_welford, McConfig};
use fracskellam::process::{sample_process, ProcessSpec, RateSpec, TimeChange};
use fracskellam::subordinate::SubordinatorSpec;

fn main() -> fracskellam::Result<()> {
    let rates = RateSpec::new(vec![1.0, 0.5], vec![0.6, 0.2])?;
    let gamma = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
    let specs = [
        ProcessSpec::gsp(rates.clone()),
        ProcessSpec { rates: rates.clone(), alpha: 0.7, time_change: TimeChange::None },
        ProcessSpec { rates: rates.clone(), alpha: 0.7, time_change: TimeChange::Subordinator(gamma) },
        ProcessSpec { rates: rates.clone(), alpha: 1.0, time_change: TimeChange::InverseSubordinator(gamma) },
    ];
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();
    let mc = McConfig { n_paths: 40_000, dt: 1e-3, seed: 42 };

    for spec in &specs {
        let mut rng = chunk_rng(mc.seed, 0);
        let path = sample_process(spec, &grid, &mut rng, &mc)?;
        println!("{:<10} {:?}", spec.label(), path.values);
    }

    let t = 2.0;
    println!("\n{:<10} {:>10} {:>16}", "process", "exact", "simulated");
    for spec in &specs {
        let exact = moments_summary(&spec.rates, spec.alpha, &spec.time_change, t, t, &mc)?.mean_t;
        let w = par_welford(mc.n_paths, mc.seed, |rng| Ok(sample_process(spec, &[t], rng, &mc)?.values[0] as f64))?;
        println!("{:<10} {exact:>10.4} {:>9.4} ± {:.4}", spec.label(), w.mean, w.se());
    }
    Ok(())
}
