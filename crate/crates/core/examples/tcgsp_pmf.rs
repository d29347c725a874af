//! State probabilities of the GSP time-changed by gamma, tempered stable and
//! inverse Gaussian clocks: series against quadrature and a histogram.

use fracskellam::analytic::{tcgsp1_pmf, tcgsp1_pmf_quadrature, tcgsp1_pmf_table};
use fracskellam::mc::McConfig;
use fracskellam::process::{sample_terminal, ProcessSpec, RateSpec, TimeChange};
use fracskellam::specfun::SeriesConfig;
use fracskellam::subordinate::SubordinatorSpec;

fn main() -> fracskellam::Result<()> {
    let rates = RateSpec::skellam(2.0, 1.0);
    let cfg = SeriesConfig::default();
    let t = 1.0;
    for sub in [
        SubordinatorSpec::Gamma { a: 1.0, b: 1.0 },
        SubordinatorSpec::TemperedStable { eta: 1.0, theta: 0.5 },
        SubordinatorSpec::InverseGaussian { delta: 1.0, gam: 1.0 },
    ] {
        let table = tcgsp1_pmf_table(&rates, &sub, t, &cfg)?;
        println!("{} clock: window [{}, {}], mass {:.12}", sub.name(), table.n_min, table.n_max, table.total());

        let spec = ProcessSpec { rates: rates.clone(), alpha: 1.0, time_change: TimeChange::Subordinator(sub) };
        let mc = McConfig { n_paths: 200_000, dt: 1e-3, seed: 3 };
        let draws = sample_terminal(&spec, t, &mc)?;
        println!("{:>4} {:>12} {:>12} {:>10}", "n", "series", "quadrature", "histogram");
        for n in -2..=4 {
            let s = tcgsp1_pmf(&rates, &sub, n, t, &cfg)?;
            let q = tcgsp1_pmf_quadrature(&rates, &sub, n, t, &cfg)?;
            let h = draws.iter().filter(|&&d| d == n).count() as f64 / draws.len() as f64;
            println!("{n:>4} {s:>12.8} {q:>12.8} {h:>10.5}");
        }
        println!();
    }
    Ok(())
}
