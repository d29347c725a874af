//! Monte Carlo Laplace transforms of the four subordinator families against
//! exp(-t f(s)), plus their fractional moments.

use fracskellam::mc::McConfig;
use fracskellam::subordinate::{bernstein, frac_moment, MomentMethod, SubordinatorSpec};
use fracskellam::validation::laplace_mc;

fn main() -> fracskellam::Result<()> {
    let subs = [
        SubordinatorSpec::Stable { alpha: 0.7 },
        SubordinatorSpec::Gamma { a: 1.0, b: 2.0 },
        SubordinatorSpec::TemperedStable { eta: 1.0, theta: 0.5 },
        SubordinatorSpec::InverseGaussian { delta: 1.0, gam: 1.5 },
    ];
    let mc = McConfig { n_paths: 200_000, dt: 1e-3, seed: 7 };
    let (s, t) = (0.8, 1.5);
    println!("{:<18} {:>12} {:>12} {:>10}", "clock", "exact", "mc", "z");
    for sub in &subs {
        let exact = (-t * bernstein(sub, s)).exp();
        let (m, se) = laplace_mc(sub, s, t, &mc)?;
        println!("{:<18} {exact:>12.6} {m:>12.6} {:>10.2}", sub.name(), (m - exact) / se);
    }

    println!("\nE[D(t)^0.5] at t = {t}");
    for sub in &subs {
        let method = match sub {
            SubordinatorSpec::Stable { .. } | SubordinatorSpec::Gamma { .. } => MomentMethod::ClosedForm,
            _ => MomentMethod::Quadrature,
        };
        let m = frac_moment(sub, 0.5, t, method)?;
        println!("{:<18} {:.10} ({:?})", sub.name(), m.value, m.method);
    }
    Ok(())
}
