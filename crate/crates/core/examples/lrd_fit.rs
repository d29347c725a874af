//! Correlation decay of Z(s), Z(t) as t grows (long-range dependence) and
//! of unit increments (short-range dependence), gamma clock.

use fracskellam::analytic::{corr_decay_fit, fit_asymptotic, CorrMode};
use fracskellam::mc::McConfig;
use fracskellam::process::{RateSpec, TimeChange};
use fracskellam::stats::geomspace;
use fracskellam::subordinate::SubordinatorSpec;

fn main() -> fracskellam::Result<()> {
    let rates = RateSpec::skellam(5.0, 1.0);
    let sub = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
    let tc = TimeChange::Subordinator(sub);
    let mc = McConfig::default();
    let grid = geomspace(10.0, 1000.0, 25);

    for alpha in [0.5, 0.7, 1.0] {
        let fit = corr_decay_fit(&rates, alpha, &tc, 1.0, &grid, CorrMode::Process, &mc)?;
        println!("alpha {alpha}: Corr ~ {:.4} t^-{:.4} (r2 {:.6})", fit.c_s, fit.exponent, fit.fit_r2);
        if let Ok(a) = fit_asymptotic(&sub, alpha, &grid) {
            println!("          clock asymptotics rho {:.4} k1 {:.4} k2 {:.4}", a.rho, a.k1, a.k2);
        }
    }

    // at alpha = 1 the increments are independent and there is nothing to fit
    let alpha = 0.6;
    let fit = corr_decay_fit(&rates, alpha, &tc, 1.0, &grid, CorrMode::Increment { h: 1.0 }, &mc)?;
    println!("\nunit increments, alpha {alpha}: Corr ~ t^-{:.4} (r2 {:.6})", fit.exponent, fit.fit_r2);
    for (t, c) in fit.t_grid.iter().zip(&fit.corr).step_by(6) {
        println!("  t {t:>8.2}  corr {c:.3e}");
    }
    Ok(())
}
