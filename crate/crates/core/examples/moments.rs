//! Factorial and raw moments of a time-changed GFSP from the closed-form
//! stack, checked against numerical derivatives of the pgf and mgf.

use fracskellam::analytic::{
    factorial_moments, moments_summary, overdispersion, pgf_derivative, raw_moments, richardson_derivative,
    tcgfsp1_mgf, tcgfsp1_pgf,
};
use fracskellam::mc::McConfig;
use fracskellam::process::{RateSpec, TimeChange};
use fracskellam::specfun::SeriesConfig;
use fracskellam::subordinate::SubordinatorSpec;

fn main() -> fracskellam::Result<()> {
    let rates = RateSpec::new(vec![1.0, 0.5], vec![0.5, 0.25])?;
    let sub = SubordinatorSpec::Gamma { a: 1.0, b: 1.0 };
    let tc = TimeChange::Subordinator(sub);
    let (alpha, t) = (0.6, 1.0);
    let mc = McConfig::default();
    let cfg = SeriesConfig::default();

    let fact = factorial_moments(&rates, alpha, &tc, 4, t, &mc)?;
    let raw = raw_moments(&rates, alpha, &tc, 4, t, &mc)?;
    println!("{:>2} {:>16} {:>16} {:>16} {:>16}", "r", "factorial", "pgf'(1)", "raw", "mgf'(0)");
    for r in 1..=4 {
        let (dp, _) = pgf_derivative(|u| tcgfsp1_pgf(&rates, alpha, &sub, u, t, 400, &cfg), r)?;
        let (dm, _) = richardson_derivative(|v| tcgfsp1_mgf(&rates, alpha, &sub, v, t, 400, &cfg), 0.0, r, 0.1)?;
        println!("{r:>2} {:>16.10} {dp:>16.10} {:>16.10} {dm:>16.10}", fact[r - 1], raw[r - 1]);
    }

    let m = moments_summary(&rates, alpha, &tc, 0.5, t, &mc)?;
    println!("\nmean {:.8}  var {:.8}  cov(0.5, 1) {:.8}  exact {}", m.mean_t, m.var_t, m.cov_st, m.exact);
    println!("Var - |E| = {:.6}", overdispersion(&rates, alpha, &tc, t, &mc)?);
    Ok(())
}
