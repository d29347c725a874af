//! Finite-difference residuals of the forward equations satisfied by the
//! state probabilities and generating functions.

use fracskellam::govern::{
    caputo_derivative, residual_gamma_shift, residual_gfsp_mgf_eigen, residual_gsp_system, residual_igs_pde,
    residual_tcgsp1_pgf_ode, residual_tcgsp2_generalized, residual_tss_integer, GridFn, ResidualReport,
};
use fracskellam::process::RateSpec;
use fracskellam::specfun::gamma;
use fracskellam::stats::linspace;
use fracskellam::subordinate::SubordinatorSpec;

fn show(r: &ResidualReport) {
    let rich = r.richardson_ratio.map_or(String::new(), |x| format!("  richardson {x:.2}"));
    println!("{:<28} rel {:.2e}  abs {:.2e}  cells {}{rich}", r.equation_id, r.relative, r.max_abs_residual, r.cells);
}

fn main() -> fracskellam::Result<()> {
    // the L1 scheme is exact on t
    let alpha = 0.4;
    let f = GridFn::sample(0.0, 0.01, 101, |t| t)?;
    let d = caputo_derivative(&f, alpha)?;
    println!("L1 Caputo of t at 1: {:.15} vs {:.15}\n", d.values[100], 1.0 / gamma(2.0 - alpha));

    let r = RateSpec::skellam(2.0, 1.0);
    let ns: Vec<i64> = (-5..=5).collect();
    let ts = linspace(0.5, 2.0, 4);
    show(&residual_gsp_system(&RateSpec::new(vec![0.8, 0.4, 0.3], vec![0.5, 0.2, 0.1])?, &ns, &ts, 1e-3)?);
    show(&residual_tcgsp1_pgf_ode(&r, &SubordinatorSpec::Gamma { a: 1.0, b: 1.0 }, &[0.8], &ts, 1e-4)?);
    show(&residual_gfsp_mgf_eigen(&RateSpec::skellam(1.0, 0.5), 0.6, &[0.3], 1.0, 1e-3)?);
    show(&residual_igs_pde(&r, 1.0, 1.0, &ns, &ts, 1e-3)?);
    show(&residual_tss_integer(&r, 1.0, 2, &ns, &ts, 1e-3)?);
    show(&residual_tcgsp2_generalized(&r, &SubordinatorSpec::Stable { alpha: 0.6 }, &(-3..=3).collect::<Vec<_>>(), 1.0, 1e-3)?);

    let shift = residual_gamma_shift(&r, 1.0, 1.0, &ns, &linspace(1.5, 3.0, 4))?;
    println!("\ngamma shift identity (a = b), both sign conventions:");
    show(&shift.derivation);
    show(&shift.stated);
    Ok(())
}
