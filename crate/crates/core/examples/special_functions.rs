//! Mittag-Leffler and modified Bessel evaluations against elementary closed forms.

use fracskellam::specfun::{bessel_i, bessel_i_log, erfcx, mittag_leffler, SeriesConfig};

fn main() -> fracskellam::Result<()> {
    let cfg = SeriesConfig::default();
    println!("{:>6} {:>22} {:>22}", "x", "E_1/2(-x)", "erfcx(x)");
    for x in [0.1, 1.0, 5.0, 20.0, 80.0] {
        println!("{x:>6} {:>22.15e} {:>22.15e}", mittag_leffler(0.5, 1.0, 1.0, -x, &cfg)?, erfcx(x));
    }

    // three-parameter function at gamma = 2: E^2_{1,1}(x) = (1 + x) e^x
    let x = 0.7_f64;
    let e = mittag_leffler(1.0, 1.0, 2.0, x, &cfg)?;
    println!("\nE^2_1,1({x}) = {e:.15} vs (1+x)e^x = {:.15}", (1.0 + x) * x.exp());

    println!("\n{:>4} {:>8} {:>22} {:>22}", "n", "x", "I_n(x)", "log I_n(x)");
    for (n, x) in [(0, 1.0), (3, 2.0), (-3, 2.0), (10, 50.0), (2, 1000.0)] {
        let v = bessel_i(n, x, &cfg).map_or("overflow".to_string(), |v| format!("{v:.15e}"));
        println!("{n:>4} {x:>8} {v:>22} {:>22.15}", bessel_i_log(n, x, &cfg)?);
    }
    Ok(())
}
