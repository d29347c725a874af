use super::{ln_gamma, KahanSum, SeriesConfig};
use crate::error::{invalid, Error, Result};

/// log I_{|n|}(x) for x ≥ 0 by the power series, summed outward from its largest term.
pub fn bessel_i_log(n: i64, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    if !(x >= 0.0) || !x.is_finite() {
        return invalid(format!("bessel_i_log: need finite x >= 0, got {x}"));
    }
    let n = n.unsigned_abs() as f64;
    if x == 0.0 {
        return Ok(if n == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let q = 0.25 * x * x; // (x/2)^2
    let peak = ((-(n + 2.0) + (n * n + x * x).sqrt()) / 2.0).round().max(0.0);
    let log_term = |j: f64| (2.0 * j + n) * (0.5 * x).ln() - ln_gamma(j + 1.0) - ln_gamma(j + n + 1.0);
    let l0 = log_term(peak);

    let stop = cfg.rel_tol * 1e-4;
    let mut s = KahanSum::new();
    s.add(1.0);
    let mut used = 1usize;

    // upward
    let mut term = 1.0;
    let mut j = peak;
    loop {
        term *= q / ((j + 1.0) * (j + n + 1.0));
        j += 1.0;
        s.add(term);
        used += 1;
        if term < stop * s.value() {
            break;
        }
        if used > cfg.max_terms {
            return Err(Error::Truncation { partial: l0 + s.value().ln(), bound: term, terms: used });
        }
    }
    // downward
    let mut term = 1.0;
    let mut j = peak;
    while j > 0.0 {
        term *= j * (j + n) / q;
        j -= 1.0;
        s.add(term);
        used += 1;
        if term < stop * s.value() {
            break;
        }
        if used > cfg.max_terms {
            return Err(Error::Truncation { partial: l0 + s.value().ln(), bound: term, terms: used });
        }
    }
    Ok(l0 + s.value().ln())
}

/// Modified Bessel function of the first kind I_n(x), with I_{−n} = I_n.
///
/// Values beyond the f64 range come back as [`Error::Overflow`] carrying log I_n(|x|).
pub fn bessel_i(n: i64, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    let l = bessel_i_log(n, x.abs(), cfg)?;
    if l > 709.0 {
        return Err(Error::Overflow { log_value: l });
    }
    let v = l.exp();
    if x < 0.0 && n.unsigned_abs() % 2 == 1 {
        Ok(-v)
    } else {
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_i(0, 0.0, &cfg()).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        let r = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(r(bessel_i(0, 2.0, &cfg()).unwrap(), 2.279_585_302_336_067_3) < 1e-14);
        assert!(r(bessel_i(3, 10.0, &cfg()).unwrap(), 1_758.380_716_610_853_2) < 1e-13);
        assert!(r(bessel_i(2, 0.1, &cfg()).unwrap(), 0.001_251_041_992_241_759_3) < 1e-14);
        assert!(r(bessel_i_log(0, 1000.0, &cfg()).unwrap(), 995.627_308_889_869_5) < 1e-14);
        assert!(r(bessel_i_log(7, 500.0, &cfg()).unwrap(), 495.924_959_366_711) < 1e-14);
    }

    #[test]
    fn symmetric_in_order_and_parity_in_x() {
        for n in 0..6 {
            for &x in &[0.3, 2.0, 17.0] {
                assert_eq!(bessel_i(n, x, &cfg()).unwrap(), bessel_i(-n, x, &cfg()).unwrap());
                let sgn = if n % 2 == 1 { -1.0 } else { 1.0 };
                assert_eq!(bessel_i(n, -x, &cfg()).unwrap(), sgn * bessel_i(n, x, &cfg()).unwrap());
            }
        }
    }

    #[test]
    fn overflow_reports_log() {
        match bessel_i(0, 1000.0, &cfg()) {
            Err(Error::Overflow { log_value }) => assert!((log_value - 995.627_308_889_869_5).abs() < 1e-10),
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
