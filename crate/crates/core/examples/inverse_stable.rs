//! First-passage times of a stable subordinator: Laplace transform against
//! E_α(-s t^α), mean and covariance against their closed forms.

use fracskellam::mc::{chunk_rng, par_welford_vec};
use fracskellam::specfun::{beta, gamma, incomplete_beta, mittag_leffler, SeriesConfig};
use fracskellam::subordinate::{inverse_sample_path, inverse_stable_sample, SubordinatorSpec};

fn main() -> fracskellam::Result<()> {
    let alpha = 0.6;
    let n = 100_000;
    let cfg = SeriesConfig::default();

    let t = 2.0;
    let w = par_welford_vec(n, 11, 2, |rng, out| {
        let y = inverse_stable_sample(alpha, t, rng);
        out[0] = (-y).exp();
        out[1] = y;
        Ok(())
    })?;
    let lt = mittag_leffler(alpha, 1.0, 1.0, -t.powf(alpha), &cfg)?;
    println!("E exp(-Y({t}))  mc {:.5} ± {:.5}   exact {lt:.5}", w[0].mean, w[0].se());
    let mean = t.powf(alpha) / gamma(1.0 + alpha);
    println!("E Y({t})        mc {:.5} ± {:.5}   exact {mean:.5}", w[1].mean, w[1].se());

    // Cov(Y(s), Y(t)) from discretized paths of the stable clock
    let (s, t) = (0.5, 1.0);
    let stable = SubordinatorSpec::Stable { alpha };
    let w = par_welford_vec(20_000, 12, 3, |rng, out| {
        let p = inverse_sample_path(&stable, &[s, t], 1e-3, rng)?;
        out[0] = p.values[0];
        out[1] = p.values[1];
        out[2] = p.values[0] * p.values[1];
        Ok(())
    })?;
    let cov_mc = w[2].mean - w[0].mean * w[1].mean;
    let g2 = gamma(1.0 + alpha).powi(2);
    let cov = (alpha * t.powf(2.0 * alpha) * incomplete_beta(alpha, alpha + 1.0, s / t)?
        + alpha * s.powf(2.0 * alpha) * beta(alpha, alpha + 1.0)
        - (s * t).powf(alpha))
        / g2;
    println!("Cov(Y({s}), Y({t}))  mc {cov_mc:.5}   exact {cov:.5} (path step 1e-3)");

    let mut rng = chunk_rng(13, 0);
    let path = inverse_sample_path(&stable, &[0.25, 0.5, 0.75, 1.0], 1e-3, &mut rng)?;
    println!("one path: {:?}", path.values);
    Ok(())
}
