//! Infers the idler linewidth and Q from a noisy, binned TED envelope.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use sphere_sfwm::analysis::herald_width;
use sphere_sfwm::numeric::{mean_std, UniformGrid};
use sphere_sfwm::temporal::{lorentzian_ted, LineshapeOptions, TedTrace};

fn main() -> sphere_sfwm::Result<()> {
    let (fwhm, idler_nm) = (0.366e6, 1561.31);
    let (samples, group) = (10_000usize, 100usize);
    let half = 8e-6;
    let step = 2.0 * half / samples as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let counts: Vec<f64> = (0..samples)
        .map(|i| {
            let mu = 2.0 + 400.0 * lorentzian_ted(fwhm, -half + i as f64 * step);
            Poisson::new(mu).unwrap().sample(&mut rng)
        })
        .collect();
    let (means, sigma): (Vec<f64>, Vec<f64>) = counts.chunks(group).map(mean_std).unzip();
    let grid = UniformGrid::new(-half + 0.5 * (group - 1) as f64 * step, step * group as f64, means.len())?;
    let envelope = TedTrace::new(grid, means, Some(sigma))?;

    let opts = LineshapeOptions {
        subtract_baseline: true,
        ..LineshapeOptions::default()
    };
    let r = herald_width(&envelope, idler_nm, opts)?;
    println!("true linewidth {:.4} MHz, inferred {:.4} MHz", fwhm * 1e-6, r.linewidth_hz * 1e-6);
    println!("Q = {:.3e}", r.q);
    println!("TED widths: FWHM {:.3} us, full 1/e {:.3} us", r.ted.fwhm * 1e6, r.ted.e_fold * 1e6);
    Ok(())
}
