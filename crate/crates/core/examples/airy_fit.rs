//! Fits a noisy synthetic transmission dip and reports the loaded Q.

use sphere_sfwm::cavity::{airy_profile, fit_airy, FitOptions, TransmissionScan};
use sphere_sfwm::units::SPEED_OF_LIGHT;

fn main() -> sphere_sfwm::Result<()> {
    let fwhm = 20.4e6;
    let scan = TransmissionScan::synthetic(|f| airy_profile(f, fwhm, None), 0.6, 200e6, 2001, 0.01, 3)?;
    let fit = fit_airy(&scan, FitOptions::default())?;
    let nu = SPEED_OF_LIGHT / 1550.92e-9;
    println!("FWHM {:.3} +/- {:.3} MHz", fit.fwhm_hz * 1e-6, fit.fwhm_sigma_hz * 1e-6);
    println!("centre {:.1} +/- {:.1} kHz, depth {:.3}", fit.center_hz * 1e-3, fit.center_sigma_hz * 1e-3, fit.depth);
    println!("loaded Q = {:.3e}, residual rms {:.4}", nu / fit.fwhm_hz, fit.residual_rms);
    Ok(())
}
