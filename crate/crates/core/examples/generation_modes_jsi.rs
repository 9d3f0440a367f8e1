//! Signal/idler resonance pairs around the pump and the joint spectral
//! intensity of the central pair in the mixed and pure pump states.

use sphere_sfwm::config::RunConfig;
use sphere_sfwm::numeric::UniformGrid;
use sphere_sfwm::sfwm::{generation_modes, jsi_2d, JsiMode};
use sphere_sfwm::units::TWO_PI;

fn main() -> sphere_sfwm::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.grids.band_hz = 6e12;
    let model = cfg.sfwm_model()?;
    let modes = generation_modes(model.dispersion(), model.pump_l, 24, None)?;
    println!("pump l = {}, defect grows monotonically: {}", modes.pump_l, modes.defect_is_monotone());
    for p in modes.strided(6) {
        println!(
            "  j = {:>2}: l_s = {}, l_i = {}, Omega = {:.4} THz, defect = {:.3} MHz",
            p.j,
            p.l_signal,
            p.l_idler,
            p.omega / TWO_PI * 1e-12,
            p.defect / TWO_PI * 1e-6
        );
    }

    let w0 = model.omega_p0;
    let half = 4.0 * w0 / cfg.couplings.q_signal;
    let grid = UniformGrid::new(w0 - half, 2.0 * half / 60.0, 61)?;
    for mode in [JsiMode::Mixed, JsiMode::Pure { omega_pump: w0 }] {
        let jsi = jsi_2d(&model, grid, grid, mode)?;
        let (i, k) = jsi.argmax();
        let support = jsi.values.iter().filter(|v| **v > 0.0).count();
        println!(
            "{mode:?}: peak at ({:+.2}, {:+.2}) MHz, {support} non-zero cells",
            (grid.at(i) - w0) / TWO_PI * 1e-6,
            (grid.at(k) - w0) / TWO_PI * 1e-6
        );
    }
    Ok(())
}
