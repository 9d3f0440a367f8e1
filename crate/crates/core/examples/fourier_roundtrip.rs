//! Spectrum to TED and back for one comb tooth, with the Parseval check.

use sphere_sfwm::config::RunConfig;
use sphere_sfwm::temporal::{spectrum_from_ted, ted_from_spectrum, TedOptions};

fn main() -> sphere_sfwm::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.couplings.q_signal = 1e7;
    cfg.couplings.q_idler = 1e7;
    cfg.grids.band_hz = 2e12;
    let model = cfg.sfwm_model()?;
    let spec = model.spectrum(model.tooth_grid(0, 60.0)?)?;
    let ted = ted_from_spectrum(&spec, TedOptions::default())?;

    let (grid, back) = spectrum_from_ted(&ted)?;
    let i0 = grid.nearest(spec.grid.start).expect("spectrum inside the padded grid");
    let err = spec
        .values
        .iter()
        .zip(&back[i0..])
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / spec.max();
    let sum: f64 = spec.values.iter().sum::<f64>() * spec.grid.step;
    let t0 = ted.grid.nearest(0.0).expect("T = 0 on the grid");
    println!("{} spectral samples, {} delay samples", spec.grid.len, ted.grid.len);
    println!("round-trip error {err:.2e}");
    println!("Parseval: sum R dOmega = {sum:.6e}, 2 pi R~(0) = {:.6e}", std::f64::consts::TAU * ted.values[t0]);
    println!("imaginary residual {:.2e}", ted.imag_residual());
    Ok(())
}
