//! |g|² over a pump-detuning by Ω rectangle for a small and a very large
//! sphere.

use sphere_sfwm::cavity::{CouplingSpec, PumpLine};
use sphere_sfwm::resonator::{Dispersion, Polarization, SphereDispersion, SphereSpec};
use sphere_sfwm::sfwm::{phasematch_grid, NonlinearParams};
use sphere_sfwm::units::TWO_PI;

fn main() -> sphere_sfwm::Result<()> {
    let pumps: Vec<f64> = (-5..=5).map(|i| TWO_PI * 2.5e9 * i as f64).collect();
    let omegas: Vec<f64> = (-40..=40).map(|i| TWO_PI * 50e9 * i as f64).collect();
    let q = CouplingSpec {
        pump_line: PumpLine::Fwhm(20.4e6),
        ..CouplingSpec::shared(1e8)
    };
    for radius in [135e-6, 1.35] {
        let sphere = SphereSpec::silica(radius)?;
        let disp = SphereDispersion::new(sphere.clone(), Polarization::TE);
        let (mode, lambda) = disp.nearest_mode(1550.92e-9)?;
        let wp = disp.resonance(mode.l())?;
        let n = sphere.material.refractive_index(lambda)?;
        let kerr = NonlinearParams::default().kerr_mismatch(q.q_pump, n, radius);
        let g = phasematch_grid(&disp, kerr, wp, &pumps, &omegas)?;
        let min = g.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        println!("R = {radius:e} m: l = {}, 2gP = {kerr:.3e} rad/m, min |g|^2 = {min:.6}", mode.l());
        // coarse text map, rows = pump detuning
        for row in &g {
            let line: String = row
                .iter()
                .map(|v| match v {
                    v if *v > 0.99 => '#',
                    v if *v > 0.5 => '+',
                    v if *v > 0.1 => '.',
                    _ => ' ',
                })
                .collect();
            println!("  |{line}|");
        }
    }
    Ok(())
}
