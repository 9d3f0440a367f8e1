//! Effective and group index, and the drift of the free spectral range,
//! across the C band for two sphere sizes.

use sphere_sfwm::resonator::{fsr_drift_curve, Dispersion, Polarization, SphereDispersion, SphereSpec};
use sphere_sfwm::units::{wavelength_to_angular, SPEED_OF_LIGHT, TWO_PI};

fn main() -> sphere_sfwm::Result<()> {
    for radius in [135e-6, 180e-6] {
        let disp = SphereDispersion::new(SphereSpec::silica(radius)?, Polarization::TE);
        println!("R = {:.0} um", radius * 1e6);
        println!("{:>10} {:>9} {:>9} {:>10} {:>9}", "lambda_nm", "n_eff", "n_g", "fsr_GHz", "fsr_nm");
        let lambdas: Vec<f64> = (0..=4).map(|i| 1530e-9 + 10e-9 * i as f64).collect();
        let omegas: Vec<f64> = lambdas.iter().map(|&l| wavelength_to_angular(l)).collect();
        let fsr = fsr_drift_curve(&disp, &omegas)?;
        for ((l, w), f) in lambdas.iter().zip(&omegas).zip(&fsr) {
            let n_eff = disp.wavenumber(*w)? * SPEED_OF_LIGHT / w;
            let fsr_nm = l * l * (f / TWO_PI) / SPEED_OF_LIGHT;
            println!(
                "{:>10.1} {:>9.5} {:>9.5} {:>10.3} {:>9.4}",
                l * 1e9,
                n_eff,
                disp.group_index(*w)?,
                f / TWO_PI * 1e-9,
                fsr_nm * 1e9
            );
        }
    }
    Ok(())
}
