//! Idler spectral intensity for a Q sweep at fixed pump linewidth: the
//! teeth narrow and the comb envelope narrows as Q grows.

use sphere_sfwm::cavity::{CouplingSpec, PumpLine};
use sphere_sfwm::resonator::{Polarization, SphereSpec};
use sphere_sfwm::sfwm::{envelope_width, SfwmModel};
use sphere_sfwm::units::TWO_PI;

fn main() -> sphere_sfwm::Result<()> {
    let sphere = SphereSpec::silica(135e-6)?;
    for q in [1e6, 1e7, 1e8] {
        let coupling = CouplingSpec {
            pump_line: PumpLine::Fwhm(20.4e6),
            ..CouplingSpec::shared(q)
        };
        let model = SfwmModel::for_sphere(&sphere, Polarization::TE, 774, coupling, 0.0, TWO_PI * 10e12)?;
        let peaks = model.tooth_peaks(30)?;
        let top = peaks.iter().fold(0.0f64, |m, p| m.max(p.height));
        let above_half = peaks.iter().filter(|p| p.height > 0.5 * top).count();
        println!(
            "Q = {q:.0e}: tooth FWHM {:.3e} Hz, envelope width {:.3e} Hz, {above_half} teeth above half maximum",
            peaks[30].fwhm / TWO_PI,
            envelope_width(&peaks) / TWO_PI
        );
    }
    Ok(())
}
