//! Decomposes the Q = 1e6 comb into envelope, spacing and tooth profile and
//! compares the tooth-sum TED with the direct transform. Takes about 15 s.

use sphere_sfwm::cavity::{CouplingSpec, PumpLine};
use sphere_sfwm::resonator::{Polarization, SphereSpec};
use sphere_sfwm::sfwm::SfwmModel;
use sphere_sfwm::temporal::{comb_decompose, oscillation_envelope, ted_comb_model, ted_from_spectrum, TedOptions};
use sphere_sfwm::units::TWO_PI;

fn main() -> sphere_sfwm::Result<()> {
    let coupling = CouplingSpec {
        pump_line: PumpLine::Fwhm(20.4e6),
        ..CouplingSpec::shared(1e6)
    };
    let model = SfwmModel::for_sphere(&SphereSpec::silica(135e-6)?, Polarization::TE, 774, coupling, 0.0, TWO_PI * 10e12)?;
    let spec = model.spectrum(model.comb_grid(20)?)?;
    let d = comb_decompose(spec.grid, &spec.values, 1e-3)?;
    println!(
        "spacing {:.6e} rad/s (FSR {:.6e}), profile FWHM {:.3e} Hz, envelope FWHM {:.3e} Hz",
        d.spacing,
        model.fsr(),
        d.profile_fwhm / TWO_PI,
        d.envelope_fwhm().unwrap_or(f64::NAN) / TWO_PI
    );
    println!("reconstruction error {:.1}%", 100.0 * d.reconstruction_error);

    let direct = ted_from_spectrum(&spec, TedOptions::default())?;
    let modelled = ted_comb_model(&d, direct.grid)?;
    let period = TWO_PI / d.spacing;
    let a = oscillation_envelope(&direct, period)?;
    let b = oscillation_envelope(&modelled, period)?;
    let (wa, wb) = (a.widths()?, b.widths()?);
    println!("envelope FWHM direct {:.3} ns, comb model {:.3} ns", wa.fwhm * 1e9, wb.fwhm * 1e9);
    Ok(())
}
