//! Linewidth of a cavity resonance for several quality factors, measured
//! numerically on |A|² and compared with ν/Q.

use sphere_sfwm::cavity::{airy_mode_intensity, CouplingSpec};
use sphere_sfwm::numeric::fwhm_of_fn;
use sphere_sfwm::resonator::{Dispersion, Polarization, SphereDispersion, SphereSpec};
use sphere_sfwm::units::TWO_PI;

fn main() -> sphere_sfwm::Result<()> {
    let disp = SphereDispersion::new(SphereSpec::silica(135e-6)?, Polarization::TE);
    let (mode, _) = disp.nearest_mode(1550.0e-9)?;
    let w0 = disp.resonance(mode.l())?;
    for q in [1e6, 1e7, 1e8, 1e9] {
        let spec = CouplingSpec::shared(q);
        let c = spec.signal(&disp, w0)?;
        let f = |w: f64| airy_mode_intensity(w, &c, &disp).unwrap_or(0.0);
        let fwhm = fwhm_of_fn(f, w0, w0 / q)? / TWO_PI;
        let expect = w0 / TWO_PI / q;
        println!(
            "Q = {q:.0e}: r = {:.9}, FWHM = {:.4e} Hz, nu/Q = {:.4e} Hz, ratio {:.4}",
            c.r,
            fwhm,
            expect,
            fwhm / expect
        );
    }
    Ok(())
}
