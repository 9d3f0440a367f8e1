//! Time-of-emission distributions for a Q sweep. The folded comb gives the
//! slow envelope; `--full` also transforms the whole Q = 1e6 comb to show
//! the fast oscillation at the round-trip period (about 10 s).

use sphere_sfwm::cavity::{CouplingSpec, PumpLine};
use sphere_sfwm::resonator::{Polarization, SphereSpec};
use sphere_sfwm::sfwm::SfwmModel;
use sphere_sfwm::temporal::{fwhm_from_e_fold, oscillation_envelope, ted_from_spectrum, tooth_period, TedOptions};
use sphere_sfwm::units::TWO_PI;

fn model(q: f64) -> sphere_sfwm::Result<SfwmModel> {
    let coupling = CouplingSpec {
        pump_line: PumpLine::Fwhm(20.4e6),
        ..CouplingSpec::shared(q)
    };
    SfwmModel::for_sphere(&SphereSpec::silica(135e-6)?, Polarization::TE, 774, coupling, 0.0, TWO_PI * 10e12)
}

fn main() -> sphere_sfwm::Result<()> {
    for q in [1e6, 1e7, 1e8] {
        let m = model(q)?;
        let ted = ted_from_spectrum(&m.folded_comb(20, 60.0)?, TedOptions::default())?;
        let w = ted.widths()?;
        println!(
            "Q = {q:.0e}: envelope FWHM {:.3} ns, 1/e width {:.3} ns, Lorentzian-equivalent {:.3} MHz",
            w.fwhm * 1e9,
            w.e_fold * 1e9,
            fwhm_from_e_fold(0.5 * w.e_fold) * 1e-6
        );
    }

    if std::env::args().any(|a| a == "--full") {
        let m = model(1e6)?;
        let spec = m.spectrum(m.comb_grid(20)?)?;
        let ted = ted_from_spectrum(&spec, TedOptions::default())?;
        let period = tooth_period(&ted, 0.5)?;
        let env = oscillation_envelope(&ted, period)?.widths()?;
        println!(
            "full comb: period {:.6} ps (2pi/FSR = {:.6} ps, step {:.3} fs), envelope FWHM {:.3} ns",
            period * 1e12,
            TWO_PI / m.fsr() * 1e12,
            ted.grid.step * 1e15,
            env.fwhm * 1e9
        );
    }
    Ok(())
}
