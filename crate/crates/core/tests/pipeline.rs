//! End-to-end checks across modules: spectrum → TED → linewidth, and the
//! comb model against the direct transform.

use sphere_sfwm::analysis::herald_width;
use sphere_sfwm::cavity::{CouplingSpec, PumpLine};
use sphere_sfwm::io::{read_ted, write_ted};
use sphere_sfwm::resonator::{Polarization, SphereSpec};
use sphere_sfwm::sfwm::SfwmModel;
use sphere_sfwm::temporal::{
    comb_decompose, oscillation_envelope, ted_comb_model, ted_from_spectrum, LineshapeOptions, TedOptions,
};
use sphere_sfwm::units::{angular_to_wavelength, TWO_PI};

fn model(q: f64) -> SfwmModel {
    let coupling = CouplingSpec {
        pump_line: PumpLine::Fwhm(20.4e6),
        ..CouplingSpec::shared(q)
    };
    SfwmModel::for_sphere(
        &SphereSpec::silica(135e-6).unwrap(),
        Polarization::TE,
        774,
        coupling,
        0.0,
        TWO_PI * 10e12,
    )
    .unwrap()
}

#[test]
fn linewidth_recovered_from_modelled_ted() {
    let m = model(1e8);
    let ted = ted_from_spectrum(&m.folded_comb(20, 60.0).unwrap(), TedOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ted.csv");
    write_ted(&path, &ted).unwrap();
    let back = read_ted(&path).unwrap();
    let nm = angular_to_wavelength(m.omega_p0) * 1e9;
    let r = herald_width(&back, nm, LineshapeOptions::default()).unwrap();
    let expect = m.omega_p0 / TWO_PI / 1e8;
    assert!((r.linewidth_hz / expect - 1.0).abs() < 0.10, "{} vs {expect}", r.linewidth_hz);
    assert!((r.q / 1e8 - 1.0).abs() < 0.10);
}

#[test]
fn comb_model_matches_direct_transform_at_envelope_level() {
    let m = model(1e6);
    let spec = m.spectrum(m.comb_grid(20).unwrap()).unwrap();
    let d = comb_decompose(spec.grid, &spec.values, 1e-3).unwrap();
    assert!((d.spacing / m.fsr() - 1.0).abs() < 1e-4);
    let direct = ted_from_spectrum(&spec, TedOptions::default()).unwrap();
    let modelled = ted_comb_model(&d, direct.grid).unwrap();
    let period = TWO_PI / d.spacing;
    let a = oscillation_envelope(&direct, period).unwrap();
    let b = oscillation_envelope(&modelled, period).unwrap();
    let (wa, wb) = (a.widths().unwrap(), b.widths().unwrap());
    assert!((wa.fwhm / wb.fwhm - 1.0).abs() < 0.05, "{wa:?} vs {wb:?}");
    assert!((wa.e_fold / wb.e_fold - 1.0).abs() < 0.05, "{wa:?} vs {wb:?}");
    // replica peaks agree point by point on the envelope
    let (amax, bmax) = (a.max_abs(), b.max_abs());
    let i0 = a.grid.nearest(0.0).unwrap();
    for k in [0usize, 100, 1000] {
        let i = i0 + (k as f64 * period / a.grid.step).round() as usize;
        let (x, y) = (a.values[i] / amax, b.values[i] / bmax);
        assert!((x - y).abs() < 0.02, "replica {k}: {x} vs {y}");
    }
}
