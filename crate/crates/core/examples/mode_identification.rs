//! Finds the TE resonance nearest the DWDM channel 33 pump and lists its
//! neighbours.

use sphere_sfwm::channels::{ChannelKind, ChannelTable};
use sphere_sfwm::resonator::{Dispersion, Polarization, ResonanceTable, SphereDispersion, SphereSpec};
use sphere_sfwm::units::TWO_PI;

fn main() -> sphere_sfwm::Result<()> {
    let sphere = SphereSpec::silica(135e-6)?;
    let disp = SphereDispersion::new(sphere.clone(), Polarization::TE);
    let pump_nm = ChannelTable::builtin().lookup(ChannelKind::Dwdm, 33)?.center_nm;

    let (mode, lambda) = disp.nearest_mode(pump_nm * 1e-9)?;
    let fsr = disp.fsr(disp.resonance(mode.l())?)?;
    println!("pump {pump_nm} nm -> l = {}, resonance at {:.4} nm", mode.l(), lambda * 1e9);
    println!("local FSR {:.2} GHz", fsr / TWO_PI * 1e-9);

    let table = ResonanceTable::for_orders(&sphere, Polarization::TE, mode.l() - 3..=mode.l() + 3)?;
    println!("{:>5} {:>12} {:>10}", "l", "lambda_nm", "fsr_GHz");
    for (r, f) in table.entries.iter().zip(table.fsr()) {
        let f = f.map_or("-".to_string(), |f| format!("{:.3}", f / TWO_PI * 1e-9));
        println!("{:>5} {:>12.4} {:>10}", r.mode.l(), r.wavelength * 1e9, f);
    }
    Ok(())
}
