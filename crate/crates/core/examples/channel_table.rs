//! DWDM and CWDM channel lookups and idler wavelengths implied by energy
//! conservation with a channel 33 pump.

use sphere_sfwm::channels::{idler_wavelength_nm, ChannelKind, ChannelTable};

fn main() -> sphere_sfwm::Result<()> {
    let table = ChannelTable::builtin();
    let (lo, hi) = table.dwdm_range();
    println!("DWDM channels {lo}..={hi}, CWDM channels 1..={}", table.cwdm_count());
    let pump = table.lookup(ChannelKind::Dwdm, 33)?;
    for ch in [34, 47, 48, 49] {
        let s = table.lookup(ChannelKind::Dwdm, ch)?;
        println!(
            "Ch{ch}: {:.2} nm{} -> idler {:.3} nm",
            s.center_nm,
            if s.extrapolated { " (grid)" } else { "" },
            idler_wavelength_nm(pump.center_nm, s.center_nm)?
        );
    }
    for c in table.channels(ChannelKind::Cwdm).iter().step_by(4) {
        println!("CWDM {}: {:.0} nm, FWHM {} nm", c.index, c.center_nm, c.fwhm_nm);
    }
    Ok(())
}
