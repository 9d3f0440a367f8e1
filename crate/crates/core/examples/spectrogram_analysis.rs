//! Synthetic filtered coincidence spectrogram: marginals, energy
//! bookkeeping against the DWDM grid and the linewidth of the idler.

use sphere_sfwm::analysis::{
    energy_conservation_check, herald_width, marginal_center, marginals, ted_envelope, SyntheticSpectrogram,
};
use sphere_sfwm::channels::{ChannelKind, ChannelTable};
use sphere_sfwm::numeric::UniformGrid;
use sphere_sfwm::temporal::{lorentzian_ted, LineshapeOptions};

fn main() -> sphere_sfwm::Result<()> {
    let table = ChannelTable::builtin();
    let pump = table.lookup(ChannelKind::Dwdm, 33)?;
    let signal = table.lookup(ChannelKind::Dwdm, 47)?;
    let synth = SyntheticSpectrogram {
        pump_nm: pump.center_nm,
        signal_nm: signal.center_nm,
        filter_fwhm_nm: signal.fwhm_nm,
        lambda_axis: UniformGrid::new(1560.5, 0.02, 200)?,
        t_axis: UniformGrid::new(-1e-6, 2e-10, 10_000)?,
        peak_counts: 300.0,
        background_counts: 1.0,
    };
    let sg = synth.generate(&|t| lorentzian_ted(3.376e6, t), 5)?;

    let m = marginals(&sg, (1560.5, 1565.0), (-1e-6, 1e-6))?;
    let centre = marginal_center(&m.lambda_nm, &m.spectral)?;
    let check = energy_conservation_check(pump.center_nm, signal.center_nm, centre, 0.5 * signal.fwhm_nm)?;
    println!(
        "idler observed {:.3} nm, predicted {:.3} nm, consistent within {:.3} nm: {}",
        check.observed_nm, check.predicted_nm, check.tolerance_nm, check.consistent
    );

    let env = ted_envelope(&sg, centre, 100)?;
    let opts = LineshapeOptions {
        subtract_baseline: true,
        ..LineshapeOptions::default()
    };
    let r = herald_width(&env.trace, centre, opts)?;
    println!("linewidth {:.3} MHz, Q = {:.3e}", r.linewidth_hz * 1e-6, r.q);
    Ok(())
}
