//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use sphere_sfwm::analysis::{energy_conservation_check, herald_width, q_from_linewidth};
use sphere_sfwm::cavity::{airy_mode_intensity, airy_profile, fit_airy, CouplingSpec, FitOptions, PumpLine, TransmissionScan};
use sphere_sfwm::channels::{ChannelKind, ChannelTable};
use sphere_sfwm::cli::{run, Cli};
use sphere_sfwm::numeric::{fwhm_of_fn, mean_std, UniformGrid};
use sphere_sfwm::resonator::{
    resonance_wavelength, Dispersion, ModeIndex, Polarization, SphereDispersion, SphereSpec,
};
use sphere_sfwm::sfwm::{phasematch_grid, NonlinearParams, SfwmModel};
use sphere_sfwm::temporal::{
    lorentzian_ted, spectrum_from_ted, ted_from_spectrum, tooth_period, LineshapeOptions, TedOptions, TedTrace,
};
use sphere_sfwm::units::{SPEED_OF_LIGHT, TWO_PI};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn te(radius: f64) -> Result<SphereDispersion, String> {
    Ok(SphereDispersion::new(SphereSpec::silica(radius).map_err(e)?, Polarization::TE))
}

fn mode_identification() -> Outcome {
    let disp = te(135e-6)?;
    let target = 1550.92e-9;
    let (mode, lambda) = disp.nearest_mode(target).map_err(e)?;
    // local FSR in wavelength from the two neighbouring orders
    let sphere = SphereSpec::silica(135e-6).map_err(e)?;
    let lam = |l: u32| resonance_wavelength(&sphere, &ModeIndex::fundamental(l, Polarization::TE).unwrap());
    let fsr_nm = 0.5 * (lam(mode.l() - 1).map_err(e)? - lam(mode.l() + 1).map_err(e)?);
    let off = (lambda - target).abs();
    check(
        (772..=776).contains(&mode.l()) && off < fsr_nm,
        format!(
            "l* = {}, |lambda - 1550.92 nm| = {:.3} nm < FSR {:.3} nm",
            mode.l(),
            off * 1e9,
            fsr_nm * 1e9
        ),
    )
}

/// Group-index FSR from effective indices n_eff(λ_l) = lλ_l/(2πR) of the
/// resonances themselves, differentiated over l ± 5.
fn fsr_oracle(radius: f64, l: u32) -> Result<f64, String> {
    let sphere = SphereSpec::silica(radius).map_err(e)?;
    let at = |l: u32| -> Result<(f64, f64), String> {
        let lambda = resonance_wavelength(&sphere, &ModeIndex::fundamental(l, Polarization::TE).unwrap()).map_err(e)?;
        Ok((TWO_PI * SPEED_OF_LIGHT / lambda, l as f64 * lambda / (TWO_PI * radius)))
    };
    let (w0, n0) = at(l)?;
    let (wa, na) = at(l - 5)?;
    let (wb, nb) = at(l + 5)?;
    let n_g = n0 + w0 * (nb - na) / (wb - wa);
    Ok(SPEED_OF_LIGHT / (n_g * TWO_PI * radius))
}

fn free_spectral_range() -> Outcome {
    let big = te(180e-6)?;
    let (m180, l180) = big.nearest_mode(1550e-9).map_err(e)?;
    let f180 = big.fsr(big.resonance(m180.l()).map_err(e)?).map_err(e)?;
    let fsr_nm = l180 * l180 * (f180 / TWO_PI) / SPEED_OF_LIGHT * 1e9;

    let small = te(135e-6)?;
    let (m135, _) = small.nearest_mode(1550e-9).map_err(e)?;
    let f135 = small.fsr(small.resonance(m135.l()).map_err(e)?).map_err(e)? / TWO_PI;
    let oracle = fsr_oracle(135e-6, m135.l())?;
    let rel = (f135 / oracle - 1.0).abs();
    check(
        (fsr_nm / 1.4 - 1.0).abs() <= 0.15 && (f135 * 1e-12 - 0.24).abs() < 0.024 && rel < 0.02,
        format!(
            "R = 180 um: {fsr_nm:.3} nm; R = 135 um: {:.4} THz vs c/(n_g L) {:.4} THz ({:.2e} rel)",
            f135 * 1e-12,
            oracle * 1e-12,
            rel
        ),
    )
}

fn q_linewidth() -> Outcome {
    let disp = te(135e-6)?;
    let (mode, _) = disp.nearest_mode(SPEED_OF_LIGHT / 193.4e12).map_err(e)?;
    let w0 = disp.resonance(mode.l()).map_err(e)?;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for q in [1e6, 1e7, 1e8] {
        let c = CouplingSpec::shared(q).signal(&disp, w0).map_err(e)?;
        let fwhm = fwhm_of_fn(|w| airy_mode_intensity(w, &c, &disp).unwrap_or(0.0), w0, w0 / q).map_err(e)?;
        let rel = (fwhm / (w0 / q) - 1.0).abs();
        worst = worst.max(rel);
        parts.push(format!("Q={q:.0e}: {:.2e}", rel));
    }
    check(worst < 0.02, format!("FWHM vs nu/Q relative error {}", parts.join(", ")))
}

fn min_g2(radius: f64) -> Result<f64, String> {
    let sphere = SphereSpec::silica(radius).map_err(e)?;
    let disp = SphereDispersion::new(sphere.clone(), Polarization::TE);
    let (mode, lambda) = disp.nearest_mode(1550.92e-9).map_err(e)?;
    let wp = disp.resonance(mode.l()).map_err(e)?;
    let n = sphere.material.refractive_index(lambda).map_err(e)?;
    let kerr = NonlinearParams::default().kerr_mismatch(1e8, n, radius);
    let pumps: Vec<f64> = (-5..=5).map(|i| TWO_PI * 2.5e9 * i as f64).collect();
    let omegas: Vec<f64> = (-40..=40).map(|i| TWO_PI * 50e9 * i as f64).collect();
    let g = phasematch_grid(&disp, kerr, wp, &pumps, &omegas).map_err(e)?;
    Ok(g.iter().flatten().copied().fold(f64::INFINITY, f64::min))
}

fn phasematching() -> Outcome {
    let small = min_g2(135e-6)?;
    let large = min_g2(1.35)?;
    check(
        small > 0.99 && large < 0.5,
        format!("min |g|^2: R = 135 um {small:.8}, R = 1.35 m {large:.3e}"),
    )
}

fn swept_model(q: f64) -> Result<SfwmModel, String> {
    let coupling = CouplingSpec {
        pump_line: PumpLine::Fwhm(20.4e6),
        ..CouplingSpec::shared(q)
    };
    let sphere = SphereSpec::silica(135e-6).map_err(e)?;
    SfwmModel::for_sphere(&sphere, Polarization::TE, 774, coupling, 0.0, TWO_PI * 10e12).map_err(e)
}

fn comb_ted_monotonicity() -> Outcome {
    let mut fwhm = Vec::new();
    let mut width = Vec::new();
    for q in [1e6, 1e7, 1e8] {
        let m = swept_model(q)?;
        fwhm.push(m.tooth_peak(0).map_err(e)?.fwhm / TWO_PI);
        let ted = ted_from_spectrum(&m.folded_comb(20, 60.0).map_err(e)?, TedOptions::default()).map_err(e)?;
        width.push(ted.widths().map_err(e)?.e_fold);
    }
    let m = swept_model(1e6)?;
    let spec = m.spectrum(m.comb_grid(20).map_err(e)?).map_err(e)?;
    let ted = ted_from_spectrum(&spec, TedOptions::default()).map_err(e)?;
    let period = tooth_period(&ted, 0.5).map_err(e)?;
    let expect = TWO_PI / m.fsr();
    let dec = fwhm.windows(2).all(|w| w[1] < w[0]);
    let inc = width.windows(2).all(|w| w[1] > w[0]);
    let per_ok = (period - expect).abs() <= ted.grid.step;
    check(
        dec && inc && per_ok,
        format!(
            "peak FWHM {:.3e}/{:.3e}/{:.3e} Hz, TED 1/e width {:.3e}/{:.3e}/{:.3e} s, period {:.6e} s vs {:.6e} s (step {:.1e})",
            fwhm[0], fwhm[1], fwhm[2], width[0], width[1], width[2], period, expect, ted.grid.step
        ),
    )
}

fn fourier_duality() -> Outcome {
    let m = swept_model(1e7)?;
    let spec = m.spectrum(m.tooth_grid(0, 60.0).map_err(e)?).map_err(e)?;
    let ted = ted_from_spectrum(&spec, TedOptions::default()).map_err(e)?;
    let (grid, back) = spectrum_from_ted(&ted).map_err(e)?;
    let i0 = grid.nearest(spec.grid.start).ok_or("spectrum outside padded grid")?;
    let top = spec.max();
    let round = spec
        .values
        .iter()
        .zip(&back[i0..])
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
        / top;
    // independent Parseval sum in the original sampling
    let sum: f64 = spec.values.iter().sum::<f64>() * spec.grid.step;
    let t0 = ted.grid.nearest(0.0).ok_or("T = 0 not on grid")?;
    let parseval = (sum - TWO_PI * ted.values[t0]).abs() / sum;
    check(
        round <= 1e-9 && parseval <= 1e-9,
        format!("round trip {round:.2e}, Parseval {parseval:.2e}"),
    )
}

fn binned(fwhm: f64, noise_seed: Option<u64>) -> Result<TedTrace, String> {
    let (n, group, half) = (10_000usize, 100usize, 8e-6);
    let step = 2.0 * half / n as f64;
    let mut rng = noise_seed.map(ChaCha8Rng::seed_from_u64);
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let mu = 400.0 * lorentzian_ted(fwhm, -half + (i as f64 + 0.5) * step);
            match rng.as_mut() {
                Some(r) => Poisson::new(mu + 2.0).unwrap().sample(r),
                None => mu,
            }
        })
        .collect();
    let (means, sigma): (Vec<f64>, Vec<f64>) = samples.chunks(group).map(mean_std).unzip();
    let grid = UniformGrid::new(-half + 0.5 * group as f64 * step, group as f64 * step, means.len()).map_err(e)?;
    TedTrace::new(grid, means, Some(sigma)).map_err(e)
}

fn linewidth_closure() -> Outcome {
    let fwhm = 0.366e6;
    let clean = herald_width(&binned(fwhm, None)?, 1561.31, LineshapeOptions::default()).map_err(e)?;
    let opts = LineshapeOptions {
        subtract_baseline: true,
        ..LineshapeOptions::default()
    };
    let mut noisy_worst = 0.0f64;
    for seed in 1..=5 {
        let r = herald_width(&binned(fwhm, Some(seed))?, 1561.31, opts).map_err(e)?;
        noisy_worst = noisy_worst.max((r.linewidth_hz / fwhm - 1.0).abs());
    }
    let clean_err = (clean.linewidth_hz / fwhm - 1.0).abs();
    let nu = |nm: f64| SPEED_OF_LIGHT / (nm * 1e-9);
    let q1 = q_from_linewidth(nu(1561.31), 0.366e6).map_err(e)?;
    let q2 = q_from_linewidth(nu(1562.30), 3.376e6).map_err(e)?;
    let q_ok = (q1 / 5.3e8 - 1.0).abs() < 0.03 && (q2 / 0.57e8 - 1.0).abs() < 0.03;
    check(
        clean_err < 0.05 && noisy_worst < 0.10 && q_ok,
        format!(
            "noise-free {:.2}%, Poisson worst of 5 seeds {:.2}%, Q {q1:.3e} and {q2:.3e}",
            100.0 * clean_err,
            100.0 * noisy_worst
        ),
    )
}

fn airy_fit() -> Outcome {
    let fwhm = 20.4e6;
    let scan = TransmissionScan::synthetic(|f| airy_profile(f, fwhm, None), 0.6, 200e6, 2001, 0.01, 42).map_err(e)?;
    let fit = fit_airy(&scan, FitOptions::default()).map_err(e)?;
    let rel = (fit.fwhm_hz / fwhm - 1.0).abs();
    check(rel < 0.05, format!("fitted FWHM {:.4} MHz ({:.2}%)", fit.fwhm_hz * 1e-6, 100.0 * rel))
}

fn energy_conservation() -> Outcome {
    let t = ChannelTable::builtin();
    let p = t.lookup(ChannelKind::Dwdm, 33).map_err(e)?;
    let s = t.lookup(ChannelKind::Dwdm, 47).map_err(e)?;
    let c = energy_conservation_check(p.center_nm, s.center_nm, 1562.30, 0.5 * s.fwhm_nm).map_err(e)?;
    // oracle: 1/λ_i = 2/λ_p − 1/λ_s
    let oracle = 1.0 / (2.0 / 1550.92 - 1.0 / 1539.77);
    check(
        c.consistent && (c.predicted_nm - oracle).abs() < 1e-9 && (p.center_nm, s.center_nm) == (1550.92, 1539.77),
        format!(
            "predicted {:.3} nm vs 1562.30 nm, tolerance {:.3} nm",
            c.predicted_nm, c.tolerance_nm
        ),
    )
}

fn run_once(cmd: &str, dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let args = ["sphere-sfwm", cmd, "--seed", "7", "--out-dir", dir.to_str().unwrap()];
    let cli = <Cli as clap::Parser>::try_parse_from(args).map_err(e)?;
    let files = run(&cli).map_err(e)?;
    files
        .iter()
        .map(|f| {
            let name = f.file_name().unwrap().to_string_lossy().to_string();
            std::fs::read(f).map(|b| (name, b)).map_err(e)
        })
        .collect()
}

fn determinism() -> Outcome {
    let cmds = [
        "resonances",
        "dispersion",
        "phasematch",
        "jsi",
        "comb",
        "ted",
        "herald-width",
        "fit-airy",
        "analyze",
        "defaults",
    ];
    let mut files = 0;
    for cmd in cmds {
        let (a, b) = (tempfile::tempdir().map_err(e)?, tempfile::tempdir().map_err(e)?);
        let first = run_once(cmd, a.path())?;
        let second = run_once(cmd, b.path())?;
        if first != second {
            return Err(format!("`{cmd}` output differs between runs"));
        }
        files += first.len();
    }
    Ok(format!("{} subcommands, {files} files byte-identical across two runs", cmds.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("mode identification", mode_identification, Duration::from_secs(1)),
        ("free spectral range", free_spectral_range, Duration::from_secs(1)),
        ("Q-linewidth identity", q_linewidth, Duration::from_secs(1)),
        ("phasematching flatness", phasematching, Duration::from_secs(10)),
        ("comb/TED monotonicity", comb_ted_monotonicity, Duration::from_secs(60)),
        ("Fourier duality", fourier_duality, Duration::from_secs(5)),
        ("linewidth-inference closure", linewidth_closure, Duration::from_secs(30)),
        ("Airy fit", airy_fit, Duration::from_secs(5)),
        ("energy-conservation bookkeeping", energy_conservation, Duration::from_secs(1)),
        ("determinism", determinism, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let took = t.elapsed();
        let over = took > *budget;
        let (tag, detail) = match &outcome {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over time budget {budget:?}")),
            Err(d) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {tag} {name} [{:.2} s]: {detail}", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
