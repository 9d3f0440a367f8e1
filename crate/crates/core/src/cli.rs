//! Command-line front end. Each subcommand reads a [`RunConfig`], runs one
//! pipeline stage and writes plain-text outputs into the output directory.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::analysis::{
    energy_conservation_check, herald_width, marginal_center, marginals, ted_envelope, HeraldReport, Spectrogram2D, SpectrogramMeta,
    SyntheticSpectrogram,
};
use crate::cavity::{airy_profile, fit_airy, FitOptions, TransmissionScan};
use crate::channels::{ChannelKind, ChannelTable};
use crate::config::{CombLayout, JsiState, RunConfig};
use crate::error::{Error, Result};
use crate::io::{read_ted, write_csv, write_matrix, write_ted, Cell};
use crate::numeric::{mean_std, UniformGrid};
use crate::resonator::{Dispersion, ResonanceTable};
use crate::sfwm::{generation_modes, jsi_2d, phasematch_grid, BiphotonSpectrum, JsiMode, SfwmModel};
use crate::temporal::{
    fwhm_from_e_fold, lorentzian_ted, oscillation_envelope, ted_from_spectrum, tooth_period, LineshapeOptions,
    TedOptions, TedTrace,
};
use crate::units::{angular_to_wavelength, SPEED_OF_LIGHT, TWO_PI};

#[derive(Debug, Parser)]
#[command(name = "sphere-sfwm", version, about = "Microsphere SFWM simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Seed for synthetic noise.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct QOverride {
    /// Sets Q of the signal and idler modes; the pump line is unchanged.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_parser = parse_layout)]
    pub layout: Option<CombLayout>,
}

fn parse_layout(s: &str) -> std::result::Result<CombLayout, String> {
    match s {
        "full" => Ok(CombLayout::Full),
        "central" => Ok(CombLayout::Central),
        "folded" => Ok(CombLayout::Folded),
        _ => Err(format!("unknown layout '{s}' (full, central, folded)")),
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Resonance table around the pump.
    Resonances,
    /// Wavenumber, effective and group index and FSR across a band.
    Dispersion,
    /// Phasematching strength over pump detuning and Ω.
    Phasematch,
    /// Generation-mode pairs and joint spectral intensity patches.
    Jsi,
    /// Idler spectral intensity and per-tooth peaks.
    Comb(QOverride),
    /// Time-of-emission distribution of the comb.
    Ted(QOverride),
    /// Linewidth and Q from a TED envelope.
    HeraldWidth,
    /// Airy fit of a transmission scan.
    FitAiry,
    /// Spectrogram marginals, energy bookkeeping and linewidth.
    Analyze,
    /// Writes the default configuration.
    Defaults,
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn load_config(global: &GlobalArgs) -> Result<RunConfig> {
    match &global.config {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

/// Runs one subcommand and returns the files written, in order.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(Error::config("--threads", "must be positive"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut cfg = load_config(&cli.global)?;
    let out = Output::new(&cli.global.out_dir)?;
    let seed = cli.global.seed;
    match &cli.command {
        Command::Resonances => resonances(&cfg, out),
        Command::Dispersion => dispersion(&cfg, out),
        Command::Phasematch => phasematch(&cfg, out),
        Command::Jsi => jsi(&cfg, out),
        Command::Comb(o) => {
            apply_override(&mut cfg, o)?;
            comb(&cfg, out)
        }
        Command::Ted(o) => {
            apply_override(&mut cfg, o)?;
            ted(&cfg, out)
        }
        Command::HeraldWidth => herald(&cfg, out, seed),
        Command::FitAiry => airy(&cfg, out, seed),
        Command::Analyze => analyze(&cfg, out, seed),
        Command::Defaults => {
            let mut out = out;
            out.text("config.toml", &cfg.to_toml_string())?;
            Ok(out.files)
        }
    }
}

fn apply_override(cfg: &mut RunConfig, o: &QOverride) -> Result<()> {
    if let Some(q) = o.q {
        cfg.couplings.q_signal = q;
        cfg.couplings.q_idler = q;
    }
    if let Some(l) = o.layout {
        cfg.model.comb_layout = l;
    }
    cfg.validate()
}

struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        let p = self.path(name);
        write_csv(&p, header, rows)
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.path(name);
        std::fs::write(p, text)?;
        Ok(())
    }

    fn report(&mut self, name: &str, rows: Vec<(&str, Cell, &str)>) -> Result<()> {
        let rows: Vec<Vec<Cell>> = rows
            .into_iter()
            .map(|(q, v, u)| vec![Cell::from(q), v, Cell::from(u)])
            .collect();
        self.csv(name, &["quantity", "value", "unit"], &rows)
    }
}

fn hz(omega: f64) -> f64 {
    omega / TWO_PI
}

fn resonances(cfg: &RunConfig, mut out: Output) -> Result<Vec<PathBuf>> {
    let sphere = cfg.sphere()?;
    let l = cfg.pump_l()?;
    let n = cfg.resonances.count.min(l - 1);
    let table = ResonanceTable::for_orders(&sphere, cfg.sphere.polarization, l - n..=l + n)?;
    let fsr = table.fsr();
    let rows: Vec<Vec<Cell>> = table
        .entries
        .iter()
        .enumerate()
        .map(|(i, r)| {
            // last row takes the spacing to the order below
            let f = fsr[i].unwrap_or_else(|| if i > 0 { r.omega - table.entries[i - 1].omega } else { f64::NAN });
            vec![
                r.mode.l().into(),
                r.mode.q().into(),
                r.mode.polarization().to_string().into(),
                (r.wavelength * 1e9).into(),
                (hz(r.omega) * 1e-12).into(),
                (hz(f) * 1e-9).into(),
            ]
        })
        .collect();
    out.csv(
        "resonances.csv",
        &["l", "q", "polarization", "lambda_nm", "freq_THz", "fsr_GHz"],
        &rows,
    )?;
    Ok(out.files)
}

fn dispersion(cfg: &RunConfig, mut out: Output) -> Result<Vec<PathBuf>> {
    let disp = cfg.dispersion_model()?;
    let wp = disp.resonance(cfg.pump_l()?)?;
    let span = TWO_PI * cfg.dispersion.span_hz;
    let n = cfg.dispersion.points;
    let grid = UniformGrid::new(wp - span, 2.0 * span / (n - 1) as f64, n)?;
    let rows = grid
        .values()
        .into_iter()
        .map(|w| {
            let k = disp.wavenumber(w)?;
            Ok(vec![
                (hz(w) * 1e-12).into(),
                (angular_to_wavelength(w) * 1e9).into(),
                k.into(),
                (k * SPEED_OF_LIGHT / w).into(),
                disp.group_index(w)?.into(),
                (hz(disp.fsr(w)?) * 1e-9).into(),
            ])
        })
        .collect::<Result<Vec<Vec<Cell>>>>()?;
    out.csv(
        "dispersion.csv",
        &["freq_THz", "lambda_nm", "k_per_m", "n_eff", "n_group", "fsr_GHz"],
        &rows,
    )?;
    Ok(out.files)
}

fn symmetric_axis(half_span: f64, points: usize) -> Result<Vec<f64>> {
    if points == 1 {
        return Ok(vec![0.0]);
    }
    Ok(UniformGrid::new(-half_span, 2.0 * half_span / (points - 1) as f64, points)?.values())
}

fn phasematch(cfg: &RunConfig, mut out: Output) -> Result<Vec<PathBuf>> {
    let pm = &cfg.phasematch;
    let mut c = cfg.clone();
    c.grids.band_hz = c.grids.band_hz.max(1.2 * pm.omega_span_hz + pm.pump_span_hz);
    let model = c.sfwm_model()?;
    let pumps_hz = symmetric_axis(pm.pump_span_hz, pm.pump_points)?;
    let omegas_hz = symmetric_axis(pm.omega_span_hz, pm.omega_points)?;
    let scale = |v: &[f64]| v.iter().map(|x| TWO_PI * x).collect::<Vec<_>>();
    let g = phasematch_grid(
        model.dispersion(),
        model.kerr,
        model.omega_p0,
        &scale(&pumps_hz),
        &scale(&omegas_hz),
    )?;
    let flat: Vec<f64> = g.concat();
    write_matrix(
        &out.path("phasematch.csv"),
        "pump_offset_Hz\\omega_offset_Hz",
        &pumps_hz,
        &omegas_hz,
        &flat,
    )?;
    let min = flat.iter().copied().fold(f64::INFINITY, f64::min);
    out.report(
        "phasematch_summary.csv",
        vec![
            ("min_g2", min.into(), "1"),
            ("kerr_mismatch", model.kerr.into(), "rad/m"),
            ("radius", cfg.sphere.radius_m.into(), "m"),
        ],
    )?;
    Ok(out.files)
}

fn jsi(cfg: &RunConfig, mut out: Output) -> Result<Vec<PathBuf>> {
    let j = &cfg.jsi;
    let model = cfg.sfwm_model()?;
    let n_pairs = (j.stride * j.regions.max(1)) as u32;
    let matrix = generation_modes(model.dispersion(), model.pump_l, n_pairs, None)?;
    let rows: Vec<Vec<Cell>> = matrix
        .pairs
        .iter()
        .map(|p| {
            vec![
                p.j.into(),
                p.l_signal.into(),
                p.l_idler.into(),
                (hz(p.omega_signal) * 1e-12).into(),
                (hz(p.omega_idler) * 1e-12).into(),
                hz(p.omega).into(),
                hz(p.defect).into(),
            ]
        })
        .collect();
    out.csv(
        "jsi_modes.csv",
        &["j", "l_signal", "l_idler", "signal_THz", "idler_THz", "omega_offset_Hz", "defect_Hz"],
        &rows,
    )?;
    let mode = match j.state {
        JsiState::Mixed => JsiMode::Mixed,
        JsiState::Pure => JsiMode::Pure {
            omega_pump: model.omega_p0,
        },
    };
    let mut marg_rows = Vec::new();
    for pair in matrix.strided(j.stride) {
        let half = j.half_width_linewidths * pair.omega_signal / cfg.couplings.q_signal;
        let step = 2.0 * half / (j.samples - 1) as f64;
        let sg = UniformGrid::new(pair.omega_signal - half, step, j.samples)?;
        let ig = UniformGrid::new(pair.omega_idler - half, step, j.samples)?;
        let jsi = jsi_2d(&model, sg, ig, mode)?;
        for w in &jsi.warnings {
            eprintln!("warning: pair {}: {w}", pair.j);
        }
        let rel = |g: &UniformGrid, c: f64| g.values().iter().map(|w| hz(w - c)).collect::<Vec<_>>();
        let s_axis = rel(&sg, pair.omega_signal);
        let i_axis = rel(&ig, pair.omega_idler);
        write_matrix(
            &out.path(&format!("jsi_j{:03}.csv", pair.j)),
            "signal_offset_Hz\\idler_offset_Hz",
            &s_axis,
            &i_axis,
            &jsi.values,
        )?;
        for (k, (sm, im)) in jsi.signal_marginal().iter().zip(jsi.idler_marginal()).enumerate() {
            marg_rows.push(vec![pair.j.into(), s_axis[k].into(), (*sm).into(), im.into()]);
        }
    }
    out.csv(
        "jsi_marginals.csv",
        &["j", "offset_Hz", "signal_marginal", "idler_marginal"],
        &marg_rows,
    )?;
    Ok(out.files)
}

/// Ω grid of the full comb: the explicit span/step when given.
fn full_grid(cfg: &RunConfig, model: &SfwmModel) -> Result<UniformGrid> {
    cfg.validate_grid(model)?;
    let g = &cfg.grids;
    let grid = match (g.omega_span_hz, g.omega_step_hz) {
        (None, None) => model.comb_grid(g.teeth)?,
        (span, step) => {
            let step = step.map_or(model.expected_min_fwhm() / 10.0, |s| TWO_PI * s);
            let span = span.map_or((g.teeth as f64 + 0.5) * model.fsr(), |s| TWO_PI * s);
            UniformGrid::centered(0.0, step, 2 * (span / step).ceil() as usize)?
        }
    };
    const MAX_POINTS: usize = 20_000_000;
    if grid.len > MAX_POINTS {
        return Err(Error::config(
            "model.comb_layout",
            format!(
                "a full comb needs {} samples at this Q; use the folded or central layout",
                grid.len
            ),
        ));
    }
    Ok(grid)
}

fn comb_spectrum(cfg: &RunConfig, model: &SfwmModel) -> Result<BiphotonSpectrum> {
    match cfg.model.comb_layout {
        CombLayout::Full => model.spectrum(full_grid(cfg, model)?),
        CombLayout::Central => model.spectrum(model.tooth_grid(0, cfg.grids.tooth_window_fwhm)?),
        CombLayout::Folded => model.folded_comb(cfg.grids.teeth, cfg.grids.tooth_window_fwhm),
    }
}

fn comb(cfg: &RunConfig, mut out: Output) -> Result<Vec<PathBuf>> {
    let model = cfg.sfwm_model()?;
    let spec = comb_spectrum(cfg, &model)?.normalized(cfg.model.normalization);
    let rows: Vec<Vec<Cell>> = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![hz(spec.grid.at(i)).into(), (*v).into()])
        .collect();
    out.csv("comb.csv", &["omega_offset_Hz", "intensity"], &rows)?;
    let peaks = model.tooth_peaks(cfg.grids.teeth)?;
    let rows: Vec<Vec<Cell>> = peaks
        .iter()
        .map(|p| vec![p.j.into(), hz(p.omega).into(), p.height.into(), hz(p.fwhm).into()])
        .collect();
    out.csv("comb_peaks.csv", &["j", "omega_offset_Hz", "height", "fwhm_Hz"], &rows)?;
    Ok(out.files)
}

/// The trace restricted to |T| ≤ `half`.
fn crop(ted: &TedTrace, half: f64) -> Result<TedTrace> {
    let idx: Vec<usize> = (0..ted.grid.len).filter(|&i| ted.grid.at(i).abs() <= half).collect();
    let (a, b) = match (idx.first(), idx.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::config("ted.window_us", "window contains no samples")),
    };
    let grid = UniformGrid::new(ted.grid.at(a), ted.grid.step, b - a + 1)?;
    let sigma = ted.sigma.as_ref().map(|s| s[a..=b].to_vec());
    let mut t = TedTrace::new(grid, ted.values[a..=b].to_vec(), sigma)?;
    t.carrier = ted.carrier;
    t.offset = ted.offset;
    Ok(t)
}

fn ted(cfg: &RunConfig, mut out: Output) -> Result<Vec<PathBuf>> {
    let model = cfg.sfwm_model()?;
    let spec = comb_spectrum(cfg, &model)?.normalized(cfg.model.normalization);
    let opts = TedOptions {
        pad_factor: cfg.ted.pad_factor,
        ..TedOptions::default()
    };
    let trace = ted_from_spectrum(&spec, opts)?;
    let mut rows: Vec<(&str, Cell, &str)> = vec![
        ("imag_residual", trace.imag_residual().into(), "1"),
        ("negative_fraction", trace.negative_fraction().into(), "1"),
    ];
    let envelope = if cfg.model.comb_layout == CombLayout::Full {
        let period = tooth_period(&trace, 0.5)?;
        rows.push(("tooth_period", period.into(), "s"));
        rows.push(("fsr_period", (TWO_PI / model.fsr()).into(), "s"));
        oscillation_envelope(&trace, period)?
    } else {
        trace.clone()
    };
    let w = envelope.widths()?;
    rows.push(("envelope_fwhm", w.fwhm.into(), "s"));
    rows.push(("envelope_e_fold", w.e_fold.into(), "s"));
    rows.push(("lorentzian_fwhm_from_e_fold", fwhm_from_e_fold(0.5 * w.e_fold).into(), "Hz"));
    let half = cfg.ted.window_us.map_or(2.5 * w.e_fold, |u| u * 1e-6);
    write_ted(&out.path("ted.csv"), &crop(&trace, half)?)?;
    if cfg.model.comb_layout == CombLayout::Full {
        write_ted(&out.path("ted_envelope.csv"), &crop(&envelope, half)?)?;
    }
    out.report("ted_summary.csv", rows)?;
    Ok(out.files)
}

/// Poisson counts of `peak·f(T) + background` binned in groups.
fn binned_counts(
    f: impl Fn(f64) -> f64,
    half_window: f64,
    samples: usize,
    group: usize,
    peak: f64,
    background: f64,
    seed: u64,
) -> Result<TedTrace> {
    let grid = UniformGrid::new(-half_window, 2.0 * half_window / samples as f64, samples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts: Vec<f64> = grid
        .values()
        .iter()
        .map(|&t| {
            let mu = background + peak * f(t);
            if mu > 0.0 {
                Poisson::new(mu).map(|p| p.sample(&mut rng)).unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let blocks = samples / group;
    let (means, sigma): (Vec<f64>, Vec<f64>) = (0..blocks).map(|b| mean_std(&counts[b * group..(b + 1) * group])).unzip();
    let first = grid.start + 0.5 * (group - 1) as f64 * grid.step;
    TedTrace::new(UniformGrid::new(first, grid.step * group as f64, blocks)?, means, Some(sigma))
}

fn herald_rows(r: &HeraldReport) -> Vec<(&'static str, Cell, &'static str)> {
    vec![
        ("idler_wavelength", r.idler_nm.into(), "nm"),
        ("linewidth_fwhm", r.linewidth_hz.into(), "Hz"),
        ("q", r.q.into(), "1"),
        ("ted_fwhm", r.ted.fwhm.into(), "s"),
        ("ted_e_fold", r.ted.e_fold.into(), "s"),
        ("windowed", r.windowed.into(), "bool"),
    ]
}

fn herald(cfg: &RunConfig, mut out: Output, seed: u64) -> Result<Vec<PathBuf>> {
    let h = &cfg.herald;
    let envelope = match &h.input {
        Some(p) => read_ted(p)?,
        None => {
            let fwhm = h.synthetic_fwhm_hz;
            let env = binned_counts(
                |t| lorentzian_ted(fwhm, t),
                h.window_us * 1e-6,
                h.samples,
                h.group_size,
                h.peak_counts,
                h.background_counts,
                seed,
            )?;
            write_ted(&out.path("herald_envelope.csv"), &env)?;
            env
        }
    };
    let opts = LineshapeOptions {
        subtract_baseline: h.subtract_baseline,
        ..LineshapeOptions::default()
    };
    let report = herald_width(&envelope, h.idler_nm, opts)?;
    out.report("herald_report.csv", herald_rows(&report))?;
    Ok(out.files)
}

fn airy(cfg: &RunConfig, mut out: Output, seed: u64) -> Result<Vec<PathBuf>> {
    let a = &cfg.fit_airy;
    let scan = match &a.input {
        Some(p) => TransmissionScan::read_csv(p)?,
        None => {
            let scan = TransmissionScan::synthetic(
                |f| airy_profile(f, a.fwhm_hz, a.fsr_hz),
                a.depth,
                a.half_span_hz,
                a.samples,
                a.noise,
                seed,
            )?;
            out.text("scan.csv", &scan.to_csv_string())?;
            scan
        }
    };
    let fit = fit_airy(
        &scan,
        FitOptions {
            fsr_hz: a.fsr_hz,
            ..FitOptions::default()
        },
    )?;
    let nu = cfg.pump_omega_hint()?.map_or(f64::NAN, hz);
    out.report(
        "airy_fit.csv",
        vec![
            ("center", fit.center_hz.into(), "Hz"),
            ("center_sigma", fit.center_sigma_hz.into(), "Hz"),
            ("fwhm", fit.fwhm_hz.into(), "Hz"),
            ("fwhm_sigma", fit.fwhm_sigma_hz.into(), "Hz"),
            ("depth", fit.depth.into(), "1"),
            ("baseline", fit.baseline.into(), "1"),
            ("residual_rms", fit.residual_rms.into(), "1"),
            ("q_loaded", (nu / fit.fwhm_hz).into(), "1"),
        ],
    )?;
    Ok(out.files)
}

fn analyze(cfg: &RunConfig, mut out: Output, seed: u64) -> Result<Vec<PathBuf>> {
    let a = &cfg.analyze;
    let table = ChannelTable::builtin();
    let sg = match &a.input {
        Some(p) => Spectrogram2D::read(p)?,
        None => {
            let pump = table.lookup(ChannelKind::Dwdm, a.pump_channel)?;
            let signal = table.lookup(ChannelKind::Dwdm, a.signal_channel)?;
            let half = a.t_window_us * 1e-6;
            let synth = SyntheticSpectrogram {
                pump_nm: pump.center_nm,
                signal_nm: signal.center_nm,
                filter_fwhm_nm: signal.fwhm_nm,
                lambda_axis: UniformGrid::new(a.lambda_start_nm, a.lambda_step_nm, a.lambda_points)?,
                t_axis: UniformGrid::new(-half, 2.0 * half / a.t_samples as f64, a.t_samples)?,
                peak_counts: a.peak_counts,
                background_counts: a.background_counts,
            };
            let fwhm = a.synthetic_fwhm_hz;
            let mut sg = synth.generate(&|t| lorentzian_ted(fwhm, t), seed)?;
            sg.meta = SpectrogramMeta {
                dwdm_channel: Some(a.signal_channel),
                pump_channel: Some(a.pump_channel),
                radius_m: Some(cfg.sphere.radius_m),
            };
            sg.write(&out.path("spectrogram.txt"))?;
            sg
        }
    };
    let pump_ch = sg.meta.pump_channel.unwrap_or(a.pump_channel);
    let signal_ch = sg.meta.dwdm_channel.unwrap_or(a.signal_channel);
    let pump = table.lookup(ChannelKind::Dwdm, pump_ch)?;
    let signal = table.lookup(ChannelKind::Dwdm, signal_ch)?;

    let lam = (sg.lambda_nm[0], sg.lambda_nm[sg.lambda_nm.len() - 1]);
    let tw = (sg.t[0], sg.t[sg.t.len() - 1]);
    let m = marginals(&sg, lam, tw)?;
    let rows: Vec<Vec<Cell>> = m.lambda_nm.iter().zip(&m.spectral).map(|(l, c)| vec![(*l).into(), (*c).into()]).collect();
    out.csv("analyze_spectral.csv", &["lambda_nm", "counts"], &rows)?;
    let rows: Vec<Vec<Cell>> = m.t.iter().zip(&m.temporal).map(|(t, c)| vec![(t * 1e6).into(), (*c).into()]).collect();
    out.csv("analyze_temporal.csv", &["T_us", "counts"], &rows)?;

    let observed_nm = marginal_center(&m.lambda_nm, &m.spectral)?;
    let check = energy_conservation_check(pump.center_nm, signal.center_nm, observed_nm, 0.5 * signal.fwhm_nm)?;

    let env = ted_envelope(&sg, observed_nm, a.group_size)?;
    write_ted(&out.path("analyze_envelope.csv"), &env.trace)?;
    let report = herald_width(
        &env.trace,
        observed_nm,
        LineshapeOptions {
            subtract_baseline: true,
            ..LineshapeOptions::default()
        },
    )?;
    let mut rows = vec![
        ("pump_channel", pump_ch.into(), "DWDM"),
        ("signal_channel", signal_ch.into(), "DWDM"),
        ("pump_wavelength", pump.center_nm.into(), "nm"),
        ("signal_wavelength", signal.center_nm.into(), "nm"),
        ("idler_predicted", check.predicted_nm.into(), "nm"),
        ("idler_observed", check.observed_nm.into(), "nm"),
        ("energy_tolerance", check.tolerance_nm.into(), "nm"),
        ("energy_consistent", check.consistent.into(), "bool"),
        ("envelope_column", env.lambda_nm.into(), "nm"),
        ("total_counts", sg.total().into(), "counts"),
    ];
    rows.extend(herald_rows(&report));
    out.report("analyze_report.csv", rows)?;
    Ok(out.files)
}
