//! Coincidence spectrogram pipeline: ingest {λ_i, T} count matrices, take
//! marginals, bin TED envelopes with error bars, and turn them into a
//! linewidth and Q.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::channels::idler_wavelength_nm;
use crate::error::{Error, Result};
use crate::numeric::{mean_std, UniformGrid};
use crate::temporal::{infer_peak_lineshape, LineshapeOptions, TedTrace, TedWidths};
use crate::units::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SpectrogramMeta {
    pub dwdm_channel: Option<u32>,
    pub pump_channel: Option<u32>,
    pub radius_m: Option<f64>,
}

/// Coincidence counts over idler wavelength and signal–idler delay.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram2D {
    pub lambda_nm: Vec<f64>,
    /// Delay axis (s).
    pub t: Vec<f64>,
    /// Row-major, one row per delay sample.
    pub counts: Vec<f64>,
    pub meta: SpectrogramMeta,
}

fn strictly_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0]) || v.windows(2).all(|w| w[1] < w[0])
}

impl Spectrogram2D {
    pub fn new(lambda_nm: Vec<f64>, t: Vec<f64>, counts: Vec<f64>, meta: SpectrogramMeta) -> Result<Self> {
        if lambda_nm.is_empty() || t.is_empty() {
            return Err(Error::invalid("spectrogram axes must not be empty"));
        }
        if counts.len() != lambda_nm.len() * t.len() {
            return Err(Error::invalid(format!(
                "spectrogram has {} counts for a {}×{} grid",
                counts.len(),
                t.len(),
                lambda_nm.len()
            )));
        }
        if !strictly_monotone(&lambda_nm) {
            return Err(Error::invalid("wavelength axis is not strictly monotone"));
        }
        if !strictly_monotone(&t) {
            return Err(Error::invalid("delay axis is not strictly monotone"));
        }
        if let Some(i) = counts.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::invalid(format!("count {} at index {i} is negative or not finite", counts[i])));
        }
        Ok(Self {
            lambda_nm,
            t,
            counts,
            meta,
        })
    }

    pub fn get(&self, it: usize, il: usize) -> f64 {
        self.counts[it * self.lambda_nm.len() + il]
    }

    pub fn column(&self, il: usize) -> Vec<f64> {
        (0..self.t.len()).map(|it| self.get(it, il)).collect()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Idler frequency axis (Hz), ν = c/λ.
    pub fn frequency_axis(&self) -> Vec<f64> {
        self.lambda_nm.iter().map(|l| SPEED_OF_LIGHT / (l * 1e-9)).collect()
    }

    pub fn nearest_lambda(&self, lambda_nm: f64) -> Result<usize> {
        let (lo, hi) = axis_bounds(&self.lambda_nm);
        if lambda_nm < lo || lambda_nm > hi {
            return Err(Error::domain(format!("{lambda_nm} nm lies outside [{lo}, {hi}] nm")));
        }
        Ok(self
            .lambda_nm
            .iter()
            .enumerate()
            .fold(0, |b, (i, l)| if (l - lambda_nm).abs() < (self.lambda_nm[b] - lambda_nm).abs() { i } else { b }))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Parses the `# lambda_nm:` / `# T_us:` header format.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let perr = |m: String| Error::parse(origin, m);
        let nums = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| perr(format!("bad number '{}': {e}", x.trim()))))
                .collect()
        };
        let mut lambda = None;
        let mut t_us = None;
        let mut meta = SpectrogramMeta::default();
        let mut body = String::new();
        for (ln, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                let Some((key, value)) = rest.split_once(':') else { continue };
                let value = value.trim();
                let int = |v: &str| v.parse::<u32>().map_err(|e| perr(format!("line {}: {e}", ln + 1)));
                match key.trim() {
                    "lambda_nm" => lambda = Some(nums(value)?),
                    "T_us" => t_us = Some(nums(value)?),
                    "dwdm_channel" => meta.dwdm_channel = Some(int(value)?),
                    "pump_channel" => meta.pump_channel = Some(int(value)?),
                    "radius_m" => {
                        meta.radius_m = Some(value.parse().map_err(|e| perr(format!("line {}: {e}", ln + 1)))?)
                    }
                    _ => {}
                }
                continue;
            }
            body.push_str(line);
            body.push('\n');
        }
        let lambda = lambda.ok_or_else(|| perr("missing '# lambda_nm:' header".into()))?;
        let t: Vec<f64> = t_us
            .ok_or_else(|| perr("missing '# T_us:' header".into()))?
            .iter()
            .map(|v| v * 1e-6)
            .collect();
        let mut counts = Vec::with_capacity(lambda.len() * t.len());
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(body.as_bytes());
        let mut rows = 0;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| perr(e.to_string()))?;
            if rec.len() != lambda.len() {
                return Err(perr(format!("row {} has {} columns, expected {}", rows + 1, rec.len(), lambda.len())));
            }
            for f in rec.iter() {
                counts.push(f.parse::<f64>().map_err(|e| perr(format!("row {}: '{f}': {e}", rows + 1)))?);
            }
            rows += 1;
        }
        if rows != t.len() {
            return Err(perr(format!("{rows} count rows for {} delay values", t.len())));
        }
        Self::new(lambda, t, counts, meta).map_err(|e| perr(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let join = |v: &mut dyn Iterator<Item = f64>| v.map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        writeln!(s, "# lambda_nm: {}", join(&mut self.lambda_nm.iter().copied())).unwrap();
        writeln!(s, "# T_us: {}", join(&mut self.t.iter().map(|t| t * 1e6))).unwrap();
        if let Some(c) = self.meta.dwdm_channel {
            writeln!(s, "# dwdm_channel: {c}").unwrap();
        }
        if let Some(c) = self.meta.pump_channel {
            writeln!(s, "# pump_channel: {c}").unwrap();
        }
        if let Some(r) = self.meta.radius_m {
            writeln!(s, "# radius_m: {r:.16e}").unwrap();
        }
        let n = self.lambda_nm.len();
        for row in self.counts.chunks(n) {
            writeln!(s, "{}", join(&mut row.iter().copied())).unwrap();
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn axis_bounds(v: &[f64]) -> (f64, f64) {
    let a = v[0];
    let b = v[v.len() - 1];
    (a.min(b), a.max(b))
}

/// Spectral and temporal marginals restricted to a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub lambda_nm: Vec<f64>,
    /// Counts summed over the delay window, per wavelength.
    pub spectral: Vec<f64>,
    pub t: Vec<f64>,
    /// Counts summed over the wavelength window, per delay.
    pub temporal: Vec<f64>,
}

/// Windows are closed intervals, wavelength in nm and delay in s.
pub fn marginals(sg: &Spectrogram2D, lambda_window: (f64, f64), t_window: (f64, f64)) -> Result<Marginals> {
    let inside = |x: f64, w: (f64, f64)| x >= w.0.min(w.1) && x <= w.0.max(w.1);
    let li: Vec<usize> = (0..sg.lambda_nm.len()).filter(|&i| inside(sg.lambda_nm[i], lambda_window)).collect();
    let ti: Vec<usize> = (0..sg.t.len()).filter(|&i| inside(sg.t[i], t_window)).collect();
    if li.is_empty() || ti.is_empty() {
        return Err(Error::domain("marginal window contains no samples"));
    }
    let spectral = li.iter().map(|&l| ti.iter().map(|&t| sg.get(t, l)).sum()).collect();
    let temporal = ti.iter().map(|&t| li.iter().map(|&l| sg.get(t, l)).sum()).collect();
    Ok(Marginals {
        lambda_nm: li.iter().map(|&i| sg.lambda_nm[i]).collect(),
        spectral,
        t: ti.iter().map(|&i| sg.t[i]).collect(),
        temporal,
    })
}

/// Centroid of a spectral marginal above half its peak, after removing the
/// median of the outer fifth as background.
pub fn marginal_center(lambda_nm: &[f64], counts: &[f64]) -> Result<f64> {
    let n = counts.len();
    if n < 3 || lambda_nm.len() != n {
        return Err(Error::invalid("marginal needs at least three matching samples"));
    }
    let k = (n / 10).max(1);
    let outer: Vec<f64> = counts[..k].iter().chain(&counts[n - k..]).copied().collect();
    let base = crate::numeric::median(&outer).unwrap_or(0.0);
    let top = counts.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - base;
    if !(top > 0.0) {
        return Err(Error::domain("marginal has no peak above background"));
    }
    let (mut w, mut wx) = (0.0, 0.0);
    for (l, c) in lambda_nm.iter().zip(counts) {
        let v = c - base;
        if v >= 0.5 * top {
            w += v;
            wx += v * l;
        }
    }
    Ok(wx / w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedEnvelope {
    /// Block means with their standard deviations as error bars.
    pub trace: TedTrace,
    /// Wavelength of the column used (nm).
    pub lambda_nm: f64,
    /// Trailing samples that did not fill a block were dropped.
    pub truncated: bool,
}

/// Column at the wavelength nearest `lambda_nm`, averaged in blocks of
/// `group_size` delay samples.
pub fn ted_envelope(sg: &Spectrogram2D, lambda_nm: f64, group_size: usize) -> Result<BinnedEnvelope> {
    if group_size == 0 {
        return Err(Error::invalid("group size must be positive"));
    }
    let il = sg.nearest_lambda(lambda_nm)?;
    let t_grid = UniformGrid::from_samples(&sg.t, 1e-6)?;
    let blocks = sg.t.len() / group_size;
    if blocks < 2 {
        return Err(Error::invalid(format!(
            "{} delay samples make fewer than two groups of {group_size}",
            sg.t.len()
        )));
    }
    let col = sg.column(il);
    let mut means = Vec::with_capacity(blocks);
    let mut sigma = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let (m, s) = mean_std(&col[b * group_size..(b + 1) * group_size]);
        means.push(m);
        sigma.push(s);
    }
    let first = t_grid.start + 0.5 * (group_size - 1) as f64 * t_grid.step;
    let grid = UniformGrid::new(first, t_grid.step * group_size as f64, blocks)?;
    Ok(BinnedEnvelope {
        trace: TedTrace::new(grid, means, Some(sigma))?,
        lambda_nm: sg.lambda_nm[il],
        truncated: !sg.t.len().is_multiple_of(group_size),
    })
}

/// Q = ν/Δν.
pub fn q_from_linewidth(nu_hz: f64, dnu_hz: f64) -> Result<f64> {
    if !(nu_hz > 0.0 && dnu_hz > 0.0) {
        return Err(Error::invalid("frequency and linewidth must be positive"));
    }
    if dnu_hz > nu_hz {
        return Err(Error::invalid("linewidth exceeds the optical frequency"));
    }
    Ok(nu_hz / dnu_hz)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeraldReport {
    pub idler_nm: f64,
    pub linewidth_hz: f64,
    pub q: f64,
    /// Widths of the TED envelope (s).
    pub ted: TedWidths,
    pub windowed: bool,
}

/// TED envelope → lineshape → Δν → Q.
pub fn herald_width(envelope: &TedTrace, idler_nm: f64, opts: LineshapeOptions) -> Result<HeraldReport> {
    let line = infer_peak_lineshape(envelope, opts)?;
    let nu = SPEED_OF_LIGHT / (idler_nm * 1e-9);
    let mut clean = envelope.clone();
    if opts.subtract_baseline {
        let n = clean.values.len();
        let k = (n / 20).max(1);
        let outer: Vec<f64> = clean.values[..k].iter().chain(&clean.values[n - k..]).copied().collect();
        let base = crate::numeric::median(&outer).unwrap();
        clean.values.iter_mut().for_each(|v| *v -= base);
    }
    Ok(HeraldReport {
        idler_nm,
        linewidth_hz: line.fwhm_hz,
        q: q_from_linewidth(nu, line.fwhm_hz)?,
        ted: clean.widths()?,
        windowed: line.windowed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub predicted_nm: f64,
    pub observed_nm: f64,
    pub tolerance_nm: f64,
    pub consistent: bool,
}

/// Compares an observed idler centre with 2ω_p − ω_s from channel centres.
pub fn energy_conservation_check(pump_nm: f64, signal_nm: f64, observed_nm: f64, tolerance_nm: f64) -> Result<EnergyCheck> {
    let predicted_nm = idler_wavelength_nm(pump_nm, signal_nm)?;
    Ok(EnergyCheck {
        predicted_nm,
        observed_nm,
        tolerance_nm,
        consistent: (predicted_nm - observed_nm).abs() <= tolerance_nm,
    })
}

/// Forward model of a filtered coincidence measurement: the signal passes a
/// Gaussian filter, the idler wavelength follows from energy conservation,
/// and the delay profile is supplied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpectrogram {
    pub pump_nm: f64,
    pub signal_nm: f64,
    pub filter_fwhm_nm: f64,
    pub lambda_axis: UniformGrid,
    pub t_axis: UniformGrid,
    pub peak_counts: f64,
    pub background_counts: f64,
}

impl SyntheticSpectrogram {
    /// Expected counts; `temporal` is normalised to its own maximum.
    pub fn expected(&self, temporal: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
        let nu = |nm: f64| SPEED_OF_LIGHT / (nm * 1e-9);
        let nu_p = nu(self.pump_nm);
        let nu_s0 = nu(self.signal_nm);
        // filter FWHM in frequency at the signal centre
        let fwhm_hz = nu_s0 * self.filter_fwhm_nm / self.signal_nm;
        let sig = fwhm_hz / (8.0 * std::f64::consts::LN_2).sqrt();
        let spectral: Vec<f64> = self
            .lambda_axis
            .values()
            .iter()
            .map(|&l| {
                let nu_s = 2.0 * nu_p - nu(l);
                (-0.5 * ((nu_s - nu_s0) / sig).powi(2)).exp()
            })
            .collect();
        let times = self.t_axis.values();
        let tvals: Vec<f64> = times.iter().map(|&t| temporal(t)).collect();
        let tmax = tvals.iter().fold(0.0f64, |m, &v| m.max(v));
        if !(tmax > 0.0) {
            return Err(Error::invalid("temporal profile has no positive values"));
        }
        let mut out = Vec::with_capacity(times.len() * spectral.len());
        for tv in &tvals {
            for s in &spectral {
                out.push(self.background_counts + self.peak_counts * s * tv / tmax);
            }
        }
        Ok(out)
    }

    pub fn generate(&self, temporal: &dyn Fn(f64) -> f64, seed: u64) -> Result<Spectrogram2D> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let counts = self
            .expected(temporal)?
            .into_iter()
            .map(|mu| {
                if mu > 0.0 {
                    Poisson::new(mu).map(|p| p.sample(&mut rng)).unwrap_or(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        Spectrogram2D::new(self.lambda_axis.values(), self.t_axis.values(), counts, SpectrogramMeta::default())
    }

    pub fn predicted_idler_nm(&self) -> Result<f64> {
        idler_wavelength_nm(self.pump_nm, self.signal_nm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::lorentzian_ted;
    use proptest::prelude::*;

    fn toy() -> Spectrogram2D {
        Spectrogram2D::new(
            vec![1560.0, 1561.0],
            vec![-1e-6, 1e-6],
            vec![1.0, 2.0, 3.0, 4.0],
            SpectrogramMeta::default(),
        )
        .unwrap()
    }

    #[test]
    fn toy_matrix_parses() {
        let text = "# lambda_nm: 1560.0, 1561.0\n# T_us: -1, 1\n# dwdm_channel: 47\n1,2\n3,4\n";
        let sg = Spectrogram2D::parse(text, Path::new("toy")).unwrap();
        assert_eq!(sg.get(0, 1), 2.0);
        assert_eq!(sg.get(1, 0), 3.0);
        assert_eq!(sg.t, vec![-1e-6, 1e-6]);
        assert_eq!(sg.meta.dwdm_channel, Some(47));
    }

    #[test]
    fn write_read_round_trip() {
        let mut sg = toy();
        sg.meta.radius_m = Some(180e-6);
        let back = Spectrogram2D::parse(&sg.to_text(), Path::new("mem")).unwrap();
        assert_eq!(back, sg);
    }

    #[test]
    fn rejects_shuffled_axis_and_negative_counts() {
        let text = "# lambda_nm: 1561.0, 1560.0, 1562.0\n# T_us: 0, 1\n1,2,3\n3,4,5\n";
        assert!(Spectrogram2D::parse(text, Path::new("x")).is_err());
        let text = "# lambda_nm: 1560.0, 1561.0\n# T_us: 0, 1\n1,-2\n3,4\n";
        assert!(Spectrogram2D::parse(text, Path::new("x")).is_err());
        let text = "# lambda_nm: 1560.0, 1561.0\n# T_us: 0, 1\n1,2\n";
        assert!(Spectrogram2D::parse(text, Path::new("x")).is_err());
    }

    #[test]
    fn flat_marginals() {
        let l: Vec<f64> = (0..10).map(|i| 1550.0 + i as f64).collect();
        let t: Vec<f64> = (0..10).map(|i| i as f64 * 1e-7).collect();
        let sg = Spectrogram2D::new(l, t, vec![1.0; 100], SpectrogramMeta::default()).unwrap();
        let m = marginals(&sg, (0.0, 2000.0), (-1.0, 1.0)).unwrap();
        assert!(m.spectral.iter().chain(&m.temporal).all(|v| *v == 10.0));
        assert!(marginals(&sg, (1600.0, 1700.0), (-1.0, 1.0)).is_err());
    }

    #[test]
    fn grouping_counts() {
        let l = vec![1562.0, 1563.0];
        let t: Vec<f64> = (0..10_000).map(|i| i as f64 * 1e-9).collect();
        let sg = Spectrogram2D::new(l, t, vec![5.0; 20_000], SpectrogramMeta::default()).unwrap();
        let e = ted_envelope(&sg, 1562.2, 100).unwrap();
        assert_eq!(e.trace.values.len(), 100);
        assert!(!e.truncated);
        assert!(e.trace.sigma.as_ref().unwrap().iter().all(|s| *s == 0.0));
        assert_eq!(ted_envelope(&sg, 1562.2, 200).unwrap().trace.values.len(), 50);
        assert!(ted_envelope(&sg, 1562.2, 300).unwrap().truncated);
        assert!(ted_envelope(&sg, 1570.0, 100).is_err());
    }

    #[test]
    fn q_values() {
        assert_eq!(q_from_linewidth(5.0, 5.0).unwrap(), 1.0);
        assert!(q_from_linewidth(-1.0, 1.0).is_err());
        assert!(q_from_linewidth(1.0, 0.0).is_err());
    }

    #[test]
    fn synthetic_marginal_peaks_at_energy_conserving_idler() {
        let pump = 1550.92;
        let signal = 1539.77;
        let syn = SyntheticSpectrogram {
            pump_nm: pump,
            signal_nm: signal,
            filter_fwhm_nm: 0.57,
            lambda_axis: UniformGrid::new(1560.0, 0.01, 400).unwrap(),
            t_axis: UniformGrid::centered(0.0, 2e-9, 1000).unwrap(),
            peak_counts: 400.0,
            background_counts: 1.0,
        };
        let sg = syn.generate(&|t| lorentzian_ted(1e6, t), 7).unwrap();
        let m = marginals(&sg, (1560.0, 1565.0), (-1.0, 1.0)).unwrap();
        let imax = m
            .spectral
            .iter()
            .enumerate()
            .fold(0, |b, (i, v)| if *v > m.spectral[b] { i } else { b });
        let expect = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT
            / (2.0 * 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (pump * 1e-9)
                - 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (signal * 1e-9))
            * 1e9;
        assert!((m.lambda_nm[imax] - expect).abs() < 0.05);
        assert!((marginal_center(&m.lambda_nm, &m.spectral).unwrap() - expect).abs() < 0.01);
        // same seed, same counts
        assert_eq!(sg, syn.generate(&|t| lorentzian_ted(1e6, t), 7).unwrap());
    }

    proptest! {
        #[test]
        fn marginals_conserve_counts(seed in 0u64..500, nl in 2usize..12, nt in 2usize..12, a in 0usize..12, b in 0usize..12) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l: Vec<f64> = (0..nl).map(|i| 1550.0 + i as f64).collect();
            let t: Vec<f64> = (0..nt).map(|i| i as f64).collect();
            let counts: Vec<f64> = (0..nl * nt).map(|_| rng.random_range(0..50) as f64).collect();
            let sg = Spectrogram2D::new(l, t, counts, SpectrogramMeta::default()).unwrap();
            let lw = (1550.0 + (a % nl) as f64, 1550.0 + (b % nl) as f64);
            let tw = (0.0, (b % nt) as f64);
            let m = marginals(&sg, lw, tw).unwrap();
            let s1: f64 = m.spectral.iter().sum();
            let s2: f64 = m.temporal.iter().sum();
            prop_assert_eq!(s1, s2);
            let direct: f64 = (0..nt).flat_map(|it| (0..nl).map(move |il| (it, il)))
                .filter(|&(it, il)| sg.t[it] <= tw.1 && sg.lambda_nm[il] >= lw.0.min(lw.1) && sg.lambda_nm[il] <= lw.0.max(lw.1))
                .map(|(it, il)| sg.get(it, il)).sum();
            prop_assert_eq!(s1, direct);
        }
    }
}
