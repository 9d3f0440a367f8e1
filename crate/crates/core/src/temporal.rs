//! Spectral–temporal duality of the biphoton comb.
//!
//! The time-of-emission distribution (TED) is R̃(T) = (1/2π)∫R_i(Ω)e^{−iΩT}dΩ
//! over the signal–idler delay T. A comb R_i = H·(h ∗ comb) maps to a train of
//! replicas of H̃ spaced by the round-trip time 2π/δΩ under the slow
//! envelope h̃, so the lineshape of one spectral peak can be read off the
//! TED envelope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    forward_transform, fwhm_sampled, inverse_transform, linear_interp, local_maxima, median, parabolic_peak,
    FourierGrid, Pchip, UniformGrid,
};
use crate::numeric::peaks::fwhm_around;
use crate::sfwm::BiphotonSpectrum;
use crate::units::TWO_PI;

/// TED samples on a uniform delay grid (s).
#[derive(Debug, Clone, PartialEq)]
pub struct TedTrace {
    pub grid: UniformGrid,
    /// Real part of R̃, or measured counts.
    pub values: Vec<f64>,
    /// Per-sample standard deviation, when the trace comes from binned data.
    pub sigma: Option<Vec<f64>>,
    /// Imaginary part discarded by the reality projection, kept so the
    /// inverse transform is exact.
    pub imag: Option<Vec<f64>>,
    /// Spectral frequency (rad/s) that sat at index M/2 of the transform.
    pub carrier: f64,
    /// Constant delay offset (s) already included in the grid, e.g. a fibre delay.
    pub offset: f64,
}

/// Width of a TED or its envelope in two conventions (s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TedWidths {
    pub fwhm: f64,
    /// Full width at 1/e of the maximum.
    pub e_fold: f64,
}

impl TedTrace {
    pub fn new(grid: UniformGrid, values: Vec<f64>, sigma: Option<Vec<f64>>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::invalid("TED values do not match the delay grid"));
        }
        if let Some(s) = &sigma {
            if s.len() != values.len() {
                return Err(Error::invalid("TED error bars do not match the values"));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("TED values must be finite"));
        }
        Ok(Self {
            grid,
            values,
            sigma,
            imag: None,
            carrier: 0.0,
            offset: 0.0,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.values()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |Im| / max |Re| of the transform this trace came from.
    pub fn imag_residual(&self) -> f64 {
        match &self.imag {
            Some(im) => im.iter().fold(0.0f64, |m, v| m.max(v.abs())) / self.max_abs(),
            None => 0.0,
        }
    }

    /// Most negative value relative to the maximum (0 if none).
    pub fn negative_fraction(&self) -> f64 {
        let lo = self.values.iter().fold(0.0f64, |m, &v| m.min(v));
        -lo / self.max_abs()
    }

    /// Widths of the main lobe of |values|.
    pub fn widths(&self) -> Result<TedWidths> {
        let abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        let (ipk, top) = abs
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        let ts = self.times();
        let fwhm = fwhm_around(&ts, &abs, ipk, 0.5 * top);
        let e_fold = fwhm_around(&ts, &abs, ipk, top / std::f64::consts::E);
        match (fwhm, e_fold) {
            (Some(fwhm), Some(e_fold)) => Ok(TedWidths { fwhm, e_fold }),
            _ => Err(Error::domain("TED does not fall below 1/e of its peak inside the window")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TedOptions {
    /// Zero-padding factor on top of the next power of two.
    pub pad_factor: usize,
    /// Largest allowed edge value of the spectrum relative to its maximum.
    pub edge_tol: f64,
    /// Minimum spectral span in units of the narrowest peak FWHM.
    pub min_span_fwhm: f64,
}

impl Default for TedOptions {
    fn default() -> Self {
        Self {
            pad_factor: 4,
            edge_tol: 1e-6,
            min_span_fwhm: 20.0,
        }
    }
}

/// TED of a simulated spectrum.
pub fn ted_from_spectrum(spectrum: &BiphotonSpectrum, opts: TedOptions) -> Result<TedTrace> {
    if spectrum.narrowest_fwhm.is_finite() {
        let span = spectrum.grid.step * spectrum.grid.len as f64;
        if span < opts.min_span_fwhm * spectrum.narrowest_fwhm {
            return Err(Error::precondition(format!(
                "spectral span covers {:.1} peak widths, need {}",
                span / spectrum.narrowest_fwhm,
                opts.min_span_fwhm
            )));
        }
    }
    ted_from_samples(spectrum.grid, &spectrum.values, opts)
}

/// TED of R_i sampled on `grid` (rad/s).
pub fn ted_from_samples(grid: UniformGrid, values: &[f64], opts: TedOptions) -> Result<TedTrace> {
    if values.len() != grid.len || grid.len < 2 {
        return Err(Error::invalid("spectrum values do not match the grid"));
    }
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = values[0].abs().max(values[values.len() - 1].abs());
    if !(top > 0.0) || edge > opts.edge_tol * top {
        return Err(Error::precondition(format!(
            "spectrum edge at {:.2e} of maximum exceeds {:.0e}; the transform would alias",
            edge / top,
            opts.edge_tol
        )));
    }
    let n = grid.len;
    let m = n.next_power_of_two().max(4) * opts.pad_factor.max(1).next_power_of_two();
    let shift = m / 2 - n / 2;
    let fg = FourierGrid {
        omega_center: grid.at(n / 2),
        d_omega: grid.step,
        len: m,
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, v) in values.iter().enumerate() {
        buf[k + shift] = Complex64::new(*v, 0.0);
    }
    let out = forward_transform(fg, &buf);
    let dt = fg.dt();
    let tgrid = UniformGrid::new(-((m / 2) as f64) * dt, dt, m)?;
    Ok(TedTrace {
        grid: tgrid,
        values: out.iter().map(|c| c.re).collect(),
        sigma: None,
        imag: Some(out.iter().map(|c| c.im).collect()),
        carrier: fg.omega_center,
        offset: 0.0,
    })
}

// Complex spectrum of an arbitrary trace; sample m of the padded trace sits
// at τ + (m − M/2)ΔT.
fn spectrum_complex(ted: &TedTrace, pad: usize) -> Result<(UniformGrid, Vec<Complex64>)> {
    let n = ted.grid.len;
    let m = (n.next_power_of_two() * pad.next_power_of_two()).max(4);
    let shift = m / 2 - n / 2;
    let tau = ted.grid.at(n / 2);
    let d_omega = TWO_PI / (m as f64 * ted.grid.step);
    let fg = FourierGrid {
        omega_center: ted.carrier,
        d_omega,
        len: m,
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        let im = ted.imag.as_ref().map_or(0.0, |v| v[k]);
        buf[k + shift] = Complex64::new(ted.values[k], im);
    }
    let mut out = inverse_transform(fg, &buf);
    if tau != 0.0 {
        for (i, v) in out.iter_mut().enumerate() {
            let phase = (fg.omega(i) * tau).rem_euclid(TWO_PI);
            *v *= Complex64::from_polar(1.0, phase);
        }
    }
    let grid = UniformGrid::new(fg.omega(0), d_omega, m)?;
    Ok((grid, out))
}

/// Inverse of [`ted_from_spectrum`]: the spectrum on the padded Ω grid.
pub fn spectrum_from_ted(ted: &TedTrace) -> Result<(UniformGrid, Vec<f64>)> {
    let (grid, c) = spectrum_complex(ted, 1)?;
    Ok((grid, c.into_iter().map(|v| v.re).collect()))
}

/// Envelope of an oscillating TED: the largest |R̃| in each round-trip
/// window k·period ± period/2, joined by monotone cubic interpolation.
pub fn oscillation_envelope(ted: &TedTrace, period: f64) -> Result<TedTrace> {
    if !(period > 2.0 * ted.grid.step) {
        return Err(Error::invalid("period must span more than two delay samples"));
    }
    let abs: Vec<f64> = ted.values.iter().map(|v| v.abs()).collect();
    let (t0, t1) = (ted.grid.start, ted.grid.end());
    let k_lo = (t0 / period).ceil() as i64;
    let k_hi = (t1 / period).floor() as i64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in k_lo..=k_hi {
        let lo = ted.grid.nearest((k as f64 - 0.5) * period).unwrap_or(0);
        let hi = ted.grid.nearest((k as f64 + 0.5) * period).unwrap_or(ted.grid.len - 1);
        let (i, v) = (lo..=hi).fold((lo, f64::NEG_INFINITY), |b, i| if abs[i] > b.1 { (i, abs[i]) } else { b });
        if xs.last().is_none_or(|&x| ted.grid.at(i) > x) {
            xs.push(ted.grid.at(i));
            ys.push(v);
        }
    }
    if xs.len() < 2 {
        return Err(Error::domain("TED spans fewer than two round trips"));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let p = Pchip::new(xs, ys)?;
    let values = ted
        .times()
        .iter()
        .map(|&t| if t < lo || t > hi { 0.0 } else { p.eval(t) })
        .collect();
    let mut out = TedTrace::new(ted.grid, values, None)?;
    out.offset = ted.offset;
    Ok(out)
}

/// Round-trip period (s) from the spacing of TED maxima above `min_rel`.
pub fn tooth_period(ted: &TedTrace, min_rel: f64) -> Result<f64> {
    let abs: Vec<f64> = ted.values.iter().map(|v| v.abs()).collect();
    let peaks = local_maxima(&abs, min_rel);
    if peaks.len() < 3 {
        return Err(Error::domain("TED shows fewer than three oscillation maxima"));
    }
    let pos: Vec<f64> = peaks
        .iter()
        .map(|&i| ted.grid.at(i) + parabolic_peak(&abs, i).0 * ted.grid.step)
        .collect();
    let gaps: Vec<f64> = pos.windows(2).map(|w| w[1] - w[0]).collect();
    median(&gaps).ok_or_else(|| Error::domain("no tooth spacing"))
}

/// R_i ≈ H(Ω)·Σ_n h(Ω − Ω₀ − nδΩ).
#[derive(Debug, Clone)]
pub struct CombDecomposition {
    /// δΩ (rad/s).
    pub spacing: f64,
    /// Ω₀, the tooth nearest zero detuning.
    pub origin: f64,
    pub peak_omegas: Vec<f64>,
    pub peak_heights: Vec<f64>,
    envelope: Pchip,
    /// Offsets from the tooth centre on which h is sampled.
    pub profile_grid: UniformGrid,
    /// h, unit maximum.
    pub profile: Vec<f64>,
    /// FWHM of h (rad/s).
    pub profile_fwhm: f64,
    /// sup |R − model| / max R.
    pub reconstruction_error: f64,
}

impl CombDecomposition {
    pub fn envelope(&self, omega: f64) -> f64 {
        self.envelope.eval(omega)
    }

    pub fn profile_at(&self, offset: f64) -> f64 {
        let g = &self.profile_grid;
        if offset < g.start || offset > g.end() {
            return 0.0;
        }
        let x = (offset - g.start) / g.step;
        let i = (x.floor() as usize).min(g.len - 2);
        let t = x - i as f64;
        self.profile[i] * (1.0 - t) + self.profile[i + 1] * t
    }

    /// Tooth indices n covered by the detected peaks.
    pub fn tooth_range(&self) -> (i64, i64) {
        let idx = |w: f64| ((w - self.origin) / self.spacing).round() as i64;
        (idx(self.peak_omegas[0]), idx(*self.peak_omegas.last().unwrap()))
    }

    pub fn model(&self, omega: f64) -> f64 {
        let n = ((omega - self.origin) / self.spacing).round();
        let (lo, hi) = self.tooth_range();
        if (n as i64) < lo || (n as i64) > hi {
            return 0.0;
        }
        self.envelope(omega) * self.profile_at(omega - self.origin - n * self.spacing)
    }

    /// FWHM of the envelope H (rad/s), read off the peak heights.
    pub fn envelope_fwhm(&self) -> Option<f64> {
        fwhm_sampled(&self.peak_omegas, &self.peak_heights)
    }
}

/// Splits a sampled comb into envelope, spacing and single-peak profile.
/// Peaks below `min_rel` of the maximum are ignored.
pub fn comb_decompose(grid: UniformGrid, values: &[f64], min_rel: f64) -> Result<CombDecomposition> {
    if values.len() != grid.len {
        return Err(Error::invalid("spectrum values do not match the grid"));
    }
    let idx = local_maxima(values, min_rel);
    if idx.len() < 5 {
        return Err(Error::domain(format!("comb decomposition needs 5 resolved peaks, found {}", idx.len())));
    }
    let refined: Vec<(f64, f64)> = idx
        .iter()
        .map(|&i| {
            let (off, v) = parabolic_peak(values, i);
            (grid.at(i) + off * grid.step, v)
        })
        .collect();
    let gaps: Vec<f64> = refined.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let spacing = median(&gaps).unwrap();
    if let Some(bad) = gaps.iter().position(|g| (g / spacing - 1.0).abs() > 0.05) {
        // longest run of regular spacings
        let (mut best, mut run_start) = ((0, 0), 0);
        for (k, g) in gaps.iter().enumerate() {
            if (g / spacing - 1.0).abs() > 0.05 {
                run_start = k + 1;
            } else if k + 1 - run_start > best.1 - best.0 {
                best = (run_start, k + 1);
            }
        }
        return Err(Error::precondition(format!(
            "peak spacing deviates by more than 5% at {:.6e} rad/s; fixed spacing holds over [{:.6e}, {:.6e}] rad/s",
            refined[bad].0, refined[best.0].0, refined[best.1].0
        )));
    }
    let omegas: Vec<f64> = refined.iter().map(|p| p.0).collect();
    let heights: Vec<f64> = refined.iter().map(|p| p.1).collect();
    let origin = omegas[omegas
        .iter()
        .enumerate()
        .fold(0, |b, (i, w)| if w.abs() < omegas[b].abs() { i } else { b })];
    let envelope = Pchip::new(omegas.clone(), heights.clone())?;

    let half = (0.5 * spacing / grid.step).floor() as usize;
    let profile_grid = UniformGrid::new(-(half as f64) * grid.step, grid.step, 2 * half + 1)?;
    let xs = grid.values();
    let offsets = profile_grid.values();
    // height-weighted: the sum of the background-subtracted teeth
    let mut profile = vec![0.0; offsets.len()];
    for &(w0, _) in &refined {
        let window: Vec<f64> = offsets.iter().map(|o| linear_interp(&xs, values, w0 + o)).collect();
        let floor = window.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        for (p, v) in profile.iter_mut().zip(&window) {
            *p += v - floor;
        }
    }
    let top = profile.iter().fold(0.0f64, |m, &v| m.max(v));
    profile.iter_mut().for_each(|p| *p /= top);
    let profile_fwhm = fwhm_sampled(&offsets, &profile).ok_or_else(|| Error::domain("peak profile has no half maximum"))?;

    let mut d = CombDecomposition {
        spacing,
        origin,
        peak_omegas: omegas,
        peak_heights: heights,
        envelope,
        profile_grid,
        profile,
        profile_fwhm,
        reconstruction_error: 0.0,
    };
    let rmax = values.iter().fold(0.0f64, |m, &v| m.max(v));
    d.reconstruction_error = xs
        .iter()
        .zip(values)
        .map(|(&w, &v)| (v - d.model(w)).abs())
        .fold(0.0f64, f64::max)
        / rmax;
    Ok(d)
}

/// Lineshape of a single spectral peak recovered from a TED envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Lineshape {
    /// Ω offsets (rad/s).
    pub grid: UniformGrid,
    /// h(Ω), unit maximum.
    pub values: Vec<f64>,
    /// FWHM Δν (Hz).
    pub fwhm_hz: f64,
    /// The trace did not decay at the window edges and was tapered.
    pub windowed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineshapeOptions {
    /// Subtract the median of the outer tenth of the trace first.
    pub subtract_baseline: bool,
    /// Edge level (relative to the maximum) above which a taper is applied.
    pub edge_tol: f64,
    /// Minimum number of spectral samples across the FWHM.
    pub samples_per_fwhm: f64,
}

impl Default for LineshapeOptions {
    fn default() -> Self {
        Self {
            subtract_baseline: false,
            edge_tol: 1e-2,
            samples_per_fwhm: 100.0,
        }
    }
}

/// h(Ω) as the real part of the transform of an envelope-only TED.
pub fn infer_peak_lineshape(envelope: &TedTrace, opts: LineshapeOptions) -> Result<Lineshape> {
    let n = envelope.grid.len;
    if n < 8 {
        return Err(Error::invalid("TED envelope needs at least 8 samples"));
    }
    let mut vals = envelope.values.clone();
    if opts.subtract_baseline {
        let k = (n / 20).max(1);
        let outer: Vec<f64> = vals[..k].iter().chain(&vals[n - k..]).copied().collect();
        let base = median(&outer).unwrap();
        vals.iter_mut().for_each(|v| *v -= base);
    }
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let k = (n / 50).max(1);
    let edge = vals[..k].iter().chain(&vals[n - k..]).map(|v| v.abs()).sum::<f64>() / (2 * k) as f64;
    let windowed = edge > opts.edge_tol * top;
    if windowed {
        // Tukey taper over the outer 10% at each end
        let m = (n / 10).max(1);
        for i in 0..m {
            let w = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / m as f64).cos());
            vals[i] *= w;
            vals[n - 1 - i] *= w;
        }
    }
    let mut trace = TedTrace::new(envelope.grid, vals, None)?;
    trace.carrier = 0.0;
    let mut pad = 4usize;
    loop {
        let (grid, c) = spectrum_complex(&trace, pad)?;
        let h: Vec<f64> = c.iter().map(|v| v.re).collect();
        let hmax = h.iter().fold(0.0f64, |m, &v| m.max(v));
        if !(hmax > 0.0) {
            return Err(Error::domain("TED envelope transforms to a non-positive lineshape"));
        }
        let h: Vec<f64> = h.iter().map(|v| v / hmax).collect();
        let xs = grid.values();
        let fwhm = fwhm_sampled(&xs, &h).ok_or_else(|| Error::domain("lineshape has no half maximum"))?;
        if fwhm >= opts.samples_per_fwhm * grid.step || pad >= 1 << 16 {
            return Ok(Lineshape {
                grid,
                values: h,
                fwhm_hz: fwhm / TWO_PI,
                windowed,
            });
        }
        pad *= 2;
    }
}

/// Comb-model TED h̃(T)·Σ_n H(Ω_n)e^{−iΩ_nT}, the tooth-sum form of
/// (2π/δΩ)·h̃(T)·Σ_m H̃(T − 2πm/δΩ). `time_grid` must be centred with a
/// power-of-two length.
pub fn ted_comb_model(decomp: &CombDecomposition, time_grid: UniformGrid) -> Result<TedTrace> {
    let m = time_grid.len;
    if !m.is_power_of_two() || m < 4 || (time_grid.at(m / 2)).abs() > 1e-9 * time_grid.step {
        return Err(Error::invalid("comb model needs a centred power-of-two delay grid"));
    }
    let env_fwhm = decomp
        .envelope_fwhm()
        .ok_or_else(|| Error::domain("comb envelope has no half maximum inside the peaks"))?;
    if env_fwhm < 10.0 * decomp.profile_fwhm {
        return Err(Error::precondition(format!(
            "envelope FWHM is only {:.1} peak widths; the comb model needs 10",
            env_fwhm / decomp.profile_fwhm
        )));
    }
    comb_model_unchecked(decomp, time_grid)
}

fn comb_model_unchecked(decomp: &CombDecomposition, time_grid: UniformGrid) -> Result<TedTrace> {
    let m = time_grid.len;
    let d_omega = TWO_PI / (m as f64 * time_grid.step);
    let fg = FourierGrid {
        omega_center: 0.0,
        d_omega,
        len: m,
    };
    let samples: Vec<Complex64> = (0..m)
        .map(|n| Complex64::new(decomp.profile_at(fg.omega(n)), 0.0))
        .collect();
    let h_tilde = forward_transform(fg, &samples);
    let (lo, hi) = decomp.tooth_range();
    let teeth: Vec<(f64, f64)> = (lo..=hi)
        .map(|n| {
            let w = decomp.origin + n as f64 * decomp.spacing;
            (w, decomp.envelope(w))
        })
        .collect();
    let values = (0..m)
        .map(|k| {
            let t = time_grid.at(k);
            let step = Complex64::from_polar(1.0, -(decomp.spacing * t).rem_euclid(TWO_PI));
            let mut ph = Complex64::from_polar(1.0, -(teeth[0].0 * t).rem_euclid(TWO_PI));
            let mut sum = Complex64::new(0.0, 0.0);
            for &(_, h) in &teeth {
                sum += ph * h;
                ph *= step;
            }
            (h_tilde[k] * sum).re
        })
        .collect();
    TedTrace::new(time_grid, values, None)
}

/// e^{−πΔν|T|}, the TED of a Lorentzian line of FWHM Δν (Hz).
pub fn lorentzian_ted(fwhm_hz: f64, t: f64) -> f64 {
    (-std::f64::consts::PI * fwhm_hz * t.abs()).exp()
}

/// Lorentzian FWHM (Hz) whose TED has 1/e half-width `tau` (s).
pub fn fwhm_from_e_fold(tau: f64) -> f64 {
    1.0 / (std::f64::consts::PI * tau)
}
