//! Idler spectral intensity R_i(Ω) of the swept-pump mixed state:
//! R_i(Ω) = ∫ dω_p 𝒜_p(ω_p)·𝒜_s(ω_p + Ω)·𝒜_i(ω_p − Ω)·|g|².

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{CouplingSpec, PumpCoupling, WaveCoupling};
use crate::error::{Error, Result};
use crate::numeric::{bracketed_root, integrate, QuadSpec, RootOptions, UniformGrid};
use crate::resonator::{ChebyshevDispersion, Dispersion, Polarization, SphereDispersion, SphereSpec};
use crate::units::TWO_PI;

use super::phasematch_from_mismatch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PumpProfile {
    /// A single pump frequency, detuned from the pump resonance (rad/s).
    Monochromatic { detuning: f64 },
    /// Pump spread over its resonance 𝒜_p, integrated over ±`window_fwhm`
    /// pump linewidths.
    Resonant { window_fwhm: f64 },
}

impl Default for PumpProfile {
    fn default() -> Self {
        PumpProfile::Resonant { window_fwhm: 6.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhasematchMode {
    /// |g|² ≡ 1.
    #[default]
    Unity,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    #[default]
    None,
    UnitMax,
    UnitArea,
}

/// Sampled R_i(Ω) on a uniform Ω grid (rad/s), arbitrary units.
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonSpectrum {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
    /// (Q_p equivalent, Q_s, Q_i).
    pub q: [f64; 3],
    pub pump_l: u32,
    pub omega_pump: f64,
    /// FWHM of the pump resonance (Hz).
    pub pump_fwhm_hz: f64,
    /// Estimated narrowest comb-peak FWHM (rad/s) the grid must resolve.
    pub narrowest_fwhm: f64,
}

impl BiphotonSpectrum {
    /// A spectrum not tied to a cavity model.
    pub fn from_samples(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::invalid("spectrum values do not match the grid"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("spectral intensity must be finite and non-negative"));
        }
        Ok(Self {
            grid,
            values,
            q: [f64::NAN; 3],
            pump_l: 0,
            omega_pump: f64::NAN,
            pump_fwhm_hz: f64::NAN,
            narrowest_fwhm: f64::NAN,
        })
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.grid.values()
    }

    /// Σ R_i·ΔΩ.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.step
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v))
    }

    pub fn normalized(mut self, mode: Normalization) -> Self {
        let scale = match mode {
            Normalization::None => 1.0,
            Normalization::UnitMax => self.max(),
            Normalization::UnitArea => self.integral(),
        };
        if scale > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= scale);
        }
        self
    }
}

/// One comb tooth located by local maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToothPeak {
    pub j: i32,
    /// Peak position Ω (rad/s).
    pub omega: f64,
    pub height: f64,
    /// FWHM (rad/s).
    pub fwhm: f64,
}

/// √(Σ h·Ω² / Σ h) over tooth heights.
pub fn envelope_width(peaks: &[ToothPeak]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for p in peaks {
        num += p.height * p.omega * p.omega;
        den += p.height;
    }
    (num / den).sqrt()
}

// m(ω0 + δ) ≈ whole + frac + d1·δ + ½·d2·δ² over the pump window
#[derive(Debug, Clone, Copy)]
struct LocalPhase {
    whole: f64,
    frac: f64,
    d1: f64,
    d2: f64,
}

impl LocalPhase {
    fn at(disp: &dyn Dispersion, omega: f64) -> Result<(Self, f64)> {
        let (m, d1, d2) = disp.mode_number_derivs(omega)?;
        let whole = m.round();
        Ok((
            Self {
                whole,
                frac: m - whole,
                d1,
                d2,
            },
            m,
        ))
    }

    fn offset(&self, delta: f64) -> f64 {
        self.d1 * delta + 0.5 * self.d2 * delta * delta
    }

    fn cycles(&self, delta: f64) -> f64 {
        self.frac + self.offset(delta)
    }

    /// δ nearest 0 where the phase is an integer number of cycles.
    fn resonant_offset(&self) -> f64 {
        -self.frac / self.d1
    }
}

/// The cavity SFWM model for one pump resonance.
#[derive(Clone)]
pub struct SfwmModel {
    disp: Arc<dyn Dispersion>,
    pub pump_l: u32,
    pub omega_p0: f64,
    pub coupling: CouplingSpec,
    /// 2γP (rad/m).
    pub kerr: f64,
    pub phasematching: PhasematchMode,
    pub pump: PumpProfile,
    pub quad: QuadSpec,
    pump_coupling: PumpCoupling,
    pump_phase: LocalPhase,
    pump_fwhm: f64,
}

impl std::fmt::Debug for SfwmModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SfwmModel")
            .field("pump_l", &self.pump_l)
            .field("omega_p0", &self.omega_p0)
            .field("coupling", &self.coupling)
            .field("kerr", &self.kerr)
            .field("phasematching", &self.phasematching)
            .field("pump", &self.pump)
            .finish()
    }
}

impl SfwmModel {
    pub fn new(disp: Arc<dyn Dispersion>, pump_l: u32, coupling: CouplingSpec, kerr: f64) -> Result<Self> {
        coupling.validate()?;
        let omega_p0 = disp.resonance(pump_l)?;
        let pump_coupling = coupling.pump(disp.as_ref(), omega_p0)?;
        let (pump_phase, _) = LocalPhase::at(disp.as_ref(), omega_p0)?;
        let pump_fwhm = pump_coupling.effective().fwhm_cycles() / pump_phase.d1;
        Ok(Self {
            disp,
            pump_l,
            omega_p0,
            coupling,
            kerr,
            phasematching: PhasematchMode::Unity,
            pump: PumpProfile::default(),
            quad: QuadSpec::default(),
            pump_coupling,
            pump_phase,
            pump_fwhm,
        })
    }

    /// Sphere model with a Chebyshev cache of the dispersion covering
    /// ±`half_band` (rad/s) around the pump resonance.
    pub fn for_sphere(
        sphere: &SphereSpec,
        polarization: Polarization,
        pump_l: u32,
        coupling: CouplingSpec,
        kerr: f64,
        half_band: f64,
    ) -> Result<Self> {
        let exact = SphereDispersion::new(sphere.clone(), polarization);
        let wp = exact.resonance(pump_l)?;
        let margin = 1e-3 * wp;
        let cheb = ChebyshevDispersion::build(&exact, wp - half_band - margin, wp + half_band + margin)?;
        Self::new(Arc::new(cheb), pump_l, coupling, kerr)
    }

    pub fn with_phasematching(mut self, mode: PhasematchMode) -> Self {
        self.phasematching = mode;
        self
    }

    pub fn with_pump(mut self, pump: PumpProfile) -> Self {
        self.pump = pump;
        self
    }

    pub fn with_quad(mut self, quad: QuadSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn dispersion(&self) -> &dyn Dispersion {
        self.disp.as_ref()
    }

    pub fn pump_coupling(&self) -> PumpCoupling {
        self.pump_coupling
    }

    /// Pump resonance FWHM (rad/s).
    pub fn pump_fwhm(&self) -> f64 {
        self.pump_fwhm
    }

    /// Local FSR at the pump (rad/s).
    pub fn fsr(&self) -> f64 {
        1.0 / self.pump_phase.d1
    }

    /// Ω_j = (ω_{l+j} − ω_{l−j})/2.
    pub fn tooth_center(&self, j: i32) -> Result<f64> {
        if j == 0 {
            return Ok(0.0);
        }
        let l = self.pump_l as i64;
        let (a, b) = (l + j as i64, l - j as i64);
        if a < 1 || b < 1 {
            return Err(Error::domain(format!("tooth {j} leaves the mode family")));
        }
        Ok(0.5 * (self.disp.resonance(a as u32)? - self.disp.resonance(b as u32)?))
    }

    /// Rough narrowest tooth FWHM (rad/s): a product of two equal
    /// Lorentzians is 0.64 times as wide as either.
    pub fn expected_min_fwhm(&self) -> f64 {
        0.64 * (self.omega_p0 / self.coupling.q_signal.max(self.coupling.q_idler))
    }

    /// Signal and idler couplings at detuning Ω.
    fn wave_couplings(&self, omega: f64, s: (&LocalPhase, f64), i: (&LocalPhase, f64)) -> Result<(WaveCoupling, WaveCoupling)> {
        let ws = self.omega_p0 + omega;
        let wi = self.omega_p0 - omega;
        let cs = WaveCoupling::from_q(self.coupling.order_from(ws, s.1, s.0.d1), self.coupling.q_signal)?;
        let ci = WaveCoupling::from_q(self.coupling.order_from(wi, i.1, i.0.d1), self.coupling.q_idler)?;
        Ok((cs, ci))
    }

    /// R_i(Ω), Ω in rad/s.
    pub fn intensity_at(&self, omega: f64) -> Result<f64> {
        let (sp, ms) = LocalPhase::at(self.disp.as_ref(), self.omega_p0 + omega)?;
        let (ip, mi) = LocalPhase::at(self.disp.as_ref(), self.omega_p0 - omega)?;
        let (cs, ci) = self.wave_couplings(omega, (&sp, ms), (&ip, mi))?;
        let pp = self.pump_phase;
        let pump = self.pump_coupling.effective();
        let exact = self.phasematching == PhasematchMode::Exact;
        // 2m_p − m_s − m_i at δ = 0
        let base = (pp.whole - sp.whole) + (pp.whole - ip.whole) + (2.0 * pp.frac - sp.frac - ip.frac);
        let perimeter = self.disp.perimeter();
        let kerr_cycles = perimeter * self.kerr / TWO_PI;

        let integrand = |delta: f64| {
            let mut v = pump.intensity(pp.cycles(delta)) * cs.intensity(sp.cycles(delta)) * ci.intensity(ip.cycles(delta));
            if exact {
                let mismatch = base + 2.0 * pp.offset(delta) - sp.offset(delta) - ip.offset(delta) - kerr_cycles;
                v *= phasematch_from_mismatch(TWO_PI * mismatch).norm_sqr();
            }
            v
        };

        match self.pump {
            PumpProfile::Monochromatic { detuning } => Ok(integrand(detuning)),
            PumpProfile::Resonant { window_fwhm } => {
                if !(window_fwhm >= 3.0) {
                    return Err(Error::precondition(format!(
                        "pump window ±{window_fwhm} FWHM spans fewer than 6 pump linewidths"
                    )));
                }
                let w = window_fwhm * self.pump_fwhm;
                let hw_s = 0.5 * cs.fwhm_cycles() / sp.d1;
                let hw_i = 0.5 * ci.fwhm_cycles() / ip.d1;
                let ds = sp.resonant_offset();
                let di = ip.resonant_offset();
                let hp = 0.5 * self.pump_fwhm;
                let breaks = [0.0, -hp, hp, ds, ds - hw_s, ds + hw_s, di, di - hw_i, di + hw_i];
                integrate(integrand, -w, w, &breaks, self.quad)
            }
        }
    }

    /// R_i on `grid`, evaluated in parallel with order-preserving collection.
    pub fn spectrum(&self, grid: UniformGrid) -> Result<BiphotonSpectrum> {
        let narrow = self.expected_min_fwhm();
        if grid.step > narrow / 10.0 * (1.0 + 1e-12) {
            return Err(Error::precondition(format!(
                "grid step {:e} Hz exceeds a tenth of the narrowest peak FWHM {:e} Hz",
                grid.step / TWO_PI,
                narrow / TWO_PI
            )));
        }
        let values = (0..grid.len)
            .into_par_iter()
            .map(|n| self.intensity_at(grid.at(n)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(BiphotonSpectrum {
            grid,
            values,
            q: [
                self.omega_p0 / self.pump_fwhm,
                self.coupling.q_signal,
                self.coupling.q_idler,
            ],
            pump_l: self.pump_l,
            omega_pump: self.omega_p0,
            pump_fwhm_hz: self.pump_fwhm / TWO_PI,
            narrowest_fwhm: narrow,
        })
    }

    /// Grid of ±`half_width_fwhm` expected peak widths around tooth `j`,
    /// sampled at a tenth of the narrowest width.
    pub fn tooth_grid(&self, j: i32, half_width_fwhm: f64) -> Result<UniformGrid> {
        let step = self.expected_min_fwhm() / 10.0;
        let center = self.tooth_center(j)?;
        let half = (half_width_fwhm * self.expected_min_fwhm() / step).ceil() as usize;
        UniformGrid::centered(center, step, 2 * half)
    }

    /// Centred grid spanning teeth −n..=n out to the mid-gaps ±(n + ½)·FSR.
    pub fn comb_grid(&self, n: u32) -> Result<UniformGrid> {
        let step = self.expected_min_fwhm() / 10.0;
        let edge = 0.5 * (self.tooth_center(n as i32)? + self.tooth_center(n as i32 + 1)?);
        UniformGrid::centered(0.0, step, 2 * (edge / step).ceil() as usize)
    }

    /// Teeth −n..=n, each sampled on its own window and shifted onto a
    /// common offset grid centred at zero, then summed. Its transform is the
    /// TED envelope at the round-trip replicas.
    /// The window also covers half the largest energy defect plus the pump
    /// integration reach, so split outer teeth stay inside it.
    pub fn folded_comb(&self, n: u32, half_width_fwhm: f64) -> Result<BiphotonSpectrum> {
        let n = n as i32;
        let l = self.pump_l as i64;
        let defect = (self.disp.resonance((l + n as i64) as u32)? + self.disp.resonance((l - n as i64) as u32)?
            - 2.0 * self.omega_p0)
            .abs();
        let reach = match self.pump {
            PumpProfile::Resonant { window_fwhm } => window_fwhm * self.pump_fwhm,
            PumpProfile::Monochromatic { detuning } => detuning.abs(),
        };
        let min_fwhm = self.expected_min_fwhm();
        let half = (half_width_fwhm * min_fwhm).max(1.5 * (0.5 * defect + reach) + 20.0 * min_fwhm);
        let step = min_fwhm / 10.0;
        let base = UniformGrid::centered(0.0, step, 2 * (half / step).ceil() as usize)?;
        let teeth = (-n..=n)
            .map(|j| -> Result<Vec<f64>> {
                let g = UniformGrid {
                    start: base.start + self.tooth_center(j)?,
                    ..base
                };
                Ok(self.spectrum(g)?.values)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut values = vec![0.0; base.len];
        for t in &teeth {
            for (v, x) in values.iter_mut().zip(t) {
                *v += x;
            }
        }
        let mut out = self.spectrum(UniformGrid { len: 2, ..base })?;
        out.grid = base;
        out.values = values;
        Ok(out)
    }

    /// Locates the maximum of tooth `j` and measures its FWHM.
    pub fn tooth_peak(&self, j: i32) -> Result<ToothPeak> {
        let center = self.tooth_center(j)?;
        let scale = self.expected_min_fwhm().max(self.pump_fwhm.min(self.omega_p0 / self.coupling.q_signal));
        let f = |x: f64| self.intensity_at(x).unwrap_or(0.0);
        // coarse scan then golden-section refinement
        let n = 80;
        let span = 4.0 * scale;
        let (mut best, mut best_v) = (center, f(center));
        for k in 0..=n {
            let x = center - span + 2.0 * span * k as f64 / n as f64;
            let v = f(x);
            if v > best_v {
                best = x;
                best_v = v;
            }
        }
        let h = 2.0 * span / n as f64;
        let (mut a, mut b) = (best - h, best + h);
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - gr * (b - a);
        let mut d = a + gr * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..80 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = f(d);
            }
            if (b - a).abs() < 1e-9 * scale {
                break;
            }
        }
        let x0 = 0.5 * (a + b);
        let height = f(x0);
        let half = 0.5 * height;
        let g = |x: f64| f(x) - half;
        let opts = RootOptions {
            x_tol: 1e-9 * scale,
            ..RootOptions::default()
        };
        let side = |dir: f64| -> Result<f64> {
            let mut step = 0.25 * scale;
            for _ in 0..40 {
                if g(x0 + dir * step) < 0.0 {
                    return bracketed_root(g, x0, x0 + dir * step, opts);
                }
                step *= 1.5;
            }
            Err(Error::NoRoot(format!("half maximum of tooth {j} not found")))
        };
        let fwhm = side(1.0)? - side(-1.0)?;
        Ok(ToothPeak {
            j,
            omega: x0,
            height,
            fwhm,
        })
    }

    /// Peaks of teeth −n..=n in order of Ω.
    pub fn tooth_peaks(&self, n: u32) -> Result<Vec<ToothPeak>> {
        let n = n as i32;
        (-n..=n)
            .collect::<Vec<i32>>()
            .into_par_iter()
            .map(|j| self.tooth_peak(j))
            .collect()
    }
}

/// R_i(Ω) on `grid` for `model`.
pub fn spectral_intensity(model: &SfwmModel, grid: UniformGrid) -> Result<BiphotonSpectrum> {
    model.spectrum(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::PumpLine;
    use crate::resonator::LinearDispersion;
    use approx::assert_relative_eq;

    fn sphere() -> SphereSpec {
        SphereSpec::silica(135e-6).unwrap()
    }

    fn model(q: f64) -> SfwmModel {
        let c = CouplingSpec {
            pump_line: PumpLine::Fwhm(20.4e6),
            ..CouplingSpec::shared(q)
        };
        SfwmModel::for_sphere(&sphere(), Polarization::TE, 774, c, 0.0, TWO_PI * 5e12).unwrap()
    }

    #[test]
    fn nonnegative_and_peaked_at_teeth() {
        let m = model(1e7);
        let fsr = m.fsr();
        let center = m.intensity_at(0.0).unwrap();
        let gap = m.intensity_at(0.5 * fsr).unwrap();
        assert!(center > 0.0 && gap >= 0.0 && gap < 1e-6 * center);
        let t1 = m.tooth_peak(1).unwrap();
        assert!((t1.omega - fsr).abs() < 0.01 * fsr);
    }

    #[test]
    fn delta_pump_spectrum_is_even_for_exact_comb() {
        let exact = SphereDispersion::new(sphere(), Polarization::TE);
        let lin = LinearDispersion::tangent_to(&exact, 774).unwrap();
        let m = SfwmModel::new(Arc::new(lin), 774, CouplingSpec::shared(1e7), 0.0)
            .unwrap()
            .with_pump(PumpProfile::Monochromatic { detuning: 0.0 });
        for x in [0.1, 3.3, 250.0, 1e4] {
            let w = TWO_PI * 1e6 * x;
            let a = m.intensity_at(w).unwrap();
            let b = m.intensity_at(-w).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.max(b), "{a} {b}");
        }
    }

    #[test]
    fn single_peak_width_between_half_and_full_linewidth() {
        let c = CouplingSpec::shared(1e7);
        let m = SfwmModel::for_sphere(&sphere(), Polarization::TE, 774, c, 0.0, TWO_PI * 2e12).unwrap();
        let p = m.tooth_peak(0).unwrap();
        let nu_over_q = m.omega_p0 / 1e7;
        assert!(p.fwhm > 0.5 * nu_over_q && p.fwhm < nu_over_q, "{}", p.fwhm / nu_over_q);
    }

    #[test]
    fn quadrature_converged() {
        let m = model(1e8);
        let tight = m.clone().with_quad(QuadSpec {
            rel_tol: 1e-12,
            ..QuadSpec::default()
        });
        for x in [0.0, 0.4e6, 1.1e6, 3e6] {
            let w = TWO_PI * x;
            let a = m.intensity_at(w).unwrap();
            let b = tight.intensity_at(w).unwrap();
            assert!((a - b).abs() < 1e-6 * b, "{a} {b}");
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let m = model(1e8);
        let g = UniformGrid::centered(0.0, TWO_PI * 1e6, 64).unwrap();
        assert!(matches!(m.spectrum(g), Err(Error::Precondition(_))));
    }

    #[test]
    fn unity_and_exact_phasematching_agree_in_microsphere() {
        let kerr = 1.543;
        let c = CouplingSpec {
            pump_line: PumpLine::Fwhm(20.4e6),
            ..CouplingSpec::shared(1e8)
        };
        let m = SfwmModel::for_sphere(&sphere(), Polarization::TE, 774, c, kerr, TWO_PI * 3e12).unwrap();
        let e = m.clone().with_phasematching(PhasematchMode::Exact);
        for j in [0, 3, -5] {
            let w = m.tooth_center(j).unwrap();
            let a = m.intensity_at(w).unwrap();
            let b = e.intensity_at(w).unwrap();
            assert!((a - b).abs() < 0.01 * a);
        }
    }

    #[test]
    fn envelope_narrows_with_q() {
        let wide = model(1e6).tooth_peaks(12).unwrap();
        let narrow = model(1e8).tooth_peaks(12).unwrap();
        let count = |p: &[ToothPeak]| {
            let top = p.iter().fold(0.0f64, |m, t| m.max(t.height));
            p.iter().filter(|t| t.height > 0.5 * top).count()
        };
        assert!(count(&wide) > count(&narrow));
        assert!(envelope_width(&wide) > envelope_width(&narrow));
    }

    #[test]
    fn normalization_modes() {
        let g = UniformGrid::new(0.0, 0.5, 4).unwrap();
        let s = BiphotonSpectrum::from_samples(g, vec![1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_relative_eq!(s.clone().normalized(Normalization::UnitMax).max(), 1.0);
        assert_relative_eq!(s.normalized(Normalization::UnitArea).integral(), 1.0);
        assert!(BiphotonSpectrum::from_samples(g, vec![1.0, -2.0, 4.0, 1.0]).is_err());
    }
}
