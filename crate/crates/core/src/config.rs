//! Run configuration read from TOML. Every section and field has a default,
//! so an empty file is a valid configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cavity::{CouplingSpec, OrderConvention, PumpLine, PumpSweepSpec};
use crate::channels::{ChannelKind, ChannelTable};
use crate::error::{Error, Result};
use crate::material::SellmeierModel;
use crate::resonator::{Dispersion, Polarization, SphereDispersion, SphereSpec};
use crate::sfwm::{NonlinearParams, Normalization, PhasematchMode, PumpProfile, SfwmModel};
use crate::units::{wavelength_to_angular, TWO_PI};

/// Directory searched for relative material files.
pub const MATERIAL_DIR_ENV: &str = "SPHERE_SFWM_MATERIAL_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereConfig {
    pub radius_m: f64,
    /// Sellmeier TOML file; the bundled fused-silica data when absent.
    pub material_file: Option<PathBuf>,
    pub polarization: Polarization,
}

impl Default for SphereConfig {
    fn default() -> Self {
        Self {
            radius_m: 135e-6,
            material_file: None,
            polarization: Polarization::TE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeConfig {
    /// Pump azimuthal order; chosen from the pump wavelength when absent.
    pub l: Option<u32>,
    pub q: u32,
}

impl Default for ModeConfig {
    fn default() -> Self {
        Self { l: None, q: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub q_pump: f64,
    pub q_signal: f64,
    pub q_idler: f64,
    pub convention: OrderConvention,
    /// Pump line rule when `pump.resonance_fwhm_hz` is not given.
    pub pump_line: PumpLine,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            q_pump: 1e8,
            q_signal: 1e8,
            q_idler: 1e8,
            convention: OrderConvention::GroupOrder,
            pump_line: PumpLine::Matched,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpConfig {
    pub wavelength_nm: Option<f64>,
    /// Used when `wavelength_nm` is absent.
    pub dwdm_channel: Option<u32>,
    pub power_w: f64,
    /// FWHM of the pump resonance; overrides `couplings.pump_line`.
    pub resonance_fwhm_hz: Option<f64>,
    pub linewidth_hz: f64,
    pub sweep_span_hz: f64,
    pub sweep_rate_hz: f64,
}

impl Default for PumpConfig {
    fn default() -> Self {
        Self {
            wavelength_nm: None,
            dwdm_channel: Some(33),
            power_w: 7e-3,
            resonance_fwhm_hz: Some(20.4e6),
            linewidth_hz: 300e3,
            sweep_span_hz: 12.5e9,
            sweep_rate_hz: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KerrConfig {
    pub n2_m2_per_w: f64,
    pub a_eff_m2: f64,
}

impl Default for KerrConfig {
    fn default() -> Self {
        let d = NonlinearParams::default();
        Self {
            n2_m2_per_w: d.n2_m2_per_w,
            a_eff_m2: d.a_eff_m2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Half-span of the Ω grid; ±(teeth + ½)·FSR when absent.
    pub omega_span_hz: Option<f64>,
    /// Ω step; a tenth of the narrowest expected peak when absent.
    pub omega_step_hz: Option<f64>,
    /// Pump integration half-window in pump linewidths.
    pub pump_window_fwhm_multiples: f64,
    /// Number of teeth on each side of Ω = 0.
    pub teeth: u32,
    /// Half-width of a single-tooth window in peak linewidths.
    pub tooth_window_fwhm: f64,
    /// Half-width of the cached dispersion band around the pump.
    pub band_hz: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            omega_span_hz: None,
            omega_step_hz: None,
            pump_window_fwhm_multiples: 6.0,
            teeth: 20,
            tooth_window_fwhm: 60.0,
            band_hz: 15e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombLayout {
    /// One contiguous Ω grid; only practical up to Q of about 1e6.
    Full,
    /// Only the Ω = 0 tooth.
    Central,
    /// All teeth shifted onto Ω = 0 and summed.
    #[default]
    Folded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub phasematching: PhasematchMode,
    pub normalization: Normalization,
    pub comb_layout: CombLayout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonancesConfig {
    /// Orders on each side of the pump.
    pub count: u32,
}

impl Default for ResonancesConfig {
    fn default() -> Self {
        Self { count: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionConfig {
    pub span_hz: f64,
    pub points: usize,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            span_hz: 5e12,
            points: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhasematchConfig {
    /// Half-span of the pump detuning.
    pub pump_span_hz: f64,
    /// Half-span of Ω.
    pub omega_span_hz: f64,
    pub pump_points: usize,
    pub omega_points: usize,
}

impl Default for PhasematchConfig {
    fn default() -> Self {
        Self {
            pump_span_hz: 12.5e9,
            omega_span_hz: 2e12,
            pump_points: 21,
            omega_points: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JsiState {
    #[default]
    Mixed,
    Pure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JsiConfig {
    /// Plot every `stride`-th generation-mode pair.
    pub stride: usize,
    /// Strided pairs listed beyond the central one.
    pub regions: usize,
    /// Samples per axis of the central patch.
    pub samples: usize,
    /// Patch half-width in signal linewidths.
    pub half_width_linewidths: f64,
    pub state: JsiState,
}

impl Default for JsiConfig {
    fn default() -> Self {
        Self {
            stride: 6,
            regions: 4,
            samples: 81,
            half_width_linewidths: 4.0,
            state: JsiState::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TedConfig {
    pub pad_factor: usize,
    /// Half-width of the written delay window; ±5 1/e widths when absent.
    pub window_us: Option<f64>,
}

impl Default for TedConfig {
    fn default() -> Self {
        Self {
            pad_factor: 4,
            window_us: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeraldConfig {
    /// TED envelope CSV (`T_us,value[,sigma]`); synthetic data when absent.
    pub input: Option<PathBuf>,
    pub idler_nm: f64,
    pub synthetic_fwhm_hz: f64,
    pub samples: usize,
    pub window_us: f64,
    pub group_size: usize,
    pub peak_counts: f64,
    pub background_counts: f64,
    pub subtract_baseline: bool,
}

impl Default for HeraldConfig {
    fn default() -> Self {
        Self {
            input: None,
            idler_nm: 1561.31,
            synthetic_fwhm_hz: 0.366e6,
            samples: 10_000,
            window_us: 8.0,
            group_size: 100,
            peak_counts: 400.0,
            background_counts: 2.0,
            subtract_baseline: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitAiryConfig {
    /// Scan CSV (`freq_offset_Hz,transmittance_normalized`); synthetic when absent.
    pub input: Option<PathBuf>,
    pub fwhm_hz: f64,
    pub depth: f64,
    pub noise: f64,
    pub samples: usize,
    pub half_span_hz: f64,
    pub fsr_hz: Option<f64>,
}

impl Default for FitAiryConfig {
    fn default() -> Self {
        Self {
            input: None,
            fwhm_hz: 20.4e6,
            depth: 0.6,
            noise: 0.01,
            samples: 2001,
            half_span_hz: 200e6,
            fsr_hz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Spectrogram file; synthetic data when absent.
    pub input: Option<PathBuf>,
    pub pump_channel: u32,
    pub signal_channel: u32,
    /// Idler wavelength axis (nm): start, step, count.
    pub lambda_start_nm: f64,
    pub lambda_step_nm: f64,
    pub lambda_points: usize,
    pub t_samples: usize,
    pub t_window_us: f64,
    pub group_size: usize,
    pub synthetic_fwhm_hz: f64,
    pub peak_counts: f64,
    pub background_counts: f64,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            input: None,
            pump_channel: 33,
            signal_channel: 47,
            lambda_start_nm: 1560.5,
            lambda_step_nm: 0.02,
            lambda_points: 200,
            t_samples: 10_000,
            t_window_us: 1.0,
            group_size: 100,
            synthetic_fwhm_hz: 3.376e6,
            peak_counts: 300.0,
            background_counts: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sphere: SphereConfig,
    pub mode: ModeConfig,
    pub couplings: CouplingConfig,
    pub pump: PumpConfig,
    pub kerr: KerrConfig,
    pub grids: GridConfig,
    pub model: ModelConfig,
    pub resonances: ResonancesConfig,
    pub dispersion: DispersionConfig,
    pub phasematch: PhasematchConfig,
    pub jsi: JsiConfig,
    pub ted: TedConfig,
    pub herald: HeraldConfig,
    pub fit_airy: FitAiryConfig,
    pub analyze: AnalyzeConfig,
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive (got {v})")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be at least {min} (got {v})")))
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| text[s].to_string()).unwrap_or_default();
            Error::config(field, e.message().to_string())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg = Self::from_toml_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Field-level checks that do not need the resonator model.
    pub fn validate(&self) -> Result<()> {
        positive("sphere.radius_m", self.sphere.radius_m)?;
        if self.mode.q != 1 {
            return Err(Error::config("mode.q", "only the fundamental radial order q = 1 is modelled"));
        }
        if self.mode.l == Some(0) {
            return Err(Error::config("mode.l", "azimuthal order must be positive"));
        }
        positive("couplings.q_pump", self.couplings.q_pump)?;
        positive("couplings.q_signal", self.couplings.q_signal)?;
        positive("couplings.q_idler", self.couplings.q_idler)?;
        if let Some(w) = self.pump.wavelength_nm {
            positive("pump.wavelength_nm", w)?;
        } else if self.pump.dwdm_channel.is_none() && self.mode.l.is_none() {
            return Err(Error::config("pump", "give wavelength_nm, dwdm_channel or mode.l"));
        }
        if let Some(ch) = self.pump.dwdm_channel {
            let (lo, hi) = ChannelTable::builtin().dwdm_range();
            if ch < lo || ch > hi {
                return Err(Error::config("pump.dwdm_channel", format!("must lie in {lo}..={hi}")));
            }
        }
        if self.pump.power_w < 0.0 || !self.pump.power_w.is_finite() {
            return Err(Error::config("pump.power_w", "must be non-negative"));
        }
        if let Some(f) = self.pump.resonance_fwhm_hz {
            positive("pump.resonance_fwhm_hz", f)?;
        }
        positive("pump.linewidth_hz", self.pump.linewidth_hz)?;
        positive("pump.sweep_span_hz", self.pump.sweep_span_hz)?;
        positive("pump.sweep_rate_hz", self.pump.sweep_rate_hz)?;
        positive("kerr.n2_m2_per_w", self.kerr.n2_m2_per_w)?;
        positive("kerr.a_eff_m2", self.kerr.a_eff_m2)?;
        if let Some(s) = self.grids.omega_span_hz {
            positive("grids.omega_span_hz", s)?;
        }
        if let Some(s) = self.grids.omega_step_hz {
            positive("grids.omega_step_hz", s)?;
        }
        if !(self.grids.pump_window_fwhm_multiples >= 3.0) {
            return Err(Error::config(
                "grids.pump_window_fwhm_multiples",
                "half-window must cover at least 3 pump linewidths (6 in total)",
            ));
        }
        positive("grids.tooth_window_fwhm", self.grids.tooth_window_fwhm)?;
        positive("grids.band_hz", self.grids.band_hz)?;
        positive("dispersion.span_hz", self.dispersion.span_hz)?;
        at_least("dispersion.points", self.dispersion.points, 2)?;
        positive("phasematch.pump_span_hz", self.phasematch.pump_span_hz)?;
        positive("phasematch.omega_span_hz", self.phasematch.omega_span_hz)?;
        at_least("phasematch.pump_points", self.phasematch.pump_points, 1)?;
        at_least("phasematch.omega_points", self.phasematch.omega_points, 2)?;
        at_least("jsi.stride", self.jsi.stride, 1)?;
        at_least("jsi.samples", self.jsi.samples, 2)?;
        positive("jsi.half_width_linewidths", self.jsi.half_width_linewidths)?;
        at_least("ted.pad_factor", self.ted.pad_factor, 1)?;
        positive("herald.idler_nm", self.herald.idler_nm)?;
        positive("herald.synthetic_fwhm_hz", self.herald.synthetic_fwhm_hz)?;
        positive("herald.window_us", self.herald.window_us)?;
        at_least("herald.group_size", self.herald.group_size, 1)?;
        at_least("herald.samples", self.herald.samples, 16 * self.herald.group_size.max(1))?;
        positive("fit_airy.fwhm_hz", self.fit_airy.fwhm_hz)?;
        positive("fit_airy.half_span_hz", self.fit_airy.half_span_hz)?;
        at_least("fit_airy.samples", self.fit_airy.samples, 20)?;
        if !(self.fit_airy.noise >= 0.0) {
            return Err(Error::config("fit_airy.noise", "must be non-negative"));
        }
        at_least("analyze.group_size", self.analyze.group_size, 1)?;
        at_least("analyze.lambda_points", self.analyze.lambda_points, 2)?;
        positive("analyze.lambda_step_nm", self.analyze.lambda_step_nm)?;
        positive("analyze.t_window_us", self.analyze.t_window_us)?;
        Ok(())
    }

    pub fn material(&self) -> Result<SellmeierModel> {
        match &self.sphere.material_file {
            None => Ok(SellmeierModel::fused_silica()),
            Some(p) => {
                let path = match std::env::var_os(MATERIAL_DIR_ENV) {
                    Some(dir) if p.is_relative() => Path::new(&dir).join(p),
                    _ => p.clone(),
                };
                SellmeierModel::from_file(&path)
            }
        }
    }

    pub fn sphere(&self) -> Result<SphereSpec> {
        SphereSpec::new(self.sphere.radius_m, self.material()?)
    }

    pub fn dispersion_model(&self) -> Result<SphereDispersion> {
        Ok(SphereDispersion::new(self.sphere()?, self.sphere.polarization))
    }

    /// Pump wavelength (nm) from the explicit value or the DWDM channel.
    pub fn pump_wavelength_nm(&self) -> Result<Option<f64>> {
        if let Some(w) = self.pump.wavelength_nm {
            return Ok(Some(w));
        }
        match self.pump.dwdm_channel {
            Some(ch) => Ok(Some(ChannelTable::builtin().lookup(ChannelKind::Dwdm, ch)?.center_nm)),
            None => Ok(None),
        }
    }

    /// Pump order: `mode.l`, or the resonance nearest the pump wavelength.
    pub fn pump_l(&self) -> Result<u32> {
        if let Some(l) = self.mode.l {
            return Ok(l);
        }
        let nm = self
            .pump_wavelength_nm()?
            .ok_or_else(|| Error::config("pump", "no pump wavelength"))?;
        Ok(self.dispersion_model()?.nearest_mode(nm * 1e-9)?.0.l())
    }

    pub fn coupling_spec(&self) -> CouplingSpec {
        let c = &self.couplings;
        CouplingSpec {
            q_pump: c.q_pump,
            q_signal: c.q_signal,
            q_idler: c.q_idler,
            convention: c.convention,
            pump_line: match self.pump.resonance_fwhm_hz {
                Some(hz) => PumpLine::Fwhm(hz),
                None => c.pump_line,
            },
        }
    }

    pub fn nonlinear(&self) -> NonlinearParams {
        NonlinearParams {
            pump_power_w: self.pump.power_w,
            n2_m2_per_w: self.kerr.n2_m2_per_w,
            a_eff_m2: self.kerr.a_eff_m2,
        }
    }

    /// 2γP (rad/m) at the pump resonance.
    pub fn kerr_mismatch(&self, omega_pump: f64) -> Result<f64> {
        let sphere = self.sphere()?;
        let n = sphere.material.refractive_index(TWO_PI * crate::units::SPEED_OF_LIGHT / omega_pump)?;
        Ok(self.nonlinear().kerr_mismatch(self.couplings.q_pump, n, sphere.radius()))
    }

    pub fn sweep(&self, omega_pump: f64) -> Result<(PumpSweepSpec, Vec<String>)> {
        let fwhm = match self.pump.resonance_fwhm_hz {
            Some(f) => f,
            None => omega_pump / self.couplings.q_pump / TWO_PI,
        };
        PumpSweepSpec::new(
            omega_pump,
            self.pump.linewidth_hz,
            fwhm,
            self.pump.sweep_span_hz,
            self.pump.sweep_rate_hz,
        )
    }

    /// The spectral model with a dispersion cache over ±`grids.band_hz`.
    pub fn sfwm_model(&self) -> Result<SfwmModel> {
        let sphere = self.sphere()?;
        let l = self.pump_l()?;
        let exact = SphereDispersion::new(sphere.clone(), self.sphere.polarization);
        let kerr = self.kerr_mismatch(exact.resonance(l)?)?;
        let model = SfwmModel::for_sphere(
            &sphere,
            self.sphere.polarization,
            l,
            self.coupling_spec(),
            kerr,
            TWO_PI * self.grids.band_hz,
        )?;
        Ok(model
            .with_phasematching(self.model.phasematching)
            .with_pump(PumpProfile::Resonant {
                window_fwhm: self.grids.pump_window_fwhm_multiples,
            }))
    }

    /// Checks an explicit Ω step against the narrowest expected peak.
    pub fn validate_grid(&self, model: &SfwmModel) -> Result<()> {
        if let Some(step) = self.grids.omega_step_hz {
            let limit = model.expected_min_fwhm() / TWO_PI / 10.0;
            if step > limit {
                return Err(Error::config(
                    "grids.omega_step_hz",
                    format!("{step:e} Hz exceeds a tenth of the narrowest peak FWHM ({limit:e} Hz)"),
                ));
            }
        }
        Ok(())
    }

    /// Pump angular frequency implied by the configured wavelength, if any.
    pub fn pump_omega_hint(&self) -> Result<Option<f64>> {
        Ok(self.pump_wavelength_nm()?.map(|nm| wavelength_to_angular(nm * 1e-9)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let back = RunConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
        c.validate().unwrap();
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn field_errors_name_the_field() {
        let c = RunConfig::from_toml_str("[sphere]\nradius_m = -1.0\n").unwrap();
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "sphere.radius_m"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            RunConfig::from_toml_str("[sphere]\nradius = 1.0\n"),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn pump_defaults_to_channel_33() {
        let c = RunConfig::default();
        assert_eq!(c.pump_wavelength_nm().unwrap(), Some(1550.92));
        let l = c.pump_l().unwrap();
        assert!((772..=776).contains(&l));
        assert_eq!(c.coupling_spec().pump_line, PumpLine::Fwhm(20.4e6));
    }

    #[test]
    fn coarse_explicit_step_rejected() {
        let mut c = RunConfig::default();
        c.grids.band_hz = 2e12;
        c.grids.omega_step_hz = Some(1e6);
        let m = c.sfwm_model().unwrap();
        assert!(matches!(c.validate_grid(&m), Err(Error::Config { .. })));
    }

    #[test]
    fn material_dir_from_environment() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("silica.toml"),
            include_str!("../data/fused_silica_malitson.toml"),
        )
        .unwrap();
        let mut c = RunConfig::default();
        c.sphere.material_file = Some(dir.path().join("silica.toml"));
        assert_eq!(c.material().unwrap(), SellmeierModel::fused_silica());
    }
}
