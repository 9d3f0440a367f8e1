//! Spontaneous four-wave mixing in a resonator: Kerr-shifted phase
//! mismatch, phasematching, the generation-mode matrix, joint spectra and
//! the idler spectral intensity of the swept-pump mixed state.

mod jsi;
mod modes;
mod spectrum;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonator::Dispersion;
use crate::units::TWO_PI;

pub use jsi::{jsi_2d, Jsi, JsiMode};
pub use modes::{generation_modes, GenerationMode, GenerationModeMatrix};
pub use spectrum::{
    envelope_width, spectral_intensity, BiphotonSpectrum, Normalization, PhasematchMode, PumpProfile,
    SfwmModel, ToothPeak,
};

/// Pump power and the material constants of the Kerr term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearParams {
    /// Input pump power P_in (W).
    pub pump_power_w: f64,
    /// Nonlinear index n₂ (m²/W).
    pub n2_m2_per_w: f64,
    /// Effective mode area (m²).
    pub a_eff_m2: f64,
}

impl Default for NonlinearParams {
    /// 7 mW in a silica mode of 20 µm²; n₂ = 2.7e−20 m²/W for fused silica.
    fn default() -> Self {
        Self {
            pump_power_w: 7e-3,
            n2_m2_per_w: 2.7e-20,
            a_eff_m2: 20e-12,
        }
    }
}

impl NonlinearParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.pump_power_w >= 0.0 && self.pump_power_w.is_finite()) {
            return Err(Error::config("pump.power_w", "must be non-negative"));
        }
        if !(self.n2_m2_per_w > 0.0 && self.a_eff_m2 > 0.0) {
            return Err(Error::config("kerr", "n2 and a_eff must be positive"));
        }
        Ok(())
    }

    /// 2γP (rad/m) for a sphere of radius `radius` and index `n` at pump
    /// quality factor `q`.
    pub fn kerr_mismatch(&self, q: f64, n: f64, radius: f64) -> f64 {
        kerr_mismatch(self, q, n, radius)
    }
}

/// 2γP = P_in·Q·n₂ / (π·n·R·A_eff).
pub fn kerr_mismatch(params: &NonlinearParams, q: f64, n: f64, radius: f64) -> f64 {
    params.pump_power_w * q * params.n2_m2_per_w / (PI * n * radius * params.a_eff_m2)
}

/// Δκ = 2k_p(ω_p) − k_s(ω_p + Ω) − k_i(ω_p − Ω) − 2γP, in rad/m.
///
/// Evaluated through mode numbers so the large wavenumbers cancel before
/// scaling.
pub fn phase_mismatch(
    omega_p: f64,
    omega: f64,
    pump: &dyn Dispersion,
    signal: &dyn Dispersion,
    idler: &dyn Dispersion,
    kerr: f64,
) -> Result<f64> {
    let mp = pump.mode_number(omega_p)?;
    let ms = signal.mode_number(omega_p + omega)?;
    let mi = idler.mode_number(omega_p - omega)?;
    let l = pump.perimeter();
    Ok(TWO_PI * ((mp - ms) + (mp - mi)) / l - kerr)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// g = sinc(LΔκ/2)·e^{iLΔκ/2} for a given LΔκ.
pub fn phasematch_from_mismatch(l_delta_kappa: f64) -> Complex64 {
    let x = 0.5 * l_delta_kappa;
    Complex64::from_polar(sinc(x), x)
}

/// Phasematching amplitude g and its strength |g|² at (ω_p, Ω) for one
/// shared mode family.
pub fn phasematch_strength(
    omega_p: f64,
    omega: f64,
    disp: &dyn Dispersion,
    kerr: f64,
) -> Result<(Complex64, f64)> {
    let dk = phase_mismatch(omega_p, omega, disp, disp, disp, kerr)?;
    let g = phasematch_from_mismatch(disp.perimeter() * dk);
    Ok((g, g.norm_sqr()))
}

/// |g|² on a grid of pump offsets (rows) and signal detunings Ω (columns),
/// both in rad/s relative to `omega_p0`.
pub fn phasematch_grid(
    disp: &dyn Dispersion,
    kerr: f64,
    omega_p0: f64,
    pump_offsets: &[f64],
    omegas: &[f64],
) -> Result<Vec<Vec<f64>>> {
    pump_offsets
        .par_iter()
        .map(|&dp| {
            omegas
                .iter()
                .map(|&w| phasematch_strength(omega_p0 + dp, w, disp, kerr).map(|(_, s)| s))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}
