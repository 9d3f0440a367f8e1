//! Bulk fused-silica dispersion from a three-term Sellmeier model.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{angular_to_wavelength, SPEED_OF_LIGHT};

const DEFAULT_DATA: &str = include_str!("../data/fused_silica_malitson.toml");

/// File name of the bundled coefficient set.
pub const DEFAULT_MATERIAL_FILE: &str = "fused_silica_malitson.toml";

#[derive(Debug, Deserialize)]
struct MaterialFile {
    b1: f64,
    b2: f64,
    b3: f64,
    l1: f64,
    l2: f64,
    l3: f64,
    valid_min_um: f64,
    valid_max_um: f64,
    source: String,
}

/// n²(λ) − 1 = Σ Bᵢ λ² / (λ² − Cᵢ²), with λ and Cᵢ in micrometres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel {
    pub resonance_strengths: [f64; 3],
    /// Resonance wavelengths Cᵢ in µm.
    pub resonance_wavelengths: [f64; 3],
    /// Validity interval in µm.
    pub valid_range: (f64, f64),
    pub source: String,
}

impl Default for SellmeierModel {
    fn default() -> Self {
        Self::fused_silica()
    }
}

impl SellmeierModel {
    pub fn new(
        resonance_strengths: [f64; 3],
        resonance_wavelengths: [f64; 3],
        valid_range: (f64, f64),
        source: impl Into<String>,
    ) -> Result<Self> {
        if resonance_strengths
            .iter()
            .chain(&resonance_wavelengths)
            .any(|c| !(c.is_finite() && *c > 0.0))
        {
            return Err(Error::invalid("Sellmeier coefficients must be positive"));
        }
        let (lo, hi) = valid_range;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::invalid(format!("Sellmeier validity range [{lo}, {hi}] µm")));
        }
        if resonance_wavelengths.iter().any(|&c| c >= lo && c <= hi) {
            return Err(Error::invalid("a Sellmeier pole lies inside the validity range"));
        }
        Ok(Self {
            resonance_strengths,
            resonance_wavelengths,
            valid_range,
            source: source.into(),
        })
    }

    /// The bundled fused-silica coefficients.
    pub fn fused_silica() -> Self {
        Self::from_toml_str(DEFAULT_DATA).expect("bundled material file is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let f: MaterialFile =
            toml::from_str(text).map_err(|e| Error::invalid(format!("material file: {e}")))?;
        Self::new(
            [f.b1, f.b2, f.b3],
            [f.l1, f.l2, f.l3],
            (f.valid_min_um, f.valid_max_um),
            f.source,
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| Error::parse(path, e.to_string()))
    }

    fn check(&self, wavelength: f64) -> Result<f64> {
        let um = wavelength * 1e6;
        let (lo, hi) = self.valid_range;
        if !(um >= lo && um <= hi) {
            return Err(Error::domain(format!(
                "wavelength {um} µm outside Sellmeier range [{lo}, {hi}] µm"
            )));
        }
        Ok(um)
    }

    fn n_squared_um(&self, um: f64) -> f64 {
        let l2 = um * um;
        1.0 + self
            .resonance_strengths
            .iter()
            .zip(&self.resonance_wavelengths)
            .map(|(b, c)| b * l2 / (l2 - c * c))
            .sum::<f64>()
    }

    /// Phase index at a vacuum wavelength given in metres.
    pub fn refractive_index(&self, wavelength: f64) -> Result<f64> {
        let um = self.check(wavelength)?;
        Ok(self.n_squared_um(um).sqrt())
    }

    /// dn/dλ in 1/m.
    pub fn dn_dlambda(&self, wavelength: f64) -> Result<f64> {
        let um = self.check(wavelength)?;
        let n = self.n_squared_um(um).sqrt();
        let dn2: f64 = self
            .resonance_strengths
            .iter()
            .zip(&self.resonance_wavelengths)
            .map(|(b, c)| {
                let c2 = c * c;
                -2.0 * b * um * c2 / (um * um - c2).powi(2)
            })
            .sum();
        // per µm → per m
        Ok(dn2 / (2.0 * n) * 1e6)
    }

    /// n_g = n − λ·dn/dλ.
    pub fn group_index(&self, wavelength: f64) -> Result<f64> {
        Ok(self.refractive_index(wavelength)? - wavelength * self.dn_dlambda(wavelength)?)
    }

    pub fn group_velocity(&self, wavelength: f64) -> Result<f64> {
        Ok(SPEED_OF_LIGHT / self.group_index(wavelength)?)
    }

    /// ℓ(ω) = ω^{1/2} / (n(ω)·v_g(ω)).
    ///
    /// The state construction treats this as constant across the comb; it is
    /// provided for completeness and never enters the spectral intensity.
    pub fn ell_factor(&self, angular_frequency: f64) -> Result<f64> {
        if !(angular_frequency > 0.0) {
            return Err(Error::domain("ℓ(ω) needs ω > 0"));
        }
        let lambda = angular_to_wavelength(angular_frequency);
        Ok(angular_frequency.sqrt()
            / (self.refractive_index(lambda)? * self.group_velocity(lambda)?))
    }
}
