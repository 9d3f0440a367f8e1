//! Whispering-gallery resonances of a dielectric sphere.
//!
//! Resonances follow the asymptotic Mie condition
//! 2πR·n(λ)/λ = S(ν, n(λ)) with ν = l + ½, where S keeps the first five
//! terms of the expansion in ν^{-1/3}. Treating ν as continuous yields a
//! smooth mode number m(ω) = ν(ω) − ½ and the dispersion relation
//! k(ω) = 2π·m(ω)/L, so that k(ω_l)·L = 2πl at every resonance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::SellmeierModel;
use crate::numeric::{bracketed_root, expand_bracket, Chebyshev, RootOptions};
use crate::special::airy_zero;
use crate::units::{angular_to_wavelength, wavelength_to_angular, SPEED_OF_LIGHT, TWO_PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    fn p_factor(self, n: f64) -> f64 {
        match self {
            Polarization::TE => n,
            Polarization::TM => 1.0 / n,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::TE => "TE",
            Polarization::TM => "TM",
        })
    }
}

impl FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TE" => Ok(Polarization::TE),
            "TM" => Ok(Polarization::TM),
            other => Err(Error::invalid(format!("unknown polarization {other:?}"))),
        }
    }
}

/// Mode label (l, m, q, polarization). Only equatorial fundamental modes
/// (m = l, q = 1) are modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    l: u32,
    m: i64,
    q: u32,
    polarization: Polarization,
}

impl ModeIndex {
    pub fn new(l: u32, m: i64, q: u32, polarization: Polarization) -> Result<Self> {
        if l == 0 || q == 0 {
            return Err(Error::invalid(format!("mode indices need l ≥ 1, q ≥ 1 (got l={l}, q={q})")));
        }
        if m != l as i64 || q != 1 {
            return Err(Error::Unsupported(format!(
                "mode (l={l}, m={m}, q={q}) is out of modelled scope; only m = l, q = 1"
            )));
        }
        Ok(Self { l, m, q, polarization })
    }

    pub fn fundamental(l: u32, polarization: Polarization) -> Result<Self> {
        Self::new(l, l as i64, 1, polarization)
    }

    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn m(&self) -> i64 {
        self.m
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn polarization(&self) -> Polarization {
        self.polarization
    }
    pub fn nu(&self) -> f64 {
        self.l as f64 + 0.5
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpec {
    radius: f64,
    pub material: SellmeierModel,
}

impl SphereSpec {
    pub fn new(radius: f64, material: SellmeierModel) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("sphere radius must be positive (got {radius})")));
        }
        Ok(Self { radius, material })
    }

    /// Fused-silica sphere with the bundled Sellmeier coefficients.
    pub fn silica(radius: f64) -> Result<Self> {
        Self::new(radius, SellmeierModel::fused_silica())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Equatorial perimeter L = 2πR.
    pub fn perimeter(&self) -> f64 {
        TWO_PI * self.radius
    }
}

const CBRT_HALF: f64 = 0.793_700_525_984_099_7; // 2^{-1/3}

/// S(ν, n): the right-hand side of the resonance condition times 2πRn.
pub fn mie_series(nu: f64, n: f64, polarization: Polarization, alpha: f64) -> f64 {
    let p = polarization.p_factor(n);
    let n2m1 = n * n - 1.0;
    nu + CBRT_HALF * alpha * nu.cbrt() - p / n2m1.sqrt()
        + 0.3 * CBRT_HALF * CBRT_HALF * alpha * alpha / nu.cbrt()
        - CBRT_HALF * p * (n * n - 2.0 / 3.0 * p * p) / n2m1.powf(1.5) * alpha / nu.cbrt().powi(2)
}

fn mie_series_dnu(nu: f64, n: f64, polarization: Polarization, alpha: f64) -> f64 {
    let p = polarization.p_factor(n);
    let n2m1 = n * n - 1.0;
    let c = nu.cbrt();
    1.0 + CBRT_HALF * alpha / (3.0 * c * c)
        - 0.1 * CBRT_HALF * CBRT_HALF * alpha * alpha / (c * c * c * c)
        + 2.0 / 3.0 * CBRT_HALF * p * (n * n - 2.0 / 3.0 * p * p) / n2m1.powf(1.5) * alpha
            / (c * c * c * c * c)
}

/// Residual 1/λ − S/(2πRn) of the resonance condition, in 1/m.
fn resonance_residual(sphere: &SphereSpec, mode: &ModeIndex, alpha: f64, lambda: f64) -> Result<f64> {
    let n = sphere.material.refractive_index(lambda)?;
    let s = mie_series(mode.nu(), n, mode.polarization, alpha);
    Ok(1.0 / lambda - s / (sphere.perimeter() * n))
}

/// Relative residual |1 − λ·S/(2πRn)| at a candidate wavelength.
pub fn resonance_relative_residual(sphere: &SphereSpec, mode: &ModeIndex, lambda: f64) -> Result<f64> {
    let alpha = airy_zero(mode.q)?;
    Ok((resonance_residual(sphere, mode, alpha, lambda)? * lambda).abs())
}

/// Vacuum wavelength (m) of the resonance `mode`.
pub fn resonance_wavelength(sphere: &SphereSpec, mode: &ModeIndex) -> Result<f64> {
    let alpha = airy_zero(mode.q)?;
    let (lo_um, hi_um) = sphere.material.valid_range;
    let (lo, hi) = (lo_um * 1e-6, hi_um * 1e-6);
    let n_guess = sphere.material.refractive_index((lo * hi).sqrt()).unwrap_or(1.45);
    let guess = sphere.perimeter() * n_guess / mode.nu();
    let f = |lambda: f64| resonance_residual(sphere, mode, alpha, lambda).unwrap_or(f64::NAN);
    let no_root = || {
        Error::NoRoot(format!(
            "no resonance for l={} at R={:e} m inside the material band",
            mode.l,
            sphere.radius
        ))
    };
    if !(guess > lo && guess < hi) {
        return Err(no_root());
    }
    let (a, b) = expand_bracket(
        f,
        guess * 0.98,
        guess * 1.02,
        lo,
        hi,
        40,
    )
    .map_err(|_| no_root())?;
    let lambda = bracketed_root(f, a, b, RootOptions::default())?;
    let rel = (f(lambda) * lambda).abs();
    if !(rel < 1e-12) {
        return Err(Error::NoConvergence(format!(
            "resonance residual {rel:e} for l={}",
            mode.l
        )));
    }
    Ok(lambda)
}

/// n_eff = l·λ_l / L.
pub fn effective_index(sphere: &SphereSpec, mode: &ModeIndex, lambda: f64) -> f64 {
    mode.l as f64 * lambda / sphere.perimeter()
}

/// A propagation-constant model k(ω) for one family of cavity modes,
/// expressed through the continuous mode number m(ω) = k(ω)L/2π.
pub trait Dispersion: Send + Sync {
    /// Continuous azimuthal order; equals l exactly at resonance l.
    fn mode_number(&self, omega: f64) -> Result<f64>;

    /// Round-trip length L (m).
    fn perimeter(&self) -> f64;

    /// m, dm/dω and d²m/dω² at `omega`.
    fn mode_number_derivs(&self, omega: f64) -> Result<(f64, f64, f64)> {
        let h = omega * 1e-5;
        let m0 = self.mode_number(omega)?;
        let mp = self.mode_number(omega + h)?;
        let mm = self.mode_number(omega - h)?;
        Ok((m0, (mp - mm) / (2.0 * h), (mp - 2.0 * m0 + mm) / (h * h)))
    }

    /// k(ω) in rad/m.
    fn wavenumber(&self, omega: f64) -> Result<f64> {
        Ok(TWO_PI * self.mode_number(omega)? / self.perimeter())
    }

    /// Angular frequency of the resonance with integer order `l`.
    fn resonance(&self, l: u32) -> Result<f64> {
        // generic inversion of m(ω) = l from a free-spectral-range estimate
        let seed = self.seed_frequency()?;
        let (m0, dm, _) = self.mode_number_derivs(seed)?;
        let guess = seed + (l as f64 - m0) / dm;
        let step = 0.5 / dm;
        let f = |w: f64| self.mode_number(w).map(|m| m - l as f64).unwrap_or(f64::NAN);
        let (a, b) = expand_bracket(f, guess - step, guess + step, 0.0, f64::INFINITY, 40)?;
        bracketed_root(f, a, b, RootOptions::default())
    }

    /// Some frequency inside the model's domain, used to seed searches.
    fn seed_frequency(&self) -> Result<f64>;

    /// Group order ω·dm/dω, the number of optical cycles per round trip
    /// measured in group delay.
    fn group_order(&self, omega: f64) -> Result<f64> {
        Ok(omega * self.mode_number_derivs(omega)?.1)
    }

    /// Effective group index c·dk/dω.
    fn group_index(&self, omega: f64) -> Result<f64> {
        Ok(SPEED_OF_LIGHT * TWO_PI * self.mode_number_derivs(omega)?.1 / self.perimeter())
    }

    /// FSR (rad/s) between the two resonances straddling `omega`.
    fn fsr(&self, omega: f64) -> Result<f64> {
        let m = self.mode_number(omega)?;
        let l = m.floor();
        if l < 1.0 {
            return Err(Error::domain("frequency below the first resonance"));
        }
        let l = l as u32;
        Ok(self.resonance(l + 1)? - self.resonance(l)?)
    }
}

/// Dispersion of one polarization family of a sphere from the Mie condition.
#[derive(Debug, Clone)]
pub struct SphereDispersion {
    pub sphere: SphereSpec,
    pub polarization: Polarization,
    alpha: f64,
}

impl SphereDispersion {
    pub fn new(sphere: SphereSpec, polarization: Polarization) -> Self {
        Self {
            sphere,
            polarization,
            alpha: airy_zero(1).expect("first Airy zero"),
        }
    }

    pub fn mode(&self, l: u32) -> Result<ModeIndex> {
        ModeIndex::fundamental(l, self.polarization)
    }

    /// Continuous ν solving S(ν, n) = 2πRn/λ.
    pub fn continuous_nu(&self, omega: f64) -> Result<f64> {
        let lambda = angular_to_wavelength(omega);
        let n = self.sphere.material.refractive_index(lambda)?;
        let x = self.sphere.perimeter() * n / lambda;
        let p = self.polarization.p_factor(n);
        let mut nu = x - CBRT_HALF * self.alpha * x.cbrt() + p / (n * n - 1.0).sqrt();
        if !(nu > 1.0) {
            return Err(Error::domain(format!("size parameter {x} too small for the asymptotic series")));
        }
        for _ in 0..50 {
            let r = mie_series(nu, n, self.polarization, self.alpha) - x;
            let d = r / mie_series_dnu(nu, n, self.polarization, self.alpha);
            nu -= d;
            if d.abs() <= 4.0 * f64::EPSILON * nu {
                return Ok(nu);
            }
        }
        Err(Error::NoConvergence(format!("continuous ν at ω = {omega:e}")))
    }

    /// Nearest-order resonance to a wavelength (m).
    pub fn nearest_mode(&self, wavelength: f64) -> Result<(ModeIndex, f64)> {
        let m = self.mode_number(wavelength_to_angular(wavelength))?;
        let l0 = m.round().max(1.0) as u32;
        let mut best: Option<(ModeIndex, f64)> = None;
        for l in l0.saturating_sub(1).max(1)..=l0 + 1 {
            let mode = self.mode(l)?;
            let lam = resonance_wavelength(&self.sphere, &mode)?;
            if best.is_none_or(|(_, b)| (lam - wavelength).abs() < (b - wavelength).abs()) {
                best = Some((mode, lam));
            }
        }
        best.ok_or_else(|| Error::NoRoot("no resonance near wavelength".into()))
    }
}

impl Dispersion for SphereDispersion {
    fn mode_number(&self, omega: f64) -> Result<f64> {
        Ok(self.continuous_nu(omega)? - 0.5)
    }

    fn perimeter(&self) -> f64 {
        self.sphere.perimeter()
    }

    fn resonance(&self, l: u32) -> Result<f64> {
        Ok(wavelength_to_angular(resonance_wavelength(&self.sphere, &self.mode(l)?)?))
    }

    fn seed_frequency(&self) -> Result<f64> {
        Ok(wavelength_to_angular(1.55e-6))
    }
}

/// Dispersion with a constant free spectral range: m(ω) = l₀ + (ω − ω₀)/FSR.
#[derive(Debug, Clone, Copy)]
pub struct LinearDispersion {
    pub perimeter: f64,
    pub omega_ref: f64,
    pub l_ref: u32,
    /// Free spectral range in rad/s.
    pub fsr: f64,
}

impl LinearDispersion {
    /// Linearizes `disp` about resonance `l`, using the local FSR.
    pub fn tangent_to(disp: &dyn Dispersion, l: u32) -> Result<Self> {
        let w = disp.resonance(l)?;
        let dm = disp.mode_number_derivs(w)?.1;
        Ok(Self {
            perimeter: disp.perimeter(),
            omega_ref: w,
            l_ref: l,
            fsr: 1.0 / dm,
        })
    }
}

impl Dispersion for LinearDispersion {
    fn mode_number(&self, omega: f64) -> Result<f64> {
        Ok(self.l_ref as f64 + (omega - self.omega_ref) / self.fsr)
    }
    fn perimeter(&self) -> f64 {
        self.perimeter
    }
    fn mode_number_derivs(&self, omega: f64) -> Result<(f64, f64, f64)> {
        Ok((self.mode_number(omega)?, 1.0 / self.fsr, 0.0))
    }
    fn resonance(&self, l: u32) -> Result<f64> {
        Ok(self.omega_ref + (l as f64 - self.l_ref as f64) * self.fsr)
    }
    fn seed_frequency(&self) -> Result<f64> {
        Ok(self.omega_ref)
    }
}

/// Chebyshev interpolant of another model's mode number over a band, for
/// fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct ChebyshevDispersion {
    perimeter: f64,
    m: Chebyshev,
    dm: Chebyshev,
    d2m: Chebyshev,
}

impl ChebyshevDispersion {
    pub fn build(source: &dyn Dispersion, omega_min: f64, omega_max: f64) -> Result<Self> {
        // probe the domain first so errors surface as domain errors
        source.mode_number(omega_min)?;
        source.mode_number(omega_max)?;
        let m = Chebyshev::adaptive(
            |w| source.mode_number(w).unwrap_or(f64::NAN),
            omega_min,
            omega_max,
            1e-16,
            512,
        )
        .or_else(|_| {
            // accept round-off-limited tails
            Chebyshev::adaptive(
                |w| source.mode_number(w).unwrap_or(f64::NAN),
                omega_min,
                omega_max,
                1e-15,
                512,
            )
        })?;
        let dm = m.derivative();
        let d2m = dm.derivative();
        Ok(Self {
            perimeter: source.perimeter(),
            m,
            dm,
            d2m,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.m.domain()
    }

    fn check(&self, omega: f64) -> Result<()> {
        let (a, b) = self.m.domain();
        if omega >= a && omega <= b {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "ω = {omega:e} outside interpolated band [{a:e}, {b:e}]"
            )))
        }
    }
}

impl Dispersion for ChebyshevDispersion {
    fn mode_number(&self, omega: f64) -> Result<f64> {
        self.check(omega)?;
        Ok(self.m.eval(omega))
    }
    fn perimeter(&self) -> f64 {
        self.perimeter
    }
    fn mode_number_derivs(&self, omega: f64) -> Result<(f64, f64, f64)> {
        self.check(omega)?;
        Ok((self.m.eval(omega), self.dm.eval(omega), self.d2m.eval(omega)))
    }
    fn seed_frequency(&self) -> Result<f64> {
        let (a, b) = self.m.domain();
        Ok(0.5 * (a + b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub mode: ModeIndex,
    /// Vacuum wavelength (m).
    pub wavelength: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
}

/// Resonances of consecutive orders, sorted by increasing l.
#[derive(Debug, Clone)]
pub struct ResonanceTable {
    pub sphere: SphereSpec,
    pub entries: Vec<Resonance>,
}

impl ResonanceTable {
    pub fn for_orders(
        sphere: &SphereSpec,
        polarization: Polarization,
        orders: std::ops::RangeInclusive<u32>,
    ) -> Result<Self> {
        let entries = orders
            .map(|l| {
                let mode = ModeIndex::fundamental(l, polarization)?;
                let wavelength = resonance_wavelength(sphere, &mode)?;
                Ok(Resonance {
                    mode,
                    wavelength,
                    omega: wavelength_to_angular(wavelength),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sphere: sphere.clone(),
            entries,
        })
    }

    /// All resonances with wavelength inside `[min, max]` (m).
    pub fn for_band(sphere: &SphereSpec, polarization: Polarization, min: f64, max: f64) -> Result<Self> {
        if !(min < max) {
            return Err(Error::invalid("empty wavelength band"));
        }
        let disp = SphereDispersion::new(sphere.clone(), polarization);
        let l_lo = disp.mode_number(wavelength_to_angular(max))?.ceil() as u32;
        let l_hi = disp.mode_number(wavelength_to_angular(min))?.floor() as u32;
        if l_hi < l_lo {
            return Ok(Self { sphere: sphere.clone(), entries: vec![] });
        }
        let mut table = Self::for_orders(sphere, polarization, l_lo..=l_hi)?;
        table.entries.retain(|r| r.wavelength >= min && r.wavelength <= max);
        Ok(table)
    }

    /// FSR (rad/s) to the next-higher order, per entry; the last entry has none.
    pub fn fsr(&self) -> Vec<Option<f64>> {
        let mut out: Vec<Option<f64>> = self
            .entries
            .windows(2)
            .map(|w| Some(w[1].omega - w[0].omega))
            .collect();
        out.push(None);
        out
    }
}

/// FSR(ω) sampled on `omegas`.
pub fn fsr_drift_curve(disp: &dyn Dispersion, omegas: &[f64]) -> Result<Vec<f64>> {
    omegas.iter().map(|&w| disp.fsr(w)).collect()
}
