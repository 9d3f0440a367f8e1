//! Cavity field enhancement: reflectivity from Q, Airy transfer functions of
//! the signal, idler and pump modes, and the swept-pump description.
//!
//! Phases are carried as the continuous mode number m(ω) = k(ω)L/2π, so the
//! round-trip phase is 2π·m and only its fractional part matters.

mod fit;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonator::Dispersion;
use crate::units::TWO_PI;

pub use fit::{airy_profile, fit_airy, AiryFit, FitOptions, TransmissionScan};

/// r = 1 − lπ/Q and t′ = √(1 − r²).
pub fn reflectivity_from_q(l: f64, q: f64) -> Result<(f64, f64)> {
    if !(l > 0.0 && q.is_finite() && q > 0.0) {
        return Err(Error::invalid(format!("reflectivity needs l > 0, Q > 0 (got l={l}, Q={q})")));
    }
    if q <= l * PI {
        return Err(Error::precondition(format!(
            "degenerate cavity: Q = {q:e} ≤ lπ = {:e}",
            l * PI
        )));
    }
    let r = 1.0 - l * PI / q;
    // 1 − r² = (1 − r)(1 + r) keeps precision when r → 1
    let t = ((1.0 - r) * (1.0 + r)).sqrt();
    Ok((r, t))
}

/// Distance of `cycles` from the nearest integer, in (−½, ½].
fn wrapped(cycles: f64) -> f64 {
    cycles - cycles.round()
}

/// Real reflectivity r and transmissivity t′ of one cavity–taper interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveCoupling {
    pub r: f64,
    pub t: f64,
}

impl WaveCoupling {
    pub fn from_q(order: f64, q: f64) -> Result<Self> {
        let (r, t) = reflectivity_from_q(order, q)?;
        Ok(Self { r, t })
    }

    pub fn from_reflectivity(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::invalid(format!("reflectivity {r} outside (0, 1)")));
        }
        Ok(Self {
            r,
            t: ((1.0 - r) * (1.0 + r)).sqrt(),
        })
    }

    /// t′/(1 − r·e^{2πi·cycles}).
    pub fn amplitude(&self, cycles: f64) -> Complex64 {
        let phi = TWO_PI * wrapped(cycles);
        Complex64::new(self.t, 0.0) / (Complex64::new(1.0, 0.0) - Complex64::from_polar(self.r, phi))
    }

    /// |t′/(1 − r·e^{2πi·cycles})|².
    pub fn intensity(&self, cycles: f64) -> f64 {
        let s = (PI * wrapped(cycles)).sin();
        self.t * self.t / ((1.0 - self.r).powi(2) + 4.0 * self.r * s * s)
    }

    /// On-resonance intensity t′²/(1 − r)².
    pub fn peak_intensity(&self) -> f64 {
        (self.t / (1.0 - self.r)).powi(2)
    }

    /// Full width at half maximum of the intensity, in cycles of m.
    pub fn fwhm_cycles(&self) -> f64 {
        let s = (1.0 - self.r) / (2.0 * self.r.sqrt());
        2.0 * s.asin() / PI
    }
}

/// Pump coupling. The pump enters as r_p² because two pump photons are
/// annihilated per round trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpCoupling {
    pub r_p: f64,
    pub t_p: f64,
}

impl PumpCoupling {
    pub fn from_q(order: f64, q: f64) -> Result<Self> {
        let (r_p, t_p) = reflectivity_from_q(order, q)?;
        Ok(Self { r_p, t_p })
    }

    /// Chooses r_p so the pump intensity has the requested FWHM, measured in
    /// cycles of m, and t_p = √(1 − r_p²).
    pub fn from_fwhm_cycles(fwhm: f64) -> Result<Self> {
        if !(fwhm > 0.0 && fwhm < 0.5) {
            return Err(Error::invalid(format!("pump FWHM of {fwhm} cycles is not resolvable")));
        }
        // half maximum where sin(πΔ/2) = (1 − ρ)/(2√ρ), ρ = r_p²
        let s = (0.5 * PI * fwhm).sin();
        // x = √ρ = r_p
        let r_p = -s + (s * s + 1.0).sqrt();
        Ok(Self {
            r_p,
            t_p: ((1.0 - r_p) * (1.0 + r_p)).sqrt(),
        })
    }

    /// The equivalent single-reflection coupling with reflectivity r_p².
    pub fn effective(&self) -> WaveCoupling {
        WaveCoupling {
            r: self.r_p * self.r_p,
            t: self.t_p,
        }
    }

    pub fn amplitude(&self, cycles: f64) -> Complex64 {
        self.effective().amplitude(cycles)
    }

    pub fn intensity(&self, cycles: f64) -> f64 {
        self.effective().intensity(cycles)
    }
}

/// A_ν(ω) = t′/(1 − r·e^{ik(ω)L}).
pub fn airy_mode(omega: f64, coupling: &WaveCoupling, disp: &dyn Dispersion) -> Result<Complex64> {
    Ok(coupling.amplitude(disp.mode_number(omega)?))
}

/// A_p(ω) = t_p/(1 − r_p²·e^{ik(ω)L}).
pub fn airy_pump(omega: f64, pump: &PumpCoupling, disp: &dyn Dispersion) -> Result<Complex64> {
    Ok(pump.amplitude(disp.mode_number(omega)?))
}

pub fn airy_mode_intensity(omega: f64, coupling: &WaveCoupling, disp: &dyn Dispersion) -> Result<f64> {
    Ok(coupling.intensity(disp.mode_number(omega)?))
}

pub fn airy_pump_intensity(omega: f64, pump: &PumpCoupling, disp: &dyn Dispersion) -> Result<f64> {
    Ok(pump.intensity(disp.mode_number(omega)?))
}

/// Which mode order enters r = 1 − lπ/Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderConvention {
    /// The group order ω·dm/dω. With it the resonance FWHM equals ν/Q.
    #[default]
    GroupOrder,
    /// The integer azimuthal index l of the nearest resonance. The FWHM then
    /// comes out as (ν/Q)·n_eff/n_g,eff, about 2.6% narrower at 1550 nm.
    Azimuthal,
}

/// How the pump reflectivity is set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum PumpLine {
    /// r_p = 1 − lπ/Q_p, entering squared; the pump line is about twice as
    /// wide as a signal line of equal Q.
    Literal,
    /// r_p² = 1 − lπ/Q_p, so the pump FWHM is ν_p/Q_p.
    #[default]
    Matched,
    /// r_p chosen for this FWHM of |A_p|² (Hz).
    Fwhm(f64),
}

/// Per-wave quality factors and the rules turning them into reflectivities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub q_pump: f64,
    pub q_signal: f64,
    pub q_idler: f64,
    #[serde(default)]
    pub convention: OrderConvention,
    #[serde(default)]
    pub pump_line: PumpLine,
}

impl CouplingSpec {
    /// One Q for all three waves, pump FWHM ν/Q.
    pub fn shared(q: f64) -> Self {
        Self {
            q_pump: q,
            q_signal: q,
            q_idler: q,
            convention: OrderConvention::GroupOrder,
            pump_line: PumpLine::Matched,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, q) in [("q_pump", self.q_pump), ("q_signal", self.q_signal), ("q_idler", self.q_idler)] {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::config(name, format!("quality factor must be positive (got {q})")));
            }
        }
        if let PumpLine::Fwhm(w) = self.pump_line {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::config("pump_fwhm_hz", format!("must be positive (got {w})")));
            }
        }
        Ok(())
    }

    pub fn order(&self, disp: &dyn Dispersion, omega: f64) -> Result<f64> {
        let (m, dm, _) = disp.mode_number_derivs(omega)?;
        Ok(self.order_from(omega, m, dm))
    }

    /// Order from an already evaluated mode number m and slope dm/dω.
    pub fn order_from(&self, omega: f64, m: f64, dm: f64) -> f64 {
        match self.convention {
            OrderConvention::GroupOrder => omega * dm,
            OrderConvention::Azimuthal => m.round(),
        }
    }

    pub fn signal(&self, disp: &dyn Dispersion, omega: f64) -> Result<WaveCoupling> {
        WaveCoupling::from_q(self.order(disp, omega)?, self.q_signal)
    }

    pub fn idler(&self, disp: &dyn Dispersion, omega: f64) -> Result<WaveCoupling> {
        WaveCoupling::from_q(self.order(disp, omega)?, self.q_idler)
    }

    pub fn pump(&self, disp: &dyn Dispersion, omega: f64) -> Result<PumpCoupling> {
        match self.pump_line {
            PumpLine::Literal => PumpCoupling::from_q(self.order(disp, omega)?, self.q_pump),
            PumpLine::Matched => {
                let (rho, _) = reflectivity_from_q(self.order(disp, omega)?, self.q_pump)?;
                let r_p = rho.sqrt();
                Ok(PumpCoupling {
                    r_p,
                    t_p: ((1.0 - r_p) * (1.0 + r_p)).sqrt(),
                })
            }
            PumpLine::Fwhm(hz) => {
                let dm = disp.mode_number_derivs(omega)?.1;
                PumpCoupling::from_fwhm_cycles(TWO_PI * hz * dm)
            }
        }
    }

    /// ν_p / FWHM_p of the resolved pump line.
    pub fn pump_equivalent_q(&self, disp: &dyn Dispersion, omega: f64) -> Result<f64> {
        let dm = disp.mode_number_derivs(omega)?.1;
        let width_cycles = self.pump(disp, omega)?.effective().fwhm_cycles();
        Ok(omega * dm / width_cycles)
    }
}

/// Triangular pump-frequency sweep across a cavity resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSweepSpec {
    /// Centre of the sweep (rad/s).
    pub center_omega: f64,
    /// Laser linewidth δ_p (Hz).
    pub linewidth_hz: f64,
    /// FWHM Δ of the pump resonance |A_p|² (Hz).
    pub resonance_fwhm_hz: f64,
    /// Peak-to-peak sweep excursion Δ_r (Hz).
    pub sweep_span_hz: f64,
    /// Repetition rate of the triangle (Hz).
    pub sweep_rate_hz: f64,
}

impl PumpSweepSpec {
    /// Builds the sweep and returns warnings if δ_p ≪ Δ ≪ Δ_r fails by less
    /// than a factor of ten at either step.
    pub fn new(
        center_omega: f64,
        linewidth_hz: f64,
        resonance_fwhm_hz: f64,
        sweep_span_hz: f64,
        sweep_rate_hz: f64,
    ) -> Result<(Self, Vec<String>)> {
        for (name, v) in [
            ("center_omega", center_omega),
            ("linewidth_hz", linewidth_hz),
            ("resonance_fwhm_hz", resonance_fwhm_hz),
            ("sweep_span_hz", sweep_span_hz),
            ("sweep_rate_hz", sweep_rate_hz),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, format!("must be positive (got {v})")));
            }
        }
        let spec = Self {
            center_omega,
            linewidth_hz,
            resonance_fwhm_hz,
            sweep_span_hz,
            sweep_rate_hz,
        };
        Ok((spec, spec.warnings()))
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.resonance_fwhm_hz < 10.0 * self.linewidth_hz {
            w.push(format!(
                "laser linewidth {:e} Hz is not ≪ resonance FWHM {:e} Hz",
                self.linewidth_hz, self.resonance_fwhm_hz
            ));
        }
        if self.sweep_span_hz < 10.0 * self.resonance_fwhm_hz {
            w.push(format!(
                "sweep span {:e} Hz is not ≫ resonance FWHM {:e} Hz",
                self.sweep_span_hz, self.resonance_fwhm_hz
            ));
        }
        w
    }

    /// Instantaneous laser frequency (rad/s) at time `t` (s); starts at the
    /// low end of the excursion.
    pub fn omega_at(&self, t: f64) -> f64 {
        let phase = (t * self.sweep_rate_hz).rem_euclid(1.0);
        let tri = if phase < 0.5 { 2.0 * phase } else { 2.0 - 2.0 * phase };
        self.center_omega + TWO_PI * self.sweep_span_hz * (tri - 0.5)
    }

    /// Fraction of each period the laser spends inside the resonance FWHM.
    pub fn duty_on_resonance(&self) -> f64 {
        (self.resonance_fwhm_hz / self.sweep_span_hz).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::fwhm_of_fn;
    use crate::resonator::{LinearDispersion, SphereDispersion, SphereSpec, Polarization};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sphere_disp() -> SphereDispersion {
        SphereDispersion::new(SphereSpec::silica(135e-6).unwrap(), Polarization::TE)
    }

    #[test]
    fn reflectivity_definition() {
        let (r, t) = reflectivity_from_q(774.0, 1e8).unwrap();
        assert_relative_eq!(r, 1.0 - 774.0 * PI / 1e8, max_relative = 1e-15);
        assert!((r - 0.999_975_68).abs() < 1e-8);
        assert_relative_eq!(r * r + t * t, 1.0, max_relative = 1e-15);
        let (r, t) = reflectivity_from_q(774.0, 1e15).unwrap();
        assert!(r > 1.0 - 1e-11 && t < 1e-5);
        assert!(matches!(reflectivity_from_q(774.0, 774.0 * PI), Err(Error::Precondition(_))));
    }

    proptest! {
        #[test]
        fn lossless_contract(l in 1.0f64..5000.0, log_q in 4.5f64..10.0) {
            let q = 10f64.powf(log_q);
            prop_assume!(q > l * PI * 1.001);
            let (r, t) = reflectivity_from_q(l, q).unwrap();
            prop_assert!(r > 0.0 && r < 1.0);
            prop_assert!((r * r + t * t - 1.0).abs() < 1e-12);
        }

        #[test]
        fn intensity_bounded_by_peak(cycles in -3.0f64..3.0, r in 0.5f64..0.9999) {
            let c = WaveCoupling::from_reflectivity(r).unwrap();
            let v = c.intensity(cycles);
            prop_assert!(v > 0.0 && v <= c.peak_intensity() * (1.0 + 1e-12));
            prop_assert!((v - c.amplitude(cycles).norm_sqr()).abs() <= 1e-9 * v);
            prop_assert!((v - c.intensity(cycles + 1.0)).abs() <= 1e-9 * v);
        }
    }

    #[test]
    fn resonance_and_antiresonance_values() {
        let c = WaveCoupling::from_q(774.0, 1e6).unwrap();
        assert_relative_eq!(c.intensity(774.0), c.t * c.t / (1.0 - c.r).powi(2), max_relative = 1e-14);
        assert_relative_eq!(c.intensity(774.5), c.t * c.t / (1.0 + c.r).powi(2), max_relative = 1e-14);
    }

    #[test]
    fn peaks_sit_on_tabulated_resonances() {
        let d = sphere_disp();
        let c = WaveCoupling::from_q(774.0, 1e8).unwrap();
        for l in [770u32, 774, 780] {
            let w = d.resonance(l).unwrap();
            let f = |x: f64| airy_mode_intensity(x, &c, &d).unwrap();
            // the peak is flat to second order: neighbours 1e-9 relative away are lower
            let dw = w * 1e-9;
            assert!(f(w) >= f(w - dw) && f(w) >= f(w + dw));
            assert_relative_eq!(f(w), c.peak_intensity(), max_relative = 1e-8);
        }
    }

    #[test]
    fn linear_dispersion_gives_equal_maxima() {
        let d = LinearDispersion::tangent_to(&sphere_disp(), 774).unwrap();
        let c = WaveCoupling::from_q(774.0, 1e7).unwrap();
        let a = airy_mode_intensity(d.resonance(760).unwrap(), &c, &d).unwrap();
        let b = airy_mode_intensity(d.resonance(790).unwrap(), &c, &d).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn linewidth_matches_nu_over_q() {
        let d = sphere_disp();
        let w = d.resonance(d.mode_number(TWO_PI * 193.4e12).unwrap().round() as u32).unwrap();
        for q in [1e6, 1e7, 1e8] {
            let spec = CouplingSpec::shared(q);
            let c = spec.signal(&d, w).unwrap();
            let fwhm = fwhm_of_fn(|x| airy_mode_intensity(x, &c, &d).unwrap(), w, w / q).unwrap();
            assert_relative_eq!(fwhm * q / w, 1.0, max_relative = 0.02);
        }
    }

    #[test]
    fn azimuthal_convention_is_narrower_by_index_ratio() {
        let d = sphere_disp();
        let w = d.resonance(774).unwrap();
        let spec = CouplingSpec {
            convention: OrderConvention::Azimuthal,
            ..CouplingSpec::shared(1e8)
        };
        let c = spec.signal(&d, w).unwrap();
        let fwhm = fwhm_of_fn(|x| airy_mode_intensity(x, &c, &d).unwrap(), w, w / 1e8).unwrap();
        let ratio = fwhm * 1e8 / w;
        let n_ratio = 774.0 / d.group_order(w).unwrap();
        assert_relative_eq!(ratio, n_ratio, max_relative = 1e-3);
        assert!(ratio < 0.98);
    }

    #[test]
    fn pump_fwhm_target() {
        let d = sphere_disp();
        let w = d.resonance(774).unwrap();
        let spec = CouplingSpec {
            pump_line: PumpLine::Fwhm(20.4e6),
            ..CouplingSpec::shared(1e8)
        };
        let p = spec.pump(&d, w).unwrap();
        let fwhm = fwhm_of_fn(|x| airy_pump_intensity(x, &p, &d).unwrap(), w, TWO_PI * 20.4e6).unwrap();
        assert_relative_eq!(fwhm / TWO_PI, 20.4e6, max_relative = 0.01);
        assert_relative_eq!(
            airy_pump_intensity(w, &p, &d).unwrap(),
            p.t_p * p.t_p / (1.0 - p.r_p * p.r_p).powi(2),
            max_relative = 1e-9
        );
        let q_eq = spec.pump_equivalent_q(&d, w).unwrap();
        assert_relative_eq!(q_eq, w / (TWO_PI * 20.4e6), max_relative = 1e-6);
    }

    #[test]
    fn pump_with_squared_reflectivity_matches_mode() {
        let c = WaveCoupling::from_q(774.0, 1e7).unwrap();
        let p = PumpCoupling {
            r_p: c.r.sqrt(),
            t_p: c.t,
        };
        for i in 0..50 {
            let x = 774.0 + (i as f64 - 25.0) * 1e-4;
            assert_relative_eq!(p.intensity(x), c.intensity(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn literal_pump_is_twice_as_wide() {
        let d = sphere_disp();
        let w = d.resonance(774).unwrap();
        let lit = CouplingSpec {
            pump_line: PumpLine::Literal,
            ..CouplingSpec::shared(1e7)
        };
        let q_eq = lit.pump_equivalent_q(&d, w).unwrap();
        assert_relative_eq!(q_eq, 0.5e7, max_relative = 0.01);
        assert_relative_eq!(CouplingSpec::shared(1e7).pump_equivalent_q(&d, w).unwrap(), 1e7, max_relative = 0.01);
    }

    #[test]
    fn sweep_waveform_and_warnings() {
        let (s, warn) = PumpSweepSpec::new(TWO_PI * 193e12, 200e3, 20.4e6, 25e9, 100.0).unwrap();
        assert!(warn.is_empty());
        assert_relative_eq!(s.omega_at(0.0), s.center_omega - PI * 25e9, max_relative = 1e-15);
        assert_relative_eq!(s.omega_at(0.005), s.center_omega + PI * 25e9, max_relative = 1e-15);
        assert_relative_eq!(s.omega_at(0.0025), s.center_omega, max_relative = 1e-15);
        let (_, warn) = PumpSweepSpec::new(TWO_PI * 193e12, 5e6, 20.4e6, 100e6, 100.0).unwrap();
        assert_eq!(warn.len(), 2);
        assert!(PumpSweepSpec::new(1.0, -1.0, 1.0, 1.0, 1.0).is_err());
    }
}
