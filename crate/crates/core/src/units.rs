//! Physical constants and frequency/wavelength conversions.
//!
//! Internally everything is SI: lengths in metres, angular frequencies in
//! rad/s. Conversions to nm, THz and Hz only happen at I/O boundaries.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = 2.0 * PI;

#[inline]
pub fn wavelength_to_angular(wavelength_m: f64) -> f64 {
    TWO_PI * SPEED_OF_LIGHT / wavelength_m
}

#[inline]
pub fn angular_to_wavelength(omega: f64) -> f64 {
    TWO_PI * SPEED_OF_LIGHT / omega
}

#[inline]
pub fn wavelength_to_frequency(wavelength_m: f64) -> f64 {
    SPEED_OF_LIGHT / wavelength_m
}

#[inline]
pub fn frequency_to_wavelength(freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / freq_hz
}

#[inline]
pub fn hz_to_angular(freq_hz: f64) -> f64 {
    TWO_PI * freq_hz
}

#[inline]
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        let lam = 1550.92e-9;
        let back = angular_to_wavelength(wavelength_to_angular(lam));
        assert!((back - lam).abs() < 1e-24);
        assert!((wavelength_to_frequency(lam) - 193.3e12).abs() < 0.01e12);
    }
}
