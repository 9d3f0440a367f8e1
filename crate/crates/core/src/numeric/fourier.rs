//! Continuous Fourier transforms of uniformly sampled functions.
//!
//! With samples f(Ω_c + (n − M/2)ΔΩ) the forward transform is
//! F(T) = (1/2π) ∫ f(Ω) e^{−iΩT} dΩ, evaluated on T_m = (m − M/2)ΔT with
//! ΔT = 2π/(MΔΩ). The inverse f(Ω) = ∫ F(T) e^{iΩT} dT undoes it exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Describes a pair of conjugate uniform grids of equal power-of-two length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierGrid {
    /// Frequency at index M/2.
    pub omega_center: f64,
    pub d_omega: f64,
    pub len: usize,
}

impl FourierGrid {
    pub fn dt(&self) -> f64 {
        2.0 * PI / (self.len as f64 * self.d_omega)
    }

    pub fn omega(&self, n: usize) -> f64 {
        self.omega_center + (n as f64 - (self.len / 2) as f64) * self.d_omega
    }

    pub fn time(&self, m: usize) -> f64 {
        (m as f64 - (self.len / 2) as f64) * self.dt()
    }

    // e^{−iΩ_c T_m}, with the phase reduced exactly in cycles
    fn carrier(&self, m: usize) -> Complex64 {
        let cycles = self.omega_center / self.d_omega * (m as f64 - (self.len / 2) as f64)
            / self.len as f64;
        let frac = cycles - cycles.round();
        Complex64::from_polar(1.0, -2.0 * PI * frac)
    }
}

fn alternate(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform of `samples` laid out on `grid` (length must equal
/// `grid.len`, a power of two ≥ 4).
pub fn forward_transform(grid: FourierGrid, samples: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(samples.len(), grid.len);
    assert!(grid.len.is_power_of_two() && grid.len >= 4);
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(n, v)| v * alternate(n))
        .collect();
    FftPlanner::new().plan_fft_forward(grid.len).process(&mut buf);
    let scale = grid.d_omega / (2.0 * PI);
    buf.iter()
        .enumerate()
        .map(|(m, v)| v * grid.carrier(m) * (alternate(m) * scale))
        .collect()
}

/// Inverse of [`forward_transform`].
pub fn inverse_transform(grid: FourierGrid, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(values.len(), grid.len);
    assert!(grid.len.is_power_of_two() && grid.len >= 4);
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(m, v)| v * grid.carrier(m).conj() * alternate(m))
        .collect();
    FftPlanner::new().plan_fft_inverse(grid.len).process(&mut buf);
    let dt = grid.dt();
    buf.iter()
        .enumerate()
        .map(|(n, v)| v * (alternate(n) * dt))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transforms_to_gaussian() {
        // f(Ω) = exp(−Ω²/2) → F(T) = exp(−T²/2)/√(2π)
        let grid = FourierGrid {
            omega_center: 0.0,
            d_omega: 0.05,
            len: 1024,
        };
        let f: Vec<Complex64> = (0..grid.len)
            .map(|n| Complex64::new((-0.5 * grid.omega(n).powi(2)).exp(), 0.0))
            .collect();
        let big_f = forward_transform(grid, &f);
        for m in (0..grid.len).step_by(7) {
            let t = grid.time(m);
            let exact = (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
            assert!((big_f[m].re - exact).abs() < 1e-12, "T={t}");
            assert!(big_f[m].im.abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_center_gives_carrier() {
        let w0 = 3.7;
        let grid = FourierGrid {
            omega_center: w0,
            d_omega: 0.05,
            len: 1024,
        };
        let f: Vec<Complex64> = (0..grid.len)
            .map(|n| Complex64::new((-0.5 * (grid.omega(n) - w0).powi(2)).exp(), 0.0))
            .collect();
        let big_f = forward_transform(grid, &f);
        let m = grid.len / 2 + 9;
        let t = grid.time(m);
        let exact = Complex64::from_polar((-0.5 * t * t).exp() / (2.0 * PI).sqrt(), -w0 * t);
        assert!((big_f[m] - exact).norm() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let grid = FourierGrid {
            omega_center: -1.3e3,
            d_omega: 0.7,
            len: 64,
        };
        let f: Vec<Complex64> = (0..64)
            .map(|n| Complex64::new((n as f64 * 0.37).sin(), (n as f64).sqrt()))
            .collect();
        let back = inverse_transform(grid, &forward_transform(grid, &f));
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
