//! Chebyshev interpolants on a finite interval.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Chebyshev {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolates `f` at `n` Chebyshev points of the first kind.
    pub fn from_fn<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Self {
        let n = n.max(2);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let samples: Vec<f64> = (0..n)
            .map(|k| f(mid + half * (PI * (k as f64 + 0.5) / n as f64).cos()))
            .collect();
        let mut coeffs = vec![0.0; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let s: f64 = samples
                .iter()
                .enumerate()
                .map(|(k, fk)| fk * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                .sum();
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        Self { a, b, coeffs }
    }

    /// Doubles the degree until the trailing coefficients fall below
    /// `tol` times the largest one.
    pub fn adaptive<F: FnMut(f64) -> f64>(
        mut f: F,
        a: f64,
        b: f64,
        tol: f64,
        max_points: usize,
    ) -> Result<Self> {
        if !(a < b) {
            return Err(Error::invalid(format!("Chebyshev interval [{a:e}, {b:e}]")));
        }
        let mut n = 16;
        loop {
            let cheb = Self::from_fn(&mut f, a, b, n);
            let scale = cheb.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let tail = cheb.coeffs[n - 3..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if tail <= tol * scale {
                return Ok(cheb.trimmed(tol * scale));
            }
            if n >= max_points {
                return Err(Error::NoConvergence(format!(
                    "Chebyshev tail {tail:e} above {:e} at {n} points",
                    tol * scale
                )));
            }
            n *= 2;
        }
    }

    fn trimmed(mut self, floor: f64) -> Self {
        while self.coeffs.len() > 2 && self.coeffs.last().is_some_and(|c| c.abs() < 0.01 * floor) {
            self.coeffs.pop();
        }
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, self.to_unit(x))
    }

    /// The derivative as a new interpolant on the same interval.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        // c'_{k-1} = c'_{k+1} + 2k c_k
        let mut der = vec![0.0; n + 1];
        for k in (1..n).rev() {
            der[k - 1] = der[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        der[0] *= 0.5;
        der.truncate(n.saturating_sub(1).max(1));
        let scale = 2.0 / (self.b - self.a);
        Self {
            a: self.a,
            b: self.b,
            coeffs: der.into_iter().map(|c| c * scale).collect(),
        }
    }
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}
