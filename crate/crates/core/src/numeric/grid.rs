//! Uniform one-dimensional sampling grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0 && start.is_finite()) || len == 0 {
            return Err(Error::invalid(format!(
                "grid needs a positive step and at least one sample (step={step}, len={len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// `len` samples (even) at (n − len/2)·step + center, so `center` is
    /// sample len/2.
    pub fn centered(center: f64, step: f64, len: usize) -> Result<Self> {
        if len < 2 || len % 2 == 1 {
            return Err(Error::invalid(format!("centered grid length {len} must be even")));
        }
        Self::new(center - (len / 2) as f64 * step, step, len)
    }

    /// Smallest centered grid of length 2^k covering ±`half_span`.
    pub fn centered_pow2(center: f64, step: f64, half_span: f64) -> Result<Self> {
        let half = (half_span / step).ceil() as usize + 1;
        Self::centered(center, step, (2 * half).next_power_of_two())
    }

    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }

    /// Index of the sample nearest `x`, if `x` lies within the grid.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let f = ((x - self.start) / self.step).round();
        (f >= 0.0 && (f as usize) < self.len).then_some(f as usize)
    }

    /// Checks that `xs` is uniform to `rel_tol` of the step and returns its grid.
    pub fn from_samples(xs: &[f64], rel_tol: f64) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::invalid("need at least two samples for a grid"));
        }
        let step = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, &x) in xs.iter().enumerate() {
            if (x - (xs[0] + i as f64 * step)).abs() > rel_tol * step.abs() {
                return Err(Error::invalid(format!("non-uniform grid at sample {i}")));
            }
        }
        Self::new(xs[0], step, xs.len())
    }
}
