//! Peak location and width measurements on sampled and analytic lineshapes.

use crate::error::{Error, Result};
use crate::numeric::roots::{bracketed_root, RootOptions};

/// Full width at half maximum of the peak containing the global maximum of
/// `ys`, using linear interpolation between samples at the crossings.
pub fn fwhm_sampled(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (imax, &ymax) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    fwhm_around(xs, ys, imax, 0.5 * ymax)
}

/// Width at `level` of the peak at index `ipk`.
pub fn fwhm_around(xs: &[f64], ys: &[f64], ipk: usize, level: f64) -> Option<f64> {
    if !(ys[ipk] > level) {
        return None;
    }
    let mut i = ipk;
    while i > 0 && ys[i] > level {
        i -= 1;
    }
    if ys[i] > level {
        return None;
    }
    let left = xs[i] + (level - ys[i]) * (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i]);
    let mut j = ipk;
    while j + 1 < ys.len() && ys[j] > level {
        j += 1;
    }
    if ys[j] > level {
        return None;
    }
    let right = xs[j - 1] + (ys[j - 1] - level) * (xs[j] - xs[j - 1]) / (ys[j - 1] - ys[j]);
    Some(right - left)
}

/// FWHM of an analytic single-peaked function with maximum at `x_peak`.
/// `scale` is a rough width used to bracket the half-maximum crossings.
pub fn fwhm_of_fn<F: Fn(f64) -> f64>(f: F, x_peak: f64, scale: f64) -> Result<f64> {
    let half = 0.5 * f(x_peak);
    let g = |x: f64| f(x) - half;
    let opts = RootOptions {
        x_tol: 1e-14 * scale,
        ..RootOptions::default()
    };
    let crossing = |dir: f64| -> Result<f64> {
        let mut step = scale;
        for _ in 0..60 {
            if g(x_peak + dir * step) < 0.0 {
                return bracketed_root(&g, x_peak, x_peak + dir * step, opts);
            }
            step *= 2.0;
        }
        Err(Error::NoRoot("half-maximum crossing not found".into()))
    };
    Ok(crossing(1.0)? - crossing(-1.0)?)
}

/// Indices of strict local maxima whose value exceeds `min_rel` times the
/// global maximum.
pub fn local_maxima(ys: &[f64], min_rel: f64) -> Vec<usize> {
    let top = ys.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let floor = min_rel * top;
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > floor && ys[i] >= ys[i - 1] && ys[i] > ys[i + 1])
        .collect()
}

/// Vertex of the parabola through three equally spaced samples around `i`,
/// returned as (fractional offset in steps, value).
pub fn parabolic_peak(ys: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= ys.len() {
        return (0.0, ys[i]);
    }
    let (a, b, c) = (ys[i - 1], ys[i], ys[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom == 0.0 {
        return (0.0, b);
    }
    let p = 0.5 * (a - c) / denom;
    (p, b - 0.25 * (a - c) * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz(x: f64, w: f64) -> f64 {
        let h = 0.5 * w;
        h * h / (x * x + h * h)
    }

    #[test]
    fn sampled_fwhm_of_lorentzian() {
        let xs: Vec<f64> = (0..4001).map(|i| -10.0 + i as f64 * 0.005).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| lorentz(x, 1.3)).collect();
        let w = fwhm_sampled(&xs, &ys).unwrap();
        assert!((w - 1.3).abs() < 1e-4);
    }

    #[test]
    fn analytic_fwhm() {
        let w = fwhm_of_fn(|x| lorentz(x - 2.0, 0.01), 2.0, 0.003).unwrap();
        assert!((w - 0.01).abs() < 1e-12);
    }

    #[test]
    fn maxima_and_vertex() {
        let ys = [0.0, 1.0, 3.0, 2.0, 0.5, 0.6, 0.1];
        assert_eq!(local_maxima(&ys, 0.1), vec![2, 5]);
        let q: Vec<f64> = (0..5).map(|i| -(i as f64 - 2.3).powi(2)).collect();
        let (p, v) = parabolic_peak(&q, 2);
        assert!((p - 0.3).abs() < 1e-12 && v.abs() < 1e-12);
    }
}
