//! The Airy function Ai on the real line and its negative zeros.

use crate::error::{Error, Result};
use crate::numeric::{bracketed_root, RootOptions};

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;
const STEP: f64 = 0.25;

/// Ai(x) and Ai'(x) for −30 ≤ x ≤ 5.
///
/// Integrates Ai'' = x·Ai from the origin with local Taylor expansions.
pub fn airy_ai_with_derivative(x: f64) -> Result<(f64, f64)> {
    if !(-30.0..=5.0).contains(&x) {
        return Err(Error::domain(format!("Ai evaluated at {x} (supported: [-30, 5])")));
    }
    let n_steps = (x.abs() / STEP).ceil().max(1.0) as usize;
    let h = x / n_steps as f64;
    let (mut y, mut yp) = (AI0, AIP0);
    let mut x0 = 0.0;
    for _ in 0..n_steps {
        (y, yp) = taylor_step(x0, y, yp, h);
        x0 += h;
    }
    Ok((y, yp))
}

pub fn airy_ai(x: f64) -> Result<f64> {
    airy_ai_with_derivative(x).map(|(y, _)| y)
}

fn taylor_step(x0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    // a_{n+2} = (x0 a_n + a_{n-1}) / ((n+2)(n+1))
    let mut a = [y, yp, 0.5 * x0 * y];
    let mut value = a[0] + h * a[1] + h * h * a[2];
    let mut deriv = a[1] + 2.0 * h * a[2];
    let mut hp = h * h;
    for n in 1..48usize {
        let next = (x0 * a[1] + a[0]) / (((n + 2) * (n + 1)) as f64);
        let d_term = (n + 2) as f64 * next * hp;
        hp *= h;
        let term = next * hp;
        value += term;
        deriv += d_term;
        a = [a[1], a[2], next];
    }
    (value, deriv)
}

/// The q-th zero α_q of Ai(−z), 1 ≤ q ≤ 10.
pub fn airy_zero(q: u32) -> Result<f64> {
    if !(1..=10).contains(&q) {
        return Err(Error::Unsupported(format!("Airy zero index {q} (supported: 1..=10)")));
    }
    let t = 3.0 * std::f64::consts::PI * (4.0 * q as f64 - 1.0) / 8.0;
    let mut z = t.powf(2.0 / 3.0) * (1.0 + 5.0 / 48.0 * t.powi(-2));
    for _ in 0..8 {
        let (ai, aip) = airy_ai_with_derivative(-z)?;
        let dz = ai / aip;
        z += dz;
        if dz.abs() < 1e-15 * z {
            break;
        }
    }
    // polish inside a tight bracket so the residual contract holds
    let f = |s: f64| airy_ai(-s).unwrap_or(f64::NAN);
    let (lo, hi) = (z - 1e-6, z + 1e-6);
    if f(lo).signum() != f(hi).signum() {
        z = bracketed_root(f, lo, hi, RootOptions::default())?;
    }
    Ok(z)
}
