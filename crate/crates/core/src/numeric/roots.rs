//! Bracketed scalar root finding.
//!
//! The solver keeps a sign-changing bracket at every step. Each iteration
//! tries a secant step through the two most recent iterates and falls back
//! to bisection whenever the secant point leaves the bracket or the bracket
//! fails to halve over two consecutive iterations. Output depends only on the
//! inputs, never on timing or scheduling.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Absolute tolerance on the abscissa.
    pub x_tol: f64,
    /// Relative tolerance on the abscissa.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            x_tol: 0.0,
            rel_tol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` inside `[a, b]`, which must bracket a sign change.
pub fn bracketed_root<F>(mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot(format!(
            "f({lo:e}) = {f_lo:e} and f({hi:e}) = {f_hi:e} do not bracket a root"
        )));
    }

    // last two iterates for the secant step
    let (mut x0, mut f0) = (lo, f_lo);
    let (mut x1, mut f1) = (hi, f_hi);
    let mut prev_width = hi - lo;
    let mut stalled = 0;

    for _ in 0..opts.max_iter {
        let width = hi - lo;
        let tol = opts.x_tol.max(opts.rel_tol * lo.abs().max(hi.abs()));
        if width <= 2.0 * tol {
            break;
        }

        let mid = 0.5 * (lo + hi);
        let mut x = if f1 != f0 {
            x1 - f1 * (x1 - x0) / (f1 - f0)
        } else {
            mid
        };
        if !(x > lo && x < hi) || stalled >= 2 {
            x = mid;
            stalled = 0;
        }

        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::NoConvergence(format!("non-finite f({x:e})")));
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        x0 = x1;
        f0 = f1;
        x1 = x;
        f1 = fx;

        if hi - lo > 0.5 * prev_width {
            stalled += 1;
        } else {
            stalled = 0;
            prev_width = hi - lo;
        }
    }

    // return whichever end has the smaller residual
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

/// Grows `[a, b]` geometrically about its centre until `f` changes sign,
/// staying within `[min, max]`.
pub fn expand_bracket<F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    min: f64,
    max: f64,
    max_steps: usize,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    a = a.max(min);
    b = b.min(max);
    for _ in 0..max_steps {
        let (fa, fb) = (f(a), f(b));
        if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
            return Ok((a, b));
        }
        if a <= min && b >= max {
            break;
        }
        let half = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        a = (c - 3.0 * half).max(min);
        b = (c + 3.0 * half).min(max);
    }
    Err(Error::NoRoot(format!(
        "no sign change found in [{a:e}, {b:e}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root_of_two() {
        let r = bracketed_root(|x| x * x * x - 2.0, 0.0, 3.0, RootOptions::default()).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_bracket() {
        let e = bracketed_root(|x| x * x + 1.0, -1.0, 1.0, RootOptions::default());
        assert!(matches!(e, Err(Error::NoRoot(_))));
    }

    #[test]
    fn handles_flat_then_steep_function() {
        // secant steps stall on this shape; bisection fallback must finish
        let f = |x: f64| (x - 0.3).powi(9);
        let r = bracketed_root(f, 0.0, 1.0, RootOptions::default()).unwrap();
        assert!((r - 0.3).abs() < 1e-2);
        let g = |x: f64| (10.0 * (x - 0.7)).tanh();
        let r = bracketed_root(g, -5.0, 5.0, RootOptions::default()).unwrap();
        assert!((r - 0.7).abs() < 1e-14);
    }

    #[test]
    fn expand_bracket_finds_sign_change() {
        let (a, b) = expand_bracket(|x| x - 10.0, 0.0, 1.0, -100.0, 100.0, 20).unwrap();
        assert!(a <= 10.0 && b >= 10.0);
        assert!(expand_bracket(|x| x * x + 1.0, 0.0, 1.0, -5.0, 5.0, 20).is_err());
    }
}
