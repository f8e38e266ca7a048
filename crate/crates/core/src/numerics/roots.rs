//! Bracketing root finders.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bisection on `[lo, hi]` followed by one secant polish step.
///
/// Stops when the bracket is narrower than `xtol` or can no longer be split.
pub fn bisect<S: Scalar, F: FnMut(S) -> S>(mut f: F, lo: S, hi: S, xtol: S) -> Result<S> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == S::zero() {
        return Ok(a);
    }
    if fb == S::zero() {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Domain(format!(
            "no sign change on [{}, {}]: f = ({}, {})",
            a, b, fa, fb
        )));
    }
    let half = S::lit(0.5);
    for _ in 0..400 {
        let m = a + (b - a) * half;
        if (b - a).abs() <= xtol || m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == S::zero() {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    // secant through the final bracket, kept only if it stays inside
    let x = a - fa * (b - a) / (fb - fa);
    if x.is_finite() && x >= a.min(b) && x <= a.max(b) {
        let fx = f(x);
        if fx.abs() <= fa.abs().min(fb.abs()) {
            return Ok(x);
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Brent's method. Same contract as [`bisect`] but converges superlinearly
/// on smooth functions.
pub fn brent<S: Scalar, F: FnMut(S) -> S>(mut f: F, lo: S, hi: S, xtol: S) -> Result<S> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == S::zero() {
        return Ok(a);
    }
    if fb == S::zero() {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Domain(format!(
            "no sign change on [{}, {}]: f = ({}, {})",
            a, b, fa, fb
        )));
    }
    let two = S::lit(2.0);
    let half = S::lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * S::epsilon() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol || fb == S::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = S::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - S::one()));
                q = (qa - S::one()) * (r - S::one()) * (s - S::one());
            }
            if p > S::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (S::lit(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = b + if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    Ok(b)
}

/// Sub-intervals of a sorted grid on which `f` changes sign (or hits zero).
pub fn sign_changes<S: Scalar, F: FnMut(S) -> S>(mut f: F, grid: &[S]) -> Vec<(S, S)> {
    let mut out = Vec::new();
    let vals: Vec<S> = grid.iter().map(|&x| f(x)).collect();
    for i in 0..grid.len().saturating_sub(1) {
        let (f0, f1) = (vals[i], vals[i + 1]);
        if !(f0.is_finite() && f1.is_finite()) {
            continue;
        }
        if f0 == S::zero() {
            out.push((grid[i], grid[i]));
        } else if f1 != S::zero() && f0.signum() != f1.signum() {
            out.push((grid[i], grid[i + 1]));
        }
    }
    if let (Some(&x), Some(&fx)) = (grid.last(), vals.last()) {
        if fx == S::zero() {
            out.push((x, x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn brent_cubic() {
        let r = brent(|x: f64| x * x * x - x - 1.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r * r * r - r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f32_terminates() {
        let r = bisect(|x: f32| x - 0.3, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 0.3).abs() < 1e-6);
    }

    #[test]
    fn no_sign_change() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn grid_scan_finds_all_roots() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let b = sign_changes(|x| (x - 1.05) * (x - 4.55) * (x - 7.0), &grid);
        assert_eq!(b.len(), 3);
    }
}
