//! One-dimensional adaptive quadrature.
//!
//! Adaptive Simpson bisection with an absolute tolerance and a hard
//! recursion cap. Integrands here are piecewise smooth; callers split at
//! known breakpoints so each piece converges quickly.

use crate::error::{Error, Result};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 50;

struct Adapt<'a> {
    f: &'a dyn Fn(f64) -> f64,
    /// Worst unresolved Richardson error estimate, if any subinterval hit
    /// the recursion cap.
    deficit: f64,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

impl Adapt<'_> {
    fn run(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        if depth >= MAX_DEPTH {
            self.deficit = self.deficit.max(delta.abs() / 15.0);
            return left + right + delta / 15.0;
        }
        let half_tol = 0.5 * tol;
        self.run(a, m, fa, flm, fm, left, half_tol, depth + 1)
            + self.run(m, b, fm, frm, fb, right, half_tol, depth + 1)
    }
}

/// Integrate `f` over `[a, b]` (finite, a <= b) to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    assert!(a < b && a.is_finite() && b.is_finite(), "integrate requires finite a < b");
    let mut st = Adapt { f: &f, deficit: 0.0 };
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let value = st.run(a, b, fa, fm, fb, whole, tol, 0);
    if st.deficit > tol {
        return Err(Error::QuadratureNonConvergence { requested: tol, achieved: st.deficit });
    }
    Ok(value)
}

/// Integrate over `[a, b]` split at the interior `breakpoints` (unsorted,
/// possibly outside the interval; duplicates are fine). The tolerance is
/// divided across the pieces.
pub fn integrate_split(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|t| t.is_finite() && *t > a && *t < b)
        .collect();
    cuts.sort_by(|u, v| u.partial_cmp(v).unwrap());
    cuts.dedup();
    let pieces = cuts.len() + 1;
    let piece_tol = tol / pieces as f64;
    let mut lo = a;
    let mut total = 0.0;
    for c in cuts {
        total += integrate(&f, lo, c, piece_tol)?;
        lo = c;
    }
    total += integrate(&f, lo, b, piece_tol)?;
    Ok(total)
}
