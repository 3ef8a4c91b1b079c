//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Absolute tolerance used for every integral term of the Hermite–Hadamard chains.
pub const QUAD_TOL: f64 = 1e-10;
/// Maximum recursion depth of the adaptive refinement.
pub const MAX_DEPTH: u32 = 40;

/// Integrates `g` over `[a, b]` with adaptive Simpson refinement.
///
/// Subintervals are accepted once the Richardson estimate is below the local
/// tolerance, which halves at each level. The local tolerance never drops
/// below the rounding floor of the local estimate, so requests tighter than
/// double precision can resolve terminate instead of recursing to full depth.
pub fn integrate<G>(g: G, a: f64, b: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integration bounds must be finite: [{a}, {b}]"
        )));
    }
    if a > b {
        return Err(Error::InvalidInput(format!(
            "integration bounds reversed: a = {a} > b = {b}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let eval = |t: f64| -> Result<f64> {
        let v = g(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("integrand is not finite at t = {t}")))
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let mid = 0.5 * (a + b);
    let fm = eval(mid)?;
    let whole = simpson(a, b, fa, fm, fb);
    refine(
        &eval,
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole,
        },
        tol,
        MAX_DEPTH,
    )
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn refine<E>(eval: &E, p: Panel, tol: f64, depth: u32) -> Result<f64>
where
    E: Fn(f64) -> Result<f64>,
{
    let mid = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + mid);
    let rm = 0.5 * (mid + p.b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = simpson(p.a, mid, p.fa, flm, p.fm);
    let right = simpson(mid, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) || mid <= p.a || mid >= p.b {
        return Ok(left + right + delta / 15.0);
    }
    let l = refine(
        eval,
        Panel {
            a: p.a,
            b: mid,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        tol / 2.0,
        depth - 1,
    )?;
    let r = refine(
        eval,
        Panel {
            a: mid,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        tol / 2.0,
        depth - 1,
    )?;
    Ok(l + r)
}
