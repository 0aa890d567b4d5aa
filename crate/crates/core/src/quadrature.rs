//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Maximum number of interval bisections per call.
pub const MAX_SUBDIVISIONS: usize = 1_000_000;
const MAX_DEPTH: u32 = 60;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

/// `∫_a^b f` to absolute tolerance `tol`. Reversed limits give the negated
/// integral.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("quadrature limits"));
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let mut stack = vec![Panel { a, b, fa, fm, fb, whole: simpson(a, b, fa, fm, fb), tol, depth: 0 }];
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut splits = 0usize;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        if delta.abs() <= 15.0 * p.tol || p.depth >= MAX_DEPTH {
            if delta.abs() > 15.0 * p.tol {
                return Err(Error::QuadratureFailure);
            }
            // Kahan-compensated accumulation of the Richardson-corrected panel.
            let v = left + right + delta / 15.0;
            let y = v - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
            continue;
        }
        splits += 1;
        if splits > MAX_SUBDIVISIONS {
            return Err(Error::QuadratureFailure);
        }
        let tol = 0.5 * p.tol;
        let depth = p.depth + 1;
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth });
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth });
    }
    Ok(total)
}

/// Running integrals `∫_{x_0}^{x_k} f` over ascending points, each segment
/// integrated to `tol`.
pub fn cumulative(mut f: impl FnMut(f64) -> f64, points: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    for (k, &x) in points.iter().enumerate() {
        if k > 0 {
            acc += integrate(&mut f, points[k - 1], x, tol)?;
        }
        out.push(acc);
    }
    Ok(out)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}
