//! Bracketed root finding on a logarithmic scale.
//!
//! Every scalar equation solved in this crate has a positive unknown spanning
//! many decades, so the search runs in `t = ln x`.

use crate::error::{Error, Result};

/// Relative tolerance on the unknown.
pub const ROOT_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 200;
/// The bracket scan covers `x ∈ [10^-LOG10_SPAN, 10^LOG10_SPAN]`.
pub const LOG10_SPAN: i32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
    /// |g| at the returned point.
    pub residual: f64,
}

/// Finds a positive root of `g(x)` where `g` changes sign once.
///
/// The bracket is found by stepping outward from `x = 1` by factors of 10,
/// then refined by a secant iteration in `ln x` that falls back to bisection
/// whenever the secant step leaves the bracket or stalls.
pub fn find_positive_root<F>(what: &str, mut g: F) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let mut phi = |t: f64| g(t.exp());
    let (mut a, mut fa, mut b, mut fb) = match bracket(&mut phi, what)? {
        Bracketed::Exact(t) => {
            return Ok(Root { x: t.exp(), iterations: 0, residual: 0.0 });
        }
        Bracketed::Interval(a, fa, b, fb) => (a, fa, b, fb),
    };

    let mut width = (b - a).abs();
    for it in 1..=MAX_ITER {
        let secant = b - fb * (b - a) / (fb - fa);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut t = if secant.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (a + b)
        };
        // Guard against one-sided secant convergence.
        if it % 3 == 0 && (hi - lo) > 0.5 * width {
            t = 0.5 * (a + b);
        }
        if it % 3 == 0 {
            width = hi - lo;
        }
        let ft = phi(t);
        if !ft.is_finite() {
            return Err(Error::NonConvergence { iterations: it, residual: f64::NAN });
        }
        if ft == 0.0 {
            return Ok(Root { x: t.exp(), iterations: it, residual: 0.0 });
        }
        if ft.signum() == fa.signum() {
            a = t;
            fa = ft;
        } else {
            b = t;
            fb = ft;
        }
        if (b - a).abs() <= ROOT_TOL {
            let (t, ft) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(Root { x: t.exp(), iterations: it, residual: ft.abs() });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITER,
        residual: fa.abs().min(fb.abs()),
    })
}

enum Bracketed {
    Exact(f64),
    Interval(f64, f64, f64, f64),
}

fn bracket<F: FnMut(f64) -> f64>(phi: &mut F, what: &str) -> Result<Bracketed> {
    let step = std::f64::consts::LN_10;
    let f0 = phi(0.0);
    if f0 == 0.0 {
        return Ok(Bracketed::Exact(0.0));
    }
    let (mut up_t, mut up_f) = (0.0, f0);
    let (mut down_t, mut down_f) = (0.0, f0);
    for k in 1..=LOG10_SPAN {
        let t = k as f64 * step;
        for (prev_t, prev_f, t) in [(&mut up_t, &mut up_f, t), (&mut down_t, &mut down_f, -t)] {
            let f = phi(t);
            if f == 0.0 {
                return Ok(Bracketed::Exact(t));
            }
            if f.is_finite() {
                if prev_f.is_finite() && f.signum() != prev_f.signum() {
                    return Ok(Bracketed::Interval(*prev_t, *prev_f, t, f));
                }
                *prev_t = t;
                *prev_f = f;
            }
        }
    }
    Err(Error::NoBracket(format!(
        "{what} (scanned [1e-{LOG10_SPAN}, 1e{LOG10_SPAN}])"
    )))
}

/// Counts sign changes of `g` on `points` log-spaced samples of `[lo, hi]`.
pub fn sign_changes<F: FnMut(f64) -> f64>(lo: f64, hi: f64, points: usize, mut g: F) -> usize {
    let (a, b) = (lo.ln(), hi.ln());
    let mut prev: Option<f64> = None;
    let mut count = 0;
    for i in 0..points {
        let t = a + (b - a) * i as f64 / (points - 1) as f64;
        let v = g(t.exp());
        if !v.is_finite() || v == 0.0 {
            continue;
        }
        if let Some(p) = prev {
            if p.signum() != v.signum() {
                count += 1;
            }
        }
        prev = Some(v);
    }
    count
}
