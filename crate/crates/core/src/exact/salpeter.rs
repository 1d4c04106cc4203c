//! Two-body spinless Salpeter equation `σ√(p² + m²) + V(r)` in an
//! oscillator basis.
//!
//! Oscillator functions keep their form under Fourier transform (up to the
//! phase `(−1)^n i^l`), so the kinetic matrix is a radial integral of
//! `σ√(k² + m²)` between the same radial functions, with `k = t/b`.

use serde::{Deserialize, Serialize};

use super::ho::RadialBasis;
use crate::afm::{solve_afm, SystemSpec};
use crate::error::{Error, Result};
use crate::potentials::Potential;

pub const DEFAULT_BASIS_SIZE: usize = 50;
pub const MIN_BASIS_SIZE: usize = 30;
/// Relative agreement required between `size` and `1.5 × size` bases.
pub const SALPETER_CONVERGENCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SalpeterSolution {
    /// Eigenvalue in the `1.5 × basis_size` basis.
    pub mass: f64,
    /// Eigenvalue in the `basis_size` basis.
    pub coarse_mass: f64,
    /// Oscillator length.
    pub b: f64,
    pub basis_size: usize,
}

fn levels(sigma: f64, m: f64, v: &Potential, basis: &RadialBasis, size: usize, b: f64) -> Vec<f64> {
    let mut h = basis.matrix(size, |t| sigma * ((t / b).powi(2) + m * m).sqrt());
    for i in 0..size {
        for j in 0..size {
            if (i + j) % 2 == 1 {
                h[(i, j)] = -h[(i, j)];
            }
        }
    }
    h += basis.matrix(size, |t| v.value(b * t));
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Golden-section minimization of `f` over `[a, b]`.
fn golden_min<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Oscillator length matched to the AFM mean radius of the state.
fn reference_length(sigma: f64, m: f64, v: &Potential, q: f64) -> Result<f64> {
    let sol = solve_afm(&SystemSpec::sigma(sigma, m, v.clone())?, q)?;
    Ok(sol.r0_two_body.expect("two-body potential present") / q.sqrt())
}

/// Level `n` of partial wave `l` of `σ√(p² + m²) + V(r)`.
pub fn solve_salpeter_2b(sigma: f64, m: f64, v: &Potential, n: u32, l: u32, basis_size: usize) -> Result<SalpeterSolution> {
    v.validate()?;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be > 0, got {sigma}")));
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::invalid(format!("mass must be >= 0, got {m}")));
    }
    if basis_size < MIN_BASIS_SIZE {
        return Err(Error::invalid(format!("basis needs at least {MIN_BASIS_SIZE} states, got {basis_size}")));
    }
    if n as usize >= basis_size {
        return Err(Error::invalid(format!("level {n} needs more than {basis_size} basis states")));
    }
    let fine_size = basis_size * 3 / 2;
    let basis = RadialBasis::new(l as usize, fine_size);
    let q = 2.0 * n as f64 + l as f64 + 1.5;
    let b0 = reference_length(sigma, m, v, q)?;
    let (lo, hi) = ((b0 / 4.0).ln(), (b0 * 4.0).ln());
    let level = |size: usize, b: f64| levels(sigma, m, v, &basis, size, b)[n as usize];
    let b = golden_min(lo, hi, 1e-3, |t| level(basis_size, t.exp())).0.exp();
    let coarse = level(basis_size, b);
    let fine = level(fine_size, b);
    if !coarse.is_finite() || (coarse - fine).abs() > SALPETER_CONVERGENCE * fine.abs().max(1.0) {
        return Err(Error::ConvergenceFailure {
            what: format!("Salpeter level (n={n}, l={l})"),
            coarse,
            fine,
        });
    }
    Ok(SalpeterSolution { mass: fine, coarse_mass: coarse, b, basis_size })
}
