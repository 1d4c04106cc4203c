//! Two-body radial eigenvalues on a regularized Lagrange–Laguerre mesh.
//!
//! Solves `p²/m + V(r)` (two particles of mass m, reduced mass m/2) in a
//! given partial wave. Mesh points are `r_i = h x_i` with `x_i` the zeros of
//! the Laguerre polynomial `L_N`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::quadrature::laguerre_zeros;
use crate::afm::{solve_afm, SystemSpec};
use crate::error::{Error, Result};
use crate::potentials::Potential;

/// Relative agreement required between `points` and `2 × points` meshes.
pub const MESH_CONVERGENCE: f64 = 1e-6;
/// Default mesh scale puts the last point at this multiple of the AFM
/// mean radius of the state.
pub const MESH_EXTENT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshConfig {
    pub points: usize,
    /// Mesh scale h; `None` derives it from the AFM mean radius of the level.
    pub scale: Option<f64>,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { points: 100, scale: None }
    }
}

impl MeshConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points < 20 {
            return Err(Error::invalid(format!("mesh needs at least 20 points, got {}", self.points)));
        }
        if let Some(h) = self.scale {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::invalid(format!("mesh scale must be > 0, got {h}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    /// Eigenvalue on the `2 × points` mesh.
    pub energy: f64,
    /// Eigenvalue on the `points` mesh.
    pub coarse_energy: f64,
    pub scale: f64,
    pub points: usize,
}

/// Kinetic matrix `−d²/dx²` on the regularized Laguerre mesh (unit scale).
fn kinetic(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let nf = n as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let xi = x[i];
            -(xi * xi - 2.0 * (2.0 * nf + 1.0) * xi - 4.0) / (12.0 * xi * xi)
        } else {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * (x[i] + x[j]) / ((x[i] * x[j]).sqrt() * (x[i] - x[j]).powi(2))
        }
    })
}

/// Precomputed mesh of a given size.
#[derive(Debug, Clone)]
pub struct LaguerreMesh {
    x: Vec<f64>,
    t: DMatrix<f64>,
}

impl LaguerreMesh {
    pub fn new(points: usize) -> Self {
        let x = laguerre_zeros(points);
        let t = kinetic(&x);
        LaguerreMesh { x, t }
    }

    pub fn points(&self) -> usize {
        self.x.len()
    }

    /// Ascending eigenvalues of `p²/m + l(l+1)/(m r²) + V(r)` at scale h.
    pub fn levels(&self, m: f64, v: &Potential, l: u32, h: f64) -> Vec<f64> {
        let lf = l as f64;
        let mut hmat = &self.t * (1.0 / (m * h * h));
        for (i, &xi) in self.x.iter().enumerate() {
            let r = h * xi;
            hmat[(i, i)] += lf * (lf + 1.0) / (m * r * r) + v.value(r);
        }
        let mut e: Vec<f64> = hmat.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn level(&self, m: f64, v: &Potential, n: u32, l: u32, h: f64) -> f64 {
        self.levels(m, v, l, h)[n as usize]
    }
}

/// AFM mean radius of the two-body state, used to place the mesh.
pub(crate) fn afm_radius(m: f64, v: &Potential, n: u32, l: u32) -> Result<f64> {
    let spec = SystemSpec::nonrelativistic(2, m, None, Some(v.clone()))?;
    let q = 2.0 * n as f64 + l as f64 + 1.5;
    Ok(solve_afm(&spec, q)?.r0_two_body.expect("two-body potential present"))
}

/// Level `n` of partial wave `l` for `p²/m + V(r)`.
pub fn solve_radial_2b(m: f64, v: &Potential, n: u32, l: u32, cfg: &MeshConfig) -> Result<RadialSolution> {
    cfg.validate()?;
    v.validate()?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid(format!("mass must be > 0, got {m}")));
    }
    if n as usize >= cfg.points {
        return Err(Error::invalid(format!("level {n} needs more than {} mesh points", cfg.points)));
    }
    let coarse = LaguerreMesh::new(cfg.points);
    let h = match cfg.scale {
        Some(h) => h,
        None => MESH_EXTENT * afm_radius(m, v, n, l)? / coarse.x[cfg.points - 1],
    };
    let e_coarse = coarse.level(m, v, n, l, h);
    let e_fine = LaguerreMesh::new(2 * cfg.points).level(m, v, n, l, h);
    if !e_coarse.is_finite() || (e_coarse - e_fine).abs() > MESH_CONVERGENCE * e_fine.abs().max(1.0) {
        return Err(Error::ConvergenceFailure {
            what: format!("mesh level (n={n}, l={l})"),
            coarse: e_coarse,
            fine: e_fine,
        });
    }
    Ok(RadialSolution { energy: e_fine, coarse_energy: e_coarse, scale: h, points: cfg.points })
}

/// The universal function f(m): ground-state energy of `p²/m + V(r)`.
pub fn universal_f_fn(v: &Potential, m: f64) -> Result<f64> {
    Ok(solve_radial_2b(m, v, 0, 0, &MeshConfig::default())?.energy)
}
