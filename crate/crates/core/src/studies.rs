//! Comparisons between duality predictions and exact solutions.
//!
//! Each study returns plain records so the CLI and the test suite share the
//! same numbers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::afm::c_n;
use crate::error::Result;
use crate::exact::salpeter::{solve_salpeter_2b, DEFAULT_BASIS_SIZE};
use crate::exact::{solve_3b, universal_f_fn, ThreeBodyBasisConfig};
use crate::potentials::Potential;

/// Principal number of the massless two-body linear system,
/// `M ≈ √(8 b Q)` with `Q = πn/2 + l + 4/π`.
pub fn q_ur_linear_2b(n: u32, l: u32) -> f64 {
    PI / 2.0 * n as f64 + l as f64 + 4.0 / PI
}

/// `M ≈ √(8 b Q)` for `2√(p²) + b r`.
pub fn ur_linear_mass_2b(b: f64, q: f64) -> f64 {
    (8.0 * b * q).sqrt()
}

/// `M ≈ √((32/π) a Q)` for three massless particles bound by `a Σ|rᵢ − R|`.
pub fn ur_linear_mass_3b(a: f64, q: f64) -> f64 {
    (32.0 / PI * a * q).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsLinkReport {
    pub potential: Potential,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Exact three-body ground-state energy.
    pub exact: f64,
    /// `C_N f(Nm/2)`.
    pub link: f64,
    pub rel_error: f64,
}

/// Three-body ground state against `C_3 f(3m/2)`.
pub fn gs_link_check(v: &Potential, m: f64, bmax: u32) -> Result<GsLinkReport> {
    let cfg = ThreeBodyBasisConfig { bmax, ..Default::default() };
    let exact = solve_3b(m, v, &cfg)?.entries[0].energy;
    let link = c_n(3) * universal_f_fn(v, 1.5 * m)?;
    Ok(GsLinkReport { potential: v.clone(), m, n: 3, exact, link, rel_error: ((link - exact) / exact).abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrLinearRow {
    pub n: u32,
    pub l: u32,
    pub exact: f64,
    pub approx: f64,
    pub rel_error: f64,
}

/// Exact levels of `2√(p²) + b r` against `√(8 b Q)`.
pub fn ur_linear_accuracy(b: f64, n_max: u32, l_max: u32) -> Result<Vec<UrLinearRow>> {
    let v = Potential::linear(b)?;
    let mut rows = Vec::new();
    for n in 0..=n_max {
        for l in 0..=l_max {
            let exact = solve_salpeter_2b(2.0, 0.0, &v, n, l, DEFAULT_BASIS_SIZE)?.mass;
            let approx = ur_linear_mass_2b(b, q_ur_linear_2b(n, l));
            rows.push(UrLinearRow { n, l, exact, approx, rel_error: ((approx - exact) / exact).abs() });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrNrRow {
    pub n: u32,
    pub l: u32,
    /// Oscillator level `√(4a/m) Q_n`, `Q_n = 2n + l + 3/2`.
    pub nr_level: f64,
    /// String tension `b = a Q_n/(2m)` of the dual massless system.
    pub dual_tension: f64,
    /// Exact level of `2√(p²) + b r` with that tension.
    pub ur_exact: f64,
    /// `|ur_exact − √(8 b Q_n)| / √(8 b Q_n)`.
    pub forward_rel_error: f64,
    /// Oscillator strength `a = 2 b m / Q_u` dual to unit tension.
    pub dual_strength: f64,
    /// Exact level `√(4a/m) Q_n` with that strength.
    pub nr_exact: f64,
    /// `|nr_exact − √(4a/m) Q_u| / (√(4a/m) Q_u)`.
    pub reverse_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrNrReport {
    pub rows: Vec<UrNrRow>,
    pub max_forward: f64,
    pub max_reverse: f64,
}

/// Duality between `p²/m + a r²` and `2√(p²) + b r` (`2bm = aQ`) applied
/// to genuine solutions in both directions, with `a = m = 1` forward and
/// `b = 1, m = 1` in reverse.
pub fn ur_nr_duality(n_max: u32, l_max: u32) -> Result<UrNrReport> {
    let (a, m): (f64, f64) = (1.0, 1.0);
    let mut rows = Vec::new();
    for n in 0..=n_max {
        for l in 0..=l_max {
            let q_n = 2.0 * n as f64 + l as f64 + 1.5;
            let q_u = q_ur_linear_2b(n, l);
            let nr_level = (4.0 * a / m).sqrt() * q_n;
            let tension = a * q_n / (2.0 * m);
            let ur_exact = solve_salpeter_2b(2.0, 0.0, &Potential::linear(tension)?, n, l, DEFAULT_BASIS_SIZE)?.mass;
            let forward_pred = ur_linear_mass_2b(tension, q_n);
            let strength = 2.0 * m / q_u;
            let nr_exact = (4.0 * strength / m).sqrt() * q_n;
            let reverse_pred = (4.0 * strength / m).sqrt() * q_u;
            rows.push(UrNrRow {
                n,
                l,
                nr_level,
                dual_tension: tension,
                ur_exact,
                forward_rel_error: ((ur_exact - forward_pred) / forward_pred).abs(),
                dual_strength: strength,
                nr_exact,
                reverse_rel_error: ((nr_exact - reverse_pred) / reverse_pred).abs(),
            });
        }
    }
    let max_forward = rows.iter().map(|r| r.forward_rel_error).fold(0.0, f64::max);
    let max_reverse = rows.iter().map(|r| r.reverse_rel_error).fold(0.0, f64::max);
    Ok(UrNrReport { rows, max_forward, max_reverse })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossDualityReport {
    /// `(3/2) M₂(2Q/3) / M₃(Q)`.
    pub three_from_two: f64,
    /// `(2/3) M₃(3Q/2) / M₂(Q)`.
    pub two_from_three: f64,
    /// `|three_from_two − 1|`.
    pub deviation: f64,
}

/// Ratio between the two- and three-body massless linear mass formulas
/// linked by the N → p duality; it does not depend on Q.
pub fn cross_duality_factor(q: f64) -> CrossDualityReport {
    let three_from_two = 1.5 * ur_linear_mass_2b(1.0, 2.0 * q / 3.0) / ur_linear_mass_3b(1.0, q);
    let two_from_three = (2.0 / 3.0) * ur_linear_mass_3b(1.0, 1.5 * q) / ur_linear_mass_2b(1.0, q);
    CrossDualityReport { three_from_two, two_from_three, deviation: (three_from_two - 1.0).abs() }
}
