//! Three identical particles with a pairwise central potential, solved in a
//! harmonic-oscillator basis.
//!
//! Internal coordinates are the equal-mass Jacobi vectors
//! `x = (r1 − r2)/√2`, `y = (r1 + r2 − 2 r3)/√6`, so `r12 = √2 |x|` and the
//! internal kinetic energy is `(p_x² + p_y²)/(2m)`. Basis states are coupled
//! products `|n1 l1 (x), n2 l2 (y); L⟩` of oscillator functions of length b,
//! grouped by band `B = 2(n1 + n2) + l1 + l2`. The pair potentials `V(r23)`
//! and `V(r31)` follow from `V(r12)` by the cyclic-permutation rotation of
//! the Jacobi plane, which is a rotation by 2π/3.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::ho::{laplacian_matrix, RadialBasis};
use super::mesh::afm_radius;
use super::moshinsky::{MoshinskyTable, PairState};
use crate::afm::{solve_afm, SystemSpec};
use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::quantum_numbers::StateLabels;

/// Tolerance on projector eigenvalues being 0 or 1.
const PROJECTOR_TOL: f64 = 1e-8;
/// Relative amplitude difference below which a label and its swap tie.
const TIE_TOL: f64 = 1e-6;
/// Number of oscillator lengths tried when b is not given.
const B_SCAN: i32 = 3;
const B_SCAN_RATIO: f64 = 1.2;
/// The scan minimizes the sum of this many lowest levels, which is also
/// variational and less flat in b than the ground state alone.
const B_SCAN_LEVELS: usize = 4;

/// Permutation symmetry of the three-body state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// Fully symmetric (identical bosons).
    #[default]
    Symmetric,
    /// Fully antisymmetric in the spatial coordinates.
    Antisymmetric,
    /// Two-dimensional mixed representation; one partner of each doublet
    /// is computed, both have the same energy.
    Mixed,
}

impl Symmetry {
    pub const ALL: [Symmetry; 3] = [Symmetry::Symmetric, Symmetry::Antisymmetric, Symmetry::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Antisymmetric => "antisymmetric",
            Symmetry::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" | "bosonic" | "s" => Ok(Symmetry::Symmetric),
            "antisymmetric" | "a" => Ok(Symmetry::Antisymmetric),
            "mixed" | "m" => Ok(Symmetry::Mixed),
            other => Err(Error::invalid(format!("unknown symmetry '{other}' (symmetric, antisymmetric, mixed)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeBodyBasisConfig {
    /// Oscillator length; `None` scans around the AFM mean radius.
    pub b: Option<f64>,
    pub bmax: u32,
    pub l_total: u32,
    pub parity: i32,
    pub symmetry: Symmetry,
}

impl Default for ThreeBodyBasisConfig {
    fn default() -> Self {
        ThreeBodyBasisConfig { b: None, bmax: 20, l_total: 0, parity: 1, symmetry: Symmetry::Symmetric }
    }
}

impl ThreeBodyBasisConfig {
    pub fn sector(l_total: u32, parity: i32, symmetry: Symmetry) -> Self {
        ThreeBodyBasisConfig { l_total, parity, symmetry, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.parity != 1 && self.parity != -1 {
            return Err(Error::invalid(format!("parity must be +1 or -1, got {}", self.parity)));
        }
        if self.bmax < self.l_total {
            return Err(Error::invalid(format!("Bmax = {} must be at least L = {}", self.bmax, self.l_total)));
        }
        if let Some(b) = self.b {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::invalid(format!("oscillator length must be > 0, got {b}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    /// Quantum numbers `n1, l1, n2, l2` of the main component.
    pub labels: StateLabels,
    #[serde(rename = "B")]
    pub band: u32,
    pub energy: f64,
    /// Squared amplitude of the main component.
    pub main_amplitude: f64,
    /// The main component and its `n1↔n2, l1↔l2` swap are equally present.
    pub tied: bool,
}

impl SpectrumEntry {
    /// Label as printed in tables: `[n1,l1,n2,l2]` for tied components.
    pub fn display_label(&self) -> String {
        if self.tied {
            format!("[{}]", self.labels)
        } else {
            self.labels.to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    #[serde(rename = "L")]
    pub l_total: u32,
    pub parity: i32,
    pub symmetry: Symmetry,
    pub b: f64,
    pub bmax: u32,
    pub dimension: usize,
    /// Ascending in energy.
    pub entries: Vec<SpectrumEntry>,
}

/// Index groups of basis states that differ only in one radial quantum number.
struct Groups {
    /// `(global indices, radial quantum numbers, l)` per group.
    items: Vec<(Vec<usize>, Vec<usize>, u32)>,
}

impl Groups {
    fn build(states: &[PairState], along_x: bool) -> Self {
        let mut map = std::collections::BTreeMap::<(u32, u32, u32), (Vec<usize>, Vec<usize>)>::new();
        for (i, s) in states.iter().enumerate() {
            let (key, n) = if along_x { ((s.l1, s.l2, s.n2), s.n1) } else { ((s.l1, s.l2, s.n1), s.n2) };
            let e = map.entry(key).or_default();
            e.0.push(i);
            e.1.push(n as usize);
        }
        let items = map
            .into_iter()
            .map(|((l1, l2, _), (idx, ns))| (idx, ns, if along_x { l1 } else { l2 }))
            .collect();
        Groups { items }
    }

    /// `Y = A X` where A acts through `mats[l][n', n]` inside each group.
    fn apply(&self, mats: &[DMatrix<f64>], x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(x.nrows(), x.ncols());
        for (idx, ns, l) in &self.items {
            let m = &mats[*l as usize];
            for (a, &ia) in idx.iter().enumerate() {
                for (c, &ic) in idx.iter().enumerate() {
                    let v = m[(ns[a], ns[c])];
                    if v != 0.0 {
                        for col in 0..x.ncols() {
                            y[(ia, col)] += v * x[(ic, col)];
                        }
                    }
                }
            }
        }
        y
    }
}

/// Symmetry-adapted basis of one `(L, parity)` sector, independent of b.
struct SectorBasis {
    states: Vec<PairState>,
    bands: Vec<u32>,
    /// Columns span the symmetry subspace.
    q: DMatrix<f64>,
    /// `Cᵀ Q` and `C Q`, where C is the cyclic permutation.
    wq: DMatrix<f64>,
    wq2: DMatrix<f64>,
    /// Maps a mixed-symmetry vector to its partner of opposite pair parity.
    partner: Option<DMatrix<f64>>,
    x_groups: Groups,
    y_groups: Groups,
}

fn block_diag(blocks: &[DMatrix<f64>], dim: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(dim, dim);
    let mut off = 0;
    for b in blocks {
        let n = b.nrows();
        out.view_mut((off, off), (n, n)).copy_from(b);
        off += n;
    }
    out
}

/// Projector onto the requested symmetry inside one band.
pub fn symmetry_projector(states: &[PairState], cyclic: &DMatrix<f64>, symmetry: Symmetry) -> DMatrix<f64> {
    let n = states.len();
    let id = DMatrix::<f64>::identity(n, n);
    let p = DMatrix::from_fn(n, n, |i, j| if i == j { if states[i].l1.is_multiple_of(2) { 1.0 } else { -1.0 } } else { 0.0 });
    let sum = cyclic + cyclic.transpose();
    match symmetry {
        Symmetry::Symmetric => (&id + &p) * (&id + &sum) / 6.0,
        Symmetry::Antisymmetric => (&id - &p) * (&id + &sum) / 6.0,
        Symmetry::Mixed => (&id + &p) * (&id * 2.0 - &sum) / 6.0,
    }
}

impl SectorBasis {
    fn new(cfg: &ThreeBodyBasisConfig) -> Result<Self> {
        let table = MoshinskyTable::new(cfg.l_total, cfg.parity, cfg.bmax, 2.0 * PI / 3.0)?;
        let mut states = Vec::new();
        let mut bands = Vec::new();
        let mut cyclic_blocks = Vec::new();
        let mut q_blocks: Vec<(usize, DMatrix<f64>)> = Vec::new();
        for (band, band_states, d) in &table.bands {
            let proj = symmetry_projector(band_states, d, cfg.symmetry);
            let eig = SymmetricEigen::new(proj);
            let mut cols = Vec::new();
            for (k, &ev) in eig.eigenvalues.iter().enumerate() {
                if (ev - 1.0).abs() < PROJECTOR_TOL {
                    cols.push(eig.eigenvectors.column(k).into_owned());
                } else if ev.abs() >= PROJECTOR_TOL {
                    return Err(Error::IllConditioned {
                        band: *band as usize,
                        detail: format!("symmetrizer eigenvalue {ev} is neither 0 nor 1"),
                    });
                }
            }
            let block = DMatrix::from_fn(band_states.len(), cols.len(), |i, j| cols[j][i]);
            q_blocks.push((states.len(), block));
            bands.extend(std::iter::repeat_n(*band, band_states.len()));
            states.extend(band_states.iter().copied());
            cyclic_blocks.push(d.clone());
        }
        let dim = states.len();
        let k: usize = q_blocks.iter().map(|(_, q)| q.ncols()).sum();
        if k == 0 {
            return Err(Error::invalid(format!(
                "no {} states with L = {}, parity {:+} below Bmax = {}",
                cfg.symmetry.name(),
                cfg.l_total,
                cfg.parity,
                cfg.bmax
            )));
        }
        let mut q = DMatrix::zeros(dim, k);
        let mut col = 0;
        for (off, block) in &q_blocks {
            q.view_mut((*off, col), (block.nrows(), block.ncols())).copy_from(block);
            col += block.ncols();
        }
        let c = block_diag(&cyclic_blocks, dim);
        let wq = c.transpose() * &q;
        let wq2 = &c * &q;
        let partner = (cfg.symmetry == Symmetry::Mixed).then(|| (&c - c.transpose()) / 3f64.sqrt());
        let x_groups = Groups::build(&states, true);
        let y_groups = Groups::build(&states, false);
        Ok(SectorBasis { states, bands, q, wq, wq2, partner, x_groups, y_groups })
    }

    fn max_n(&self) -> usize {
        self.states.iter().map(|s| s.n1.max(s.n2) as usize).max().unwrap_or(0) + 1
    }

    fn max_l(&self) -> usize {
        self.states.iter().map(|s| s.l1.max(s.l2) as usize).max().unwrap_or(0) + 1
    }
}

/// Radial tables reused across oscillator lengths.
struct RadialTables {
    size: usize,
    bases: Vec<RadialBasis>,
    laplacians: Vec<DMatrix<f64>>,
}

impl RadialTables {
    fn new(basis: &SectorBasis) -> Self {
        let size = basis.max_n();
        let lmax = basis.max_l();
        RadialTables {
            size,
            bases: (0..lmax).map(|l| RadialBasis::new(l, size)).collect(),
            laplacians: (0..lmax).map(|l| laplacian_matrix(l, size)).collect(),
        }
    }
}

/// Projected Hamiltonian `Qᵀ H Q` at oscillator length b.
fn projected_hamiltonian(basis: &SectorBasis, tables: &RadialTables, m: f64, v: &Potential, b: f64) -> DMatrix<f64> {
    let r_scale = 2f64.sqrt() * b;
    let v12: Vec<DMatrix<f64>> = tables.bases.iter().map(|rb| rb.matrix(tables.size, |t| v.value(r_scale * t))).collect();
    let q = &basis.q;
    let tq = (basis.x_groups.apply(&tables.laplacians, q) + basis.y_groups.apply(&tables.laplacians, q))
        * (1.0 / (2.0 * m * b * b));
    let mut h = q.transpose() * (tq + basis.x_groups.apply(&v12, q));
    h += basis.wq.transpose() * basis.x_groups.apply(&v12, &basis.wq);
    h += basis.wq2.transpose() * basis.x_groups.apply(&v12, &basis.wq2);
    (&h + h.transpose()) * 0.5
}

fn lowest_levels_sum(h: DMatrix<f64>) -> f64 {
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e.iter().take(B_SCAN_LEVELS).sum()
}

/// Default oscillator length: the AFM mean radius of the three-body ground
/// state divided by √3 (the mean `|x|` scale).
fn reference_length(m: f64, v: &Potential) -> Result<f64> {
    match solve_afm(&SystemSpec::nonrelativistic(3, m, None, Some(v.clone()))?, 3.0) {
        Ok(sol) => Ok(sol.r0_two_body.expect("two-body potential present") / 3f64.sqrt()),
        Err(_) => Ok(afm_radius(m, v, 0, 0)? / 3f64.sqrt()),
    }
}

fn labels_of(basis: &SectorBasis, vec: &DVector<f64>) -> (usize, f64, bool) {
    let mut w: Vec<f64> = vec.iter().map(|c| c * c).collect();
    if let Some(partner) = &basis.partner {
        let u = partner * vec;
        for (wi, ui) in w.iter_mut().zip(u.iter()) {
            *wi = 0.5 * (*wi + ui * ui);
        }
    }
    let top = (0..w.len()).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap_or(0);
    let swapped = basis.states[top].swapped();
    let tied = swapped != basis.states[top]
        && basis
            .states
            .iter()
            .position(|s| *s == swapped)
            .is_some_and(|j| (w[j] - w[top]).abs() <= TIE_TOL * w[top]);
    let top = if tied {
        let j = basis.states.iter().position(|s| *s == swapped).unwrap();
        // Report the member of the pair with the larger n1, then l1.
        let (a, b) = (basis.states[top], basis.states[j]);
        if (b.n1, b.l1) > (a.n1, a.l1) { j } else { top }
    } else {
        top
    };
    (top, w[top], tied)
}

/// Eigenvalues of the three-body Hamiltonian `Σ p_i²/(2m) + Σ_{i<j} V(r_ij)`
/// (centre-of-mass motion removed) in one `(L, parity, symmetry)` sector.
pub fn solve_3b(m: f64, v: &Potential, cfg: &ThreeBodyBasisConfig) -> Result<Spectrum> {
    cfg.validate()?;
    v.validate()?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid(format!("mass must be > 0, got {m}")));
    }
    let basis = SectorBasis::new(cfg)?;
    let tables = RadialTables::new(&basis);
    let (b, h) = match cfg.b {
        Some(b) => (b, projected_hamiltonian(&basis, &tables, m, v, b)),
        None => {
            let b0 = reference_length(m, v)?;
            let mut best: Option<(f64, f64, DMatrix<f64>)> = None;
            for k in -B_SCAN..=B_SCAN {
                let b = b0 * B_SCAN_RATIO.powi(k);
                let h = projected_hamiltonian(&basis, &tables, m, v, b);
                let e = lowest_levels_sum(h.clone());
                if best.as_ref().is_none_or(|(_, eb, _)| e < *eb) {
                    best = Some((b, e, h));
                }
            }
            let (b, _, h) = best.expect("scan is non-empty");
            (b, h)
        }
    };
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let entries = order
        .into_iter()
        .map(|k| {
            let full = &basis.q * eig.eigenvectors.column(k);
            let (top, amp, tied) = labels_of(&basis, &full);
            let s = basis.states[top];
            SpectrumEntry {
                labels: StateLabels::new(vec![(s.n1, s.l1), (s.n2, s.l2)]).expect("two non-empty pairs"),
                band: basis.bands[top],
                energy: eig.eigenvalues[k],
                main_amplitude: amp,
                tied,
            }
        })
        .collect();
    Ok(Spectrum {
        l_total: cfg.l_total,
        parity: cfg.parity,
        symmetry: cfg.symmetry,
        b,
        bmax: cfg.bmax,
        dimension: basis.q.ncols(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::moshinsky::band_states;
    use crate::exact::moshinsky::rotation_block;

    #[test]
    fn harmonic_ground_state() {
        let v = Potential::quadratic(1.0).unwrap();
        let cfg = ThreeBodyBasisConfig { bmax: 8, ..Default::default() };
        let s = solve_3b(2.0, &v, &cfg).unwrap();
        assert!((s.entries[0].energy - 3.0 * 3f64.sqrt()).abs() < 1e-10, "{:?}", s.entries[0]);
        assert_eq!(s.entries[0].labels.to_string(), "0,0,0,0");
    }

    #[test]
    fn projectors_are_idempotent_and_orthogonal() {
        for (band, l) in [(2, 0), (4, 2), (5, 1), (6, 3)] {
            let states = band_states(band, l);
            let c = rotation_block(&states, l, 2.0 * PI / 3.0).unwrap();
            let ps: Vec<_> = Symmetry::ALL.iter().map(|&s| symmetry_projector(&states, &c, s)).collect();
            for p in &ps {
                assert!((p * p - p).abs().max() < 1e-12);
                assert!((p - p.transpose()).abs().max() < 1e-12);
            }
            assert!((&ps[0] * &ps[1]).abs().max() < 1e-12);
            assert!((&ps[0] * &ps[2]).abs().max() < 1e-12);
            // Symmetric + antisymmetric + both mixed partners span the band.
            let rank: f64 = ps.iter().map(|p| p.trace()).sum::<f64>() + ps[2].trace();
            assert!((rank - states.len() as f64).abs() < 1e-9, "band {band}, L {l}");
        }
    }

    #[test]
    fn linear_low_levels() {
        let v = Potential::linear(1.0).unwrap();
        let g = solve_3b(2.0, &v, &ThreeBodyBasisConfig { bmax: 16, ..Default::default() }).unwrap();
        assert!((g.entries[0].energy - 4.867).abs() < 1e-3 * 4.867);
        let cfg = ThreeBodyBasisConfig { bmax: 16, ..ThreeBodyBasisConfig::sector(1, -1, Symmetry::Mixed) };
        let p = solve_3b(2.0, &v, &cfg).unwrap();
        assert!((p.entries[0].energy - 5.934).abs() < 1e-3 * 5.934);
        assert_eq!(p.entries[0].display_label(), "[0,1,0,0]");
        assert_eq!(p.entries[0].band, 1);
    }

    #[test]
    fn larger_basis_lowers_levels() {
        let v = Potential::linear(1.0).unwrap();
        for bmax in [6, 8, 10] {
            let cfg = |bmax| ThreeBodyBasisConfig { b: Some(0.7), bmax, ..ThreeBodyBasisConfig::sector(2, 1, Symmetry::Symmetric) };
            let small = solve_3b(2.0, &v, &cfg(bmax)).unwrap();
            let big = solve_3b(2.0, &v, &cfg(bmax + 2)).unwrap();
            for (a, b) in small.entries.iter().zip(&big.entries) {
                assert!(b.energy <= a.energy + 1e-12, "Bmax {bmax}: {} < {}", a.energy, b.energy);
            }
        }
    }

    #[test]
    fn linear_mass_scaling() {
        let v = Potential::linear(1.0).unwrap();
        let cfg = ThreeBodyBasisConfig { bmax: 10, ..Default::default() };
        let e1 = solve_3b(1.0, &v, &cfg).unwrap().entries[0].energy;
        let e5 = solve_3b(5.0, &v, &cfg).unwrap().entries[0].energy * 5f64.powf(1.0 / 3.0);
        assert!((e1 - e5).abs() < 1e-9 * e1, "{e1} vs {e5}");
    }

    #[test]
    fn rejects_bad_config() {
        let v = Potential::linear(1.0).unwrap();
        let cfg = ThreeBodyBasisConfig { bmax: 2, ..ThreeBodyBasisConfig::sector(3, -1, Symmetry::Symmetric) };
        assert!(solve_3b(1.0, &v, &cfg).is_err());
        let cfg = ThreeBodyBasisConfig { parity: 0, ..Default::default() };
        assert!(solve_3b(1.0, &v, &cfg).is_err());
    }
}
