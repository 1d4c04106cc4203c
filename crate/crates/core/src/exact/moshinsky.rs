//! Transformation of two-coordinate oscillator states under a rotation of
//! the Jacobi coordinates (Talmi–Moshinsky brackets, equal masses).
//!
//! States `|n1 l1, n2 l2; L⟩` couple an oscillator state in the first Jacobi
//! coordinate x with one in the second coordinate y to total angular momentum
//! L. The rotation `x' = x cosφ + y sinφ, y' = −x sinφ + y cosφ` preserves the
//! band `B = 2n1 + l1 + 2n2 + l2` and L, so it acts block-diagonally. Each
//! block is obtained by exponentiating the generator `a_x†·a_y − a_y†·a_x`,
//! whose matrix follows from the reduced matrix elements of the oscillator
//! ladder operators.

use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairState {
    pub n1: u32,
    pub l1: u32,
    pub n2: u32,
    pub l2: u32,
}

impl PairState {
    pub fn new(n1: u32, l1: u32, n2: u32, l2: u32) -> Self {
        PairState { n1, l1, n2, l2 }
    }

    pub fn band(&self) -> u32 {
        2 * self.n1 + self.l1 + 2 * self.n2 + self.l2
    }

    /// The state with the two coordinates exchanged.
    pub fn swapped(&self) -> Self {
        PairState { n1: self.n2, l1: self.l2, n2: self.n1, l2: self.l1 }
    }
}

fn triangle(a: u32, b: u32, c: u32) -> bool {
    c <= a + b && a <= b + c && b <= a + c
}

/// All states of band `band` coupled to total angular momentum `l_total`,
/// in a fixed lexicographic order.
pub fn band_states(band: u32, l_total: u32) -> Vec<PairState> {
    let mut out = Vec::new();
    for l1 in 0..=band {
        for l2 in 0..=(band - l1) {
            if !(band - l1 - l2).is_multiple_of(2) || !triangle(l1, l2, l_total) {
                continue;
            }
            let k = (band - l1 - l2) / 2;
            for n1 in 0..=k {
                out.push(PairState::new(n1, l1, k - n1, l2));
            }
        }
    }
    out.sort();
    out
}

fn ln_factorial(n: u32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; 512];
        for k in 1..t.len() {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    table[n as usize]
}

fn ln_delta(a: u32, b: u32, c: u32) -> f64 {
    ln_factorial(a + b - c) + ln_factorial(a + c - b) + ln_factorial(b + c - a) - ln_factorial(a + b + c + 1)
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}` for integer arguments (Racah formula).
pub fn wigner_6j(j1: u32, j2: u32, j3: u32, j4: u32, j5: u32, j6: u32) -> f64 {
    if !(triangle(j1, j2, j3) && triangle(j1, j5, j6) && triangle(j4, j2, j6) && triangle(j4, j5, j3)) {
        return 0.0;
    }
    let pre = 0.5 * (ln_delta(j1, j2, j3) + ln_delta(j1, j5, j6) + ln_delta(j4, j2, j6) + ln_delta(j4, j5, j3));
    let a = [j1 + j2 + j3, j1 + j5 + j6, j4 + j2 + j6, j4 + j5 + j3];
    let b = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
    let tmin = *a.iter().max().unwrap();
    let tmax = *b.iter().min().unwrap();
    let mut sum = 0.0;
    for t in tmin..=tmax {
        let mut ln = ln_factorial(t + 1);
        for &ai in &a {
            ln -= ln_factorial(t - ai);
        }
        for &bi in &b {
            ln -= ln_factorial(bi - t);
        }
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln + pre).exp();
    }
    sum
}

/// Reduced matrix element `⟨n' l'‖a†‖n l⟩`.
fn reduced_create(np: u32, lp: u32, n: u32, l: u32) -> f64 {
    let (nf, lf) = (n as f64, l as f64);
    if np == n && lp == l + 1 {
        ((2.0 * nf + 2.0 * lf + 3.0) * (lf + 1.0)).sqrt()
    } else if np == n + 1 && l >= 1 && lp == l - 1 {
        (2.0 * (nf + 1.0) * lf).sqrt()
    } else {
        0.0
    }
}

/// Reduced matrix element `⟨n' l'‖a‖n l⟩`.
fn reduced_annihilate(np: u32, lp: u32, n: u32, l: u32) -> f64 {
    let (nf, lf) = (n as f64, l as f64);
    if n >= 1 && np == n - 1 && lp == l + 1 {
        -(2.0 * nf * (lf + 1.0)).sqrt()
    } else if np == n && l >= 1 && lp == l - 1 {
        -((2.0 * nf + 2.0 * lf + 1.0) * lf).sqrt()
    } else {
        0.0
    }
}

/// Matrix of the rotation generator `a_x†·a_y − a_y†·a_x` on one band.
pub fn generator(states: &[PairState], l_total: u32) -> DMatrix<f64> {
    let d = states.len();
    // ⟨f| a_x†·a_y |i⟩ for the coupled basis.
    let mut m = DMatrix::zeros(d, d);
    for (fi, f) in states.iter().enumerate() {
        for (ii, i) in states.iter().enumerate() {
            let x = reduced_create(f.n1, f.l1, i.n1, i.l1);
            if x == 0.0 {
                continue;
            }
            let y = reduced_annihilate(f.n2, f.l2, i.n2, i.l2);
            if y == 0.0 {
                continue;
            }
            let sixj = wigner_6j(l_total, f.l2, f.l1, 1, i.l1, i.l2);
            let sign = if (i.l1 + f.l2 + l_total).is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(fi, ii)] = sign * sixj * x * y;
        }
    }
    &m - m.transpose()
}

/// Rotation matrix on one band: `D[f, i] = ⟨f| R(φ) |i⟩`.
pub fn rotation_block(states: &[PairState], l_total: u32, phi: f64) -> Result<DMatrix<f64>> {
    let g = generator(states, l_total);
    let d = states.len();
    if d == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    // iG is Hermitian with integer spectrum; exponentiate through its eigenbasis.
    let herm = g.map(|v| Complex::new(0.0, v));
    let eig = herm.symmetric_eigen();
    let mut worst: f64 = 0.0;
    let phases: Vec<Complex<f64>> = eig
        .eigenvalues
        .iter()
        .map(|&mu| {
            let k = mu.round();
            worst = worst.max((mu - k).abs());
            Complex::new(0.0, -phi * k).exp()
        })
        .collect();
    if worst > 1e-8 {
        return Err(Error::IllConditioned {
            band: states[0].band() as usize,
            detail: format!("rotation generator spectrum off integers by {worst:e}"),
        });
    }
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, p) in phases.iter().enumerate() {
        for z in scaled.column_mut(j).iter_mut() {
            *z *= *p;
        }
    }
    let d_complex = scaled * v.adjoint();
    // The ladder-operator phases carry an extra i^(l1+l2) per state; remove
    // it to return brackets for the standard coupled spherical harmonics.
    Ok(DMatrix::from_fn(d, d, |f, i| {
        let lf = (states[f].l1 + states[f].l2) as i64;
        let li = (states[i].l1 + states[i].l2) as i64;
        let sign = if ((li - lf) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        sign * d_complex[(f, i)].re
    }))
}

/// Single bracket `⟨f| R(φ) |i⟩` on the coupled states; zero when the
/// selection rules (same band, triangle with L) fail.
#[allow(clippy::too_many_arguments)]
pub fn moshinsky_bracket(
    n1: u32,
    l1: u32,
    n2: u32,
    l2: u32,
    n1p: u32,
    l1p: u32,
    n2p: u32,
    l2p: u32,
    l_total: u32,
    phi: f64,
) -> Result<f64> {
    let i = PairState::new(n1, l1, n2, l2);
    let f = PairState::new(n1p, l1p, n2p, l2p);
    if i.band() != f.band() || !triangle(l1, l2, l_total) || !triangle(l1p, l2p, l_total) {
        return Ok(0.0);
    }
    let states = band_states(i.band(), l_total);
    let d = rotation_block(&states, l_total, phi)?;
    let pos = |s: &PairState| states.binary_search(s).expect("state listed in its band");
    Ok(d[(pos(&f), pos(&i))])
}

/// Rotation blocks for every band of one parity up to `bmax`, built once and
/// shared read-only.
#[derive(Debug, Clone)]
pub struct MoshinskyTable {
    pub l_total: u32,
    pub phi: f64,
    pub bands: Vec<(u32, Vec<PairState>, DMatrix<f64>)>,
}

impl MoshinskyTable {
    /// Bands `B ≤ bmax` with `(−1)^B = parity`.
    pub fn new(l_total: u32, parity: i32, bmax: u32, phi: f64) -> Result<Self> {
        let first = if parity > 0 { 0 } else { 1 };
        let mut bands = Vec::new();
        let mut b = first;
        while b <= bmax {
            let states = band_states(b, l_total);
            if !states.is_empty() {
                let d = rotation_block(&states, l_total, phi)?;
                bands.push((b, states, d));
            }
            b += 2;
        }
        Ok(MoshinskyTable { l_total, phi, bands })
    }
}
