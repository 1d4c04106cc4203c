//! Gauss quadrature rules and Laguerre zeros.

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d.is_finite() { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A quadrature rule as parallel node/weight vectors.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite Gauss–Legendre rule on [a, b] with equal panels.
    pub fn composite(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = a + h * (p as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        Rule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Zeros of the Laguerre polynomial L_n, ascending.
///
/// Eigenvalues of the symmetric Jacobi matrix give starting values that are
/// polished by Newton steps on the three-term recurrence.
pub fn laguerre_zeros(n: usize) -> Vec<f64> {
    assert!(n >= 1, "need at least one zero");
    let jac = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * i as f64 + 1.0
        } else if i.abs_diff(j) == 1 {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut zeros: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    zeros.sort_by(f64::total_cmp);
    for z in zeros.iter_mut() {
        for _ in 0..5 {
            let (l, d) = laguerre_with_derivative(n, *z);
            if d == 0.0 || !d.is_finite() {
                break;
            }
            let dz = l / d;
            *z -= dz;
            if dz.abs() <= 1e-16 * z.abs() {
                break;
            }
        }
    }
    zeros
}

fn laguerre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut l0, mut l1) = (1.0, 1.0 - x);
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    // x L_n' = n (L_n − L_{n−1})
    (l1, n as f64 * (l1 - l0) / x)
}
