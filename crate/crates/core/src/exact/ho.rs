//! Radial harmonic-oscillator functions in dimensionless units.
//!
//! `R_nl(t) = N_nl t^l exp(−t²/2) L_n^{(l+1/2)}(t²)` with
//! `N_nl = √(2 n! / Γ(n + l + 3/2))`, normalized as `∫ R² t² dt = 1` and
//! positive near the origin.

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

use super::quadrature::Rule;

fn ln_norm(n: usize, l: usize) -> f64 {
    0.5 * (std::f64::consts::LN_2 + ln_gamma(n as f64 + 1.0) - ln_gamma(n as f64 + l as f64 + 1.5))
}

/// `R_nl(t)` for n = 0..size−1.
pub fn radial_row(l: usize, size: usize, t: f64) -> Vec<f64> {
    let alpha = l as f64 + 0.5;
    let x = t * t;
    let mut lag = Vec::with_capacity(size);
    let (mut l0, mut l1) = (1.0, 1.0 + alpha - x);
    for k in 0..size {
        match k {
            0 => lag.push(l0),
            1 => lag.push(l1),
            _ => {
                let kf = (k - 1) as f64;
                let l2 = ((2.0 * kf + 1.0 + alpha - x) * l1 - (kf + alpha) * l0) / (kf + 1.0);
                l0 = l1;
                l1 = l2;
                lag.push(l2);
            }
        }
    }
    let base = if t > 0.0 { l as f64 * t.ln() - 0.5 * x } else { f64::NEG_INFINITY };
    (0..size)
        .map(|n| {
            if t == 0.0 {
                return if l == 0 { ln_norm(n, 0).exp() * lag[n] } else { 0.0 };
            }
            (ln_norm(n, l) + base).exp() * lag[n]
        })
        .collect()
}

pub fn radial(n: usize, l: usize, t: f64) -> f64 {
    radial_row(l, n + 1, t)[n]
}

/// Matrix of `−∇²` restricted to partial wave `l` in the first `size`
/// oscillator states (dimensionless; multiply by ħ²/(2μb²) etc.).
pub fn laplacian_matrix(l: usize, size: usize) -> DMatrix<f64> {
    let lf = l as f64;
    DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            2.0 * i as f64 + lf + 1.5
        } else if i.abs_diff(j) == 1 {
            let n = i.min(j) as f64;
            ((n + 1.0) * (n + lf + 1.5)).sqrt()
        } else {
            0.0
        }
    })
}

/// Oscillator radial functions tabulated on a quadrature rule, for
/// evaluating `∫ R_{n'l} R_{nl} f(t) t² dt` as a matrix.
#[derive(Debug, Clone)]
pub struct RadialBasis {
    pub l: usize,
    pub size: usize,
    rule: Rule,
    /// `values[(n, k)] = R_nl(t_k) · t_k · √w_k`.
    values: DMatrix<f64>,
}

impl RadialBasis {
    pub fn new(l: usize, size: usize) -> Self {
        let tmax = (4.0 * size as f64 + 2.0 * l as f64 + 3.0).sqrt() + 8.0;
        let panels = (2.0 * tmax).ceil() as usize;
        let rule = Rule::composite(0.0, tmax, panels, 20);
        let mut values = DMatrix::zeros(size, rule.len());
        for (k, (&t, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let row = radial_row(l, size, t);
            let s = t * w.sqrt();
            for (n, r) in row.into_iter().enumerate() {
                values[(n, k)] = r * s;
            }
        }
        RadialBasis { l, size, rule, values }
    }

    /// `M[n', n] = ∫ R_{n'l}(t) R_{nl}(t) f(t) t² dt` over the first `size` states.
    pub fn matrix<F: Fn(f64) -> f64>(&self, size: usize, f: F) -> DMatrix<f64> {
        assert!(size <= self.size, "requested {size} states from a table of {}", self.size);
        let vals = self.values.rows(0, size);
        let mut scaled = vals.clone_owned();
        for (k, &t) in self.rule.nodes.iter().enumerate() {
            let fk = f(t);
            scaled.column_mut(k).scale_mut(fk);
        }
        &scaled * vals.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal() {
        for l in [0, 1, 5, 20] {
            let basis = RadialBasis::new(l, 40);
            let s = basis.matrix(40, |_| 1.0);
            let err = (s - DMatrix::identity(40, 40)).abs().max();
            assert!(err < 1e-12, "l={l}: {err}");
        }
    }

    #[test]
    fn ground_state_closed_form() {
        // R_00 = 2 π^{-1/4} exp(−t²/2)
        let t: f64 = 0.8;
        let expect = 2.0 * std::f64::consts::PI.powf(-0.25) * (-t * t / 2.0).exp();
        assert!((radial(0, 0, t) - expect).abs() < 1e-13);
        assert!(radial(3, 2, 1e-3) > 0.0);
    }

    #[test]
    fn laplacian_matches_quadrature() {
        // −∇² = 2h − t² where h has eigenvalues 2n + l + 3/2.
        for l in [0, 3] {
            let basis = RadialBasis::new(l, 12);
            let t2 = basis.matrix(12, |t| t * t);
            let mut expect = -t2;
            for n in 0..12 {
                expect[(n, n)] += 2.0 * (2.0 * n as f64 + l as f64 + 1.5);
            }
            let err = (expect - laplacian_matrix(l, 12)).abs().max();
            assert!(err < 1e-11, "l={l}: {err}");
        }
    }
}
