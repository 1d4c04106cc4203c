//! Auxiliary-field-method (AFM) eigenvalues.
//!
//! For N identical particles with one-body potential U (relative to the
//! center of mass) and pairwise potential V, the AFM reduces the spectrum to
//! one scalar equation in `X0`:
//!
//! ```text
//! X0² = 2 √(m² + Q X0/N) [K(r1) + N L(r2)],   K = U'/(2r), L = V'/(2r)
//! r1 = √(Q/(N X0)),  r2 = √(2Q/((N−1) X0))
//! M   = N √(m² + Q X0/N) + N U(r1) + C_N V(r2)
//! ```
//!
//! with the ultrarelativistic (m = 0) and nonrelativistic limits handled by
//! the same machinery. The two-body-like "sigma" Hamiltonian
//! `σ √(p² + m²) + V(r)` is solved in its mean radius `r0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::roots::{find_positive_root, sign_changes, LOG10_SPAN};

/// Number of pairs, N(N−1)/2.
pub fn c_n(n: usize) -> f64 {
    (n * (n - 1)) as f64 / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Semirelativistic kinetic energy √(p² + m²); value is the total mass.
    GeneralSr,
    /// Massless kinetic energy √(p²); value is the total mass.
    Ultrarelativistic,
    /// p²/(2m) with rest masses removed; value is the binding energy.
    Nonrelativistic,
    /// σ √(p² + m²) + V(r) with real σ > 0; value is the mass.
    SigmaSr,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::GeneralSr => "general_sr",
            Flavor::Ultrarelativistic => "ultrarelativistic",
            Flavor::Nonrelativistic => "nonrelativistic",
            Flavor::SigmaSr => "sigma_sr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub flavor: Flavor,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_body: Option<Potential>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_body: Option<Potential>,
}

impl SystemSpec {
    pub fn nonrelativistic(n: usize, m: f64, one_body: Option<Potential>, two_body: Option<Potential>) -> Result<Self> {
        Self::checked(SystemSpec { flavor: Flavor::Nonrelativistic, n, sigma: None, m, one_body, two_body })
    }

    pub fn ultrarelativistic(n: usize, one_body: Option<Potential>, two_body: Option<Potential>) -> Result<Self> {
        Self::checked(SystemSpec { flavor: Flavor::Ultrarelativistic, n, sigma: None, m: 0.0, one_body, two_body })
    }

    pub fn semirelativistic(n: usize, m: f64, one_body: Option<Potential>, two_body: Option<Potential>) -> Result<Self> {
        Self::checked(SystemSpec { flavor: Flavor::GeneralSr, n, sigma: None, m, one_body, two_body })
    }

    /// `σ √(p² + m²) + V(r)`. `m = 0` gives the massless version.
    pub fn sigma(sigma: f64, m: f64, v: Potential) -> Result<Self> {
        Self::checked(SystemSpec { flavor: Flavor::SigmaSr, n: 2, sigma: Some(sigma), m, one_body: None, two_body: Some(v) })
    }

    /// The same system with rest mass `m` and the kinematics of `flavor`.
    pub fn with_flavor(&self, flavor: Flavor, m: f64) -> Result<Self> {
        let mut s = self.clone();
        s.flavor = flavor;
        s.m = m;
        Self::checked(s)
    }

    fn checked(s: SystemSpec) -> Result<Self> {
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.one_body.is_none() && self.two_body.is_none() {
            return Err(Error::invalid("at least one potential is required"));
        }
        for p in self.one_body.iter().chain(&self.two_body) {
            p.validate()?;
        }
        if !self.m.is_finite() || self.m < 0.0 {
            return Err(Error::invalid(format!("mass must be finite and >= 0, got {}", self.m)));
        }
        match self.flavor {
            Flavor::SigmaSr => {
                match self.sigma {
                    Some(s) if s.is_finite() && s > 0.0 => {}
                    Some(s) => return Err(Error::invalid(format!("sigma must be > 0, got {s}"))),
                    None => return Err(Error::MissingParameter("sigma".into())),
                }
                if self.one_body.is_some() || self.two_body.is_none() {
                    return Err(Error::invalid("the sigma system takes a single potential V"));
                }
            }
            _ => {
                if self.n < 2 {
                    return Err(Error::invalid(format!("N must be >= 2, got {}", self.n)));
                }
                if self.sigma.is_some() {
                    return Err(Error::invalid("sigma is only used by the sigma system"));
                }
                let massless = self.flavor == Flavor::Ultrarelativistic;
                if massless != (self.m == 0.0) {
                    return Err(Error::invalid(format!(
                        "{} kinematics requires m {} 0, got {}",
                        self.flavor.name(),
                        if massless { "=" } else { ">" },
                        self.m
                    )));
                }
            }
        }
        Ok(())
    }

    fn n_f(&self) -> f64 {
        self.n as f64
    }

    /// One-body mean radius r1 = √(Q/(N X0)).
    pub fn r_one_body(&self, q: f64, x0: f64) -> f64 {
        (q / (self.n_f() * x0)).sqrt()
    }

    /// Two-body mean radius r2 = √(2Q/((N−1) X0)).
    pub fn r_two_body(&self, q: f64, x0: f64) -> f64 {
        (2.0 * q / ((self.n_f() - 1.0) * x0)).sqrt()
    }

    /// K(r1) + N L(r2).
    fn force_sum(&self, q: f64, x0: f64) -> f64 {
        let mut s = 0.0;
        if let Some(u) = &self.one_body {
            let r = self.r_one_body(q, x0);
            s += u.slope(r) / (2.0 * r);
        }
        if let Some(v) = &self.two_body {
            let r = self.r_two_body(q, x0);
            s += self.n_f() * v.slope(r) / (2.0 * r);
        }
        s
    }

    /// N U(r1) + C_N V(r2).
    fn potential_sum(&self, q: f64, x0: f64) -> f64 {
        let mut s = 0.0;
        if let Some(u) = &self.one_body {
            s += self.n_f() * u.value(self.r_one_body(q, x0));
        }
        if let Some(v) = &self.two_body {
            s += c_n(self.n) * v.value(self.r_two_body(q, x0));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AfmSolution {
    #[serde(rename = "X0")]
    pub x0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0_one_body: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0_two_body: Option<f64>,
    /// Total mass, or binding energy for nonrelativistic kinematics.
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("Q must be finite and > 0, got {q}")))
    }
}

/// Solves the AFM equation of `spec` at principal quantum number `q`.
pub fn solve_afm(spec: &SystemSpec, q: f64) -> Result<AfmSolution> {
    spec.validate()?;
    check_q(q)?;
    if spec.flavor == Flavor::SigmaSr {
        return solve_sigma(spec, q);
    }
    let n = spec.n_f();
    let m = spec.m;
    let ln2 = std::f64::consts::LN_2;
    let root = match spec.flavor {
        Flavor::Nonrelativistic => find_positive_root("nonrelativistic AFM equation", |x| {
            2.0 * x.ln() - ln2 - m.ln() - spec.force_sum(q, x).ln()
        })?,
        _ => find_positive_root("AFM equation", |x| {
            2.0 * x.ln() - ln2 - 0.5 * (m * m + q * x / n).ln() - spec.force_sum(q, x).ln()
        })?,
    };
    let x0 = root.x;
    let kinetic = match spec.flavor {
        Flavor::Nonrelativistic => q * x0 / (2.0 * m),
        _ => n * (m * m + q * x0 / n).sqrt(),
    };
    Ok(AfmSolution {
        x0,
        r0_one_body: spec.one_body.as_ref().map(|_| spec.r_one_body(q, x0)),
        r0_two_body: spec.two_body.as_ref().map(|_| spec.r_two_body(q, x0)),
        value: kinetic + spec.potential_sum(q, x0),
        iterations: root.iterations,
        residual: root.residual,
    })
}

/// σQ = r0² √(1 + (m r0/Q)²) V'(r0),  M = (σQ/r0) √(1 + (m r0/Q)²) + V(r0).
fn solve_sigma(spec: &SystemSpec, q: f64) -> Result<AfmSolution> {
    let v = spec.two_body.as_ref().expect("validated");
    let sigma = spec.sigma.expect("validated");
    let m = spec.m;
    let gamma = |r: f64| (1.0 + (m * r / q).powi(2)).sqrt();
    let root = find_positive_root("sigma AFM equation", |r| {
        2.0 * r.ln() + gamma(r).ln() + v.slope(r).ln() - (sigma * q).ln()
    })?;
    let r0 = root.x;
    Ok(AfmSolution {
        x0: 2.0 * q / (r0 * r0),
        r0_one_body: None,
        r0_two_body: Some(r0),
        value: sigma * q / r0 * gamma(r0) + v.value(r0),
        iterations: root.iterations,
        residual: root.residual,
    })
}

/// Inverts `r^power · p'(r) = x` on (0, ∞), rejecting non-monotonic maps.
fn invert_moment(p: &Potential, x: f64, power: i32, what: &str) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid(format!("argument must be finite and > 0, got {x}")));
    }
    p.validate()?;
    let g = |r: f64| power as f64 * r.ln() + p.slope(r).ln() - x.ln();
    let span = 10f64.powi(LOG10_SPAN);
    if sign_changes(1.0 / span, span, 2 * LOG10_SPAN as usize + 1, g) > 1 {
        return Err(Error::NonMonotone { what: format!("r^{power} {p}'(r)") });
    }
    Ok(find_positive_root(what, g)?.x)
}

/// C(x): inverse of r² p'(r).
pub fn invert_ur(p: &Potential, x: f64) -> Result<f64> {
    invert_moment(p, x, 2, "inverse of r^2 p'(r)")
}

/// D(x): inverse of r³ p'(r).
pub fn invert_nr(p: &Potential, x: f64) -> Result<f64> {
    invert_moment(p, x, 3, "inverse of r^3 p'(r)")
}

/// Universal ultrarelativistic function F(x) = x/C(x) + p(C(x)).
pub fn universal_ur(p: &Potential, x: f64) -> Result<f64> {
    let c = invert_ur(p, x)?;
    Ok(x / c + p.value(c))
}

/// Universal nonrelativistic function G(x) = x/(2D(x)²) + p(D(x)).
pub fn universal_nr(p: &Potential, x: f64) -> Result<f64> {
    let d = invert_nr(p, x)?;
    Ok(x / (2.0 * d * d) + p.value(d))
}

/// Massless N-body mass with one-body forces only: N F(Q/N).
pub fn ur_mass_one_body(u: &Potential, n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(n as f64 * universal_ur(u, q / n as f64)?)
}

/// Massless N-body mass with pair forces only: C_N F(2Q/((N−1)√C_N)).
pub fn ur_mass_two_body(v: &Potential, n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    let cn = c_n(n);
    Ok(cn * universal_ur(v, 2.0 * q / ((n as f64 - 1.0) * cn.sqrt()))?)
}

/// Nonrelativistic binding energy with one-body forces only: N G(Q²/(m N²)).
pub fn nr_energy_one_body(u: &Potential, n: usize, m: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let nf = n as f64;
    Ok(nf * universal_nr(u, q * q / (m * nf * nf))?)
}

/// Nonrelativistic binding energy with pair forces only: C_N G(N Q²/(m C_N²)).
pub fn nr_energy_two_body(v: &Potential, n: usize, m: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let cn = c_n(n);
    Ok(cn * universal_nr(v, n as f64 * q * q / (m * cn * cn))?)
}

/// Rescaled potential sum Z(y) = U(y/√(aN))/C_N + V(y √(2/(a(N−1))))/N.
struct Compact<'a> {
    spec: &'a SystemSpec,
    u_scale: f64,
    v_scale: f64,
}

impl<'a> Compact<'a> {
    fn new(spec: &'a SystemSpec, a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid(format!("scale a must be > 0, got {a}")));
        }
        let n = spec.n_f();
        Ok(Compact { spec, u_scale: 1.0 / (a * n).sqrt(), v_scale: (2.0 / (a * (n - 1.0))).sqrt() })
    }

    fn z(&self, y: f64) -> f64 {
        let mut s = 0.0;
        if let Some(u) = &self.spec.one_body {
            s += u.value(y * self.u_scale) / c_n(self.spec.n);
        }
        if let Some(v) = &self.spec.two_body {
            s += v.value(y * self.v_scale) / self.spec.n_f();
        }
        s
    }

    fn dz(&self, y: f64) -> f64 {
        let mut s = 0.0;
        if let Some(u) = &self.spec.one_body {
            s += u.slope(y * self.u_scale) * self.u_scale / c_n(self.spec.n);
        }
        if let Some(v) = &self.spec.two_body {
            s += v.slope(y * self.v_scale) * self.v_scale / self.spec.n_f();
        }
        s
    }

    fn invert(&self, power: i32, s: f64) -> Result<f64> {
        let g = |y: f64| power as f64 * y.ln() + self.dz(y).ln() - s.ln();
        let span = 10f64.powi(LOG10_SPAN);
        if sign_changes(1.0 / span, span, 2 * LOG10_SPAN as usize + 1, g) > 1 {
            return Err(Error::NonMonotone { what: format!("y^{power} Z'(y)") });
        }
        Ok(find_positive_root("compact-form inversion", g)?.x)
    }
}

/// Massless mass through the compact form N C_N [s/y + Z(y)], y²Z'(y) = s.
///
/// The result does not depend on the auxiliary scale `a`.
pub fn compact_ur(spec: &SystemSpec, q: f64, a: f64) -> Result<f64> {
    spec.validate()?;
    check_q(q)?;
    if spec.flavor != Flavor::Ultrarelativistic {
        return Err(Error::invalid("compact_ur needs ultrarelativistic kinematics"));
    }
    let c = Compact::new(spec, a)?;
    let ncn = spec.n_f() * c_n(spec.n);
    let s = (a * spec.n_f()).sqrt() * q / ncn;
    let y = c.invert(2, s)?;
    Ok(ncn * (s / y + c.z(y)))
}

/// Nonrelativistic energy through N C_N [s/(2y²) + Z(y)], y³Z'(y) = s.
pub fn compact_nr(spec: &SystemSpec, q: f64, a: f64) -> Result<f64> {
    spec.validate()?;
    check_q(q)?;
    if spec.flavor != Flavor::Nonrelativistic {
        return Err(Error::invalid("compact_nr needs nonrelativistic kinematics"));
    }
    let c = Compact::new(spec, a)?;
    let ncn = spec.n_f() * c_n(spec.n);
    let s = a * q * q / (spec.m * ncn);
    let y = c.invert(3, s)?;
    Ok(ncn * (s / (2.0 * y * y) + c.z(y)))
}

/// Closed form for power-law potentials sharing one exponent λ,
/// U = sgn(λ) a r^λ and V = sgn(λ) b r^λ.
pub fn closed_powerlaw(spec: &SystemSpec, q: f64) -> Result<f64> {
    spec.validate()?;
    check_q(q)?;
    let u = spec.one_body.as_ref().map(power_law_parts).transpose()?;
    let v = spec.two_body.as_ref().map(power_law_parts).transpose()?;
    let lambda = match (u, v) {
        (Some((_, l1)), Some((_, l2))) if l1 != l2 => return Err(Error::ExponentMismatch(l1, l2)),
        (Some((_, l)), _) | (None, Some((_, l))) => l,
        (None, None) => unreachable!("validated"),
    };
    let n = spec.n_f();
    let e = (2.0 - lambda) / 2.0;
    let big_a = u.map_or(0.0, |(a, _)| a * lambda.abs() * (n / q).powf(e));
    let big_b = v.map_or(0.0, |(b, _)| b * lambda.abs() * n * ((n - 1.0) / (2.0 * q)).powf(e));
    let ab2 = (big_a + big_b).powi(2);
    match spec.flavor {
        Flavor::Nonrelativistic => {
            Ok((lambda + 2.0) / (2.0 * lambda) * q * (ab2 / spec.m.powf(lambda)).powf(1.0 / (lambda + 2.0)))
        }
        Flavor::Ultrarelativistic => {
            if lambda <= -1.0 {
                return Err(Error::Domain(format!("no massless bound state for exponent {lambda}")));
            }
            Ok((lambda + 1.0) / lambda
                * (q.powf(lambda + 2.0) * n.powf(lambda) * ab2).powf(1.0 / (2.0 * (lambda + 1.0))))
        }
        other => Err(Error::Unsupported(format!("no closed power-law form for {} kinematics", other.name()))),
    }
}

fn power_law_parts(p: &Potential) -> Result<(f64, f64)> {
    p.as_power_law()
        .ok_or_else(|| Error::invalid(format!("{p} is not a power law")))
}

/// Harmonic-oscillator closed forms with U = k r², V = ρ r².
pub mod harmonic {
    /// Massless mass (3/2) [2N(k + ρN) Q²]^{1/3}.
    pub fn ur_mass(n: usize, k: f64, rho: f64, q: f64) -> f64 {
        let n = n as f64;
        1.5 * (2.0 * n * (k + rho * n) * q * q).cbrt()
    }

    /// Nonrelativistic energy √((2/m)(k + ρN)) Q, exact for this system.
    pub fn nr_energy(n: usize, m: f64, k: f64, rho: f64, q: f64) -> f64 {
        ((2.0 / m) * (k + rho * n as f64)).sqrt() * q
    }

    /// Massless sigma system with V = a r²: 3 (√a σQ/2)^{2/3}.
    pub fn sigma_ur_mass(sigma: f64, a: f64, q: f64) -> f64 {
        3.0 * (a.sqrt() * sigma * q / 2.0).powf(2.0 / 3.0)
    }
}
