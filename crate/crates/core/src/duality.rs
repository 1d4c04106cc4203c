//! Exact duality relations between AFM spectra.
//!
//! Each relation states `value(LHS system; N, m, Q) = multiplier × value(RHS
//! system; m', Q')`. Relations are stored as data: [`transform_params`] maps
//! the LHS parameters to the RHS ones, and [`verify_relation`] evaluates both
//! sides with [`solve_afm`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::afm::{c_n, solve_afm, Flavor, SystemSpec};
use crate::error::{Error, Result};
use crate::potentials::Potential;

/// Default relative tolerance of a duality check.
pub const DEFAULT_TOL: f64 = 1e-9;

macro_rules! relation_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum RelationId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl RelationId {
            pub const ALL: &'static [RelationId] = &[$(RelationId::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(RelationId::$variant => $name,)*
                }
            }
        }
    };
}

relation_ids! {
    Gen1bNp => "GEN_1B_NP",
    Gen1bSigma => "GEN_1B_SIGMA",
    Gen1bSigma4n => "GEN_1B_SIGMA4N",
    Gen2bNp => "GEN_2B_NP",
    Gen2bSigma => "GEN_2B_SIGMA",
    Gen2bSameMass => "GEN_2B_SAMEMASS",
    Gen2bSameQ => "GEN_2B_SAMEQ",
    Gen12Link => "GEN_12_LINK",
    Ur1bNp => "UR_1B_NP",
    Ur1bSigma => "UR_1B_SIGMA",
    Ur1bOne2One => "UR_1B_ONE2ONE",
    Ur2bNp => "UR_2B_NP",
    Ur2bSigma => "UR_2B_SIGMA",
    Ur2bOne2One => "UR_2B_ONE2ONE",
    Ur12Link => "UR_12_LINK",
    NrScale => "NR_SCALE",
    Nr1bNp => "NR_1B_NP",
    Nr1bSameQ => "NR_1B_SAMEQ",
    Nr1bBeta => "NR_1B_BETA",
    Nr2bNp => "NR_2B_NP",
    Nr2bAlt => "NR_2B_ALT",
    Nr2bSameMass => "NR_2B_SAMEMASS",
    Nr2bSameQ => "NR_2B_SAMEQ",
    Nr12Link => "NR_12_LINK",
    Nr12LinkSameQ => "NR_12_LINK_SAMEQ",
    Nr12LinkSameMass => "NR_12_LINK_SAMEMASS",
    Bridge1b => "BRIDGE_1B",
    Bridge2b => "BRIDGE_2B",
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        RelationId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == upper)
            .ok_or_else(|| Error::invalid(format!("unknown relation `{s}`")))
    }
}

/// Kinematics of the left-hand system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    General,
    Ultrarelativistic,
    Nonrelativistic,
    /// Nonrelativistic on the left, ultrarelativistic on the right.
    Bridge,
}

impl Regime {
    pub fn flavor(self) -> Flavor {
        match self {
            Regime::General => Flavor::GeneralSr,
            Regime::Ultrarelativistic => Flavor::Ultrarelativistic,
            Regime::Nonrelativistic | Regime::Bridge => Flavor::Nonrelativistic,
        }
    }
}

/// Which potential the left-hand system carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    One,
    Two,
}

impl FromStr for Body {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(Body::One),
            "two" | "2" => Ok(Body::Two),
            other => Err(Error::invalid(format!("body must be `one` or `two`, got `{other}`"))),
        }
    }
}

/// Free parameters a relation may need.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FreeParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

/// Which free parameters a relation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Needs {
    pub p: bool,
    pub sigma: bool,
    pub beta: bool,
    pub c: bool,
}

impl FreeParams {
    fn p(&self) -> Result<usize> {
        let p = self.p.ok_or_else(|| Error::MissingParameter("p".into()))?;
        if p < 2 {
            return Err(Error::invalid(format!("p must be >= 2, got {p}")));
        }
        Ok(p)
    }

    fn sigma(&self) -> Result<f64> {
        let s = self.sigma.ok_or_else(|| Error::MissingParameter("sigma".into()))?;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::invalid(format!("sigma must be > 0, got {s}")));
        }
        Ok(s)
    }

    /// β must be positive: Q' = βQ has to stay a valid principal number.
    fn beta(&self) -> Result<f64> {
        let b = self.beta.ok_or_else(|| Error::MissingParameter("beta".into()))?;
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::invalid(format!("beta must be > 0, got {b}")));
        }
        Ok(b)
    }

    fn c(&self) -> Result<f64> {
        let c = self.c.ok_or_else(|| Error::MissingParameter("c".into()))?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("c must be > 0, got {c}")));
        }
        Ok(c)
    }
}

/// The right-hand system of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum Target {
    /// `p` particles with the same kind of interaction.
    NBody { p: usize },
    /// `σ √(p² + m'²) + V(r)`.
    Sigma { sigma: f64 },
}

/// How the right-hand potential is obtained from the left-hand one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum PotentialMap {
    Same,
    /// One-body U becomes the pair potential 2U(r/2).
    PairEquivalent,
    /// Pair potential V becomes the one-body potential cV.
    OneBodyScaled { c: f64 },
    /// p becomes p(α√r), used massless on the right.
    SqrtTransform { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub target: Target,
    pub potential: PotentialMap,
    pub m: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub multiplier: f64,
}

impl RelationId {
    pub fn regime(self) -> Regime {
        use RelationId::*;
        match self {
            Gen1bNp | Gen1bSigma | Gen1bSigma4n | Gen2bNp | Gen2bSigma | Gen2bSameMass | Gen2bSameQ | Gen12Link => {
                Regime::General
            }
            Ur1bNp | Ur1bSigma | Ur1bOne2One | Ur2bNp | Ur2bSigma | Ur2bOne2One | Ur12Link => Regime::Ultrarelativistic,
            NrScale | Nr1bNp | Nr1bSameQ | Nr1bBeta | Nr2bNp | Nr2bAlt | Nr2bSameMass | Nr2bSameQ | Nr12Link
            | Nr12LinkSameQ | Nr12LinkSameMass => Regime::Nonrelativistic,
            Bridge1b | Bridge2b => Regime::Bridge,
        }
    }

    /// The potential the left-hand system must carry. `None` means either.
    pub fn body(self) -> Option<Body> {
        use RelationId::*;
        match self {
            NrScale => None,
            Gen1bNp | Gen1bSigma | Gen1bSigma4n | Ur1bNp | Ur1bSigma | Ur1bOne2One | Nr1bNp | Nr1bSameQ | Nr1bBeta
            | Bridge1b => Some(Body::One),
            _ => Some(Body::Two),
        }
    }

    pub fn needs(self) -> Needs {
        use RelationId::*;
        let none = Needs { p: false, sigma: false, beta: false, c: false };
        match self {
            Gen1bNp | Gen2bNp | Ur1bNp | Ur2bNp | Nr1bNp | Nr1bSameQ | Nr2bNp | Nr2bAlt | Nr2bSameMass | Nr2bSameQ => {
                Needs { p: true, ..none }
            }
            Gen1bSigma | Gen2bSigma | Ur1bSigma | Ur2bSigma => Needs { sigma: true, ..none },
            NrScale | Nr1bBeta => Needs { beta: true, ..none },
            Gen12Link | Ur12Link | Nr12LinkSameQ | Nr12LinkSameMass => Needs { c: true, ..none },
            Nr12Link => Needs { beta: true, c: true, ..none },
            Gen1bSigma4n | Gen2bSameMass | Gen2bSameQ | Ur1bOne2One | Ur2bOne2One | Bridge1b | Bridge2b => none,
        }
    }
}

/// Maps the left-hand parameters (N, m, Q) of `rel` to its right-hand side.
pub fn transform_params(rel: RelationId, n: usize, m: f64, q: f64, free: &FreeParams) -> Result<Transform> {
    use RelationId::*;
    if n < 2 {
        return Err(Error::invalid(format!("N must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let cn = c_n(n);
    let same = PotentialMap::Same;
    let nbody = |p: usize| Target::NBody { p };
    let t = |target, potential, m: f64, q: f64, multiplier: f64| Transform { target, potential, m, q, multiplier };

    Ok(match rel {
        Gen1bNp | Ur1bNp | Nr1bNp => {
            let p = free.p()?;
            let pf = p as f64;
            t(nbody(p), same, m, pf * q / nf, nf / pf)
        }
        Gen1bSigma | Ur1bSigma => {
            let s = free.sigma()?;
            t(Target::Sigma { sigma: s }, PotentialMap::PairEquivalent, 2.0 * m / s, 4.0 * q / (s * nf), nf / 2.0)
        }
        Gen1bSigma4n | Ur1bOne2One => {
            let s = 4.0 / nf;
            t(Target::Sigma { sigma: s }, PotentialMap::PairEquivalent, nf * m / 2.0, q, nf / 2.0)
        }
        Gen2bNp | Ur2bNp | Nr2bNp => {
            let p = free.p()?;
            let (pf, cp) = (p as f64, c_n(p));
            let ratio = (pf - 1.0) / (nf - 1.0);
            t(nbody(p), same, ratio * m, ratio * (cp / cn).sqrt() * q, cn / cp)
        }
        Gen2bSigma | Ur2bSigma => {
            let s = free.sigma()?;
            t(
                Target::Sigma { sigma: s },
                same,
                2.0 * m / (s * (nf - 1.0)),
                2.0 * q / (s * (nf - 1.0) * cn.sqrt()),
                cn,
            )
        }
        Gen2bSameMass => t(Target::Sigma { sigma: 2.0 / (nf - 1.0) }, same, m, q / cn.sqrt(), cn),
        Gen2bSameQ | Ur2bOne2One => {
            let s = 2.0 / ((nf - 1.0) * cn.sqrt());
            t(Target::Sigma { sigma: s }, same, cn.sqrt() * m, q, cn)
        }
        Gen12Link | Ur12Link => {
            let c = free.c()?;
            t(
                nbody(n),
                PotentialMap::OneBodyScaled { c },
                2.0 * c * m / (nf - 1.0),
                4.0 * c * cn.sqrt() * q / (nf - 1.0).powi(2),
                (nf - 1.0) / (2.0 * c),
            )
        }
        NrScale => {
            let b = free.beta()?;
            t(nbody(n), same, b * b * m, b * q, 1.0)
        }
        Nr1bSameQ => {
            let p = free.p()?;
            let pf = p as f64;
            t(nbody(p), same, nf * nf / (pf * pf) * m, q, nf / pf)
        }
        Nr1bBeta => {
            let b = free.beta()?;
            let pf = nf / b;
            let p = pf.round();
            if (pf - p).abs() > 1e-9 * pf || p < 2.0 {
                return Err(Error::invalid(format!(
                    "N/beta must be an integer >= 2, got N = {n}, beta = {b}"
                )));
            }
            t(nbody(p as usize), same, b * b * m, q, b)
        }
        Nr2bAlt => {
            let p = free.p()?;
            let (pf, cp) = (p as f64, c_n(p));
            t(nbody(p), same, pf / nf * m, cp / cn * q, cn / cp)
        }
        Nr2bSameMass => {
            let p = free.p()?;
            let (pf, cp) = (p as f64, c_n(p));
            t(nbody(p), same, m, (pf - 1.0) / (nf - 1.0) * (pf / nf).sqrt() * q, cn / cp)
        }
        Nr2bSameQ => {
            let p = free.p()?;
            let (pf, cp) = (p as f64, c_n(p));
            t(nbody(p), same, (nf - 1.0) * cn / ((pf - 1.0) * cp) * m, q, cn / cp)
        }
        Nr12Link | Nr12LinkSameQ | Nr12LinkSameMass => {
            let c = free.c()?;
            let b = match rel {
                Nr12Link => free.beta()?,
                Nr12LinkSameQ => 1.0,
                _ => 2.0 * (c * nf).sqrt() / (nf - 1.0),
            };
            t(
                nbody(n),
                PotentialMap::OneBodyScaled { c },
                b * b * (nf - 1.0).powi(2) / (4.0 * c * nf) * m,
                b * q,
                (nf - 1.0) / (2.0 * c),
            )
        }
        Bridge1b | Bridge2b => {
            let body = if rel == Bridge1b { Body::One } else { Body::Two };
            let alpha = bridge_alpha(body, n, m, q)?;
            t(nbody(n), PotentialMap::SqrtTransform { alpha }, 0.0, q, 1.0)
        }
    })
}

/// α with α² = Q/(2mN) (one-body) or Q/(2m√C_N) (two-body).
pub fn bridge_alpha(body: Body, n: usize, m: f64, q: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid(format!("m must be > 0, got {m}")));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::invalid(format!("Q must be > 0, got {q}")));
    }
    if n < 2 {
        return Err(Error::invalid(format!("N must be >= 2, got {n}")));
    }
    let denom = match body {
        Body::One => 2.0 * m * n as f64,
        Body::Two => 2.0 * m * c_n(n).sqrt(),
    };
    Ok((q / denom).sqrt())
}

/// The massless-system potential W(r) = p(α√r) whose spectrum equals the
/// nonrelativistic one of `p` at the given (m, Q).
pub fn bridge_build(p: &Potential, body: Body, n: usize, m: f64, q: f64) -> Result<Potential> {
    p.sqrt_transform(bridge_alpha(body, n, m, q)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityCheckReport {
    pub relation: RelationId,
    pub lhs_value: f64,
    /// Multiplier times the right-hand system's value.
    pub rhs_value: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub passed: bool,
    pub mapped_params: Transform,
}

fn lhs_potential(rel: RelationId, spec: &SystemSpec) -> Result<(Body, &Potential)> {
    let (u, v) = (spec.one_body.as_ref(), spec.two_body.as_ref());
    let pick = match (rel.body(), u, v) {
        (Some(Body::One), Some(u), None) => Some((Body::One, u)),
        (Some(Body::Two), None, Some(v)) => Some((Body::Two, v)),
        _ => None,
    };
    pick.ok_or_else(|| {
        Error::invalid(format!(
            "{rel} needs a system with only a {} potential",
            match rel.body() {
                Some(Body::One) => "one-body",
                _ => "two-body",
            }
        ))
    })
}

/// Builds the right-hand system of `rel` for the left-hand `spec`.
pub fn rhs_system(rel: RelationId, spec: &SystemSpec, tr: &Transform) -> Result<SystemSpec> {
    if rel == RelationId::NrScale {
        return spec.with_flavor(spec.flavor, tr.m);
    }
    let (_, pot) = lhs_potential(rel, spec)?;
    let regime = rel.regime();
    let rhs_flavor = if regime == Regime::Bridge { Flavor::Ultrarelativistic } else { regime.flavor() };
    let potential = match tr.potential {
        PotentialMap::Same => pot.clone(),
        PotentialMap::PairEquivalent => pot.pair_equivalent()?,
        PotentialMap::OneBodyScaled { c } => pot.scaled(c)?,
        PotentialMap::SqrtTransform { alpha } => pot.sqrt_transform(alpha)?,
    };
    match tr.target {
        Target::Sigma { sigma } => SystemSpec::sigma(sigma, tr.m, potential),
        Target::NBody { p } => {
            let rhs_body = match tr.potential {
                PotentialMap::OneBodyScaled { .. } => Body::One,
                _ => lhs_potential(rel, spec)?.0,
            };
            let (u, v) = match rhs_body {
                Body::One => (Some(potential), None),
                Body::Two => (None, Some(potential)),
            };
            let m = if rhs_flavor == Flavor::Ultrarelativistic { 0.0 } else { tr.m };
            SystemSpec { flavor: rhs_flavor, n: p, sigma: None, m, one_body: u, two_body: v }.with_flavor(rhs_flavor, m)
        }
    }
}

/// Evaluates both sides of `rel` for the left-hand system `spec` at `q`.
pub fn verify_relation(
    rel: RelationId,
    spec: &SystemSpec,
    q: f64,
    free: &FreeParams,
    tol: f64,
) -> Result<DualityCheckReport> {
    spec.validate()?;
    if spec.flavor != rel.regime().flavor() {
        return Err(Error::invalid(format!(
            "{rel} applies to {} systems, got {}",
            rel.regime().flavor().name(),
            spec.flavor.name()
        )));
    }
    let tr = transform_params(rel, spec.n, spec.m, q, free)?;
    let rhs_spec = rhs_system(rel, spec, &tr)?;
    let lhs = solve_afm(spec, q).map_err(|e| e.on_side("lhs"))?.value;
    let rhs = tr.multiplier * solve_afm(&rhs_spec, tr.q).map_err(|e| e.on_side("rhs"))?.value;
    let abs_residual = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    let rel_residual = if scale == 0.0 { 0.0 } else { abs_residual / scale };
    Ok(DualityCheckReport {
        relation: rel,
        lhs_value: lhs,
        rhs_value: rhs,
        abs_residual,
        rel_residual,
        passed: rel_residual <= tol,
        mapped_params: tr,
    })
}

/// Checks E(m, Q) for `p` against M_u(Q) for the square-root transformed potential.
pub fn bridge_verify(p: &Potential, body: Body, n: usize, m: f64, q: f64, tol: f64) -> Result<DualityCheckReport> {
    let (rel, u, v) = match body {
        Body::One => (RelationId::Bridge1b, Some(p.clone()), None),
        Body::Two => (RelationId::Bridge2b, None, Some(p.clone())),
    };
    let spec = SystemSpec::nonrelativistic(n, m, u, v)?;
    verify_relation(rel, &spec, q, &FreeParams::default(), tol)
}
