//! Radial potential families shared by every solver.
//!
//! All potentials are plain functions of a length `r` returning an energy,
//! in natural units. Every kind is strictly increasing on `(0, ∞)`, which is
//! what the transcendental equations downstream rely on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Linear,
    Quadratic,
    Coulomb,
    Powerlaw,
    Funnel,
    Sqrtwell,
    SqrtTransformed,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Linear => "linear",
            PotentialKind::Quadratic => "quadratic",
            PotentialKind::Coulomb => "coulomb",
            PotentialKind::Powerlaw => "powerlaw",
            PotentialKind::Funnel => "funnel",
            PotentialKind::Sqrtwell => "sqrtwell",
            PotentialKind::SqrtTransformed => "sqrt_transformed",
        }
    }
}

/// A member of the radial potential family.
///
/// | kind               | V(r)                 | constraints            |
/// |--------------------|----------------------|------------------------|
/// | `Linear`           | a·r                  | a > 0                  |
/// | `Quadratic`        | k·r²                 | k > 0                  |
/// | `Coulomb`          | −a/r                 | a > 0                  |
/// | `PowerLaw`         | sgn(λ)·a·r^λ         | a > 0, λ ∈ [−1,2]\{0}  |
/// | `Funnel`           | −a/r + b·r           | a, b > 0               |
/// | `SqrtWell`         | √(r² + a)            | a ≥ 0                  |
/// | `SqrtTransformed`  | inner(α√r)           | α > 0                  |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Linear { a: f64 },
    Quadratic { k: f64 },
    Coulomb { a: f64 },
    #[serde(rename = "powerlaw")]
    PowerLaw { a: f64, lambda: f64 },
    Funnel { a: f64, b: f64 },
    #[serde(rename = "sqrtwell")]
    SqrtWell { a: f64 },
    SqrtTransformed { inner: Box<Potential>, alpha: f64 },
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and > 0, got {value}")))
    }
}

impl Potential {
    pub fn linear(a: f64) -> Result<Self> {
        Self::checked(Potential::Linear { a })
    }

    pub fn quadratic(k: f64) -> Result<Self> {
        Self::checked(Potential::Quadratic { k })
    }

    pub fn coulomb(a: f64) -> Result<Self> {
        Self::checked(Potential::Coulomb { a })
    }

    pub fn power_law(a: f64, lambda: f64) -> Result<Self> {
        Self::checked(Potential::PowerLaw { a, lambda })
    }

    pub fn funnel(a: f64, b: f64) -> Result<Self> {
        Self::checked(Potential::Funnel { a, b })
    }

    pub fn sqrt_well(a: f64) -> Result<Self> {
        Self::checked(Potential::SqrtWell { a })
    }

    fn checked(p: Potential) -> Result<Self> {
        p.validate()?;
        Ok(p)
    }

    pub fn kind(&self) -> PotentialKind {
        match self {
            Potential::Linear { .. } => PotentialKind::Linear,
            Potential::Quadratic { .. } => PotentialKind::Quadratic,
            Potential::Coulomb { .. } => PotentialKind::Coulomb,
            Potential::PowerLaw { .. } => PotentialKind::Powerlaw,
            Potential::Funnel { .. } => PotentialKind::Funnel,
            Potential::SqrtWell { .. } => PotentialKind::Sqrtwell,
            Potential::SqrtTransformed { .. } => PotentialKind::SqrtTransformed,
        }
    }

    /// Checks the parameter invariants of the kind, recursively for transforms.
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::Linear { a } | Potential::Coulomb { a } => positive("a", *a),
            Potential::Quadratic { k } => positive("k", *k),
            Potential::PowerLaw { a, lambda } => {
                positive("a", *a)?;
                if !lambda.is_finite() || *lambda == 0.0 || !(-1.0..=2.0).contains(lambda) {
                    return Err(Error::invalid(format!(
                        "powerlaw exponent lambda must lie in [-1, 2] and differ from 0, got {lambda}"
                    )));
                }
                Ok(())
            }
            Potential::Funnel { a, b } => {
                positive("a", *a)?;
                positive("b", *b)
            }
            Potential::SqrtWell { a } => {
                if a.is_finite() && *a >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("sqrtwell a must be finite and >= 0, got {a}")))
                }
            }
            Potential::SqrtTransformed { inner, alpha } => {
                positive("alpha", *alpha)?;
                inner.validate()
            }
        }
    }

    /// Whether V stays finite at r = 0.
    pub fn finite_at_origin(&self) -> bool {
        match self {
            Potential::Linear { .. } | Potential::Quadratic { .. } | Potential::SqrtWell { .. } => true,
            Potential::PowerLaw { lambda, .. } => *lambda > 0.0,
            Potential::Coulomb { .. } | Potential::Funnel { .. } => false,
            Potential::SqrtTransformed { inner, .. } => inner.finite_at_origin(),
        }
    }

    fn check_radius(&self, r: f64, allow_zero: bool) -> Result<()> {
        if r.is_nan() || r < 0.0 || (r == 0.0 && !allow_zero) || r.is_infinite() {
            return Err(Error::Domain(format!(
                "{} potential evaluated at r = {r}",
                self.kind().name()
            )));
        }
        Ok(())
    }

    /// V(r). `r = 0` is accepted only for kinds finite at the origin.
    pub fn eval(&self, r: f64) -> Result<f64> {
        self.check_radius(r, self.finite_at_origin())?;
        Ok(self.value(r))
    }

    /// dV/dr for r > 0.
    pub fn deriv(&self, r: f64) -> Result<f64> {
        self.check_radius(r, false)?;
        Ok(self.slope(r))
    }

    /// Unchecked V(r), for inner loops that already guarantee `r > 0`.
    pub(crate) fn value(&self, r: f64) -> f64 {
        match self {
            Potential::Linear { a } => a * r,
            Potential::Quadratic { k } => k * r * r,
            Potential::Coulomb { a } => -a / r,
            Potential::PowerLaw { a, lambda } => lambda.signum() * a * r.powf(*lambda),
            Potential::Funnel { a, b } => -a / r + b * r,
            Potential::SqrtWell { a } => (r * r + a).sqrt(),
            Potential::SqrtTransformed { inner, alpha } => inner.value(alpha * r.sqrt()),
        }
    }

    /// Unchecked dV/dr.
    pub(crate) fn slope(&self, r: f64) -> f64 {
        match self {
            Potential::Linear { a } => *a,
            Potential::Quadratic { k } => 2.0 * k * r,
            Potential::Coulomb { a } => a / (r * r),
            Potential::PowerLaw { a, lambda } => lambda.abs() * a * r.powf(lambda - 1.0),
            Potential::Funnel { a, b } => a / (r * r) + b,
            Potential::SqrtWell { a } => r / (r * r + a).sqrt(),
            Potential::SqrtTransformed { inner, alpha } => {
                let s = r.sqrt();
                alpha / (2.0 * s) * inner.slope(alpha * s)
            }
        }
    }

    /// The potential W(r) = V(α√r).
    ///
    /// Kinds whose composition stays inside the family are simplified
    /// (power laws halve their exponent); the others are wrapped.
    pub fn sqrt_transform(&self, alpha: f64) -> Result<Potential> {
        positive("alpha", alpha)?;
        let out = match self {
            Potential::Quadratic { k } => Potential::Linear { a: k * alpha * alpha },
            Potential::Linear { a } => Potential::PowerLaw { a: a * alpha, lambda: 0.5 },
            Potential::Coulomb { a } => Potential::PowerLaw { a: a / alpha, lambda: -0.5 },
            Potential::PowerLaw { a, lambda } => Potential::PowerLaw {
                a: a * alpha.powf(*lambda),
                lambda: lambda / 2.0,
            },
            other => Potential::SqrtTransformed {
                inner: Box::new(other.clone()),
                alpha,
            },
        };
        out.validate()?;
        Ok(out)
    }

    /// c·V(r) for c > 0.
    pub fn scaled(&self, c: f64) -> Result<Potential> {
        positive("scale factor", c)?;
        Ok(match self {
            Potential::Linear { a } => Potential::Linear { a: a * c },
            Potential::Quadratic { k } => Potential::Quadratic { k: k * c },
            Potential::Coulomb { a } => Potential::Coulomb { a: a * c },
            Potential::PowerLaw { a, lambda } => Potential::PowerLaw { a: a * c, lambda: *lambda },
            Potential::Funnel { a, b } => Potential::Funnel { a: a * c, b: b * c },
            Potential::SqrtWell { .. } => {
                return Err(Error::Unsupported(
                    "sqrtwell cannot be rescaled inside the potential family".into(),
                ))
            }
            Potential::SqrtTransformed { inner, alpha } => Potential::SqrtTransformed {
                inner: Box::new(inner.scaled(c)?),
                alpha: *alpha,
            },
        })
    }

    /// The two-body potential 2·U(r/2) generated by a one-body potential U
    /// acting on both members of a pair about their center of mass.
    pub fn pair_equivalent(&self) -> Result<Potential> {
        Ok(match self {
            Potential::Linear { a } => Potential::Linear { a: *a },
            Potential::Quadratic { k } => Potential::Quadratic { k: k / 2.0 },
            Potential::Coulomb { a } => Potential::Coulomb { a: 4.0 * a },
            Potential::PowerLaw { a, lambda } => Potential::PowerLaw {
                a: 2f64.powf(1.0 - lambda) * a,
                lambda: *lambda,
            },
            Potential::Funnel { a, b } => Potential::Funnel { a: 4.0 * a, b: *b },
            Potential::SqrtWell { a } => Potential::SqrtWell { a: 4.0 * a },
            Potential::SqrtTransformed { inner, alpha } => Potential::SqrtTransformed {
                inner: Box::new(inner.scaled(2.0)?),
                alpha: alpha / std::f64::consts::SQRT_2,
            },
        })
    }

    /// Exponent and coefficient when the potential is a pure power law
    /// (linear, quadratic and Coulomb included).
    pub fn as_power_law(&self) -> Option<(f64, f64)> {
        match self {
            Potential::Linear { a } => Some((*a, 1.0)),
            Potential::Quadratic { k } => Some((*k, 2.0)),
            Potential::Coulomb { a } => Some((*a, -1.0)),
            Potential::PowerLaw { a, lambda } => Some((*a, *lambda)),
            _ => None,
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Linear { a } => write!(f, "linear:a={a}"),
            Potential::Quadratic { k } => write!(f, "quadratic:k={k}"),
            Potential::Coulomb { a } => write!(f, "coulomb:a={a}"),
            Potential::PowerLaw { a, lambda } => write!(f, "powerlaw:a={a},lambda={lambda}"),
            Potential::Funnel { a, b } => write!(f, "funnel:a={a},b={b}"),
            Potential::SqrtWell { a } => write!(f, "sqrtwell:a={a}"),
            Potential::SqrtTransformed { inner, alpha } => {
                write!(f, "sqrt_transformed:alpha={alpha},inner={inner}")
            }
        }
    }
}

/// Grammar help shown by the CLI.
pub const GRAMMAR: &str = "\
kind:key=value[,key=value...]
  linear:a=A                 V = a r
  quadratic:k=K              V = k r^2
  coulomb:a=A                V = -a / r
  powerlaw:a=A,lambda=L      V = sgn(L) a r^L,  L in [-1,2], L != 0
  funnel:a=A,b=B             V = -a / r + b r
  sqrtwell:a=A               V = sqrt(r^2 + a)
  sqrt_transformed:alpha=X,inner=SPEC
                             V = inner(X sqrt(r)); `inner` must be the last key";

/// Parses the `kind:key=value[,key=value…]` mini-language.
pub fn parse_potential(text: &str) -> Result<Potential> {
    parse_at(text, 0)
}

fn parse_at(text: &str, offset: usize) -> Result<Potential> {
    let err = |pos: usize, msg: String| Error::Parse { pos: offset + pos, msg };
    let colon = text
        .find(':')
        .ok_or_else(|| err(text.len(), "expected `kind:` prefix".into()))?;
    let kind = text[..colon].trim();
    let body = &text[colon + 1..];
    let mut pos = colon + 1;

    let mut pairs: Vec<(&str, f64)> = Vec::new();
    let mut inner: Option<Potential> = None;
    if !body.trim().is_empty() {
        let mut rest = body;
        loop {
            let eq = rest
                .find('=')
                .ok_or_else(|| err(pos + rest.len(), "expected `key=value`".into()))?;
            let key = rest[..eq].trim();
            if key.is_empty() {
                return Err(err(pos, "empty key".into()));
            }
            let value_start = pos + eq + 1;
            let after = &rest[eq + 1..];
            if key == "inner" {
                inner = Some(parse_at(after, offset + value_start)?);
                break;
            }
            let (value_text, next) = match after.find(',') {
                Some(c) => (&after[..c], Some(c)),
                None => (after, None),
            };
            let value: f64 = value_text.trim().parse().map_err(|_| {
                err(value_start, format!("cannot parse `{}` as a number", value_text.trim()))
            })?;
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(err(pos, format!("duplicate key `{key}`")));
            }
            pairs.push((key, value));
            match next {
                Some(c) => {
                    pos = value_start + c + 1;
                    rest = &after[c + 1..];
                }
                None => break,
            }
        }
    }

    let allowed: &[&str] = match kind {
        "linear" | "coulomb" | "sqrtwell" => &["a"],
        "quadratic" => &["k"],
        "powerlaw" => &["a", "lambda"],
        "funnel" => &["a", "b"],
        "sqrt_transformed" => &["alpha"],
        other => return Err(err(0, format!("unknown potential kind `{other}`"))),
    };
    if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(err(colon + 1, format!("unexpected key `{k}` for {kind}")));
    }
    if inner.is_some() && kind != "sqrt_transformed" {
        return Err(err(colon + 1, format!("`inner` is not a parameter of {kind}")));
    }
    let get = |key: &str| -> Result<f64> {
        pairs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::MissingParameter(format!("{kind}.{key}")))
    };

    let p = match kind {
        "linear" => Potential::Linear { a: get("a")? },
        "quadratic" => Potential::Quadratic { k: get("k")? },
        "coulomb" => Potential::Coulomb { a: get("a")? },
        "powerlaw" => Potential::PowerLaw { a: get("a")?, lambda: get("lambda")? },
        "funnel" => Potential::Funnel { a: get("a")?, b: get("b")? },
        "sqrtwell" => Potential::SqrtWell { a: get("a")? },
        _ => Potential::SqrtTransformed {
            alpha: get("alpha")?,
            inner: Box::new(inner.ok_or_else(|| Error::MissingParameter("sqrt_transformed.inner".into()))?),
        },
    };
    p.validate()?;
    Ok(p)
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_potential(s)
    }
}
