//! Principal-quantum-number prescriptions.
//!
//! A state of an N-body system is labelled by one `(n, l)` pair per internal
//! (Jacobi) coordinate. A prescription maps these labels to the scalar `Q`
//! that every AFM formula takes as input.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial and orbital quantum numbers, one pair per internal coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateLabels {
    pub pairs: Vec<(u32, u32)>,
}

impl StateLabels {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("state labels need at least one (n, l) pair"));
        }
        Ok(StateLabels { pairs })
    }

    pub fn single(n: u32, l: u32) -> Self {
        StateLabels { pairs: vec![(n, l)] }
    }

    /// All-zero labels for an `n_particles`-body system.
    pub fn ground(n_particles: usize) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::invalid(format!("N must be >= 2, got {n_particles}")));
        }
        Ok(StateLabels { pairs: vec![(0, 0); n_particles - 1] })
    }

    /// Number of internal coordinates (N − 1).
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Oscillator band Σ(2nᵢ + lᵢ).
    pub fn band(&self) -> u32 {
        self.pairs.iter().map(|&(n, l)| 2 * n + l).sum()
    }
}

impl fmt::Display for StateLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(n, l)| format!("{n},{l}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for StateLabels {
    type Err = Error;

    /// Parses `n1,l1[,n2,l2...]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut pos = 0;
        for part in s.split(',') {
            let v: u32 = part.trim().parse().map_err(|_| Error::Parse {
                pos,
                msg: format!("expected a non-negative integer, got `{}`", part.trim()),
            })?;
            values.push(v);
            pos += part.len() + 1;
        }
        if values.len() % 2 != 0 {
            return Err(Error::Parse {
                pos: s.len(),
                msg: "labels come in (n, l) pairs".into(),
            });
        }
        StateLabels::new(values.chunks(2).map(|c| (c[0], c[1])).collect())
    }
}

/// Affine map Q = Σ(αᵢ nᵢ + βᵢ lᵢ) + γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPrescription {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
}

impl QPrescription {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: f64) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::LengthMismatch { expected: alpha.len(), got: beta.len() });
        }
        if alpha.is_empty() {
            return Err(Error::invalid("prescription needs at least one coordinate"));
        }
        if alpha.iter().chain(&beta).any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::invalid("prescription coefficients alpha and beta must be > 0"));
        }
        if !gamma.is_finite() {
            return Err(Error::invalid("prescription offset gamma must be finite"));
        }
        Ok(QPrescription { alpha, beta, gamma })
    }

    /// Number of internal coordinates the prescription applies to.
    pub fn coordinates(&self) -> usize {
        self.alpha.len()
    }
}

/// Q = Σ(2nᵢ + lᵢ) + 3(N−1)/2, the harmonic-oscillator principal number.
pub fn q_ho(labels: &StateLabels) -> f64 {
    labels.band() as f64 + 1.5 * labels.len() as f64
}

pub fn q_custom(p: &QPrescription, labels: &StateLabels) -> Result<f64> {
    if p.coordinates() != labels.len() {
        return Err(Error::LengthMismatch { expected: p.coordinates(), got: labels.len() });
    }
    let sum: f64 = labels
        .pairs
        .iter()
        .zip(p.alpha.iter().zip(&p.beta))
        .map(|(&(n, l), (a, b))| a * n as f64 + b * l as f64)
        .sum();
    Ok(sum + p.gamma)
}

/// Named coefficient sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Harmonic oscillator: α = 2, β = 1, γ = 3(N−1)/2. Any N.
    Ho,
    /// Two-body nonrelativistic fit: 1.789 n + l + 1.375.
    Improved2b,
    /// Three-body WKB estimate: π/√3 (n₁+n₂) + l₁ + l₂ + 3.
    Wkb3b,
    /// Two-body ultrarelativistic: π/2 n + l + 4/π.
    Ur2b,
    /// Three-body ultrarelativistic: π/2 (n₁+n₂) + l₁ + l₂ + 3.
    Ur3b,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Ho, Preset::Improved2b, Preset::Wkb3b, Preset::Ur2b, Preset::Ur3b];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ho => "ho",
            Preset::Improved2b => "improved2b",
            Preset::Wkb3b => "wkb3b",
            Preset::Ur2b => "ur2b",
            Preset::Ur3b => "ur3b",
        }
    }

    /// Coefficients for a system with `coords` internal coordinates.
    pub fn prescription(self, coords: usize) -> Result<QPrescription> {
        let fixed = |expected: usize, alpha: f64, gamma: f64| -> Result<QPrescription> {
            if coords != expected {
                return Err(Error::LengthMismatch { expected, got: coords });
            }
            QPrescription::new(vec![alpha; coords], vec![1.0; coords], gamma)
        };
        match self {
            Preset::Ho => {
                if coords == 0 {
                    return Err(Error::invalid("prescription needs at least one coordinate"));
                }
                QPrescription::new(vec![2.0; coords], vec![1.0; coords], 1.5 * coords as f64)
            }
            Preset::Improved2b => fixed(1, 1.789, 1.375),
            Preset::Ur2b => fixed(1, FRAC_PI_2, 4.0 / PI),
            Preset::Wkb3b => fixed(2, PI / 3f64.sqrt(), 3.0),
            Preset::Ur3b => fixed(2, FRAC_PI_2, 3.0),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown prescription preset `{s}`")))
    }
}

/// A preset or an explicit coefficient set, as accepted on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum PrescriptionChoice {
    Preset(Preset),
    Custom(QPrescription),
}

impl PrescriptionChoice {
    pub fn resolve(&self, coords: usize) -> Result<QPrescription> {
        match self {
            PrescriptionChoice::Preset(p) => p.prescription(coords),
            PrescriptionChoice::Custom(c) => {
                if c.coordinates() == coords {
                    Ok(c.clone())
                } else if c.coordinates() == 1 {
                    // A single coefficient applies to every coordinate.
                    QPrescription::new(vec![c.alpha[0]; coords], vec![c.beta[0]; coords], c.gamma)
                } else {
                    Err(Error::LengthMismatch { expected: coords, got: c.coordinates() })
                }
            }
        }
    }
}

impl FromStr for PrescriptionChoice {
    type Err = Error;

    /// `ho`, `improved2b`, … or `custom:alpha=A1;A2,beta=B1;B2,gamma=G`.
    fn from_str(s: &str) -> Result<Self> {
        let Some(body) = s.strip_prefix("custom:") else {
            return s.parse().map(PrescriptionChoice::Preset);
        };
        let mut alpha = None;
        let mut beta = None;
        let mut gamma = None;
        let mut pos = "custom:".len();
        for item in body.split(',') {
            let (key, value) = item.split_once('=').ok_or_else(|| Error::Parse {
                pos,
                msg: "expected `key=value`".into(),
            })?;
            let nums = value
                .split(';')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse {
                    pos: pos + key.len() + 1,
                    msg: format!("cannot parse `{value}` as numbers"),
                })?;
            match key.trim() {
                "alpha" => alpha = Some(nums),
                "beta" => beta = Some(nums),
                "gamma" if nums.len() == 1 => gamma = Some(nums[0]),
                "gamma" => {
                    return Err(Error::Parse { pos, msg: "gamma takes a single value".into() })
                }
                other => {
                    return Err(Error::Parse { pos, msg: format!("unknown key `{other}`") })
                }
            }
            pos += item.len() + 1;
        }
        let alpha = alpha.ok_or_else(|| Error::MissingParameter("custom.alpha".into()))?;
        let beta = beta.ok_or_else(|| Error::MissingParameter("custom.beta".into()))?;
        let gamma = gamma.ok_or_else(|| Error::MissingParameter("custom.gamma".into()))?;
        QPrescription::new(alpha, beta, gamma).map(PrescriptionChoice::Custom)
    }
}
