//! Spectrum predictions from ground-state energies at shifted masses.
//!
//! For nonrelativistic kinematics the AFM energy depends on m and Q only
//! through `Q² / m`, so an excited level with principal number Q matches a
//! ground level at a rescaled mass. Applying this to exact energies gives
//! approximate spectra from the universal function `f(m)`, the two-body
//! ground-state energy of `p²/m + V(r)`.

use serde::{Deserialize, Serialize};

use super::mesh::universal_f_fn;
use super::three_body::{solve_3b, ThreeBodyBasisConfig};
use crate::afm::c_n;
use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::quantum_numbers::{q_custom, QPrescription, StateLabels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassKind {
    /// `m (Q₂/Q(n,l))²` for a two-body state.
    TwoBody,
    /// `m (Q_N/Q({n,l}))²` for an N-body state.
    NBody,
    /// `(2m/N)(C_N Q₂/Q({n,l}))²`, the two-body mass whose ground state
    /// gives the N-body level.
    BigM,
}

impl std::str::FromStr for MassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_body" => Ok(MassKind::TwoBody),
            "n_body" => Ok(MassKind::NBody),
            "big_M" | "big_m" => Ok(MassKind::BigM),
            other => Err(Error::invalid(format!("unknown mass kind `{other}` (two_body, n_body, big_M)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictMode {
    /// Two-body level as `f(m̄)`.
    TwoBodyF,
    /// Three-body level as the exact three-body ground state at mass `m̄`.
    NBodyGs,
    /// N-body level as `C_N f(M)`.
    NBodyViaF,
    /// N-body ground state as `C_N f(Nm/2)`.
    GsLink,
}

impl PredictMode {
    pub const ALL: [PredictMode; 4] = [PredictMode::TwoBodyF, PredictMode::NBodyGs, PredictMode::NBodyViaF, PredictMode::GsLink];

    pub fn name(self) -> &'static str {
        match self {
            PredictMode::TwoBodyF => "two_body_f",
            PredictMode::NBodyGs => "n_body_gs",
            PredictMode::NBodyViaF => "n_body_via_f",
            PredictMode::GsLink => "gs_link",
        }
    }
}

impl std::str::FromStr for PredictMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PredictMode::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown prediction mode `{s}` (two_body_f, n_body_gs, n_body_via_f, gs_link)")))
    }
}

fn check_labels(labels: &StateLabels, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 particles, got {n}")));
    }
    if labels.len() != n - 1 {
        return Err(Error::LengthMismatch { expected: n - 1, got: labels.len() });
    }
    Ok(())
}

/// Effective mass for a state of an `n`-particle system.
///
/// For [`MassKind::BigM`] the two-body ground principal number is taken as
/// `Q₂ = Q_N / (N − 1)`, so that ground states map to `M = Nm/2`.
pub fn effective_mass(kind: MassKind, m: f64, labels: &StateLabels, presc: &QPrescription, n: usize) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid(format!("mass must be > 0, got {m}")));
    }
    let n = if kind == MassKind::TwoBody { 2 } else { n };
    check_labels(labels, n)?;
    let q = q_custom(presc, labels)?;
    let q_ground = q_custom(presc, &StateLabels::ground(n)?)?;
    Ok(match kind {
        MassKind::TwoBody | MassKind::NBody => m * (q_ground / q).powi(2),
        MassKind::BigM => {
            let q2 = q_ground / (n - 1) as f64;
            2.0 * m / n as f64 * (c_n(n) * q2 / q).powi(2)
        }
    })
}

/// Approximate energy of the labelled state from ground-state energies.
pub fn predict_spectrum(
    mode: PredictMode,
    m: f64,
    labels: &StateLabels,
    presc: &QPrescription,
    n: usize,
    v: &Potential,
) -> Result<f64> {
    match mode {
        PredictMode::TwoBodyF => universal_f_fn(v, effective_mass(MassKind::TwoBody, m, labels, presc, 2)?),
        PredictMode::NBodyGs => {
            if n != 3 {
                return Err(Error::Unsupported(format!("exact ground states are only available for N = 3, got N = {n}")));
            }
            let mbar = effective_mass(MassKind::NBody, m, labels, presc, n)?;
            Ok(solve_3b(mbar, v, &ThreeBodyBasisConfig::default())?.entries[0].energy)
        }
        PredictMode::NBodyViaF => Ok(c_n(n) * universal_f_fn(v, effective_mass(MassKind::BigM, m, labels, presc, n)?)?),
        PredictMode::GsLink => {
            check_labels(&StateLabels::ground(n)?, n)?;
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid(format!("mass must be > 0, got {m}")));
            }
            Ok(c_n(n) * universal_f_fn(v, n as f64 * m / 2.0)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_numbers::Preset;

    fn labels(pairs: &[(u32, u32)]) -> StateLabels {
        StateLabels::new(pairs.to_vec()).unwrap()
    }

    #[test]
    fn effective_masses() {
        let ho1 = Preset::Ho.prescription(1).unwrap();
        let m = effective_mass(MassKind::TwoBody, 4.0, &labels(&[(1, 0)]), &ho1, 2).unwrap();
        assert!((m - 4.0 * (1.5f64 / 3.5).powi(2)).abs() < 1e-12);

        let wkb = Preset::Wkb3b.prescription(2).unwrap();
        let m = effective_mass(MassKind::NBody, 2.0, &labels(&[(1, 0), (0, 0)]), &wkb, 3).unwrap();
        assert!((m - 2.0 * (3.0 / (std::f64::consts::PI / 3f64.sqrt() + 3.0)).powi(2)).abs() < 1e-12, "{m}");
        assert!((m - 0.7769).abs() < 2e-4);

        let ho2 = Preset::Ho.prescription(2).unwrap();
        let m = effective_mass(MassKind::BigM, 2.0, &StateLabels::ground(3).unwrap(), &ho2, 3).unwrap();
        assert!((m - 3.0).abs() < 1e-12);

        assert!(matches!(
            effective_mass(MassKind::NBody, 2.0, &labels(&[(0, 0)]), &ho2, 3),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn improved_two_body_prediction() {
        let p = Preset::Improved2b.prescription(1).unwrap();
        let v = Potential::linear(1.0).unwrap();
        let e = predict_spectrum(PredictMode::TwoBodyF, 4.0, &labels(&[(1, 0)]), &p, 2, &v).unwrap();
        assert!((e - 2.567).abs() < 1e-3, "{e}");
    }

    #[test]
    fn ground_state_link_for_linear_potential() {
        let v = Potential::linear(1.0).unwrap();
        let ho2 = Preset::Ho.prescription(2).unwrap();
        let e = predict_spectrum(PredictMode::GsLink, 2.0, &StateLabels::ground(3).unwrap(), &ho2, 3, &v).unwrap();
        let airy = 3.0 * 2.338_107_410_459_767 / 3f64.powf(1.0 / 3.0);
        assert!((e - airy).abs() < 1e-5 * airy);
        let via_f = predict_spectrum(PredictMode::NBodyViaF, 2.0, &StateLabels::ground(3).unwrap(), &ho2, 3, &v).unwrap();
        assert!((via_f - e).abs() < 1e-12);
    }

    #[test]
    fn three_body_ground_prediction_needs_three_bodies() {
        let v = Potential::linear(1.0).unwrap();
        let ho = Preset::Ho.prescription(3).unwrap();
        let r = predict_spectrum(PredictMode::NBodyGs, 2.0, &StateLabels::ground(4).unwrap(), &ho, 4, &v);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
