//! Named numerical thresholds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds used for numerical decisions. Every routine that depends on a
/// threshold has a `_with` variant taking one of these fields explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `‖X*X − I‖` and similar manifold-membership residuals on input.
    pub membership: f64,
    /// Membership residual accepted after a flow.
    pub membership_post_flow: f64,
    /// Relative `‖S − S*‖` accepted as Hermitian.
    pub hermitian: f64,
    /// Smallest singular value of `I + X` for the Cayley transform.
    pub cayley_sigma: f64,
    /// Gap below which eigenvalues are clustered.
    pub eig_cluster: f64,
    /// Distance to −1 counted as eigenvalue −1.
    pub minus_one: f64,
    /// Upper edge of the band around −1 that is reported as ambiguous.
    pub ambiguity: f64,
    /// Singular values below this are zero.
    pub rank_zero: f64,
    /// Singular values above this are nonzero; in between is indeterminate.
    pub rank_nonzero: f64,
    /// Hessian eigenvalues below this (times `‖A‖`) count as zero.
    pub hessian_zero: f64,
    /// Gradient norm (times `max(1, ‖A‖)`) accepted as critical.
    pub critical: f64,
    /// Target residual of the flow-based polar decomposition.
    pub polar_residual: f64,
    /// Smallest singular value accepted as nondegenerate.
    pub nondegenerate: f64,
    /// Subspace equality threshold on projector distance.
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: 1e-8,
            membership_post_flow: 1e-7,
            hermitian: 1e-10,
            cayley_sigma: 1e-10,
            eig_cluster: 1e-7,
            minus_one: 1e-7,
            ambiguity: 1e-4,
            rank_zero: 1e-10,
            rank_nonzero: 1e-6,
            hessian_zero: 1e-6,
            critical: 1e-8,
            polar_residual: 1e-10,
            nondegenerate: 1e-8,
            subspace: 1e-7,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 14] = [
        "membership",
        "membership_post_flow",
        "hermitian",
        "cayley_sigma",
        "eig_cluster",
        "minus_one",
        "ambiguity",
        "rank_zero",
        "rank_nonzero",
        "hessian_zero",
        "critical",
        "polar_residual",
        "nondegenerate",
        "subspace",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "membership" => &mut self.membership,
            "membership_post_flow" => &mut self.membership_post_flow,
            "hermitian" => &mut self.hermitian,
            "cayley_sigma" => &mut self.cayley_sigma,
            "eig_cluster" => &mut self.eig_cluster,
            "minus_one" => &mut self.minus_one,
            "ambiguity" => &mut self.ambiguity,
            "rank_zero" => &mut self.rank_zero,
            "rank_nonzero" => &mut self.rank_nonzero,
            "hessian_zero" => &mut self.hessian_zero,
            "critical" => &mut self.critical,
            "polar_residual" => &mut self.polar_residual,
            "nondegenerate" => &mut self.nondegenerate,
            "subspace" => &mut self.subspace,
            _ => return None,
        })
    }

    /// Applies named overrides; unknown names and non-positive values are rejected.
    pub fn with_overrides(mut self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        for (name, &value) in overrides {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Parse(format!("tolerance `{name}` must be a positive number, got {value}")));
            }
            match self.slot(name) {
                Some(s) => *s = value,
                None => {
                    return Err(Error::Parse(format!(
                        "unknown tolerance `{name}` (known: {})",
                        Self::NAMES.join(", ")
                    )))
                }
            }
        }
        if self.minus_one >= self.ambiguity {
            return Err(Error::Parse("minus_one must be smaller than ambiguity".into()));
        }
        if self.rank_zero > self.rank_nonzero {
            return Err(Error::Parse("rank_zero must not exceed rank_nonzero".into()));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_is_settable() {
        for name in Tolerances::NAMES {
            let mut t = Tolerances::default();
            assert!(t.slot(name).is_some(), "{name}");
        }
    }

    #[test]
    fn unknown_override_rejected() {
        let mut m = BTreeMap::new();
        m.insert("nope".to_string(), 1.0);
        assert!(Tolerances::default().with_overrides(&m).is_err());
        let mut ok = BTreeMap::new();
        ok.insert("membership".to_string(), 1e-6);
        assert_eq!(Tolerances::default().with_overrides(&ok).unwrap().membership, 1e-6);
    }
}
