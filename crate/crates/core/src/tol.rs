//! Numerical thresholds.

use serde::{Deserialize, Serialize};

/// Thresholds used by classification, rank and containment decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Definiteness margin for compressed Hermitian forms.
    pub pd: f64,
    /// Required gap `1 − ‖K‖` for angular operators.
    pub contract: f64,
    /// Largest principal-angle sine accepted for subspace equality.
    pub angle: f64,
    /// Realness threshold: `|Im λ| ≤ real · (1 + |λ|)`.
    pub real: f64,
    /// Boundary slack for region membership: `encl · (1 + |λ|)`.
    pub encl: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            pd: 1e-10,
            contract: 1e-10,
            angle: 1e-8,
            real: 1e-9,
            encl: 1e-9,
        }
    }
}

/// Direction of a numerical verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `value ≤ tolerance`
    AtMost,
    /// `value ≥ tolerance`
    AtLeast,
}

/// A named numerical verdict, reported together with the threshold it was
/// held against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::make(name.into(), value, tolerance, Relation::AtMost)
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::make(name.into(), value, tolerance, Relation::AtLeast)
    }

    fn make(name: String, value: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = match relation {
            Relation::AtMost => value <= tolerance,
            Relation::AtLeast => value >= tolerance,
        };
        // JSON has no NaN/inf; a non-finite value is always a failure anyway.
        let value = if value.is_finite() { value } else { f64::MAX };
        Self {
            name,
            value,
            tolerance,
            relation,
            pass,
        }
    }
}

/// Turns the first failing check into a [`crate::KreinError::TheoremViolation`].
pub fn require(checks: &[Check]) -> crate::Result<()> {
    match checks.iter().find(|c| !c.pass) {
        None => Ok(()),
        Some(c) => Err(crate::KreinError::TheoremViolation {
            what: c.name.clone(),
            residual: c.value,
            tolerance: c.tolerance,
        }),
    }
}
