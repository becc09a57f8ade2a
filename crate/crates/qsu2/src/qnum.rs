//! q-number helpers and the (q, t) parameter pair.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance below which coefficients are pruned after normalisation.
pub const PRUNE_TOL: f64 = 1e-12;

/// Default tolerance for identity assertions.
pub const ASSERT_TOL: f64 = 1e-9;

/// Branch cut for treating q as classical: |q - 1| below this uses the q = 1 formulas.
pub const Q_ONE_EPS: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("deformation parameter q must lie in (0, 1], got {0}")]
    BadQ(f64),
    #[error("vertical parameter t must lie in (0, 1], got {0}")]
    BadT(f64),
    #[error("operands carry different deformation parameters: {0} vs {1}")]
    MismatchedQ(f64, f64),
}

/// The two deformation parameters. Both live in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParams {
    pub q: f64,
    pub t: f64,
}

impl QParams {
    pub fn new(q: f64, t: f64) -> Result<Self, ParamError> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(ParamError::BadQ(q));
        }
        if !(t > 0.0 && t <= 1.0) {
            return Err(ParamError::BadT(t));
        }
        Ok(QParams { q, t })
    }

    /// Both parameters equal: the single-Dirac-operator case.
    pub fn diagonal(q: f64) -> Result<Self, ParamError> {
        Self::new(q, q)
    }

    pub fn is_classical_q(&self) -> bool {
        (self.q - 1.0).abs() < Q_ONE_EPS
    }
}

/// ⟨n⟩_q = 1 + q² + ⋯ + q^{2(n-1)}, with ⟨0⟩_q = 0.
pub fn qint(n: i64, q: f64) -> f64 {
    if n <= 0 {
        return 0.0;
    }
    if (q - 1.0).abs() < Q_ONE_EPS {
        return n as f64;
    }
    let q2 = q * q;
    (1.0 - q2.powi(n as i32)) / (1.0 - q2)
}

/// Classical q-number [a]_q = (q^a - q^{-a})/(q - q^{-1}), with the removable
/// singularity [a]_1 = a taken whenever |q - 1| < 1e-14.
pub fn qnum(a: f64, q: f64) -> f64 {
    if (q - 1.0).abs() < Q_ONE_EPS {
        return a;
    }
    (q.powf(a) - q.powf(-a)) / (q - 1.0 / q)
}
