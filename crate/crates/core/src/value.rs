use std::fmt;

use serde::{Serialize, Serializer};

/// How a divergence was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divergence {
    /// Successive endpoint refinements of a quadrature kept adding
    /// non-decaying contributions.
    QuadratureGrowth,
    /// A zero-frequency mode entered a moment with nonzero weight.
    SoftMode,
    /// A symplectic eigenvalue exceeded [`R_DIVERGENCE_THRESHOLD`].
    Threshold,
}

/// Symplectic eigenvalues above this are reported as divergent.
pub const R_DIVERGENCE_THRESHOLD: f64 = 1e6;

/// A non-negative quantity that may be infinite, with the reason attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite(Divergence),
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite(_) => None,
        }
    }

    /// Lossy view as `f64`, with `+inf` for the divergent case.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn divergence(&self) -> Option<Divergence> {
        match *self {
            Extended::Finite(_) => None,
            Extended::Infinite(d) => Some(d),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite(_) => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Extended::Finite(v) => s.serialize_f64(v),
            Extended::Infinite(_) => s.serialize_str("inf"),
        }
    }
}
