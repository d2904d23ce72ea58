//! Numerical tolerance profiles.
//!
//! All exact identities of the theory are checked in floating point against
//! the thresholds collected here. The `default` profile is what every free
//! function uses; a [`ReferenceSet`](crate::ReferenceSet) may carry a
//! different profile which then governs the checks done on its behalf.

use std::fmt;
use std::str::FromStr;

use crate::error::ChoquetError;

/// Named thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-norm of `M - M†` accepted for a Hermitian matrix.
    pub herm: f64,
    /// Most negative eigenvalue still accepted as positive semi-definite.
    pub psd: f64,
    /// Allowed deviation of a density matrix trace from one.
    pub trace: f64,
    /// Eigenvalues closer than this are merged into one eigenprojector.
    pub degeneracy: f64,
    /// Smallest singular value below which a set of vectors is degenerate.
    pub rank: f64,
    /// Smallest singular value below which a set of vectors is flagged as ill-conditioned.
    pub conditioning_warning: f64,
    /// Probabilities closer than this are treated as tied.
    pub p_tie: f64,
    /// Slack allowed on the mean and trace eigenvalue bounds.
    pub bound: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-10,
        psd: 1e-9,
        trace: 1e-10,
        degeneracy: 1e-8,
        rank: 1e-8,
        conditioning_warning: 1e-4,
        p_tie: 1e-9,
        bound: 1e-9,
    };

    pub const STRICT: Tolerances = Tolerances {
        herm: 1e-12,
        psd: 1e-11,
        trace: 1e-12,
        degeneracy: 1e-10,
        rank: 1e-6,
        conditioning_warning: 1e-3,
        p_tie: 1e-11,
        bound: 1e-11,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Selectable tolerance profile, e.g. from the `CHOQUET_TOL_PROFILE` variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TolProfile {
    #[default]
    Default,
    Strict,
}

impl TolProfile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            TolProfile::Default => Tolerances::DEFAULT,
            TolProfile::Strict => Tolerances::STRICT,
        }
    }
}

impl FromStr for TolProfile {
    type Err = ChoquetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "default" => Ok(TolProfile::Default),
            "strict" => Ok(TolProfile::Strict),
            other => Err(ChoquetError::UnknownProfile(other.to_string())),
        }
    }
}

impl fmt::Display for TolProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TolProfile::Default => f.write_str("default"),
            TolProfile::Strict => f.write_str("strict"),
        }
    }
}
