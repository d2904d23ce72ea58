//! Choquet integration with classical capacities and with projector
//! lattices of non-orthogonal quantum states.
//!
//! The classical side ([`classical`]) integrates non-negative functions
//! against monotone set functions. The quantum side replaces the capacity
//! by the span projectors `Pi(A)` of a [`ReferenceSet`] and integrates the
//! measured probabilities `p(i) = Tr[rho Pi({i})]` of a partially known
//! state into a positive semi-definite operator `C`, whose normalization
//! `R = C / Tr C` approximates the state.

pub mod classical;
pub mod comonotone;
pub mod error;
pub mod family;
pub mod hermitian;
pub mod permutation;
pub mod quantum;
pub mod reference_set;
pub mod subset;
pub mod tol;

pub use classical::{Capacity, MobiusTransform, RankedFunction};
pub use comonotone::{ComonotoneClass, Comonotony, ComonotonyVerdict, Preorder, PreorderVerdict};
pub use error::{ChoquetError, Result};
pub use family::{AffineFamily, HermitianParameterization};
pub use hermitian::{ComplexMatrix, DensityMatrix, EigenSystem, HermitianMatrix};
pub use num_complex::Complex64;
pub use permutation::Permutation;
pub use quantum::{ChoquetReport, ProbabilityVector, RankingPermutation};
pub use reference_set::{Certificate, ReferenceSet};
pub use subset::Subset;
pub use tol::{TolProfile, Tolerances};
