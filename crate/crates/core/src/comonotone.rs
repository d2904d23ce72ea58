//! Comonotonicity of states and the trace preorder inside a comonotone class.
//!
//! Everything here works on probability vectors: the ranking, and hence the
//! class, depends on a state only through `p(i) = Tr[rho Pi({i})]`.

use std::cmp::Ordering;

use crate::error::{ChoquetError, Result};
use crate::permutation::Permutation;
use crate::quantum::{choquet_operator, ranked_bounds, ranking_with, ProbabilityVector, RankingPermutation};
use crate::reference_set::ReferenceSet;
use crate::subset::MAX_SUBSET_N;
use crate::tol::Tolerances;

/// Traces closer than this compare as equivalent.
pub const TRACE_EQUIVALENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comonotony {
    /// No pair of indices is ordered oppositely.
    Comonotonic,
    /// Only the top-ranked index is shared.
    Weakly,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComonotonyVerdict {
    pub relation: Comonotony,
    /// Set when either input has tied probabilities.
    pub boundary: bool,
}

pub fn are_comonotonic_states(p1: &ProbabilityVector, p2: &ProbabilityVector) -> Result<ComonotonyVerdict> {
    are_comonotonic_states_with(p1, p2, &Tolerances::DEFAULT)
}

/// Ties (differences within `tol.p_tie`) are compatible with either order.
pub fn are_comonotonic_states_with(
    p1: &ProbabilityVector,
    p2: &ProbabilityVector,
    tol: &Tolerances,
) -> Result<ComonotonyVerdict> {
    if p1.n() != p2.n() {
        return Err(ChoquetError::SizeMismatch { expected: p1.n(), found: p2.n() });
    }
    let sign = |x: f64| if x.abs() <= tol.p_tie { 0 } else if x > 0.0 { 1 } else { -1 };
    let (a, b) = (p1.values(), p2.values());
    let crossing = (0..a.len())
        .any(|i| ((i + 1)..a.len()).any(|j| sign(a[i] - a[j]) * sign(b[i] - b[j]) < 0));
    let r1 = ranking_with(p1, tol);
    let r2 = ranking_with(p2, tol);
    let relation = if !crossing {
        Comonotony::Comonotonic
    } else if r1.top_group().iter().any(|i| r2.top_group().contains(i)) {
        Comonotony::Weakly
    } else {
        Comonotony::Neither
    };
    Ok(ComonotonyVerdict {
        relation,
        boundary: !r1.is_strict() || !r2.is_strict(),
    })
}

/// Number of comonotone classes, `n! / (n - d)!`.
pub fn class_count(n: usize, d: usize) -> Result<u64> {
    if d == 0 || n < d {
        return Err(ChoquetError::InvalidReferenceSet(format!("need n >= d >= 1, got n = {n}, d = {d}")));
    }
    if n > MAX_SUBSET_N {
        return Err(ChoquetError::Overflow(n));
    }
    ((n - d + 1)..=n).try_fold(1u64, |acc, k| acc.checked_mul(k as u64).ok_or(ChoquetError::Overflow(n)))
}

/// Strict ranking shared by every member of one comonotone class.
#[derive(Debug, Clone, PartialEq)]
pub struct ComonotoneClass {
    sigma: Permutation,
    members: Vec<ProbabilityVector>,
}

impl ComonotoneClass {
    /// Opens a class from a strictly ranked representative.
    pub fn new(first: ProbabilityVector) -> Result<Self> {
        let r = ranking_with(&first, &Tolerances::DEFAULT);
        if !r.is_strict() {
            return Err(ChoquetError::BoundaryInput);
        }
        Ok(ComonotoneClass {
            sigma: r.sigma().clone(),
            members: vec![first],
        })
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn members(&self) -> &[ProbabilityVector] {
        &self.members
    }

    /// Adds `p` if it is strictly ranked by the same permutation.
    pub fn admit(&mut self, p: ProbabilityVector) -> Result<()> {
        let r = ranking_with(&p, &Tolerances::DEFAULT);
        if !r.is_strict() {
            return Err(ChoquetError::BoundaryInput);
        }
        if r.sigma() != &self.sigma {
            return Err(ChoquetError::DifferentClass);
        }
        self.members.push(p);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preorder {
    Succeeds,
    Precedes,
    Equivalent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreorderVerdict {
    pub left_trace: f64,
    pub right_trace: f64,
    pub relation: Preorder,
}

fn strict_ranking(p: &ProbabilityVector, tol: &Tolerances) -> Result<RankingPermutation> {
    let r = ranking_with(p, tol);
    if !r.is_strict() {
        return Err(ChoquetError::BoundaryInput);
    }
    Ok(r)
}

/// Orders two members of the same class by `Tr[C]` ("more aligned").
pub fn compare(set: &ReferenceSet, p1: &ProbabilityVector, p2: &ProbabilityVector) -> Result<PreorderVerdict> {
    let tol = *set.tolerances();
    let r1 = strict_ranking(p1, &tol)?;
    let r2 = strict_ranking(p2, &tol)?;
    if r1.sigma() != r2.sigma() {
        return Err(ChoquetError::DifferentClass);
    }
    let left_trace = choquet_operator(set, p1, r1.sigma())?.trace();
    let right_trace = choquet_operator(set, p2, r2.sigma())?.trace();

    let (lo, hi) = ranked_bounds(set, r1.sigma())?;
    let d = set.d() as f64;
    for t in [left_trace, right_trace] {
        if t < d * lo - tol.bound || t > d * hi + tol.bound {
            return Err(ChoquetError::BoundViolation(format!(
                "Tr[C] = {t} outside [d E_min(sigma), d E_max(sigma)] = [{}, {}]",
                d * lo,
                d * hi
            )));
        }
    }

    let relation = if (left_trace - right_trace).abs() <= TRACE_EQUIVALENCE_TOL {
        Preorder::Equivalent
    } else {
        match left_trace.total_cmp(&right_trace) {
            Ordering::Greater => Preorder::Succeeds,
            _ => Preorder::Precedes,
        }
    };
    Ok(PreorderVerdict { left_trace, right_trace, relation })
}
