//! Choquet integral of a partially known density matrix.
//!
//! The only data used about a state `rho` are the probabilities
//! `p(i) = Tr[rho Pi({i})]` on a [`ReferenceSet`]. Ranking them ascending
//! with `sigma`, the cumulative projectors
//! `pi_sigma(k) = Pi({sigma(k), ..., sigma(n)})` and their differences
//! `varpi_sigma(k) = pi_sigma(k) - pi_sigma(k+1)` form a complete family of
//! `d` orthogonal projectors, and
//!
//! ```text
//! C(rho) = sum_{i = n-d+1}^{n} p[sigma(i)] varpi_sigma(i)
//! ```
//!
//! is positive semi-definite with the `d` largest probabilities as its
//! eigenvalues. `R(rho) = C / Tr C` is then a density matrix that ranks the
//! reference states the same way at the top.

use crate::error::{ChoquetError, Result};
use crate::hermitian::{trace_product, DensityMatrix, HermitianMatrix};
use crate::permutation::Permutation;
use crate::reference_set::{ReferenceSet, SubsetProjector};
use crate::subset::{check_enumerable, Subset};
use crate::tol::Tolerances;

/// Slack on `0 <= p(i) <= 1`.
pub const PROBABILITY_SLACK: f64 = 1e-10;

/// Allowed gap between the two algebraic forms of `C`.
pub const FORM_AGREEMENT_TOL: f64 = 1e-10;

/// Traces at or below this cannot be normalized.
pub const ZERO_TRACE_TOL: f64 = 1e-12;

/// Measured probabilities `p(1..n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&v) {
                return Err(ChoquetError::InvalidProbability { index: i + 1, value: v });
            }
        }
        Ok(ProbabilityVector(values))
    }

    /// `p(i) = Tr[rho Pi({i})]`.
    pub fn from_state(set: &ReferenceSet, rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != set.d() {
            return Err(ChoquetError::DimensionMismatch { expected: set.d(), found: rho.dim() });
        }
        let values = (0..set.n())
            .map(|i| trace_product(rho.as_hermitian(), &set.single(i)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.n() as f64
    }

    /// `lambda * self + (1 - lambda) * other`; mixing states mixes their probabilities.
    pub fn mix(&self, other: &ProbabilityVector, lambda: f64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(ChoquetError::SizeMismatch { expected: self.n(), found: other.n() });
        }
        Self::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
    }
}

/// Ascending order of the probabilities with groups of tied values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingPermutation {
    sigma: Permutation,
    /// 0-based indices, one group per run of tied values, in rank order.
    tie_groups: Vec<Vec<usize>>,
}

impl RankingPermutation {
    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn tie_groups(&self) -> &[Vec<usize>] {
        &self.tie_groups
    }

    /// True when no two probabilities are tied.
    pub fn is_strict(&self) -> bool {
        self.tie_groups.len() == self.n()
    }

    /// `sigma(n)`, 0-based.
    pub fn top(&self) -> usize {
        self.sigma.top().expect("non-empty ranking")
    }

    /// Every index tied with `sigma(n)`.
    pub fn top_group(&self) -> &[usize] {
        self.tie_groups.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// `(sigma(n), ..., sigma(1))` as 1-based labels.
    pub fn postcode(&self) -> Vec<usize> {
        let mut labels = self.sigma.labels();
        labels.reverse();
        labels
    }
}

pub fn ranking(p: &ProbabilityVector) -> RankingPermutation {
    ranking_with(p, &Tolerances::DEFAULT)
}

/// Sorts ascending; values within `tol.p_tie` of their neighbour form a tie
/// group, ordered inside by original index.
pub fn ranking_with(p: &ProbabilityVector, tol: &Tolerances) -> RankingPermutation {
    let sorted = Permutation::ascending(p.values());
    let mut tie_groups: Vec<Vec<usize>> = Vec::new();
    let mut last_value = f64::NEG_INFINITY;
    for &i in sorted.indices() {
        let v = p.get(i);
        match tie_groups.last_mut() {
            Some(group) if v - last_value <= tol.p_tie => group.push(i),
            _ => tie_groups.push(vec![i]),
        }
        last_value = v;
    }
    for group in &mut tie_groups {
        group.sort_unstable();
    }
    let order = tie_groups.iter().flatten().copied().collect();
    RankingPermutation {
        sigma: Permutation::from_indices(order).expect("regrouped sort is a permutation"),
        tie_groups,
    }
}

/// Cumulative projectors `pi_sigma(1..n)` and their discrete derivatives.
#[derive(Debug, Clone)]
pub struct CumulativeProjectorChain {
    sigma: Permutation,
    d: usize,
    pi: Vec<SubsetProjector>,
    varpi: Vec<HermitianMatrix>,
}

impl CumulativeProjectorChain {
    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    /// `pi_sigma(k)` for 1-based position `k`.
    pub fn pi(&self, k: usize) -> &SubsetProjector {
        &self.pi[k - 1]
    }

    /// `varpi_sigma(k)` for 1-based position `k`; zero for `k <= n - d`.
    pub fn varpi(&self, k: usize) -> &HermitianMatrix {
        &self.varpi[k - 1]
    }

    /// Positions `n-d+1..=n` carrying the non-zero derivatives.
    pub fn active_positions(&self) -> std::ops::RangeInclusive<usize> {
        let n = self.pi.len();
        (n - self.d + 1)..=n
    }

    /// Max-norm residuals of completeness, mutual orthogonality and
    /// vanishing of the inactive derivatives.
    pub fn residuals(&self) -> ChainResiduals {
        let d = self.d;
        let active: Vec<_> = self.active_positions().map(|k| self.varpi(k)).collect();
        let sum = active.iter().fold(HermitianMatrix::zeros(d), |acc, w| &acc + w);
        let completeness = sum.max_abs_diff(&HermitianMatrix::identity(d));
        let mut orthogonality: f64 = 0.0;
        for (a, wa) in active.iter().enumerate() {
            for (b, wb) in active.iter().enumerate() {
                let prod = wa.product(wb);
                let r = if a == b {
                    crate::hermitian::max_abs(&(prod.as_matrix() - wa.as_matrix()))
                } else {
                    prod.max_abs()
                };
                orthogonality = orthogonality.max(r);
            }
        }
        let inactive = (1..*self.active_positions().start())
            .map(|k| self.varpi(k).max_abs())
            .fold(0.0, f64::max);
        ChainResiduals { completeness, orthogonality, inactive }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainResiduals {
    pub completeness: f64,
    pub orthogonality: f64,
    pub inactive: f64,
}

impl ChainResiduals {
    pub fn max(&self) -> f64 {
        self.completeness.max(self.orthogonality).max(self.inactive)
    }
}

pub fn cumulative_chain(set: &ReferenceSet, sigma: &Permutation) -> Result<CumulativeProjectorChain> {
    let n = set.n();
    if sigma.len() != n {
        return Err(ChoquetError::InvalidPermutation(format!(
            "permutation of {} elements used with n = {n} reference states",
            sigma.len()
        )));
    }
    let mut pi = Vec::with_capacity(n);
    let mut tail = Subset::EMPTY;
    for k in (0..n).rev() {
        tail = tail.insert(sigma.at(k));
        pi.push(set.projector(tail)?);
    }
    pi.reverse();
    let varpi = (0..n)
        .map(|k| {
            if k + 1 < n {
                &pi[k].matrix - &pi[k + 1].matrix
            } else {
                pi[k].matrix.clone()
            }
        })
        .collect();
    Ok(CumulativeProjectorChain {
        sigma: sigma.clone(),
        d: set.d(),
        pi,
        varpi,
    })
}

fn check_sizes(set: &ReferenceSet, p: &ProbabilityVector) -> Result<()> {
    if p.n() != set.n() {
        return Err(ChoquetError::SizeMismatch { expected: set.n(), found: p.n() });
    }
    Ok(())
}

/// `sum_{k > n-d} p[sigma(k)] varpi_sigma(k)` for a given chain.
pub fn choquet_from_chain(chain: &CumulativeProjectorChain, p: &ProbabilityVector) -> HermitianMatrix {
    chain
        .active_positions()
        .fold(HermitianMatrix::zeros(chain.d), |acc, k| {
            &acc + &chain.varpi(k).scale(p.get(chain.sigma.at(k - 1)))
        })
}

/// Telescoped form
/// `p[sigma(n-d+1)] 1 + sum_{k > n-d+1} (p[sigma(k)] - p[sigma(k-1)]) pi_sigma(k)`.
pub fn choquet_telescoped_from_chain(chain: &CumulativeProjectorChain, p: &ProbabilityVector) -> HermitianMatrix {
    let positions = chain.active_positions();
    let first = *positions.start();
    let mut acc = HermitianMatrix::identity(chain.d).scale(p.get(chain.sigma.at(first - 1)));
    for k in (first + 1)..=*positions.end() {
        let step = p.get(chain.sigma.at(k - 1)) - p.get(chain.sigma.at(k - 2));
        acc = &acc + &chain.pi(k).matrix.scale(step);
    }
    acc
}

/// `C` for an explicitly chosen ordering `sigma`, without any bound checks.
/// Any ordering that sorts `p` ascending gives the same operator.
pub fn choquet_operator(set: &ReferenceSet, p: &ProbabilityVector, sigma: &Permutation) -> Result<HermitianMatrix> {
    check_sizes(set, p)?;
    Ok(choquet_from_chain(&cumulative_chain(set, sigma)?, p))
}

/// Eigenvalue bounds from the averaged projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// `(1/n) sum p(i)`.
    pub mean_p: f64,
    /// Extreme eigenvalues of `Q = (1/n) sum_i Pi({i})`.
    pub q_min: f64,
    pub q_max: f64,
    /// `Tr[C] / d`.
    pub trace_c_over_d: f64,
    /// Extreme eigenvalues of `Q_sigma = (1/d) sum_{k > n-d} Pi({sigma(k)})`.
    pub q_sigma_min: f64,
    pub q_sigma_max: f64,
}

/// `(E_min, E_max)` of `Q`.
pub fn mean_bounds(set: &ReferenceSet) -> Result<(f64, f64)> {
    let eig = set.average_projector(set.full())?.eig();
    Ok((eig.min(), eig.max()))
}

/// `(E_min(sigma), E_max(sigma))` of `Q_sigma`, built from the top `d` of `sigma`.
pub fn ranked_bounds(set: &ReferenceSet, sigma: &Permutation) -> Result<(f64, f64)> {
    let n = set.n();
    let top = Subset::from_indices(sigma.indices()[n - set.d()..].iter().copied());
    let eig = set.average_projector(top)?.eig();
    Ok((eig.min(), eig.max()))
}

/// Fails with `BoundViolation` when the mean probability lies outside the
/// spectrum of `Q`; no density matrix can produce such data.
pub fn check_mean_bound(set: &ReferenceSet, p: &ProbabilityVector) -> Result<(f64, f64, f64)> {
    check_sizes(set, p)?;
    let (lo, hi) = mean_bounds(set)?;
    let mean = p.mean();
    let slack = set.tolerances().bound;
    if mean < lo - slack || mean > hi + slack {
        return Err(ChoquetError::BoundViolation(format!(
            "mean probability {mean} outside [E_min, E_max] = [{lo}, {hi}]"
        )));
    }
    Ok((mean, lo, hi))
}

/// `R = C / Tr C`.
pub fn normalize(c: &HermitianMatrix) -> Result<DensityMatrix> {
    let t = c.trace();
    if t <= ZERO_TRACE_TOL {
        return Err(ChoquetError::ZeroTrace(t));
    }
    let r = c.scale(1.0 / t);
    // C is positive semi-definite whenever it comes from `choquet`; other
    // inputs are still checked.
    DensityMatrix::new(r)
}

/// `P(j) = Tr[R Pi({j})]`.
pub fn induced_probabilities(set: &ReferenceSet, r: &DensityMatrix) -> Result<Vec<f64>> {
    if r.dim() != set.d() {
        return Err(ChoquetError::DimensionMismatch { expected: set.d(), found: r.dim() });
    }
    (0..set.n())
        .map(|j| trace_product(r.as_hermitian(), &set.single(j)?))
        .collect()
}

/// `P[sigma(n)] >= P(i)` for all `i`, up to `tol.bound`.
pub fn check_maximality(induced: &[f64], ranking: &RankingPermutation, tol: &Tolerances) -> Result<()> {
    let top = ranking.top();
    let top_value = induced[top];
    for (i, &v) in induced.iter().enumerate() {
        if v > top_value + tol.bound {
            return Err(ChoquetError::MaximalityViolation {
                top: top + 1,
                top_value,
                index: i + 1,
                value: v,
            });
        }
    }
    Ok(())
}

/// `(1/n) sum_j (P(j) - p(j))`.
pub fn approximation_error(p: &ProbabilityVector, induced: &[f64]) -> Result<f64> {
    if p.n() != induced.len() {
        return Err(ChoquetError::SizeMismatch { expected: p.n(), found: induced.len() });
    }
    Ok(induced.iter().zip(p.values()).map(|(a, b)| a - b).sum::<f64>() / p.n() as f64)
}

/// `sum_{A != empty} D(A) min_{i in A} p(i)`.
pub fn choquet_via_mobius_operators(set: &ReferenceSet, p: &ProbabilityVector) -> Result<HermitianMatrix> {
    check_enumerable(set.n())?;
    check_sizes(set, p)?;
    let ops = set.mobius_operators_all()?;
    let mut mins = vec![f64::INFINITY; ops.len()];
    let mut acc = HermitianMatrix::zeros(set.d());
    for mask in 1..ops.len() {
        let low = mask.trailing_zeros() as usize;
        mins[mask] = mins[mask & (mask - 1)].min(p.get(low));
        acc = &acc + &ops[mask].scale(mins[mask]);
    }
    Ok(acc)
}

/// Same top-ranked index; with ties at the top, the top groups must meet.
pub fn weakly_comonotonic(r1: &RankingPermutation, r2: &RankingPermutation) -> Result<bool> {
    if r1.n() != r2.n() {
        return Err(ChoquetError::SizeMismatch { expected: r1.n(), found: r2.n() });
    }
    Ok(r1.top_group().iter().any(|i| r2.top_group().contains(i)))
}

/// Everything computed from one probability vector.
#[derive(Debug, Clone)]
pub struct ChoquetReport {
    pub p: ProbabilityVector,
    pub ranking: RankingPermutation,
    pub c: HermitianMatrix,
    pub trace_c: f64,
    pub r: DensityMatrix,
    /// `P(j) = Tr[R Pi({j})]`.
    pub induced: Vec<f64>,
    pub induced_ranking: RankingPermutation,
    /// Mean of `P(j) - p(j)`.
    pub error: f64,
    pub bounds: Bounds,
    /// `Tr[C Pi({sigma(n)})]`, equal to `p[sigma(n)]`.
    pub top_overlap: f64,
    pub weakly_comonotonic: bool,
}

/// Full pipeline: bounds, ranking, `C`, `R`, induced probabilities and error.
pub fn choquet(set: &ReferenceSet, p: &ProbabilityVector) -> Result<ChoquetReport> {
    let tol = *set.tolerances();
    let (mean_p, q_min, q_max) = check_mean_bound(set, p)?;
    let ranking = ranking_with(p, &tol);
    let chain = cumulative_chain(set, ranking.sigma())?;

    let c = choquet_from_chain(&chain, p);
    let telescoped = choquet_telescoped_from_chain(&chain, p);
    let gap = c.max_abs_diff(&telescoped);
    if gap > FORM_AGREEMENT_TOL {
        return Err(ChoquetError::ConsistencyFailure {
            what: "derivative and telescoped forms of C disagree",
            residual: gap,
        });
    }

    let trace_c = c.trace();
    let d = set.d() as f64;
    let (q_sigma_min, q_sigma_max) = ranked_bounds(set, ranking.sigma())?;
    let trace_c_over_d = trace_c / d;
    if trace_c_over_d < q_sigma_min - tol.bound || trace_c_over_d > q_sigma_max + tol.bound {
        return Err(ChoquetError::BoundViolation(format!(
            "Tr[C]/d = {trace_c_over_d} outside [E_min(sigma), E_max(sigma)] = [{q_sigma_min}, {q_sigma_max}]"
        )));
    }

    let r = normalize(&c)?;
    let induced = induced_probabilities(set, &r)?;
    check_maximality(&induced, &ranking, &tol)?;
    let error = approximation_error(p, &induced)?;
    let induced_ranking = ranking_with(&ProbabilityVector::new(induced.clone())?, &tol);
    let weak = weakly_comonotonic(&ranking, &induced_ranking)?;
    let top_overlap = trace_product(&c, &set.single(ranking.top())?)?;

    Ok(ChoquetReport {
        p: p.clone(),
        ranking,
        c,
        trace_c,
        r,
        induced,
        induced_ranking,
        error,
        bounds: Bounds {
            mean_p,
            q_min,
            q_max,
            trace_c_over_d,
            q_sigma_min,
            q_sigma_max,
        },
        top_overlap,
        weakly_comonotonic: weak,
    })
}

/// Runs [`choquet`] on the probabilities of an explicit state.
pub fn choquet_of_state(set: &ReferenceSet, rho: &DensityMatrix) -> Result<ChoquetReport> {
    choquet(set, &ProbabilityVector::from_state(set, rho)?)
}
