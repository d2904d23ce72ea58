//! Capacities on a finite index set and their Choquet integral.
//!
//! A capacity assigns a non-negative value to every subset of `{1..n}`,
//! vanishes on the empty set and is monotone under inclusion. It need not
//! be additive and need not be normalized to `mu(Omega) = 1`.
//!
//! The integral of a non-negative function `f` ranks its values ascending
//! with a permutation `tau` and weighs them with the discrete derivative of
//! the cumulative function `m_tau(k) = mu({tau(k), ..., tau(n)})`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ChoquetError, Result};
use crate::permutation::Permutation;
use crate::subset::{check_enumerable, Subset};

/// Largest `n` for which monotonicity is checked on every covering pair.
/// Above it, random maximal chains are checked instead.
pub const EXHAUSTIVE_MONOTONE_N: usize = 16;

const SAMPLED_CHAINS: usize = 4096;

/// Slack on the monotonicity and `mu(empty) = 0` checks.
const CAPACITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    n: usize,
    /// Indexed by subset mask.
    values: Vec<f64>,
}

impl Capacity {
    /// `values[mask]` is `mu` of the subset encoded by `mask`.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_enumerable(n)?;
        if n == 0 {
            return Err(ChoquetError::InvalidCapacity("empty index set".into()));
        }
        if values.len() != 1 << n {
            return Err(ChoquetError::InvalidCapacity(format!(
                "expected {} subset values for n = {n}, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some((mask, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(ChoquetError::InvalidCapacity(format!(
                "mu{} = {v} is not a finite non-negative number",
                Subset::from_mask(mask as u32)
            )));
        }
        if values[0].abs() > CAPACITY_TOL {
            return Err(ChoquetError::InvalidCapacity(format!("mu(empty) = {} != 0", values[0])));
        }
        let cap = Capacity { n, values };
        cap.check_monotone()?;
        Ok(cap)
    }

    pub fn from_fn(n: usize, f: impl Fn(Subset) -> f64) -> Result<Self> {
        check_enumerable(n)?;
        Self::new(n, Subset::all(n).map(f).collect())
    }

    /// Additive capacity `mu(A) = sum_{i in A} weights[i]`.
    pub fn additive(weights: &[f64]) -> Result<Self> {
        Self::from_fn(weights.len(), |s| s.indices().map(|i| weights[i]).sum())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, subset: Subset) -> f64 {
        self.values[subset.mask() as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `mu(Omega)`.
    pub fn total(&self) -> f64 {
        self.value(Subset::full(self.n))
    }

    pub fn is_additive(&self, tol: f64) -> bool {
        let full = Subset::full(self.n);
        full.subsets().all(|s| {
            let sum: f64 = s.indices().map(|i| self.value(Subset::singleton(i))).sum();
            (self.value(s) - sum).abs() <= tol
        })
    }

    fn check_monotone(&self) -> Result<()> {
        let violation = |a: Subset, b: Subset| {
            ChoquetError::InvalidCapacity(format!(
                "not monotone: mu{a} = {} > mu{b} = {}",
                self.value(a),
                self.value(b)
            ))
        };
        if self.n <= EXHAUSTIVE_MONOTONE_N {
            for a in Subset::all(self.n) {
                for i in 0..self.n {
                    if !a.contains(i) {
                        let b = a.insert(i);
                        if self.value(a) > self.value(b) + CAPACITY_TOL {
                            return Err(violation(a, b));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c4a1);
            let mut order: Vec<usize> = (0..self.n).collect();
            for _ in 0..SAMPLED_CHAINS {
                order.shuffle(&mut rng);
                let mut a = Subset::EMPTY;
                for &i in &order {
                    let b = a.insert(i);
                    if self.value(a) > self.value(b) + CAPACITY_TOL {
                        return Err(violation(a, b));
                    }
                    a = b;
                }
            }
        }
        Ok(())
    }
}

/// Non-negative function on `{1..n}` together with its ranking permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFunction {
    values: Vec<f64>,
    tau: Permutation,
}

impl RankedFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(ChoquetError::NegativeValue { index: i + 1, value: v });
        }
        let tau = Permutation::ascending(&values);
        Ok(RankedFunction { values, tau })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tau(&self) -> &Permutation {
        &self.tau
    }

    /// Values in ranked order `f[tau(1)] <= ... <= f[tau(n)]`.
    pub fn ranked_values(&self) -> Vec<f64> {
        self.tau.indices().iter().map(|&i| self.values[i]).collect()
    }

    /// A function with repeated values sits on the boundary between
    /// comonotone classes.
    pub fn is_boundary(&self) -> bool {
        self.ranked_values().windows(2).any(|w| w[0] == w[1])
    }

    /// Pointwise `a f + b g`.
    pub fn combine(&self, a: f64, other: &RankedFunction, b: f64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(ChoquetError::SizeMismatch { expected: self.n(), found: other.n() });
        }
        Self::new(self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect())
    }
}

/// `m_sigma(k) = mu({sigma(k), ..., sigma(n)})` for `k = 1..n`.
pub fn cumulative(mu: &Capacity, sigma: &Permutation) -> Result<Vec<f64>> {
    if sigma.len() != mu.n() {
        return Err(ChoquetError::InvalidPermutation(format!(
            "permutation of {} elements used with capacity on n = {}",
            sigma.len(),
            mu.n()
        )));
    }
    let n = mu.n();
    let mut m = vec![0.0; n];
    let mut tail = Subset::EMPTY;
    for k in (0..n).rev() {
        tail = tail.insert(sigma.at(k));
        m[k] = mu.value(tail);
    }
    Ok(m)
}

/// `nu(i) = m(i) - m(i+1)`, `nu(n) = m(n)`.
pub fn discrete_derivative(m: &[f64]) -> Vec<f64> {
    let n = m.len();
    (0..n)
        .map(|i| if i + 1 < n { m[i] - m[i + 1] } else { m[i] })
        .collect()
}

/// `sum_i f[tau(i)] nu_tau(i)` with `f`'s own ranking permutation.
pub fn choquet_integral(f: &RankedFunction, mu: &Capacity) -> Result<f64> {
    if f.n() != mu.n() {
        return Err(ChoquetError::SizeMismatch { expected: mu.n(), found: f.n() });
    }
    let nu = discrete_derivative(&cumulative(mu, f.tau())?);
    Ok(f.ranked_values().iter().zip(&nu).map(|(x, w)| x * w).sum())
}

/// Telescoped form `f[tau(1)] m(1) + sum_k (f[tau(k)] - f[tau(k-1)]) m(k)`.
pub fn choquet_integral_telescoped(f: &RankedFunction, mu: &Capacity) -> Result<f64> {
    if f.n() != mu.n() {
        return Err(ChoquetError::SizeMismatch { expected: mu.n(), found: f.n() });
    }
    let m = cumulative(mu, f.tau())?;
    let ranked = f.ranked_values();
    let mut total = 0.0;
    let mut prev = 0.0;
    for (x, mk) in ranked.iter().zip(&m) {
        total += (x - prev) * mk;
        prev = *x;
    }
    Ok(total)
}

/// Mobius transform `d(A) = sum_{B subset A} (-1)^{|A|-|B|} mu(B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusTransform {
    n: usize,
    values: Vec<f64>,
}

impl MobiusTransform {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, subset: Subset) -> f64 {
        self.values[subset.mask() as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Inverse transform `mu(A) = sum_{B subset A} d(B)`, indexed by mask.
    pub fn inverse(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        zeta_in_place(&mut v, self.n);
        v
    }
}

/// Subset-sum transform over the Boolean lattice: `v[A] <- sum_{B subset A} v[B]`.
fn zeta_in_place(v: &mut [f64], n: usize) {
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..v.len() {
            if mask & b != 0 {
                v[mask] += v[mask ^ b];
            }
        }
    }
}

fn mobius_in_place(v: &mut [f64], n: usize) {
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..v.len() {
            if mask & b != 0 {
                v[mask] -= v[mask ^ b];
            }
        }
    }
}

pub fn mobius(mu: &Capacity) -> Result<MobiusTransform> {
    check_enumerable(mu.n())?;
    let mut values = mu.values.clone();
    mobius_in_place(&mut values, mu.n);
    Ok(MobiusTransform { n: mu.n, values })
}

/// `sum_{A subset Omega} d(A) min_{i in A} f(i)`.
pub fn choquet_via_mobius(f: &RankedFunction, mob: &MobiusTransform) -> Result<f64> {
    check_enumerable(mob.n())?;
    if f.n() != mob.n() {
        return Err(ChoquetError::SizeMismatch { expected: mob.n(), found: f.n() });
    }
    let n = mob.n();
    // min over each subset, built incrementally from the subset without its lowest bit
    let mut mins = vec![f64::INFINITY; 1 << n];
    let mut total = 0.0;
    for mask in 1..(1usize << n) {
        let low = mask.trailing_zeros() as usize;
        mins[mask] = mins[mask & (mask - 1)].min(f.values()[low]);
        total += mob.values[mask] * mins[mask];
    }
    Ok(total)
}

/// True when no pair of indices is ordered oppositely by `f` and `g`.
pub fn are_comonotonic(f: &RankedFunction, g: &RankedFunction) -> Result<bool> {
    if f.n() != g.n() {
        return Err(ChoquetError::SizeMismatch { expected: f.n(), found: g.n() });
    }
    let (fv, gv) = (f.values(), g.values());
    for i in 0..f.n() {
        for j in (i + 1)..f.n() {
            if (fv[i] - fv[j]) * (gv[i] - gv[j]) < 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
