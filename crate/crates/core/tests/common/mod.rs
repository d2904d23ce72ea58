//! Random instance generators and independent oracles shared by the
//! integration tests. Nothing here calls into the code paths it checks.
#![allow(dead_code)]

use choquet_core::quantum::ranking;
use choquet_core::{Capacity, Complex64, DensityMatrix, HermitianMatrix, ProbabilityVector, ReferenceSet, Subset};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

pub fn example_set() -> ReferenceSet {
    let h = FRAC_1_SQRT_2;
    ReferenceSet::from_real(
        3,
        &[
            &[1.0, 0.0, 0.0],
            &[h, 0.0, h],
            &[0.0, h, h],
            &[2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0],
        ],
    )
    .unwrap()
}

/// mu(1)=0.05 mu(2)=0.1 mu(3)=0.15 mu(12)=0.2 mu(13)=0.25 mu(23)=0.2 mu(123)=0.3
pub fn students() -> Capacity {
    Capacity::new(3, vec![0.0, 0.05, 0.1, 0.2, 0.15, 0.25, 0.2, 0.3]).unwrap()
}

pub fn real_matrix(rows: &[&[f64]]) -> HermitianMatrix {
    HermitianMatrix::from_real_rows(rows).unwrap()
}

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, d: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| gaussian_complex(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Random reference set whose `d`-subsets are comfortably well conditioned.
pub fn random_reference_set<R: Rng>(rng: &mut R, d: usize, n: usize) -> ReferenceSet {
    loop {
        let vectors: Vec<Vec<Complex64>> = (0..n)
            .map(|_| random_unit_vector(rng, d).iter().copied().collect())
            .collect();
        if let Ok(set) = ReferenceSet::new(d, vectors) {
            if set.certificate().weakest.min_singular_value > 1e-2 {
                return set;
            }
        }
    }
}

/// Full-rank random density matrix `G G^dagger / Tr`.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let m = &g * g.adjoint();
    let tr: f64 = (0..d).map(|i| m[(i, i)].re).sum();
    let h = HermitianMatrix::new((&m + m.adjoint()) * Complex64::new(0.5 / tr, 0.0)).unwrap();
    DensityMatrix::new(h).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> HermitianMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    HermitianMatrix::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

/// Random unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    g.qr().q()
}

/// `U diag(values) U^dagger`.
pub fn hermitian_with_spectrum<R: Rng>(rng: &mut R, values: &[f64]) -> HermitianMatrix {
    let d = values.len();
    let u = random_unitary(rng, d);
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(d, values.iter().map(|&x| Complex64::new(x, 0.0))));
    let m = &u * diag * u.adjoint();
    HermitianMatrix::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

/// Monotone capacity built by accumulating non-negative increments.
pub fn random_capacity<R: Rng>(rng: &mut R, n: usize) -> Capacity {
    let mut values = vec![0.0; 1 << n];
    for mask in 1..(1usize << n) {
        let floor = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| values[mask & !(1 << i)])
            .fold(0.0, f64::max);
        values[mask] = floor + rng.random_range(0.0..1.0);
    }
    Capacity::new(n, values).unwrap()
}

/// Choquet integral as `int_0^inf mu({f >= t}) dt`, summed over level sets.
pub fn level_set_integral(f: &[f64], mu: &Capacity) -> f64 {
    let mut levels: Vec<f64> = f.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut prev = 0.0;
    let mut total = 0.0;
    for &t in &levels {
        let upper = Subset::from_indices((0..f.len()).filter(|&i| f[i] >= t));
        total += (t - prev) * mu.value(upper);
        prev = t;
    }
    total
}

/// `sum_{B subset A} (-1)^{|A|-|B|} mu(B)` by direct enumeration.
pub fn brute_force_mobius(mu: &Capacity, a: Subset) -> f64 {
    Subset::all(mu.n())
        .filter(|b| b.is_subset_of(a))
        .map(|b| {
            let sign = if (a.len() - b.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * mu.value(b)
        })
        .sum()
}

/// `A (A^dagger A)^-1 A^dagger` with an explicit inverse.
pub fn gram_projector(set: &ReferenceSet, a: Subset) -> HermitianMatrix {
    let d = set.d();
    if a.is_empty() {
        return HermitianMatrix::zeros(d);
    }
    let cols: Vec<_> = a.indices().map(|i| set.vectors()[i].clone()).collect();
    let m = DMatrix::from_columns(&cols);
    let gram = m.adjoint() * &m;
    let inv = gram.try_inverse().expect("independent columns");
    let p = &m * inv * m.adjoint();
    HermitianMatrix::new((&p + p.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

/// Random state whose probability vector has a strict ranking.
pub fn strict_state<R: Rng>(rng: &mut R, set: &ReferenceSet) -> DensityMatrix {
    loop {
        let rho = random_density(rng, set.d());
        let p = ProbabilityVector::from_state(set, &rho).unwrap();
        if ranking(&p).is_strict() {
            return rho;
        }
    }
}

/// A state sharing the strict ranking of `anchor`: pull a random state
/// towards `anchor`, halving the distance until the orderings agree.
pub fn comonotonic_partner<R: Rng>(rng: &mut R, set: &ReferenceSet, anchor: &DensityMatrix) -> DensityMatrix {
    let target = ranking(&ProbabilityVector::from_state(set, anchor).unwrap());
    assert!(target.is_strict());
    let other = random_density(rng, set.d());
    let mut eps = 1.0;
    loop {
        let candidate = anchor.mix(&other, 1.0 - eps).unwrap();
        let r = ranking(&ProbabilityVector::from_state(set, &candidate).unwrap());
        if r.is_strict() && r.sigma() == target.sigma() {
            return candidate;
        }
        eps *= 0.5;
    }
}
