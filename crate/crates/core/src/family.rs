//! Hermitian trace-one matrices consistent with measured probabilities.
//!
//! `p(i) = Tr[rho Pi({i})]` is an affine map of the `d^2 - 1` real
//! coordinates of a Hermitian, trace-one `rho`. For `n < d^2 - 1` the
//! solutions form an affine family; only part of it is positive
//! semi-definite, which this module can probe by sampling.
//!
//! Coordinates are ordered as: diagonal entries `rho_11 .. rho_(d-1)(d-1)`
//! (the last follows from the trace), then `Re rho_jk` for `j < k` row-major,
//! then `Im rho_jk` in the same order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ChoquetError, Result};
use crate::hermitian::{is_psd_with, trace_product, DensityMatrix, HermitianMatrix};
use crate::quantum::{choquet, ranking_with, weakly_comonotonic, ChoquetReport, ProbabilityVector};
use crate::reference_set::ReferenceSet;
use crate::tol::Tolerances;

/// Largest least-squares residual accepted as a consistent system.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_RTOL: f64 = 1e-10;

/// Half-width of the sampling box around the particular solution.
pub const SAMPLE_HALF_WIDTH: f64 = 1.0;

/// Number of PSD witnesses kept by [`psd_members`].
pub const MAX_WITNESSES: usize = 5;

fn upper_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |j| ((j + 1)..d).map(move |k| (j, k)))
}

/// Real coordinates of a Hermitian trace-one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianParameterization {
    d: usize,
    coords: Vec<f64>,
}

impl HermitianParameterization {
    pub fn coordinate_count(d: usize) -> usize {
        d * d - 1
    }

    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(ChoquetError::DimensionMismatch { expected: 1, found: 0 });
        }
        if coords.len() != Self::coordinate_count(d) {
            return Err(ChoquetError::DimensionMismatch {
                expected: Self::coordinate_count(d),
                found: coords.len(),
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(ChoquetError::NonFinite);
        }
        Ok(HermitianParameterization { d, coords })
    }

    /// Fails unless `m` has unit trace.
    pub fn from_matrix(m: &HermitianMatrix) -> Result<Self> {
        let d = m.dim();
        let trace = m.trace();
        if (trace - 1.0).abs() > Tolerances::DEFAULT.trace {
            return Err(ChoquetError::NotDensityMatrix(format!("trace {trace} != 1")));
        }
        let mut coords: Vec<f64> = (0..d - 1).map(|i| m.entry(i, i).re).collect();
        coords.extend(upper_pairs(d).map(|(j, k)| m.entry(j, k).re));
        coords.extend(upper_pairs(d).map(|(j, k)| m.entry(j, k).im));
        Ok(HermitianParameterization { d, coords })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_matrix(&self) -> HermitianMatrix {
        let d = self.d;
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        let mut last = 1.0;
        for i in 0..d - 1 {
            m[(i, i)] = Complex64::new(self.coords[i], 0.0);
            last -= self.coords[i];
        }
        m[(d - 1, d - 1)] = Complex64::new(last, 0.0);
        let pairs = d * (d - 1) / 2;
        for (k, (r, c)) in upper_pairs(d).enumerate() {
            let z = Complex64::new(self.coords[d - 1 + k], self.coords[d - 1 + pairs + k]);
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
        HermitianMatrix::symmetrized(m)
    }
}

/// Traceless Hermitian direction matrices, one per coordinate.
fn coordinate_directions(d: usize) -> Vec<HermitianMatrix> {
    (0..HermitianParameterization::coordinate_count(d))
        .map(|k| {
            let mut coords = vec![0.0; HermitianParameterization::coordinate_count(d)];
            coords[k] = 1.0;
            let base = HermitianParameterization { d, coords: vec![0.0; coords.len()] }.to_matrix();
            let moved = HermitianParameterization { d, coords }.to_matrix();
            &moved - &base
        })
        .collect()
}

/// `particular + span(basis)`, all in coordinate space.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFamily {
    pub d: usize,
    pub particular: Vec<f64>,
    /// Orthonormal basis of the null space of the constraint map.
    pub basis: Vec<Vec<f64>>,
    pub rank: usize,
    /// Max-norm residual of the particular solution.
    pub residual: f64,
}

impl AffineFamily {
    pub fn free_dimension(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `particular + sum_k t_k basis_k`.
    pub fn coordinates(&self, t: &[f64]) -> Result<HermitianParameterization> {
        if t.len() != self.basis.len() {
            return Err(ChoquetError::DimensionMismatch {
                expected: self.basis.len(),
                found: t.len(),
            });
        }
        let mut x = self.particular.clone();
        for (tk, b) in t.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += tk * bi;
            }
        }
        HermitianParameterization::new(self.d, x)
    }

    pub fn member(&self, t: &[f64]) -> Result<HermitianMatrix> {
        Ok(self.coordinates(t)?.to_matrix())
    }
}

/// Solves `Tr[rho Pi({i})] = p(i)` over Hermitian trace-one `rho`.
pub fn solve_family(set: &ReferenceSet, p: &ProbabilityVector) -> Result<AffineFamily> {
    let (n, d) = (set.n(), set.d());
    if p.n() != n {
        return Err(ChoquetError::SizeMismatch { expected: n, found: p.n() });
    }
    let m = HermitianParameterization::coordinate_count(d);
    let singles: Vec<HermitianMatrix> = (0..n).map(|i| set.single(i)).collect::<Result<_>>()?;

    // constant part comes from the (d, d) entry carrying the trace
    let mut offset = HermitianMatrix::zeros(d).as_matrix().clone();
    offset[(d - 1, d - 1)] = Complex64::new(1.0, 0.0);
    let offset = HermitianMatrix::symmetrized(offset);

    let directions = coordinate_directions(d);
    let rows = n.max(m);
    let mut a = DMatrix::<f64>::zeros(rows, m);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (i, pi) in singles.iter().enumerate() {
        for (k, dir) in directions.iter().enumerate() {
            a[(i, k)] = trace_product(dir, pi)?;
        }
        rhs[i] = p.get(i) - trace_product(&offset, pi)?;
    }

    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_RTOL * largest.max(1.0);

    let mut x = DVector::<f64>::zeros(m);
    let mut basis = Vec::new();
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let v = v_t.row(k).transpose();
        if s > cutoff {
            rank += 1;
            x += v * (u.column(k).dot(&rhs) / s);
        } else {
            basis.push(v.iter().copied().collect::<Vec<_>>());
        }
    }
    // the padded square SVD yields exactly m right singular vectors
    debug_assert_eq!(rank + basis.len(), m);

    let residual = (&a * &x - &rhs).amax();
    if residual > RESIDUAL_TOL {
        return Err(ChoquetError::InconsistentSystem { residual });
    }
    Ok(AffineFamily {
        d,
        particular: x.iter().copied().collect(),
        basis,
        rank,
        residual,
    })
}

/// Outcome of box sampling for positive semi-definite family members.
#[derive(Debug, Clone)]
pub struct PsdSearch {
    pub samples: usize,
    pub psd_count: usize,
    pub fraction: f64,
    pub witnesses: Vec<DensityMatrix>,
    /// Largest minimum eigenvalue among all samples.
    pub best_min_eigenvalue: f64,
}

/// Deterministic sample stream; sample 0 is the box centre.
fn sample_members(family: &AffineFamily, samples: usize, seed: u64) -> impl Iterator<Item = Result<HermitianMatrix>> + '_ {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = family.free_dimension();
    (0..samples).map(move |s| {
        let t: Vec<f64> = if s == 0 {
            vec![0.0; k]
        } else {
            (0..k)
                .map(|_| rng.random_range(-SAMPLE_HALF_WIDTH..=SAMPLE_HALF_WIDTH))
                .collect()
        };
        family.member(&t)
    })
}

pub fn psd_members(family: &AffineFamily, samples: usize, seed: u64) -> Result<PsdSearch> {
    let tol = Tolerances::DEFAULT;
    let mut psd_count = 0;
    let mut witnesses = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for member in sample_members(family, samples, seed) {
        let member = member?;
        let check = is_psd_with(&member, &tol);
        best = best.max(check.min_eigenvalue);
        if check.psd {
            psd_count += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(DensityMatrix::new_unchecked(member));
            }
        }
    }
    Ok(PsdSearch {
        samples,
        psd_count,
        fraction: if samples == 0 { 0.0 } else { psd_count as f64 / samples as f64 },
        witnesses,
        best_min_eigenvalue: best,
    })
}

/// Ranking of one sampled density matrix and its relation to `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberRanking {
    /// 1-based `sigma` of the member's own probabilities.
    pub sigma: Vec<usize>,
    pub weakly_comonotonic: bool,
}

#[derive(Debug, Clone)]
pub struct FamilyComparison {
    pub report: ChoquetReport,
    pub search: PsdSearch,
    pub members: Vec<MemberRanking>,
    /// Share of PSD members weakly comonotonic with `R`; `None` without PSD members.
    pub agreement: Option<f64>,
}

/// Samples PSD family members and checks each against the ranking induced by `R`.
pub fn compare_with_choquet(
    set: &ReferenceSet,
    p: &ProbabilityVector,
    family: &AffineFamily,
    samples: usize,
    seed: u64,
) -> Result<FamilyComparison> {
    let tol = *set.tolerances();
    let report = choquet(set, p)?;
    let search = psd_members(family, samples, seed)?;
    let mut members = Vec::new();
    for member in sample_members(family, samples, seed) {
        let member = member?;
        if !is_psd_with(&member, &Tolerances::DEFAULT).psd {
            continue;
        }
        let rho = DensityMatrix::new_unchecked(member);
        let own = ranking_with(&ProbabilityVector::from_state(set, &rho)?, &tol);
        members.push(MemberRanking {
            sigma: own.sigma().labels(),
            weakly_comonotonic: weakly_comonotonic(&own, &report.induced_ranking)?,
        });
    }
    let agreement = if members.is_empty() {
        None
    } else {
        Some(members.iter().filter(|m| m.weakly_comonotonic).count() as f64 / members.len() as f64)
    };
    Ok(FamilyComparison { report, search, members, agreement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn example_set() -> ReferenceSet {
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

    fn example_p() -> ProbabilityVector {
        ProbabilityVector::new(vec![0.2, 0.7, 0.4, 0.5]).unwrap()
    }

    #[test]
    fn coordinate_order_matches_layout() {
        // (rho1, rho2, a1, a2, a3, b1, b2, b3)
        let x = HermitianParameterization::new(3, vec![0.2, 0.3, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06]).unwrap();
        let m = x.to_matrix();
        assert_eq!(m.entry(0, 1), Complex64::new(0.01, 0.04));
        assert_eq!(m.entry(0, 2), Complex64::new(0.02, 0.05));
        assert_eq!(m.entry(1, 2), Complex64::new(0.03, 0.06));
        assert_eq!(m.entry(2, 1), Complex64::new(0.03, -0.06));
        assert!((m.entry(2, 2).re - 0.5).abs() < 1e-15);
        assert_eq!(HermitianParameterization::from_matrix(&m).unwrap(), x);
    }

    #[test]
    fn parameterization_rejects_bad_input() {
        assert!(HermitianParameterization::new(2, vec![0.1, 0.2]).is_err());
        assert!(HermitianParameterization::from_matrix(&HermitianMatrix::identity(2)).is_err());
    }

    #[test]
    fn example_family_matches_hand_solution() {
        let set = example_set();
        let family = solve_family(&set, &example_p()).unwrap();
        assert_eq!(family.free_dimension(), 4);
        assert_eq!(family.rank, 4);
        for t in [[0.3, -0.2, 0.9, 0.1], [-1.0, 0.5, 0.0, 0.7]] {
            let x = family.coordinates(&t).unwrap();
            let c = x.coords();
            let (rho1, rho2, a1, a2, a3) = (c[0], c[1], c[2], c[3], c[4]);
            assert!((rho1 - 0.2).abs() < 1e-9);
            assert!(a3.abs() < 1e-9);
            assert!((a1 + (1.1 + rho2) / 4.0).abs() < 1e-9);
            assert!((a2 - (0.4 + rho2) / 2.0).abs() < 1e-9);
            let m = x.to_matrix();
            for i in 0..4 {
                let pi = trace_product(&m, &set.single(i).unwrap()).unwrap();
                assert!((pi - example_p().get(i)).abs() < 1e-9);
            }
            assert!((m.trace() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn example_family_has_no_psd_member() {
        // The best achievable minimum eigenvalue over the whole family is
        // about -0.18, so the example probabilities admit no density matrix.
        let family = solve_family(&example_set(), &example_p()).unwrap();
        let search = psd_members(&family, 2000, 7).unwrap();
        assert_eq!(search.psd_count, 0);
        assert!(search.witnesses.is_empty());
        assert!(search.best_min_eigenvalue < -0.18);
        let cmp = compare_with_choquet(&example_set(), &example_p(), &family, 500, 7).unwrap();
        assert_eq!(cmp.agreement, None);
        assert!(cmp.report.weakly_comonotonic);
    }

    #[test]
    fn maximally_mixed_family() {
        let set = ReferenceSet::orthonormal_basis(3).unwrap();
        let p = ProbabilityVector::new(vec![1.0 / 3.0; 3]).unwrap();
        let family = solve_family(&set, &p).unwrap();
        assert_eq!(family.free_dimension(), 6);
        let centre = family.member(&[0.0; 6]).unwrap();
        assert!(centre.max_abs_diff(&HermitianMatrix::identity(3).scale(1.0 / 3.0)) < 1e-12);
        let search = psd_members(&family, 200, 1).unwrap();
        assert!(search.fraction > 0.0);
        let cmp = compare_with_choquet(&set, &p, &family, 200, 1).unwrap();
        assert_eq!(cmp.agreement, Some(1.0));
    }

    #[test]
    fn zero_probability_propagates_to_witnesses() {
        let set = example_set();
        // a pure state orthogonal to |1>
        let rho = DensityMatrix::pure(&DVector::from_vec(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ]));
        let p = ProbabilityVector::from_state(&set, &rho).unwrap();
        assert!(p.get(0).abs() < 1e-15);
        let family = solve_family(&set, &p).unwrap();
        let search = psd_members(&family, 500, 3).unwrap();
        for w in &search.witnesses {
            assert!(trace_product(w.as_hermitian(), &set.single(0).unwrap()).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let family = solve_family(&example_set(), &example_p()).unwrap();
        let a = psd_members(&family, 100, 11).unwrap();
        let b = psd_members(&family, 100, 11).unwrap();
        assert_eq!(a.best_min_eigenvalue, b.best_min_eigenvalue);
    }

    #[test]
    fn overdetermined_inconsistent_system() {
        // n = 5 > d^2 - 1 = 3 in d = 2: generic data has no Hermitian solution
        let vs: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let t = k as f64 * 0.6;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        let set = ReferenceSet::from_real(2, &refs).unwrap();
        let p = ProbabilityVector::new(vec![0.9, 0.1, 0.9, 0.1, 0.9]).unwrap();
        assert!(matches!(solve_family(&set, &p), Err(ChoquetError::InconsistentSystem { .. })));
    }
}
