//! Reference sets of non-orthogonal states and their span projectors.
//!
//! A reference set holds `n >= d` unit vectors in `C^d` such that every
//! `d` of them are linearly independent. For a subset `A` of labels,
//! `Pi(A)` projects onto the span of the vectors in `A`; it equals the
//! identity once `|A| >= d`. Projectors of nested subsets are reused
//! heavily, so they are memoized per set behind a read-mostly lock.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{ChoquetError, Result};
use crate::hermitian::{max_abs, ComplexMatrix, HermitianMatrix};
use crate::subset::{check_enumerable, Subset};
use crate::tol::Tolerances;

/// Vectors within this distance of unit norm are rescaled on ingestion.
pub const NORMALIZATION_SLACK: f64 = 1e-6;

/// Smallest singular value of the matrix formed by one `d`-subset.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetConditioning {
    pub subset: Subset,
    pub min_singular_value: f64,
}

/// Evidence that every `d` vectors of a set are independent.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub d: usize,
    pub n: usize,
    /// One entry per `d`-subset, in mask order.
    pub subsets: Vec<SubsetConditioning>,
    pub weakest: SubsetConditioning,
    pub warnings: Vec<String>,
}

/// Checks a candidate set without building a [`ReferenceSet`].
pub fn certify(d: usize, vectors: &[DVector<Complex64>], tol: &Tolerances) -> Result<Certificate> {
    let n = vectors.len();
    if d == 0 {
        return Err(ChoquetError::InvalidReferenceSet("dimension must be positive".into()));
    }
    if n < d {
        return Err(ChoquetError::InvalidReferenceSet(format!("need n >= d, got n = {n}, d = {d}")));
    }
    check_enumerable(n)?;
    if let Some(bad) = vectors.iter().find(|v| v.len() != d) {
        return Err(ChoquetError::DimensionMismatch { expected: d, found: bad.len() });
    }

    let mut subsets = Vec::new();
    for s in Subset::of_size(n, d) {
        let cols: Vec<_> = s.indices().map(|i| vectors[i].clone()).collect();
        let sv = ComplexMatrix::from_columns(&cols)
            .into_inner()
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        subsets.push(SubsetConditioning { subset: s, min_singular_value: sv });
    }
    let weakest = subsets
        .iter()
        .min_by(|a, b| a.min_singular_value.total_cmp(&b.min_singular_value))
        .cloned()
        .expect("n >= d yields at least one subset");
    if weakest.min_singular_value <= tol.rank {
        return Err(ChoquetError::DegenerateSet {
            subset: weakest.subset,
            singular_value: weakest.min_singular_value,
        });
    }

    let mut warnings = Vec::new();
    if d >= 2 && n > d * d - 1 {
        warnings.push(format!("n = {n} exceeds d^2 - 1 = {}", d * d - 1));
    }
    for c in subsets.iter().filter(|c| c.min_singular_value < tol.conditioning_warning) {
        warnings.push(format!(
            "vectors {} are ill-conditioned (smallest singular value {:e})",
            c.subset, c.min_singular_value
        ));
    }
    Ok(Certificate { d, n, subsets, weakest, warnings })
}

/// Rescales vectors that are close to unit norm, rejects the rest.
pub fn normalize_vectors(d: usize, vectors: Vec<Vec<Complex64>>) -> Result<Vec<DVector<Complex64>>> {
    vectors
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            if v.len() != d {
                return Err(ChoquetError::DimensionMismatch { expected: d, found: v.len() });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(ChoquetError::NonFinite);
            }
            let v = DVector::from_vec(v);
            let norm = v.norm();
            if (norm - 1.0).abs() > NORMALIZATION_SLACK {
                return Err(ChoquetError::NotNormalized { index: i + 1, norm });
            }
            Ok(v / Complex64::new(norm, 0.0))
        })
        .collect()
}

/// `Pi(A)` together with the subset it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetProjector {
    pub subset: Subset,
    pub matrix: HermitianMatrix,
}

impl SubsetProjector {
    /// Max-norm of `Pi^2 - Pi`.
    pub fn idempotence_residual(&self) -> f64 {
        let m = self.matrix.as_matrix();
        max_abs(&(m * m - m))
    }

    /// `|Tr Pi - min(|A|, d)|`.
    pub fn trace_residual(&self) -> f64 {
        let expected = self.subset.len().min(self.matrix.dim()) as f64;
        (self.matrix.trace() - expected).abs()
    }
}

/// `D(B) = sum_{A subset B} (-1)^{|B|-|A|} Pi(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusOperator {
    pub subset: Subset,
    pub matrix: HermitianMatrix,
}

pub struct ReferenceSet {
    d: usize,
    vectors: Vec<DVector<Complex64>>,
    tol: Tolerances,
    certificate: Certificate,
    cache: RwLock<HashMap<Subset, Arc<HermitianMatrix>>>,
}

impl ReferenceSet {
    /// Normalizes and validates `vectors` under the default tolerances.
    pub fn new(d: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::with_tolerances(d, vectors, Tolerances::DEFAULT)
    }

    pub fn with_tolerances(d: usize, vectors: Vec<Vec<Complex64>>, tol: Tolerances) -> Result<Self> {
        let vectors = normalize_vectors(d, vectors)?;
        let certificate = certify(d, &vectors, &tol)?;
        Ok(ReferenceSet {
            d,
            vectors,
            tol,
            certificate,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Real-valued vectors, convenient for examples and tests.
    pub fn from_real(d: usize, vectors: &[&[f64]]) -> Result<Self> {
        Self::new(
            d,
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// The standard basis of `C^d`.
    pub fn orthonormal_basis(d: usize) -> Result<Self> {
        Self::new(
            d,
            (0..d)
                .map(|i| (0..d).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
                .collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[DVector<Complex64>] {
        &self.vectors
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n())
    }

    fn check_subset(&self, a: Subset) -> Result<()> {
        if !a.is_subset_of(self.full()) {
            let index = (32 - a.mask().leading_zeros()) as usize;
            return Err(ChoquetError::IndexOutOfRange { index, n: self.n() });
        }
        Ok(())
    }

    fn projector_matrix(&self, a: Subset) -> Result<Arc<HermitianMatrix>> {
        if let Some(m) = self.cache.read().expect("projector cache poisoned").get(&a) {
            return Ok(Arc::clone(m));
        }
        let m = Arc::new(self.compute_projector(a)?);
        let mut cache = self.cache.write().expect("projector cache poisoned");
        Ok(Arc::clone(cache.entry(a).or_insert(m)))
    }

    fn compute_projector(&self, a: Subset) -> Result<HermitianMatrix> {
        let k = a.len();
        if k == 0 {
            return Ok(HermitianMatrix::zeros(self.d));
        }
        if k >= self.d {
            return Ok(HermitianMatrix::identity(self.d));
        }
        // Pi(A) = U U^dagger for the left singular vectors of the column
        // matrix, which equals A (A^dagger A)^-1 A^dagger when A has full rank.
        let cols: Vec<_> = a.indices().map(|i| self.vectors[i].clone()).collect();
        let svd = ComplexMatrix::from_columns(&cols).into_inner().svd(true, false);
        let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        if smallest <= self.tol.rank {
            return Err(ChoquetError::SingularGram { subset: a, singular_value: smallest });
        }
        let u = svd.u.expect("left singular vectors requested");
        Ok(HermitianMatrix::symmetrized(&u * u.adjoint()))
    }

    /// `Pi(A)`; memoized.
    pub fn projector(&self, a: Subset) -> Result<SubsetProjector> {
        self.check_subset(a)?;
        Ok(SubsetProjector {
            subset: a,
            matrix: (*self.projector_matrix(a)?).clone(),
        })
    }

    /// `Pi({i})` for a 0-based index.
    pub fn single(&self, index: usize) -> Result<HermitianMatrix> {
        Ok(self.projector(Subset::singleton(index))?.matrix)
    }

    /// `(1/|S|) sum_{i in S} Pi({i})`, a density matrix whenever `S` is non-empty.
    pub fn average_projector(&self, s: Subset) -> Result<HermitianMatrix> {
        self.check_subset(s)?;
        let mut acc = HermitianMatrix::zeros(self.d);
        for i in s.indices() {
            acc = &acc + &self.single(i)?;
        }
        Ok(acc.scale(1.0 / s.len().max(1) as f64))
    }

    pub fn mobius_operator(&self, b: Subset) -> Result<MobiusOperator> {
        check_enumerable(self.n())?;
        self.check_subset(b)?;
        if b.is_empty() {
            return Err(ChoquetError::InvalidReferenceSet(
                "Mobius operators are defined for non-empty subsets".into(),
            ));
        }
        let mut acc = DMatrix::<Complex64>::zeros(self.d, self.d);
        for a in b.subsets() {
            let sign = if (b.len() - a.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += self.projector_matrix(a)?.as_matrix() * Complex64::new(sign, 0.0);
        }
        Ok(MobiusOperator {
            subset: b,
            matrix: HermitianMatrix::symmetrized(acc),
        })
    }

    /// Every `D(B)`, indexed by subset mask, via the fast subset transform.
    pub fn mobius_operators_all(&self) -> Result<Vec<HermitianMatrix>> {
        check_enumerable(self.n())?;
        let n = self.n();
        let mut ops: Vec<DMatrix<Complex64>> = Subset::all(n)
            .map(|s| self.projector_matrix(s).map(|m| m.as_matrix().clone()))
            .collect::<Result<_>>()?;
        for bit in 0..n {
            let b = 1usize << bit;
            for mask in 0..ops.len() {
                if mask & b != 0 {
                    let (lo, hi) = ops.split_at_mut(mask);
                    hi[0] -= &lo[mask ^ b];
                }
            }
        }
        Ok(ops.into_iter().map(HermitianMatrix::symmetrized).collect())
    }

    /// `max |sum_{B != empty} D(B) - 1|`.
    pub fn verify_resolution(&self) -> Result<f64> {
        let ops = self.mobius_operators_all()?;
        let sum = ops
            .iter()
            .skip(1)
            .fold(HermitianMatrix::zeros(self.d), |acc, m| &acc + m);
        Ok(sum.max_abs_diff(&HermitianMatrix::identity(self.d)))
    }

    /// Residual of `[Pi(i), Pi(j)] = D({i,j}) (Pi(i) - Pi(j))` for 0-based `i != j`.
    pub fn verify_commutator_identity(&self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Err(ChoquetError::InvalidReferenceSet("commutator identity needs i != j".into()));
        }
        for k in [i, j] {
            if k >= self.n() {
                return Err(ChoquetError::IndexOutOfRange { index: k + 1, n: self.n() });
            }
        }
        let pi = self.single(i)?;
        let pj = self.single(j)?;
        let dij = self.mobius_operator(Subset::from_indices([i, j]))?.matrix;
        let commutator = pi.as_matrix() * pj.as_matrix() - pj.as_matrix() * pi.as_matrix();
        let rhs = dij.as_matrix() * (pi.as_matrix() - pj.as_matrix());
        Ok(max_abs(&(commutator - rhs)))
    }
}

impl Clone for ReferenceSet {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("projector cache poisoned").clone();
        ReferenceSet {
            d: self.d,
            vectors: self.vectors.clone(),
            tol: self.tol,
            certificate: self.certificate.clone(),
            cache: RwLock::new(cache),
        }
    }
}

impl fmt::Debug for ReferenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReferenceSet")
            .field("d", &self.d)
            .field("n", &self.n())
            .field("weakest", &self.certificate.weakest)
            .finish_non_exhaustive()
    }
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

    fn labels(l: &[usize], n: usize) -> Subset {
        Subset::from_labels(l, n).unwrap()
    }

    fn real(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn example_set_is_valid() {
        let set = example_set();
        assert_eq!(set.certificate().subsets.len(), 4);
        assert!(set.certificate().warnings.is_empty());
    }

    #[test]
    fn repeated_vector_is_degenerate() {
        let err = ReferenceSet::from_real(2, &[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]]).unwrap_err();
        match err {
            ChoquetError::DegenerateSet { subset, .. } => assert_eq!(subset.labels(), vec![1, 3]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn orthonormal_basis_is_valid() {
        let set = ReferenceSet::orthonormal_basis(3).unwrap();
        assert!((set.certificate().weakest.min_singular_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ingestion_normalizes_or_rejects() {
        let nearly = ReferenceSet::from_real(2, &[&[1.0 + 5e-7, 0.0], &[0.0, 1.0]]).unwrap();
        assert!((nearly.vectors()[0].norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            ReferenceSet::from_real(2, &[&[2.0, 0.0], &[0.0, 1.0]]),
            Err(ChoquetError::NotNormalized { index: 1, .. })
        ));
        assert!(matches!(
            ReferenceSet::from_real(2, &[&[1.0, 0.0]]),
            Err(ChoquetError::InvalidReferenceSet(_))
        ));
        assert!(matches!(
            ReferenceSet::from_real(2, &[&[1.0, 0.0], &[0.0, 0.0, 1.0]]),
            Err(ChoquetError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn warns_outside_stated_range() {
        // five generic vectors in d = 2 exceed d^2 - 1 = 3
        let vs: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let t = k as f64 * 0.6;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        let set = ReferenceSet::from_real(2, &refs).unwrap();
        assert!(set.certificate().warnings.iter().any(|w| w.contains("d^2 - 1")));
    }

    #[test]
    fn example_projectors() {
        let set = example_set();
        let p42 = set.projector(labels(&[4, 2], 4)).unwrap();
        let expected = real(&[&[0.5, 0.0, 0.5], &[0.0, 1.0, 0.0], &[0.5, 0.0, 0.5]]);
        assert!(p42.matrix.max_abs_diff(&expected) < 1e-10);
        let p2 = set.projector(labels(&[2], 4)).unwrap();
        let expected = real(&[&[0.5, 0.0, 0.5], &[0.0, 0.0, 0.0], &[0.5, 0.0, 0.5]]);
        assert!(p2.matrix.max_abs_diff(&expected) < 1e-12);
        let full = set.projector(labels(&[1, 2, 3], 4)).unwrap();
        assert!(full.matrix.max_abs_diff(&HermitianMatrix::identity(3)) < 1e-15);
        assert_eq!(set.projector(Subset::EMPTY).unwrap().matrix, HermitianMatrix::zeros(3));
        assert!(set.projector(Subset::from_indices([4])).is_err());
    }

    #[test]
    fn projector_invariants_on_all_subsets() {
        let set = example_set();
        for s in Subset::all(4) {
            let p = set.projector(s).unwrap();
            assert!(p.idempotence_residual() < 1e-9, "{s}");
            assert!(p.trace_residual() < 1e-9, "{s}");
        }
    }

    #[test]
    fn mobius_operator_examples() {
        let set = example_set();
        let d24 = set.mobius_operator(labels(&[2, 4], 4)).unwrap().matrix;
        let expected = &(&set.projector(labels(&[2, 4], 4)).unwrap().matrix - &set.single(1).unwrap())
            - &set.single(3).unwrap();
        assert!(d24.max_abs_diff(&expected) < 1e-12);
        assert!(d24.max_abs() > 0.1);
        assert_eq!(set.mobius_operator(labels(&[3], 4)).unwrap().matrix, set.single(2).unwrap());

        let basis = ReferenceSet::orthonormal_basis(3).unwrap();
        for b in Subset::all(3).filter(|b| b.len() >= 2) {
            assert!(basis.mobius_operator(b).unwrap().matrix.max_abs() < 1e-15);
        }
    }

    #[test]
    fn fast_and_direct_mobius_agree() {
        let set = example_set();
        let all = set.mobius_operators_all().unwrap();
        for b in Subset::all(4).skip(1) {
            let direct = set.mobius_operator(b).unwrap().matrix;
            assert!(all[b.mask() as usize].max_abs_diff(&direct) < 1e-12, "{b}");
        }
    }

    #[test]
    fn resolution_of_identity() {
        assert!(example_set().verify_resolution().unwrap() <= 1e-8);
        assert!(ReferenceSet::orthonormal_basis(4).unwrap().verify_resolution().unwrap() < 1e-15);
        let set = ReferenceSet::new(
            2,
            vec![
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
                vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-0.5, 0.5)],
            ],
        )
        .unwrap();
        assert!(set.verify_resolution().unwrap() <= 1e-8);
    }

    #[test]
    fn commutator_identity() {
        let set = example_set();
        assert!(set.verify_commutator_identity(0, 1).unwrap() <= 1e-8);
        assert!(set.verify_commutator_identity(1, 2).unwrap() <= 1e-8);
        let basis = ReferenceSet::orthonormal_basis(3).unwrap();
        assert!(basis.verify_commutator_identity(0, 2).unwrap() < 1e-15);
        assert!(set.verify_commutator_identity(1, 1).is_err());
    }

    #[test]
    fn non_additivity_witness() {
        let set = example_set();
        let p12 = set.projector(labels(&[1, 2], 4)).unwrap().matrix;
        let sum = &set.single(0).unwrap() + &set.single(1).unwrap();
        assert!(p12.max_abs_diff(&sum) > 0.1);
    }

    #[test]
    fn cache_is_shared_across_threads() {
        let set = Arc::new(example_set());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let set = Arc::clone(&set);
                std::thread::spawn(move || {
                    Subset::all(4).map(|s| set.projector(s).unwrap().matrix.trace()).sum::<f64>()
                })
            })
            .collect();
        let sums: Vec<f64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(sums.windows(2).all(|w| w[0] == w[1]));
    }
}
