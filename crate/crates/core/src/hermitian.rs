//! Dense complex matrices with Hermitian eigenanalysis.
//!
//! Matrices are immutable values; arithmetic returns new matrices. The
//! Hermitian invariant is checked once at construction and the stored
//! entries are then symmetrized exactly, so downstream code never sees a
//! slightly non-Hermitian matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{ChoquetError, Result};
use crate::tol::Tolerances;

/// General complex matrix, row count by column count, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(ChoquetError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ChoquetError::NonFinite);
        }
        Ok(ComplexMatrix(m))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[DVector<Complex64>]) -> Self {
        ComplexMatrix(DMatrix::from_columns(columns))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Complex `d x d` matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    /// Validates against [`Tolerances::DEFAULT`].
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(m: DMatrix<Complex64>, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() {
            return Err(ChoquetError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ChoquetError::NonFinite);
        }
        let deviation = max_abs(&(&m - m.adjoint()));
        if deviation > tol.herm {
            return Err(ChoquetError::NonHermitianInput { deviation });
        }
        Ok(Self::symmetrized(m))
    }

    /// Real symmetric matrix from rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(ChoquetError::NotSquare { rows: d, cols: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Self::new(m)
    }

    pub(crate) fn symmetrized(m: DMatrix<Complex64>) -> Self {
        let adj = m.adjoint();
        HermitianMatrix((m + adj) * Complex64::new(0.5, 0.0))
    }

    pub fn zeros(d: usize) -> Self {
        HermitianMatrix(DMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        HermitianMatrix(DMatrix::identity(d, d))
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let v = DVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)));
        HermitianMatrix(DMatrix::from_diagonal(&v))
    }

    /// Rank-one projector `|v><v| / <v|v>`.
    pub fn rank_one_projector(v: &DVector<Complex64>) -> Self {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Self::symmetrized(v * v.adjoint() / Complex64::new(norm_sqr, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianMatrix(&self.0 * Complex64::new(factor, 0.0))
    }

    /// Max-norm distance `max |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    /// Plain matrix product; the result is Hermitian only when the factors commute.
    pub fn product(&self, other: &HermitianMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &other.0)
    }

    /// Max-norm of the commutator `[A, B]`.
    pub fn commutator_norm(&self, other: &HermitianMatrix) -> f64 {
        max_abs(&(&self.0 * &other.0 - &other.0 * &self.0))
    }

    pub fn eig(&self) -> EigenSystem {
        eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        raw_eigenvalues(self).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        raw_eigenvalues(self).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        HermitianMatrix(-&self.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

impl fmt::Display for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(4);
        let scale = 10f64.powi(prec as i32);
        let complex = self.0.iter().any(|z| z.im.abs() > 0.5 / scale);
        for i in 0..self.dim() {
            f.write_str("[")?;
            for j in 0..self.dim() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                let z = self.0[(i, j)];
                // keep "-0.0000" out of the output
                let tidy = |x: f64| if (x * scale).round() == 0.0 { 0.0 } else { x };
                let z = Complex64::new(tidy(z.re), tidy(z.im));
                if complex {
                    write!(f, "{:.*}{:+.*}i", prec, z.re, prec, z.im)?;
                } else {
                    write!(f, "{:.*}", prec, z.re)?;
                }
            }
            f.write_str("]")?;
            if i + 1 < self.dim() {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Positive semi-definite Hermitian matrix with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(m: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let trace = m.trace();
        if (trace - 1.0).abs() > tol.trace {
            return Err(ChoquetError::NotDensityMatrix(format!("trace {trace} != 1")));
        }
        let check = is_psd_with(&m, tol);
        if !check.psd {
            return Err(ChoquetError::NotDensityMatrix(format!(
                "minimum eigenvalue {:e}",
                check.min_eigenvalue
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub(crate) fn new_unchecked(m: HermitianMatrix) -> Self {
        DensityMatrix(m)
    }

    /// `1/d` times the identity.
    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix(HermitianMatrix::identity(d).scale(1.0 / d as f64))
    }

    /// Pure state `|v><v|` for a non-zero vector.
    pub fn pure(v: &DVector<Complex64>) -> Self {
        DensityMatrix(HermitianMatrix::rank_one_projector(v))
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(ChoquetError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(ChoquetError::NotDensityMatrix(format!("mixing weight {lambda} outside [0, 1]")));
        }
        Ok(DensityMatrix(&self.0.scale(lambda) + &other.0.scale(1.0 - lambda)))
    }
}

/// Eigenvalues in ascending order with one eigenprojector per distinct value.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub projectors: Vec<HermitianMatrix>,
}

impl EigenSystem {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// `sum_j lambda_j q_j`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let d = self.projectors.first().map_or(0, |q| q.dim());
        self.values
            .iter()
            .zip(&self.projectors)
            .fold(HermitianMatrix::zeros(d), |acc, (&v, q)| &acc + &q.scale(v))
    }

    /// Max-norm residuals of `sum q_j = 1` and `q_i q_j = delta_ij q_i`.
    pub fn projector_residuals(&self) -> (f64, f64) {
        let d = self.projectors.first().map_or(0, |q| q.dim());
        let sum = self
            .projectors
            .iter()
            .fold(HermitianMatrix::zeros(d), |acc, q| &acc + q);
        let completeness = sum.max_abs_diff(&HermitianMatrix::identity(d));
        let mut orthogonality: f64 = 0.0;
        for (i, qi) in self.projectors.iter().enumerate() {
            for (j, qj) in self.projectors.iter().enumerate() {
                let prod = qi.as_matrix() * qj.as_matrix();
                let target = if i == j { qi.as_matrix().clone() } else { DMatrix::zeros(d, d) };
                orthogonality = orthogonality.max(max_abs(&(prod - target)));
            }
        }
        (completeness, orthogonality)
    }
}

fn raw_eigenvalues(m: &HermitianMatrix) -> Vec<f64> {
    m.0.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Eigendecomposition with the default degeneracy threshold.
pub fn eig_hermitian(m: &HermitianMatrix) -> EigenSystem {
    eig_hermitian_with(m, &Tolerances::DEFAULT)
}

/// Eigendecomposition; eigenvalues within `tol.degeneracy` of their
/// neighbour are merged and share a single eigenprojector.
pub fn eig_hermitian_with(m: &HermitianMatrix, tol: &Tolerances) -> EigenSystem {
    let d = m.dim();
    if d == 0 {
        return EigenSystem { values: vec![], projectors: vec![] };
    }
    let eig = SymmetricEigen::new(m.0.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut values = Vec::new();
    let mut projectors = Vec::new();
    let mut group: Vec<usize> = Vec::new();
    let flush = |group: &mut Vec<usize>, values: &mut Vec<f64>, projectors: &mut Vec<HermitianMatrix>| {
        if group.is_empty() {
            return;
        }
        let mean = group.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / group.len() as f64;
        let mut q = DMatrix::<Complex64>::zeros(d, d);
        for &k in group.iter() {
            let v = eig.eigenvectors.column(k);
            q += v * v.adjoint();
        }
        values.push(mean);
        projectors.push(HermitianMatrix::symmetrized(q));
        group.clear();
    };
    for &k in &order {
        if let Some(&last) = group.last() {
            if eig.eigenvalues[k] - eig.eigenvalues[last] >= tol.degeneracy {
                flush(&mut group, &mut values, &mut projectors);
            }
        }
        group.push(k);
    }
    flush(&mut group, &mut values, &mut projectors);
    EigenSystem { values, projectors }
}

/// Outcome of a positive semi-definiteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

pub fn is_psd(m: &HermitianMatrix) -> PsdCheck {
    is_psd_with(m, &Tolerances::DEFAULT)
}

pub fn is_psd_with(m: &HermitianMatrix, tol: &Tolerances) -> PsdCheck {
    let min_eigenvalue = if m.dim() == 0 { 0.0 } else { m.min_eigenvalue() };
    PsdCheck {
        psd: min_eigenvalue >= -tol.psd,
        min_eigenvalue,
    }
}

/// Imaginary residue allowed on `Tr[AB]` for Hermitian `A`, `B`.
const TRACE_IMAG_TOL: f64 = 1e-10;

/// `Re Tr[AB]`.
pub fn trace_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(ChoquetError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let d = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a.0[(i, j)] * b.0[(j, i)];
        }
    }
    if acc.im.abs() > TRACE_IMAG_TOL {
        return Err(ChoquetError::ConsistencyFailure {
            what: "imaginary part of Tr[AB]",
            residual: acc.im.abs(),
        });
    }
    Ok(acc.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.4, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(ChoquetError::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn rejects_non_square_and_nan() {
        let m = DMatrix::from_element(2, 3, c(0.0, 0.0));
        assert!(matches!(HermitianMatrix::new(m), Err(ChoquetError::NotSquare { .. })));
        let m = DMatrix::from_element(2, 2, c(f64::NAN, 0.0));
        assert_eq!(HermitianMatrix::new(m), Err(ChoquetError::NonFinite));
    }

    #[test]
    fn identity_merges_to_single_eigenvalue() {
        let eig = eig_hermitian(&HermitianMatrix::identity(3));
        assert_eq!(eig.values.len(), 1);
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-12);
        assert!(eig.projectors[0].max_abs_diff(&HermitianMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn complex_eigenvalues_are_real_and_ordered() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let h = HermitianMatrix::new(m).unwrap();
        let eig = h.eig();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 3.0, epsilon = 1e-12);
        assert!(eig.reconstruct().max_abs_diff(&h) < 1e-12);
        let (comp, orth) = eig.projector_residuals();
        assert!(comp < 1e-12 && orth < 1e-12);
    }

    #[test]
    fn psd_witnesses() {
        let neg = HermitianMatrix::diagonal(&[1.0, -0.1, 0.0]);
        let check = is_psd(&neg);
        assert!(!check.psd);
        assert_abs_diff_eq!(check.min_eigenvalue, -0.1, epsilon = 1e-12);

        let zero = is_psd(&HermitianMatrix::zeros(3));
        assert!(zero.psd);
        assert_abs_diff_eq!(zero.min_eigenvalue, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn trace_product_of_overlapping_projectors() {
        let p1 = HermitianMatrix::diagonal(&[1.0, 0.0, 0.0]);
        let p2 = HermitianMatrix::from_real_rows(&[&[0.5, 0.0, 0.5], &[0.0, 0.0, 0.0], &[0.5, 0.0, 0.5]]).unwrap();
        assert_abs_diff_eq!(trace_product(&p1, &p2).unwrap(), 0.5, epsilon = 1e-15);
        let mixed = HermitianMatrix::identity(3).scale(1.0 / 3.0);
        assert_abs_diff_eq!(trace_product(&mixed, &p1).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(
            trace_product(&p1, &HermitianMatrix::identity(2)),
            Err(ChoquetError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_matrix_checks() {
        assert!(DensityMatrix::new(HermitianMatrix::diagonal(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(HermitianMatrix::diagonal(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::diagonal(&[1.2, -0.2])).is_err());
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(mixed.as_hermitian().trace(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn display_uses_requested_precision() {
        let h = HermitianMatrix::diagonal(&[0.5, 0.25]);
        assert_eq!(format!("{:.2}", h), "[0.50, 0.00]\n[0.00, 0.25]");
    }
}
