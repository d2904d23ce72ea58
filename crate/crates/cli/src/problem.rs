//! The problem file: reference vectors plus whatever data a command needs.
//!
//! Complex numbers are `[re, im]` pairs and every index is 1-based.

use std::collections::BTreeSet;
use std::path::Path;

use choquet_core::{
    Capacity, Complex64, DensityMatrix, HermitianMatrix, ProbabilityVector, ReferenceSet, Subset, Tolerances,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<ComplexPair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<ComplexPair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<CapacitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Capacity values listed per nonempty subset of `{1..n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySection {
    pub n: usize,
    pub values: Vec<CapacityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityEntry {
    pub subset: Vec<usize>,
    pub value: f64,
}

/// Probabilities together with the state they came from, if one was given.
pub struct QuantumData {
    pub p: ProbabilityVector,
    pub rho: Option<DensityMatrix>,
}

pub fn read(path: &Path) -> CliResult<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> CliResult<ProblemFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Parse(inner.to_string())
        } else {
            CliError::Parse(format!("field `{path}`: {inner}"))
        }
    })
}

fn complex(pair: &ComplexPair) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

impl ProblemFile {
    pub fn reference_set(&self, tol: &Tolerances) -> CliResult<ReferenceSet> {
        let d = self
            .dimension
            .ok_or_else(|| CliError::Validation("problem has no `dimension`".into()))?;
        let vectors = self
            .vectors
            .as_ref()
            .ok_or_else(|| CliError::Validation("problem has no `vectors`".into()))?;
        if d == 0 {
            return Err(CliError::Validation("`dimension` must be at least 1".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(CliError::Validation(format!(
                    "vector {} has {} entries, expected {d}",
                    i + 1,
                    v.len()
                )));
            }
        }
        let vectors = vectors.iter().map(|v| v.iter().map(complex).collect()).collect();
        Ok(ReferenceSet::with_tolerances(d, vectors, *tol)?)
    }

    /// Probabilities from exactly one of the `probabilities` or `rho` sections.
    pub fn quantum_data(&self, set: &ReferenceSet) -> CliResult<QuantumData> {
        match (&self.probabilities, &self.rho) {
            (Some(_), Some(_)) => Err(CliError::Validation(
                "give either `probabilities` or `rho`, not both".into(),
            )),
            (None, None) => Err(CliError::Validation("problem has neither `probabilities` nor `rho`".into())),
            (Some(p), None) => {
                if p.len() != set.n() {
                    return Err(CliError::Validation(format!(
                        "{} probabilities for {} vectors",
                        p.len(),
                        set.n()
                    )));
                }
                Ok(QuantumData { p: ProbabilityVector::new(p.clone())?, rho: None })
            }
            (None, Some(rows)) => {
                let rho = self.density(rows, set)?;
                let p = ProbabilityVector::from_state(set, &rho)?;
                Ok(QuantumData { p, rho: Some(rho) })
            }
        }
    }

    fn density(&self, rows: &[Vec<ComplexPair>], set: &ReferenceSet) -> CliResult<DensityMatrix> {
        let d = set.d();
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(CliError::Validation(format!("`rho` must be a {d}x{d} matrix")));
        }
        let m = choquet_core::hermitian::ComplexMatrix::new(
            d,
            d,
            rows.iter().flat_map(|r| r.iter().map(complex)).collect(),
        )?;
        let tol = set.tolerances();
        let h = HermitianMatrix::with_tolerances(m.into_inner(), tol)?;
        Ok(DensityMatrix::with_tolerances(h, tol)?)
    }

    pub fn capacity(&self) -> CliResult<Capacity> {
        let section = self
            .capacity
            .as_ref()
            .ok_or_else(|| CliError::Validation("problem has no `capacity` section".into()))?;
        let n = section.n;
        if n == 0 || n > choquet_core::subset::MAX_SUBSET_N {
            return Err(CliError::Validation(format!(
                "capacity size n = {n} outside 1..={}",
                choquet_core::subset::MAX_SUBSET_N
            )));
        }
        let mut values = vec![0.0; 1 << n];
        let mut seen = BTreeSet::new();
        for entry in &section.values {
            let s = Subset::from_labels(&entry.subset, n)?;
            if !seen.insert(s.mask()) {
                return Err(CliError::Validation(format!("subset {s} listed twice")));
            }
            values[s.mask() as usize] = entry.value;
        }
        if let Some(missing) = Subset::all(n).find(|s| !s.is_empty() && !seen.contains(&s.mask())) {
            return Err(CliError::Validation(format!("capacity value for {missing} missing")));
        }
        Ok(Capacity::new(n, values)?)
    }
}
