use std::fmt;

use crate::error::{ChoquetError, Result};

/// Bijection on `{1..n}`, stored 0-based: `order[k]` is the index placed at
/// position `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// From 0-based indices.
    pub fn from_indices(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(ChoquetError::InvalidPermutation(format!(
                    "{:?} is not a bijection on 1..={n}",
                    order.iter().map(|i| i + 1).collect::<Vec<_>>()
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation(order))
    }

    /// From 1-based labels, as written in the literature: `sigma(1), ..., sigma(n)`.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(ChoquetError::InvalidPermutation("labels are 1-based".into()));
        }
        Self::from_indices(labels.iter().map(|l| l - 1).collect())
    }

    /// Sorts `values` ascending; equal values keep ascending index order.
    pub fn ascending(values: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        Permutation(order)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based index at 0-based position `k`.
    pub fn at(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// The last position, i.e. the index with the largest value.
    pub fn top(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn swap(&self, a: usize, b: usize) -> Self {
        let mut order = self.0.clone();
        order.swap(a, b);
        Permutation(order)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(ToString::to_string).collect();
        write!(f, "({})", labels.join(", "))
    }
}
