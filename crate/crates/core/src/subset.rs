//! Subsets of a finite index set `{1..n}` encoded as bitmasks.
//!
//! Bit `k` of the mask stands for index `k + 1`. Everything user facing
//! (display, construction from index lists) is 1-based.

use std::fmt;

use crate::error::ChoquetError;

/// Largest index set for which exhaustive `2^n` enumeration is allowed.
pub const MAX_SUBSET_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_mask(mask: u32) -> Self {
        Subset(mask)
    }

    /// The full set `{1..n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 32);
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(index: usize) -> Self {
        Subset(1 << index)
    }

    /// Builds a subset from 0-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    /// Builds a subset from 1-based labels, checking they lie in `{1..n}`.
    pub fn from_labels(labels: &[usize], n: usize) -> Result<Self, ChoquetError> {
        let mut mask = 0u32;
        for &l in labels {
            if l == 0 || l > n {
                return Err(ChoquetError::IndexOutOfRange { index: l, n });
            }
            mask |= 1 << (l - 1);
        }
        Ok(Subset(mask))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn insert(self, index: usize) -> Self {
        Subset(self.0 | (1 << index))
    }

    pub fn remove(self, index: usize) -> Self {
        Subset(self.0 & !(1 << index))
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based member indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// 1-based member labels in ascending order.
    pub fn labels(self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    /// All subsets of `self`, including the empty set and `self`, in
    /// increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Subset(cur))
        })
    }

    /// Every subset of `{1..n}` in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..(1u32 << n)).map(Subset)
    }

    /// All subsets of `{1..n}` with exactly `k` members, in mask order.
    pub fn of_size(n: usize, k: usize) -> impl Iterator<Item = Subset> {
        Self::all(n).filter(move |s| s.len() == k)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, l) in self.labels().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn check_enumerable(n: usize) -> Result<(), ChoquetError> {
    if n > MAX_SUBSET_N {
        Err(ChoquetError::SubsetLimitExceeded { n, max: MAX_SUBSET_N })
    } else {
        Ok(())
    }
}
