//! Sparse linear algebra over the two-element field.
//!
//! A column is a sorted list of row indices carrying a one. Addition is the
//! symmetric difference of supports, and the pivot of a nonzero column is its
//! largest row index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sparse Z₂ column: strictly increasing row indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Z2Column(Vec<usize>);

impl Z2Column {
    pub fn new() -> Self {
        Z2Column(Vec::new())
    }

    /// Builds a column from a strictly increasing support.
    pub fn from_sorted(support: Vec<usize>) -> Result<Self> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "column support must be strictly increasing: {support:?}"
            )));
        }
        Ok(Z2Column(support))
    }

    /// Builds a column from arbitrary indices; repeated indices cancel in pairs.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        let mut out = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            let mut j = i;
            while j < v.len() && v[j] == v[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(v[i]);
            }
            i = j;
        }
        Z2Column(out)
    }

    pub fn unit(row: usize) -> Self {
        Z2Column(vec![row])
    }

    pub fn support(&self) -> &[usize] {
        &self.0
    }

    pub fn into_support(self) -> Vec<usize> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pivot(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.0.binary_search(&row).is_ok()
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &Z2Column) {
        if other.0.is_empty() {
            return;
        }
        let merged = symmetric_difference(&self.0, &other.0);
        self.0 = merged;
    }

    /// Applies `f` to every row index, re-sorting afterwards. `f` must be injective.
    pub fn remap<F: Fn(usize) -> usize>(&self, f: F) -> Z2Column {
        let mut v: Vec<usize> = self.0.iter().map(|&r| f(r)).collect();
        v.sort_unstable();
        Z2Column(v)
    }
}

impl FromIterator<usize> for Z2Column {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Z2Column::from_indices(iter)
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Returns `a + b` over Z₂.
pub fn column_add(a: &Z2Column, b: &Z2Column) -> Z2Column {
    Z2Column(symmetric_difference(&a.0, &b.0))
}

/// Adds column `source` into column `target` of `columns`; `source != target`.
pub(crate) fn add_into(columns: &mut [Z2Column], target: usize, source: usize) {
    debug_assert_ne!(target, source);
    if source < target {
        let (lo, hi) = columns.split_at_mut(target);
        hi[0].add_assign(&lo[source]);
    } else {
        let (lo, hi) = columns.split_at_mut(source);
        lo[target].add_assign(&hi[0]);
    }
}

/// Column additions performed by a reduction, as `(target, source)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLog {
    pub events: Vec<(usize, usize)>,
}

impl ReductionLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replays the logged additions against `original`.
    pub fn replay(&self, original: &[Z2Column]) -> Vec<Z2Column> {
        let mut cols = original.to_vec();
        for &(target, source) in &self.events {
            add_into(&mut cols, target, source);
        }
        cols
    }
}

const NONE: usize = usize::MAX;

/// Standard left-to-right reduction.
///
/// While a column shares its pivot with an earlier column, the earlier column
/// owning that pivot is added to it. Zero columns stay in place so indices
/// remain stable.
pub fn reduce(columns: &[Z2Column], mut log: Option<&mut ReductionLog>) -> Vec<Z2Column> {
    let mut cols = columns.to_vec();
    let n_rows = cols
        .iter()
        .filter_map(Z2Column::pivot)
        .max()
        .map_or(0, |p| p + 1);
    let mut owner = vec![NONE; n_rows];
    for j in 0..cols.len() {
        while let Some(p) = cols[j].pivot() {
            let k = owner[p];
            if k == NONE {
                owner[p] = j;
                break;
            }
            add_into(&mut cols, j, k);
            if let Some(log) = log.as_deref_mut() {
                log.events.push((j, k));
            }
        }
    }
    cols
}
