use serde::{Deserialize, Serialize};

use crate::complex::GradedMatrix;
use crate::error::{Error, Result};

/// How the vertical range is cut into layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMode {
    /// `s` equidistant cuts over `[min y, max y]`, the last one at `max y`.
    #[default]
    Equidistant,
    /// Cut `l` is the `ceil(l * n / s)`-th smallest y grade among all `n` items.
    Quantile,
}

/// Layer cuts plus the (1-based) layer of every row and column.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceAssignment {
    pub cuts: Vec<f64>,
    pub row_layers: Vec<usize>,
    pub col_layers: Vec<usize>,
}

impl SliceAssignment {
    pub fn slices(&self) -> usize {
        self.cuts.len()
    }

    /// First layer whose cut is at least `y`.
    pub fn layer_of(&self, y: f64) -> usize {
        layer_of(&self.cuts, y)
    }
}

fn layer_of(cuts: &[f64], y: f64) -> usize {
    (cuts.partition_point(|&c| c < y) + 1).min(cuts.len())
}

/// Equidistant slicing. A zero-width y range collapses to a single layer.
pub fn assign_slices(matrix: &GradedMatrix, s: usize) -> Result<SliceAssignment> {
    assign_slices_with(matrix, s, SliceMode::Equidistant)
}

pub fn assign_slices_with(
    matrix: &GradedMatrix,
    s: usize,
    mode: SliceMode,
) -> Result<SliceAssignment> {
    if s == 0 {
        return Err(Error::InvalidArgument(
            "the number of slices must be at least 1".into(),
        ));
    }
    let mut ys: Vec<f64> = matrix.y_values().collect();
    ys.sort_by(f64::total_cmp);
    let cuts = match (ys.first(), ys.last()) {
        (None, _) | (_, None) => vec![0.0],
        (Some(&lo), Some(&hi)) if lo == hi => vec![hi],
        (Some(&lo), Some(&hi)) => match mode {
            SliceMode::Equidistant => (1..=s)
                .map(|l| {
                    if l == s {
                        hi
                    } else {
                        lo + (hi - lo) * l as f64 / s as f64
                    }
                })
                .collect(),
            SliceMode::Quantile => {
                let n = ys.len();
                (1..=s)
                    .map(|l| {
                        let rank = (l * n).div_ceil(s).max(1);
                        ys[rank - 1]
                    })
                    .collect()
            }
        },
    };
    let row_layers = matrix
        .row_grades
        .iter()
        .map(|g| layer_of(&cuts, g.y))
        .collect();
    let col_layers = matrix
        .col_grades
        .iter()
        .map(|g| layer_of(&cuts, g.y))
        .collect();
    Ok(SliceAssignment {
        cuts,
        row_layers,
        col_layers,
    })
}
