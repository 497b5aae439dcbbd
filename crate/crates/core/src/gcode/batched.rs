//! Out-of-order reduction: columns keep their global x order but enter the
//! matrix one vertical batch at a time. After each batch the nonzero columns
//! form a barcode basis of that slice, and the additions made into columns of
//! the previous basis give the edges.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Bar, Graphcode, GraphcodeNode, SliceAssignment};
use crate::complex::GradedMatrix;
use crate::z2core::{add_into, Z2Column};

const NONE: usize = usize::MAX;

/// Runs the batched reduction and returns the chain-level graphcode: every
/// summand of every expression becomes an edge.
pub(super) fn run(matrix: &GradedMatrix, slices: &SliceAssignment, keep: bool) -> Graphcode {
    let sentinel = matrix.sentinel().expect("caller checks capping");
    let n = matrix.n_cols();
    let s = slices.slices();

    let mut batches: Vec<Vec<usize>> = vec![Vec::new(); s];
    for (c, &l) in slices.col_layers.iter().enumerate() {
        batches[l - 1].push(c);
    }

    let mut cols: Vec<Z2Column> = vec![Z2Column::new(); n];
    let mut owner = vec![NONE; matrix.n_rows()];
    // Node id (previous layer) of each column that was a basis element there.
    let mut tracked = vec![NONE; n];
    let mut added: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queued = vec![false; n];
    let mut heap = BinaryHeap::new();

    let mut nodes: Vec<GraphcodeNode> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut prev_basis: Vec<usize> = Vec::new();
    let mut node_of = vec![NONE; n];

    for layer in 1..=s {
        for &c in &batches[layer - 1] {
            cols[c] = matrix.columns[c].clone();
            queued[c] = true;
            heap.push(Reverse(c));
        }

        // Popped indices never decrease: a column only requeues columns to its right.
        while let Some(Reverse(j)) = heap.pop() {
            queued[j] = false;
            while let Some(p) = cols[j].pivot() {
                let k = owner[p];
                if k == NONE || k == j {
                    owner[p] = j;
                    break;
                }
                if k < j {
                    add_into(&mut cols, j, k);
                    if tracked[j] != NONE {
                        added[j].push(k);
                    }
                } else {
                    // Pivot stolen from a column to the right; it must be re-reduced.
                    owner[p] = j;
                    if !queued[k] {
                        queued[k] = true;
                        heap.push(Reverse(k));
                    }
                    break;
                }
            }
        }

        let mut basis = Vec::new();
        for (c, col) in cols.iter().enumerate() {
            let Some(p) = col.pivot() else { continue };
            let death = matrix.col_grades[c].x;
            node_of[c] = nodes.len();
            nodes.push(GraphcodeNode {
                id: nodes.len(),
                layer,
                bar: Bar {
                    birth: matrix.row_grades[p].x,
                    death,
                    essential: death >= sentinel,
                },
                representative: keep.then(|| col.clone()),
            });
            basis.push(c);
        }

        for &c in &prev_basis {
            let v = tracked[c];
            for &k in &added[c] {
                edges.push((v, node_of[k]));
            }
            if !cols[c].is_zero() {
                edges.push((v, node_of[c]));
            }
            added[c].clear();
            tracked[c] = NONE;
        }
        for &c in &basis {
            tracked[c] = node_of[c];
        }
        prev_basis = basis;
    }

    edges.sort_unstable();
    Graphcode {
        slices: s,
        cuts: slices.cuts.clone(),
        sentinel,
        nodes,
        edges,
    }
}
