//! Graphcodes: one barcode per horizontal slice, with edges expressing each
//! basis cycle of a slice in the basis of the next slice.

mod batched;
mod slices;

use serde::{Deserialize, Serialize};

pub use slices::{assign_slices, assign_slices_with, SliceAssignment, SliceMode};

use crate::complex::GradedMatrix;
use crate::error::{Error, Result};
use crate::z2core::Z2Column;

/// Half-open interval `[birth, death)` in x units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
    /// The bar only dies at the sentinel added by capping.
    pub essential: bool,
}

impl Bar {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn alive_at(&self, x: f64) -> bool {
        self.birth <= x && x < self.death
    }

    /// Total order used to compare bar multisets.
    pub fn cmp_total(&self, other: &Bar) -> std::cmp::Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
            .then(self.essential.cmp(&other.essential))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphcodeNode {
    pub id: usize,
    /// 1-based layer index.
    pub layer: usize,
    pub bar: Bar,
    /// Basis cycle over global row indices, when requested.
    pub representative: Option<Z2Column>,
}

/// A layered graph. Edges `(v, w)` run from layer `l` to layer `l + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graphcode {
    pub slices: usize,
    pub cuts: Vec<f64>,
    pub sentinel: f64,
    pub nodes: Vec<GraphcodeNode>,
    pub edges: Vec<(usize, usize)>,
}

impl Graphcode {
    pub fn layer(&self, layer: usize) -> impl Iterator<Item = &GraphcodeNode> {
        self.nodes.iter().filter(move |n| n.layer == layer)
    }

    /// Sorted bars of one layer.
    pub fn layer_bars(&self, layer: usize) -> Vec<Bar> {
        let mut bars: Vec<Bar> = self.layer(layer).map(|n| n.bar).collect();
        bars.sort_by(Bar::cmp_total);
        bars
    }

    /// Successors of every node, indexed by node id.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(v, w) in &self.edges {
            adj[v].push(w);
        }
        adj
    }

    pub fn has_representatives(&self) -> bool {
        self.nodes.iter().all(|n| n.representative.is_some())
    }

    /// Keeps the edges `(v, w)` with `death(w) > birth(v)`. The dropped summands
    /// are boundaries wherever `v` is alive, so they carry no homology.
    pub fn prune_dead_summands(mut self) -> Self {
        let nodes = &self.nodes;
        self.edges
            .retain(|&(v, w)| nodes[w].bar.death > nodes[v].bar.birth);
        self
    }
}

fn check_capped(matrix: &GradedMatrix) -> Result<()> {
    if matrix.is_capped() {
        Ok(())
    } else {
        Err(Error::Uncapped)
    }
}

/// Graphcode of a capped matrix with `s` equidistant slices.
///
/// Every nonzero reduced column of a slice is a node, zero-length bars
/// included. Edge summands that are already dead where the source bar is born
/// are dropped, see [`Graphcode::prune_dead_summands`].
pub fn compute_graphcode(
    matrix: &GradedMatrix,
    s: usize,
    keep_representatives: bool,
) -> Result<Graphcode> {
    let slices = assign_slices(matrix, s)?;
    compute_graphcode_with(matrix, &slices, keep_representatives)
}

pub fn compute_graphcode_with(
    matrix: &GradedMatrix,
    slices: &SliceAssignment,
    keep_representatives: bool,
) -> Result<Graphcode> {
    Ok(compute_chain_graphcode(matrix, slices, keep_representatives)?.prune_dead_summands())
}

/// Like [`compute_graphcode_with`] but keeps every summand of every
/// expression: the representative of each node equals the sum of the
/// representatives of its successors exactly.
pub fn compute_chain_graphcode(
    matrix: &GradedMatrix,
    slices: &SliceAssignment,
    keep_representatives: bool,
) -> Result<Graphcode> {
    check_capped(matrix)?;
    if slices.row_layers.len() != matrix.n_rows() || slices.col_layers.len() != matrix.n_cols() {
        return Err(Error::InvalidArgument(
            "slice assignment does not match the matrix".into(),
        ));
    }
    Ok(batched::run(matrix, slices, keep_representatives))
}

/// Induced subgraph on the nodes with `death - birth > t`; ids are renumbered densely.
pub fn threshold_filter(gc: &Graphcode, t: f64) -> Result<Graphcode> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "threshold must be non-negative, got {t}"
        )));
    }
    let mut new_id = vec![usize::MAX; gc.nodes.len()];
    let mut nodes = Vec::new();
    for n in &gc.nodes {
        if n.bar.persistence() > t {
            new_id[n.id] = nodes.len();
            nodes.push(GraphcodeNode {
                id: nodes.len(),
                ..n.clone()
            });
        }
    }
    let mut edges: Vec<(usize, usize)> = gc
        .edges
        .iter()
        .filter(|&&(v, w)| new_id[v] != usize::MAX && new_id[w] != usize::MAX)
        .map(|&(v, w)| (new_id[v], new_id[w]))
        .collect();
    edges.sort_unstable();
    Ok(Graphcode {
        slices: gc.slices,
        cuts: gc.cuts.clone(),
        sentinel: gc.sentinel,
        nodes,
        edges,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NodeAttribute {
    pub birth: f64,
    pub death: f64,
    pub additive: f64,
    pub multiplicative: f64,
    pub layer: usize,
}

impl NodeAttribute {
    /// `[b, d, d - b, d / b]`; the layer is kept apart.
    pub fn features(&self) -> [f64; 4] {
        [self.birth, self.death, self.additive, self.multiplicative]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeAttributes {
    pub rows: Vec<NodeAttribute>,
    /// Some node had `b <= 0`; its ratio was written as 0.
    pub ratio_suppressed: bool,
}

pub fn node_attributes(gc: &Graphcode) -> NodeAttributes {
    let mut ratio_suppressed = false;
    let rows = gc
        .nodes
        .iter()
        .map(|n| {
            let (b, d) = (n.bar.birth, n.bar.death);
            let multiplicative = if b > 0.0 {
                d / b
            } else {
                ratio_suppressed = true;
                0.0
            };
            NodeAttribute {
                birth: b,
                death: d,
                additive: d - b,
                multiplicative,
                layer: n.layer,
            }
        })
        .collect();
    NodeAttributes {
        rows,
        ratio_suppressed,
    }
}
