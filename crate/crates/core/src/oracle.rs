//! Brute-force checks: from-scratch slice barcodes, pointwise Betti numbers,
//! the per-slice graphcode, and a verifier tying them to a computed graphcode.
//!
//! Everything here uses dense bit vectors and plain Gaussian elimination so it
//! shares no reduction code with the batched engine.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{boundary, BifilteredComplex, Bigrade, GradedMatrix, MatrixMode};
use crate::error::{Error, Result};
use crate::gcode::{assign_slices, Bar, Graphcode, GraphcodeNode, SliceAssignment};
use crate::z2core::{reduce, Z2Column};

/// Largest matrix (in rows) the dense oracle accepts.
pub const ORACLE_ROW_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitVec {
    words: Vec<u64>,
}

impl BitVec {
    fn zeros(n: usize) -> Self {
        BitVec {
            words: vec![0; n.div_ceil(64).max(1)],
        }
    }

    fn from_support(support: &[usize], n: usize) -> Self {
        let mut v = BitVec::zeros(n);
        for &r in support {
            v.words[r / 64] ^= 1 << (r % 64);
        }
        v
    }

    fn xor(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn highest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

/// Row-echelon basis keyed by highest set bit.
#[derive(Clone, Debug)]
struct Echelon {
    by_pivot: HashMap<usize, BitVec>,
}

impl Echelon {
    fn new() -> Self {
        Echelon {
            by_pivot: HashMap::new(),
        }
    }

    fn residual(&self, mut v: BitVec) -> BitVec {
        while let Some(p) = v.highest() {
            match self.by_pivot.get(&p) {
                Some(b) => v.xor(b),
                None => break,
            }
        }
        v
    }

    /// Adds `v`; false if it was already in the span.
    fn insert(&mut self, v: BitVec) -> bool {
        let r = self.residual(v);
        match r.highest() {
            Some(p) => {
                self.by_pivot.insert(p, r);
                true
            }
            None => false,
        }
    }

    fn contains(&self, v: BitVec) -> bool {
        self.residual(v).is_zero()
    }

    fn rank(&self) -> usize {
        self.by_pivot.len()
    }

    /// Dimension of the intersection with the span of rows `0..end`.
    fn rank_below(&self, end: usize) -> usize {
        self.by_pivot.keys().filter(|&&p| p < end).count()
    }
}

fn rank_of(vectors: impl IntoIterator<Item = BitVec>) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

fn check_size(matrix: &GradedMatrix) -> Result<()> {
    if matrix.n_rows() > ORACLE_ROW_LIMIT {
        return Err(Error::TooLarge {
            rows: matrix.n_rows(),
            limit: ORACLE_ROW_LIMIT,
        });
    }
    Ok(())
}

/// What the Betti numbers are computed from.
#[derive(Clone, Copy, Debug)]
pub enum HomologySource<'a> {
    Simplicial {
        complex: &'a BifilteredComplex,
        degree: usize,
    },
    /// A presentation matrix; cap columns, if any, are ignored.
    Presentation(&'a GradedMatrix),
}

/// Barcode of the slice `y <= cut`, by dense from-scratch reduction of a capped matrix.
pub fn slice_barcode(matrix: &GradedMatrix, cut: f64) -> Result<Vec<Bar>> {
    check_size(matrix)?;
    let sentinel = matrix.sentinel().ok_or(Error::Uncapped)?;
    let n = matrix.n_rows();
    let mut reduced: Vec<(usize, BitVec)> = Vec::new();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut bars = Vec::new();
    for (c, col) in matrix.columns.iter().enumerate() {
        if matrix.col_grades[c].y > cut {
            continue;
        }
        let mut v = BitVec::from_support(col.support(), n);
        while let Some(p) = v.highest() {
            match owner.get(&p) {
                Some(&k) => v.xor(&reduced[k].1),
                None => {
                    owner.insert(p, reduced.len());
                    let death = matrix.col_grades[c].x;
                    bars.push(Bar {
                        birth: matrix.row_grades[p].x,
                        death,
                        essential: death >= sentinel,
                    });
                    break;
                }
            }
        }
        reduced.push((c, v));
    }
    bars.sort_by(Bar::cmp_total);
    Ok(bars)
}

/// Dimension of `H_p` at grade `(x, y)`.
pub fn betti_at(source: HomologySource<'_>, x: f64, y: f64) -> usize {
    let at = Bigrade { x, y };
    match source {
        HomologySource::Presentation(m) => {
            let base_cols = m.cap.map_or(m.n_cols(), |c| c.base_cols);
            let base_rows = m.cap.map_or(m.n_rows(), |c| c.base_rows);
            let live_gens = m.row_grades[..base_rows]
                .iter()
                .filter(|g| g.le(&at))
                .count();
            let rel_rank = rank_of(
                (0..base_cols)
                    .filter(|&c| m.col_grades[c].le(&at))
                    .map(|c| BitVec::from_support(m.columns[c].support(), m.n_rows())),
            );
            live_gens - rel_rank
        }
        HomologySource::Simplicial { complex, degree } => {
            let live: Vec<_> = complex
                .simplices()
                .iter()
                .filter(|(_, g)| g.le(&at))
                .map(|(s, _)| s)
                .collect();
            let index_of = |dim: usize| -> HashMap<_, usize> {
                live.iter()
                    .filter(|s| s.dim() == dim)
                    .enumerate()
                    .map(|(i, &s)| (s.clone(), i))
                    .collect()
            };
            let boundary_rank = |dim: usize| -> usize {
                if dim == 0 {
                    return 0;
                }
                let faces = index_of(dim - 1);
                rank_of(live.iter().filter(|s| s.dim() == dim).map(|s| {
                    let support: Vec<usize> = boundary(s).iter().map(|f| faces[f]).collect();
                    BitVec::from_support(&support, faces.len())
                }))
            };
            let n_p = live.iter().filter(|s| s.dim() == degree).count();
            n_p - boundary_rank(degree) - boundary_rank(degree + 1)
        }
    }
}

struct Slice {
    nodes: Vec<GraphcodeNode>,
    /// Pivot row to position in `nodes`.
    pivot_node: HashMap<usize, usize>,
}

/// The straightforward graphcode: every slice is reduced from scratch, and
/// every basis cycle is solved against the next slice's reduced basis.
pub fn naive_graphcode(
    matrix: &GradedMatrix,
    s: usize,
    keep_representatives: bool,
) -> Result<Graphcode> {
    naive_graphcode_with(matrix, &assign_slices(matrix, s)?, keep_representatives)
}

pub fn naive_graphcode_with(
    matrix: &GradedMatrix,
    slices: &SliceAssignment,
    keep_representatives: bool,
) -> Result<Graphcode> {
    let sentinel = matrix.sentinel().ok_or(Error::Uncapped)?;
    let mut layers: Vec<Slice> = Vec::with_capacity(slices.slices());
    let mut next_id = 0;
    for layer in 1..=slices.slices() {
        let idx: Vec<usize> = (0..matrix.n_cols())
            .filter(|&c| slices.col_layers[c] <= layer)
            .collect();
        let cols: Vec<Z2Column> = idx.iter().map(|&c| matrix.columns[c].clone()).collect();
        let reduced = reduce(&cols, None);
        let mut nodes = Vec::new();
        let mut pivot_node = HashMap::new();
        for (k, col) in reduced.into_iter().enumerate() {
            let Some(p) = col.pivot() else { continue };
            let death = matrix.col_grades[idx[k]].x;
            pivot_node.insert(p, nodes.len());
            nodes.push(GraphcodeNode {
                id: next_id,
                layer,
                bar: Bar {
                    birth: matrix.row_grades[p].x,
                    death,
                    essential: death >= sentinel,
                },
                representative: Some(col),
            });
            next_id += 1;
        }
        layers.push(Slice { nodes, pivot_node });
    }

    let mut edges = Vec::new();
    for pair in layers.windows(2) {
        let (lower, upper) = (&pair[0], &pair[1]);
        for v in &lower.nodes {
            let mut residual = v.representative.clone().expect("kept above");
            while let Some(p) = residual.pivot() {
                let w = *upper.pivot_node.get(&p).ok_or_else(|| {
                    Error::Internal(format!(
                        "basis cycle of node {} is not expressible in layer {}",
                        v.id,
                        v.layer + 1
                    ))
                })?;
                let target = &upper.nodes[w];
                residual.add_assign(target.representative.as_ref().expect("kept above"));
                edges.push((v.id, target.id));
            }
        }
    }
    edges.sort_unstable();

    let mut nodes: Vec<GraphcodeNode> = layers.into_iter().flat_map(|l| l.nodes).collect();
    if !keep_representatives {
        for n in &mut nodes {
            n.representative = None;
        }
    }
    Ok(Graphcode {
        slices: slices.slices(),
        cuts: slices.cuts.clone(),
        sentinel,
        nodes,
        edges,
    }
    .prune_dead_summands())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    pub layer: Option<usize>,
    pub node: Option<usize>,
    pub edge: Option<(usize, usize)>,
    pub x: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// One flag per layer.
    pub bars_match: Vec<bool>,
    pub edge_identity_ok: bool,
    pub overlap_ok: bool,
    pub definition1_ok: bool,
    pub betti_grid_ok: bool,
    /// First failure found, in check order.
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.bars_match.iter().all(|&b| b)
            && self.edge_identity_ok
            && self.overlap_ok
            && self.definition1_ok
            && self.betti_grid_ok
    }
}

struct Recorder {
    witness: Option<Witness>,
}

impl Recorder {
    fn fail(
        &mut self,
        check: &str,
        layer: Option<usize>,
        node: Option<usize>,
        edge: Option<(usize, usize)>,
        x: Option<f64>,
        detail: String,
    ) {
        if self.witness.is_none() {
            self.witness = Some(Witness {
                check: check.to_string(),
                layer,
                node,
                edge,
                x,
                detail,
            });
        }
    }
}

/// Checks a graphcode computed with representatives and without thresholding:
/// per-layer bars, the edge identity, the overlap inequalities, the barcode
/// basis rank conditions, and alive counts against Betti numbers.
///
/// The edge identity is `rep(v) = sum of rep(w)` over successors `w`, up to
/// cycles of layer `l + 1` that are already dead at `birth(v)`.
pub fn verify_graphcode(
    source: HomologySource<'_>,
    matrix: &GradedMatrix,
    gc: &Graphcode,
) -> Result<VerificationReport> {
    check_size(matrix)?;
    let sentinel = matrix.sentinel().ok_or(Error::Uncapped)?;
    if !gc.has_representatives() {
        return Err(Error::InvalidArgument(
            "verification needs a graphcode computed with representatives".into(),
        ));
    }
    match (source, matrix.mode) {
        (HomologySource::Presentation(_), MatrixMode::Presentation)
        | (HomologySource::Simplicial { .. }, MatrixMode::Simplicial) => {}
        _ => {
            return Err(Error::InvalidArgument(
                "homology source and matrix mode disagree".into(),
            ))
        }
    }
    let n = matrix.n_rows();
    let s = gc.cuts.len();
    let mut rec = Recorder { witness: None };
    let rep = |v: &GraphcodeNode| {
        BitVec::from_support(v.representative.as_ref().expect("checked").support(), n)
    };
    let layer_nodes: Vec<Vec<&GraphcodeNode>> = (1..=s).map(|l| gc.layer(l).collect()).collect();

    // (i) bars per layer
    let mut bars_match = Vec::with_capacity(s);
    for (l, &cut) in gc.cuts.iter().enumerate() {
        let expected = slice_barcode(matrix, cut)?;
        let got = gc.layer_bars(l + 1);
        let ok = expected == got;
        if !ok {
            rec.fail(
                "bars",
                Some(l + 1),
                None,
                None,
                None,
                format!("expected {} bars, found {}", expected.len(), got.len()),
            );
        }
        bars_match.push(ok);
    }

    // (ii) edge identity, (iii) overlap
    let adj = gc.adjacency();
    let mut overlap_ok = true;
    for &(v, w) in &gc.edges {
        let (a, b) = (&gc.nodes[v], &gc.nodes[w]);
        let ok = b.layer == a.layer + 1
            && b.bar.birth <= a.bar.birth
            && a.bar.birth < b.bar.death
            && b.bar.death <= a.bar.death;
        if !ok {
            overlap_ok = false;
            rec.fail(
                "overlap",
                Some(a.layer),
                Some(v),
                Some((v, w)),
                None,
                format!(
                    "[{}, {}) -> [{}, {})",
                    a.bar.birth, a.bar.death, b.bar.birth, b.bar.death
                ),
            );
        }
    }
    let mut edge_identity_ok = true;
    for l in 1..=s {
        for v in &layer_nodes[l - 1] {
            if l == s {
                if !adj[v.id].is_empty() {
                    edge_identity_ok = false;
                    rec.fail(
                        "edge_identity",
                        Some(l),
                        Some(v.id),
                        None,
                        None,
                        "edge out of the top layer".into(),
                    );
                }
                continue;
            }
            let mut diff = rep(v);
            for &w in &adj[v.id] {
                diff.xor(&rep(&gc.nodes[w]));
            }
            let mut dead = Echelon::new();
            for w in &layer_nodes[l] {
                if w.bar.death <= v.bar.birth {
                    dead.insert(rep(w));
                }
            }
            if !dead.contains(diff) {
                edge_identity_ok = false;
                rec.fail(
                    "edge_identity",
                    Some(l),
                    Some(v.id),
                    None,
                    None,
                    "representative differs from the sum of its successors by a live cycle".into(),
                );
            }
        }
    }

    // (iv) barcode basis conditions
    let mut xs: Vec<f64> = matrix
        .row_grades
        .iter()
        .chain(&matrix.col_grades)
        .map(|g| g.x)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut definition1_ok = true;
    for (l, &cut) in gc.cuts.iter().enumerate() {
        let layer = l + 1;
        let nodes = &layer_nodes[l];
        let slice_cols: Vec<usize> = (0..matrix.n_cols())
            .filter(|&c| matrix.col_grades[c].y <= cut)
            .collect();
        let mut cycles = Echelon::new();
        for &c in &slice_cols {
            cycles.insert(BitVec::from_support(matrix.columns[c].support(), n));
        }
        for v in nodes {
            let r = v.representative.as_ref().expect("checked");
            let support_ok = !r.is_zero()
                && matrix.row_grades[r.pivot().unwrap()].x == v.bar.birth
                && r.support().iter().all(|&row| {
                    let g = matrix.row_grades[row];
                    g.y <= cut && g.x <= v.bar.birth
                });
            if !support_ok || !cycles.contains(rep(v)) {
                definition1_ok = false;
                rec.fail(
                    "definition1",
                    Some(layer),
                    Some(v.id),
                    None,
                    None,
                    "representative is not a cycle of its slice born at its birth".into(),
                );
            }
        }
        let mut by_birth: Vec<&&GraphcodeNode> = nodes.iter().collect();
        by_birth.sort_by(|a, b| a.bar.birth.total_cmp(&b.bar.birth));
        let mut by_death: Vec<&&GraphcodeNode> = nodes.iter().collect();
        by_death.sort_by(|a, b| a.bar.death.total_cmp(&b.bar.death));
        let mut cols_by_x = slice_cols.clone();
        cols_by_x.sort_by(|&a, &b| matrix.col_grades[a].x.total_cmp(&matrix.col_grades[b].x));

        let (mut bi, mut di, mut ci) = (0, 0, 0);
        let mut born = Echelon::new();
        let mut dead = Echelon::new();
        let mut boundaries = Echelon::new();
        let mut dead_count = 0;
        let mut dead_in_boundaries = true;
        for &x in &xs {
            let mut independent = true;
            while bi < by_birth.len() && by_birth[bi].bar.birth <= x {
                independent &= born.insert(rep(by_birth[bi]));
                bi += 1;
            }
            while ci < cols_by_x.len() && matrix.col_grades[cols_by_x[ci]].x <= x {
                boundaries.insert(BitVec::from_support(
                    matrix.columns[cols_by_x[ci]].support(),
                    n,
                ));
                ci += 1;
            }
            // Boundaries only grow with x, so membership is checked once, at death.
            while di < by_death.len() && by_death[di].bar.death <= x {
                dead_in_boundaries &= boundaries.contains(rep(by_death[di]));
                independent &= dead.insert(rep(by_death[di]));
                dead_count += 1;
                di += 1;
            }
            let live_rows = matrix.row_grades.partition_point(|g| g.x <= x);
            let cycle_dim = cycles.rank_below(live_rows);
            let ok = independent
                && dead_in_boundaries
                && born.rank() == bi
                && bi == cycle_dim
                && dead_count == boundaries.rank();
            if !ok {
                definition1_ok = false;
                rec.fail(
                    "definition1",
                    Some(layer),
                    None,
                    None,
                    Some(x),
                    format!(
                    "born {bi} (cycle space {cycle_dim}), dead {dead_count} (boundary space {})",
                    boundaries.rank()
                ),
                );
                break;
            }
        }
    }

    // (v) alive counts against Betti numbers
    let base_rows = matrix.cap.map_or(n, |c| c.base_rows);
    let base_cols = matrix.cap.map_or(matrix.n_cols(), |c| c.base_cols);
    let mut grid_x: Vec<f64> = matrix.row_grades[..base_rows]
        .iter()
        .chain(&matrix.col_grades[..base_cols])
        .map(|g| g.x)
        .filter(|&x| x < sentinel)
        .collect();
    grid_x.sort_by(f64::total_cmp);
    grid_x.dedup();
    let grid: Vec<(usize, f64, f64)> = gc
        .cuts
        .iter()
        .enumerate()
        .flat_map(|(l, &cut)| grid_x.iter().map(move |&x| (l + 1, x, cut)))
        .collect();
    let results: Vec<(usize, usize)> = grid
        .par_iter()
        .map(|&(layer, x, cut)| {
            let alive = layer_nodes[layer - 1]
                .iter()
                .filter(|v| v.bar.alive_at(x))
                .count();
            (alive, betti_at(source, x, cut))
        })
        .collect();
    let mut betti_grid_ok = true;
    for (&(layer, x, cut), &(alive, betti)) in grid.iter().zip(&results) {
        if alive != betti {
            betti_grid_ok = false;
            rec.fail(
                "betti_grid",
                Some(layer),
                None,
                None,
                Some(x),
                format!("{alive} alive bars, Betti number {betti} at ({x}, {cut})"),
            );
        }
    }

    Ok(VerificationReport {
        bars_match,
        edge_identity_ok,
        overlap_ok,
        definition1_ok,
        betti_grid_ok,
        witness: rec.witness,
    })
}
