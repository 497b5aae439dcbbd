//! Bifiltered simplicial complexes and the graded boundary matrices built from them.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::z2core::Z2Column;

/// A point of the two-parameter grid. `x` is the within-slice scale, `y` the slice scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bigrade {
    pub x: f64,
    pub y: f64,
}

impl Bigrade {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grade ({x}, {y}) is not finite"
            )));
        }
        Ok(Bigrade { x, y })
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Bigrade) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    pub fn join(&self, other: &Bigrade) -> Bigrade {
        Bigrade {
            x: self.x.max(other.x),
            y: self.y.max(other.y),
        }
    }

    pub fn transposed(&self) -> Bigrade {
        Bigrade {
            x: self.y,
            y: self.x,
        }
    }

    /// Sort key order: x, then y.
    pub fn cmp_xy(&self, other: &Bigrade) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Bigrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A simplex given by its strictly increasing vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex(Vec<u32>);

impl Simplex {
    /// Sorts the vertices; rejects empty input and repeated vertices.
    pub fn new(mut vertices: Vec<u32>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("simplex has no vertices".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "simplex has repeated vertices: {vertices:?}"
            )));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn boundary(&self) -> Vec<Simplex> {
        boundary(self)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// All facets, obtained by dropping one vertex at a time, first vertex first.
pub fn boundary(simplex: &Simplex) -> Vec<Simplex> {
    let v = &simplex.0;
    if v.len() < 2 {
        return Vec::new();
    }
    (0..v.len())
        .map(|skip| {
            Simplex(
                v.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &x)| x)
                    .collect(),
            )
        })
        .collect()
}

/// A 1-critical bifiltration: each simplex with its entry grade.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BifilteredComplex {
    simplices: Vec<(Simplex, Bigrade)>,
}

/// One violated complex invariant. Indices refer to positions in the simplex list.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Closure {
        index: usize,
        simplex: Simplex,
        missing: Simplex,
    },
    Monotonicity {
        index: usize,
        simplex: Simplex,
        facet: Simplex,
    },
    Duplicate {
        index: usize,
        first: usize,
        simplex: Simplex,
    },
}

impl Violation {
    pub fn index(&self) -> usize {
        match self {
            Violation::Closure { index, .. }
            | Violation::Monotonicity { index, .. }
            | Violation::Duplicate { index, .. } => *index,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Closure {
                simplex, missing, ..
            } => write!(f, "closure: facet {missing} of {simplex} is missing"),
            Violation::Monotonicity { simplex, facet, .. } => {
                write!(f, "monotonicity: {simplex} enters before its facet {facet}")
            }
            Violation::Duplicate { simplex, first, .. } => write!(
                f,
                "1-criticality: {simplex} already appears at entry {first}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl BifilteredComplex {
    /// Wraps a simplex list without checking it; see [`validate`].
    pub fn new(simplices: Vec<(Simplex, Bigrade)>) -> Self {
        BifilteredComplex { simplices }
    }

    /// Wraps a simplex list, rejecting it if [`validate`] reports anything.
    pub fn validated(simplices: Vec<(Simplex, Bigrade)>) -> Result<Self> {
        let c = BifilteredComplex { simplices };
        let report = validate(&c);
        if report.is_ok() {
            Ok(c)
        } else {
            Err(Error::InvalidComplex(report.to_string()))
        }
    }

    pub fn simplices(&self) -> &[(Simplex, Bigrade)] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.iter().map(|(s, _)| s.dim()).max()
    }

    pub fn transposed(&self) -> Self {
        BifilteredComplex {
            simplices: self
                .simplices
                .iter()
                .map(|(s, g)| (s.clone(), g.transposed()))
                .collect(),
        }
    }

    fn index_map(&self) -> HashMap<&Simplex, usize> {
        let mut map = HashMap::with_capacity(self.simplices.len());
        for (i, (s, _)) in self.simplices.iter().enumerate() {
            map.entry(s).or_insert(i);
        }
        map
    }
}

/// Reports every closure, monotonicity and 1-criticality violation.
pub fn validate(complex: &BifilteredComplex) -> ValidationReport {
    let mut violations = Vec::new();
    let index = complex.index_map();
    for (i, (s, g)) in complex.simplices.iter().enumerate() {
        let first = index[s];
        if first != i {
            violations.push(Violation::Duplicate {
                index: i,
                first,
                simplex: s.clone(),
            });
            continue;
        }
        for facet in boundary(s) {
            match index.get(&facet) {
                None => violations.push(Violation::Closure {
                    index: i,
                    simplex: s.clone(),
                    missing: facet,
                }),
                Some(&j) => {
                    if !complex.simplices[j].1.le(g) {
                        violations.push(Violation::Monotonicity {
                            index: i,
                            simplex: s.clone(),
                            facet,
                        });
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixMode {
    Simplicial,
    Presentation,
}

/// Bookkeeping attached by [`cap`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapInfo {
    pub sentinel: f64,
    /// Rows before this index are uncapped input rows.
    pub base_rows: usize,
    /// Columns before this index are uncapped input columns.
    pub base_cols: usize,
}

/// Rows (p-simplices or generators) and Z₂ columns ((p+1)-simplex boundaries or
/// relations), each with a grade, sorted by (x, y, input order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedMatrix {
    pub mode: MatrixMode,
    /// Homology degree, for simplicial matrices.
    pub degree: Option<usize>,
    pub row_grades: Vec<Bigrade>,
    /// Input index of each row (simplex index, or generator index).
    pub row_ids: Vec<usize>,
    pub columns: Vec<Z2Column>,
    pub col_grades: Vec<Bigrade>,
    /// Input index of each column (simplex index, or relation index).
    pub col_ids: Vec<usize>,
    pub cap: Option<CapInfo>,
}

fn sorted_order(grades: &[Bigrade]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..grades.len()).collect();
    order.sort_by(|&a, &b| grades[a].cmp_xy(&grades[b]).then(a.cmp(&b)));
    order
}

impl GradedMatrix {
    /// Sorts rows and columns and checks admissibility. Column supports index
    /// into `rows` in input order.
    pub fn from_unsorted(
        mode: MatrixMode,
        degree: Option<usize>,
        rows: Vec<(usize, Bigrade)>,
        columns: Vec<(usize, Vec<usize>, Bigrade)>,
    ) -> Result<Self> {
        let row_input_grades: Vec<Bigrade> = rows.iter().map(|r| r.1).collect();
        let row_order = sorted_order(&row_input_grades);
        let mut new_index = vec![0usize; rows.len()];
        for (pos, &old) in row_order.iter().enumerate() {
            new_index[old] = pos;
        }
        let col_input_grades: Vec<Bigrade> = columns.iter().map(|c| c.2).collect();
        let col_order = sorted_order(&col_input_grades);

        let mut out_columns = Vec::with_capacity(columns.len());
        let mut col_grades = Vec::with_capacity(columns.len());
        let mut col_ids = Vec::with_capacity(columns.len());
        for &c in &col_order {
            let (id, ref support, grade) = columns[c];
            for &r in support {
                if r >= rows.len() {
                    return Err(Error::InvalidArgument(format!(
                        "column {id} references row {r}, only {} rows exist",
                        rows.len()
                    )));
                }
                if !rows[r].1.le(&grade) {
                    return Err(Error::InvalidArgument(format!(
                        "column {id} at {grade} is not admissible: row {} enters at {}",
                        rows[r].0, rows[r].1
                    )));
                }
            }
            out_columns.push(Z2Column::from_indices(
                support.iter().map(|&r| new_index[r]),
            ));
            col_grades.push(grade);
            col_ids.push(id);
        }
        Ok(GradedMatrix {
            mode,
            degree,
            row_grades: row_order.iter().map(|&r| rows[r].1).collect(),
            row_ids: row_order.iter().map(|&r| rows[r].0).collect(),
            columns: out_columns,
            col_grades,
            col_ids,
            cap: None,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_grades.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn sentinel(&self) -> Option<f64> {
        self.cap.map(|c| c.sentinel)
    }

    pub fn is_capped(&self) -> bool {
        self.cap.is_some()
    }

    /// Largest x grade over rows and columns, if any.
    pub fn max_x(&self) -> Option<f64> {
        self.row_grades
            .iter()
            .chain(self.col_grades.iter())
            .map(|g| g.x)
            .reduce(f64::max)
    }

    /// All y grades, rows first.
    pub fn y_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.row_grades
            .iter()
            .chain(self.col_grades.iter())
            .map(|g| g.y)
    }

    /// Checks that every column grade dominates the grades of its support rows.
    pub fn is_admissible(&self) -> bool {
        self.columns
            .iter()
            .zip(&self.col_grades)
            .all(|(c, g)| c.support().iter().all(|&r| self.row_grades[r].le(g)))
    }

    /// Swaps x and y in every grade and re-sorts. Only for uncapped matrices.
    pub fn transposed(&self) -> Result<Self> {
        if self.is_capped() {
            return Err(Error::InvalidArgument("transpose before capping".into()));
        }
        let mut rows: Vec<(usize, Bigrade)> = self
            .row_ids
            .iter()
            .zip(&self.row_grades)
            .map(|(&id, g)| (id, g.transposed()))
            .collect();
        // Restore input order so ties keep breaking by input index.
        let mut by_input: Vec<usize> = (0..rows.len()).collect();
        by_input.sort_by_key(|&r| self.row_ids[r]);
        let mut position = vec![0usize; rows.len()];
        for (new, &old) in by_input.iter().enumerate() {
            position[old] = new;
        }
        rows = by_input.iter().map(|&r| rows[r]).collect();
        let mut columns: Vec<(usize, Vec<usize>, Bigrade)> = self
            .columns
            .iter()
            .zip(&self.col_grades)
            .zip(&self.col_ids)
            .map(|((c, g), &id)| {
                (
                    id,
                    c.support().iter().map(|&r| position[r]).collect(),
                    g.transposed(),
                )
            })
            .collect();
        columns.sort_by_key(|c| c.0);
        GradedMatrix::from_unsorted(self.mode, self.degree, rows, columns)
    }
}

/// Rows are the p-simplices, columns the boundaries of the (p+1)-simplices.
pub fn build_graded_matrix(complex: &BifilteredComplex, p: usize) -> Result<GradedMatrix> {
    let index = complex.index_map();
    let mut row_of = HashMap::new();
    let mut rows = Vec::new();
    for (i, (s, g)) in complex.simplices.iter().enumerate() {
        if s.dim() == p {
            row_of.insert(i, rows.len());
            rows.push((i, *g));
        }
    }
    let mut columns = Vec::new();
    for (i, (s, g)) in complex.simplices.iter().enumerate() {
        if s.dim() == p + 1 {
            let mut support = Vec::with_capacity(p + 2);
            for facet in boundary(s) {
                let j = index.get(&facet).ok_or_else(|| {
                    Error::InvalidComplex(format!("closure: facet {facet} of {s} is missing"))
                })?;
                support.push(row_of[j]);
            }
            columns.push((i, support, *g));
        }
    }
    GradedMatrix::from_unsorted(MatrixMode::Simplicial, Some(p), rows, columns)
}

/// Appends cone rows and columns (simplicial) or unit relations (presentation)
/// at the sentinel `S = max x + 1`, so that every class dies by `S`.
pub fn cap(matrix: &GradedMatrix, source: Option<&BifilteredComplex>) -> Result<GradedMatrix> {
    if matrix.is_capped() {
        return Err(Error::InvalidArgument("matrix is already capped".into()));
    }
    let sentinel = matrix.max_x().unwrap_or(0.0) + 1.0;
    let mut out = matrix.clone();
    let base_rows = matrix.n_rows();
    let base_cols = matrix.n_cols();
    match matrix.mode {
        MatrixMode::Presentation => {
            let order = y_order(&matrix.row_grades);
            for r in order {
                out.columns.push(Z2Column::unit(r));
                out.col_grades.push(Bigrade {
                    x: sentinel,
                    y: matrix.row_grades[r].y,
                });
                out.col_ids.push(matrix.row_ids[r]);
            }
        }
        MatrixMode::Simplicial => {
            let complex = source.ok_or_else(|| {
                Error::InvalidArgument("capping a simplicial matrix needs its complex".into())
            })?;
            let p = matrix.degree.ok_or_else(|| {
                Error::InvalidArgument("simplicial matrix without a degree".into())
            })?;
            let index = complex.index_map();
            // Cone rows w*t for every (p-1)-simplex t.
            let mut cone_rows: HashMap<usize, usize> = HashMap::new();
            if p > 0 {
                let faces: Vec<(usize, Bigrade)> = complex
                    .simplices
                    .iter()
                    .enumerate()
                    .filter(|(_, (s, _))| s.dim() == p - 1)
                    .map(|(i, (_, g))| (i, *g))
                    .collect();
                let grades: Vec<Bigrade> = faces.iter().map(|f| f.1).collect();
                for k in y_order(&grades) {
                    let (id, g) = faces[k];
                    cone_rows.insert(id, out.row_grades.len());
                    out.row_grades.push(Bigrade {
                        x: sentinel,
                        y: g.y,
                    });
                    out.row_ids.push(id);
                }
            }
            // Cone columns w*s for every p-simplex s: support s + w*(boundary of s).
            for r in y_order(&matrix.row_grades[..base_rows]) {
                let id = matrix.row_ids[r];
                let simplex = &complex.simplices[id].0;
                let mut support = vec![r];
                for facet in boundary(simplex) {
                    let j = index.get(&facet).ok_or_else(|| {
                        Error::InvalidComplex(format!(
                            "closure: facet {facet} of {simplex} is missing"
                        ))
                    })?;
                    support.push(cone_rows[j]);
                }
                out.columns.push(Z2Column::from_indices(support));
                out.col_grades.push(Bigrade {
                    x: sentinel,
                    y: matrix.row_grades[r].y,
                });
                out.col_ids.push(id);
            }
        }
    }
    out.cap = Some(CapInfo {
        sentinel,
        base_rows,
        base_cols,
    });
    Ok(out)
}

/// Indices sorted by y, ties by position.
fn y_order(grades: &[Bigrade]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..grades.len()).collect();
    order.sort_by(|&a, &b| grades[a].y.total_cmp(&grades[b].y).then(a.cmp(&b)));
    order
}
