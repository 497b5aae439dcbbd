//! Text formats: presentations, simplicial bifiltrations, point clouds and graphcode JSON.
//!
//! Presentation files are the two-parameter, relations-then-generators subset
//! of the `scc2020` interchange format:
//!
//! ```text
//! scc2020
//! # comment
//! 2
//! <#relations> <#generators>
//! x y ; i1 i2 ...      one line per relation, 0-based generator indices
//! x y ;                one line per generator
//! ```
//!
//! Simplicial files hold one simplex per line as `x y ; v0 v1 ... vk`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{validate, BifilteredComplex, Bigrade, GradedMatrix, MatrixMode, Simplex};
use crate::error::{Error, Result};
use crate::gcode::{node_attributes, Bar, Graphcode, GraphcodeNode};
use crate::z2core::Z2Column;

/// Significant lines: 1-based line number and trimmed content, comments and blanks dropped.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("`{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("`{tok}` is not finite")));
    }
    Ok(v)
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("`{tok}` is not a non-negative integer")))
}

/// Splits `x y ; rest` into the grade and the tokens after the semicolon.
fn graded_line(content: &str, line: usize) -> Result<(Bigrade, Vec<&str>)> {
    let (grade, rest) = content
        .split_once(';')
        .ok_or_else(|| Error::parse(line, "missing `;` after the grade"))?;
    let coords: Vec<&str> = grade.split_whitespace().collect();
    if coords.len() != 2 {
        return Err(Error::parse(
            line,
            format!("expected 2 grade coordinates, found {}", coords.len()),
        ));
    }
    let g = Bigrade {
        x: parse_f64(coords[0], line)?,
        y: parse_f64(coords[1], line)?,
    };
    Ok((g, rest.split_whitespace().collect()))
}

pub fn parse_presentation(text: &str) -> Result<GradedMatrix> {
    let mut lines = significant_lines(text);
    let last_line = text.lines().count().max(1);
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| {
            Error::parse(
                last_line,
                format!("unexpected end of file, expected {what}"),
            )
        })
    };

    let (line, header) = next("the `scc2020` header")?;
    if header != "scc2020" {
        return Err(Error::parse(
            line,
            format!("expected header `scc2020`, found `{header}`"),
        ));
    }
    let (line, params) = next("the parameter count")?;
    if params != "2" {
        return Err(Error::parse(
            line,
            format!("parameter count must be 2, found `{params}`"),
        ));
    }
    let (line, sizes) = next("the block sizes")?;
    let sizes: Vec<&str> = sizes.split_whitespace().collect();
    // A trailing 0 (empty third block) is tolerated.
    let (n_rel, n_gen) = match sizes.as_slice() {
        [r, g] | [r, g, "0"] => (parse_usize(r, line)?, parse_usize(g, line)?),
        _ => return Err(Error::parse(line, "expected `<#relations> <#generators>`")),
    };

    let mut relations = Vec::with_capacity(n_rel);
    for k in 0..n_rel {
        let (line, content) = next(&format!("relation {k}"))?;
        let (grade, toks) = graded_line(content, line)?;
        let mut idx = Vec::with_capacity(toks.len());
        for t in toks {
            let i = parse_usize(t, line)?;
            if i >= n_gen {
                return Err(Error::parse(
                    line,
                    format!("generator index {i} out of range (0..{n_gen})"),
                ));
            }
            if idx.contains(&i) {
                return Err(Error::parse(line, format!("generator index {i} repeated")));
            }
            idx.push(i);
        }
        relations.push((line, grade, idx));
    }
    let mut generators = Vec::with_capacity(n_gen);
    for k in 0..n_gen {
        let (line, content) = next(&format!("generator {k}"))?;
        let (grade, toks) = graded_line(content, line)?;
        if !toks.is_empty() {
            return Err(Error::parse(
                line,
                "generator lines take no indices after `;`",
            ));
        }
        generators.push(grade);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::parse(
            line,
            "unexpected content after the generator block",
        ));
    }
    for (line, grade, idx) in &relations {
        for &i in idx {
            if !generators[i].le(grade) {
                return Err(Error::parse(
                    *line,
                    format!(
                        "relation at {grade} is not admissible: generator {i} enters at {}",
                        generators[i]
                    ),
                ));
            }
        }
    }
    GradedMatrix::from_unsorted(
        MatrixMode::Presentation,
        None,
        generators.into_iter().enumerate().collect(),
        relations
            .into_iter()
            .enumerate()
            .map(|(k, (_, g, idx))| (k, idx, g))
            .collect(),
    )
}

/// Writes the uncapped part of a presentation matrix in input order.
pub fn write_presentation(matrix: &GradedMatrix) -> Result<String> {
    if matrix.mode != MatrixMode::Presentation {
        return Err(Error::InvalidArgument(
            "only presentation matrices can be written as presentations".into(),
        ));
    }
    let base_rows = matrix.cap.map_or(matrix.n_rows(), |c| c.base_rows);
    let base_cols = matrix.cap.map_or(matrix.n_cols(), |c| c.base_cols);
    let mut gens = vec![None; base_rows];
    for r in 0..base_rows {
        gens[matrix.row_ids[r]] = Some(matrix.row_grades[r]);
    }
    let mut rels = vec![None; base_cols];
    for c in 0..base_cols {
        let mut idx: Vec<usize> = matrix.columns[c]
            .support()
            .iter()
            .map(|&r| matrix.row_ids[r])
            .collect();
        idx.sort_unstable();
        rels[matrix.col_ids[c]] = Some((matrix.col_grades[c], idx));
    }
    let mut out = String::new();
    writeln!(out, "scc2020\n2\n{base_cols} {base_rows}").unwrap();
    for rel in rels {
        let (g, idx) =
            rel.ok_or_else(|| Error::Internal("relation ids are not a permutation".into()))?;
        write!(out, "{} {} ;", g.x, g.y).unwrap();
        for i in idx {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    for g in gens {
        let g = g.ok_or_else(|| Error::Internal("generator ids are not a permutation".into()))?;
        writeln!(out, "{} {} ;", g.x, g.y).unwrap();
    }
    Ok(out)
}

/// Parses and validates a simplicial bifiltration; violations are fatal.
pub fn parse_simplicial(text: &str) -> Result<BifilteredComplex> {
    let mut simplices = Vec::new();
    let mut line_of = Vec::new();
    for (line, content) in significant_lines(text) {
        let (grade, toks) = graded_line(content, line)?;
        if toks.is_empty() {
            return Err(Error::parse(line, "simplex has no vertices"));
        }
        let mut vertices = Vec::with_capacity(toks.len());
        for t in toks {
            let v: u32 = t
                .parse()
                .map_err(|_| Error::parse(line, format!("`{t}` is not a vertex id")))?;
            vertices.push(v);
        }
        let simplex = Simplex::new(vertices).map_err(|e| Error::parse(line, e.to_string()))?;
        simplices.push((simplex, grade));
        line_of.push(line);
    }
    let complex = BifilteredComplex::new(simplices);
    let report = validate(&complex);
    if let Some(first) = report.violations.first() {
        let more = report.violations.len() - 1;
        let mut reason = first.to_string();
        if more > 0 {
            write!(reason, " (and {more} more violations)").unwrap();
        }
        return Err(Error::parse(line_of[first.index()], reason));
    }
    Ok(complex)
}

pub fn write_simplicial(complex: &BifilteredComplex) -> String {
    let mut out = String::new();
    for (s, g) in complex.simplices() {
        write!(out, "{} {} ;", g.x, g.y).unwrap();
        for v in s.vertices() {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `x,y` per line; a non-numeric first line is taken as a header.
pub fn read_point_cloud(text: &str) -> Result<Vec<[f64; 2]>> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [x, y] => x.parse::<f64>().ok().zip(y.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((x, y)) if x.is_finite() && y.is_finite() => points.push([x, y]),
            _ if points.is_empty() && line == first_content_line(text) => continue,
            _ => return Err(Error::parse(line, format!("expected `x,y`, found `{l}`"))),
        }
    }
    Ok(points)
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| !l.trim().is_empty())
        .map_or(0, |i| i + 1)
}

pub fn write_point_cloud(points: &[[f64; 2]]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        writeln!(out, "{},{}", p[0], p[1]).unwrap();
    }
    out
}

/// Sidecar written next to a generated point cloud (`foo.csv` gets `foo.manifest.json`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudManifest {
    pub generator: String,
    pub label: Option<i64>,
    pub seed: u64,
    pub n_points: usize,
    pub params: Value,
}

pub fn write_manifest(manifest: &CloudManifest) -> Result<String> {
    Ok(serde_json::to_string_pretty(manifest)? + "\n")
}

pub fn read_manifest(text: &str) -> Result<CloudManifest> {
    Ok(serde_json::from_str(text)?)
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Graphcode as JSON: slices, cuts, sentinel, nodes, edges and optionally
/// the `[b, d, d - b, d / b]` attributes of every node.
pub fn write_graphcode(gc: &Graphcode, with_attributes: bool) -> String {
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    write!(
        out,
        "{{\"slices\": {}, \"cuts\": [{}], \"sentinel\": {}, \"nodes\": [",
        gc.slices,
        join(&mut gc.cuts.iter().map(|&c| fmt_g17(c))),
        fmt_g17(gc.sentinel)
    )
    .unwrap();
    let nodes = gc.nodes.iter().map(|n| {
        format!(
            "{{\"id\": {}, \"layer\": {}, \"birth\": {}, \"death\": {}, \"essential\": {}}}",
            n.id,
            n.layer,
            fmt_g17(n.bar.birth),
            fmt_g17(n.bar.death),
            n.bar.essential
        )
    });
    out.push_str(&join(&mut nodes.into_iter()));
    let mut edges = gc.edges.clone();
    edges.sort_unstable();
    write!(
        out,
        "], \"edges\": [{}]",
        join(&mut edges.iter().map(|(a, b)| format!("[{a}, {b}]")))
    )
    .unwrap();
    if with_attributes {
        let attrs = node_attributes(gc);
        let entries = gc.nodes.iter().zip(&attrs.rows).map(|(n, a)| {
            format!(
                "\"{}\": [{}]",
                n.id,
                join(&mut a.features().iter().map(|&f| fmt_g17(f)))
            )
        });
        write!(
            out,
            ", \"attrs\": {{{}}}, \"ratio_suppressed\": {}",
            join(&mut entries.into_iter()),
            attrs.ratio_suppressed
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::InvalidArgument(format!("graphcode JSON lacks `{key}`")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::InvalidArgument(format!("`{what}` must be a number")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::InvalidArgument(format!("`{what}` must be a non-negative integer")))
}

/// Reads what [`write_graphcode`] writes; attributes are ignored.
pub fn read_graphcode(text: &str) -> Result<Graphcode> {
    let v: Value = serde_json::from_str(text)?;
    let arr = |key: &str| -> Result<&Vec<Value>> {
        field(&v, key)?
            .as_array()
            .ok_or_else(|| Error::InvalidArgument(format!("`{key}` must be an array")))
    };
    let cuts = arr("cuts")?
        .iter()
        .map(|c| as_f64(c, "cuts"))
        .collect::<Result<Vec<_>>>()?;
    let mut nodes = Vec::new();
    for (i, n) in arr("nodes")?.iter().enumerate() {
        let id = as_usize(field(n, "id")?, "id")?;
        if id != i {
            return Err(Error::InvalidArgument(format!(
                "node ids must be dense, found {id} at {i}"
            )));
        }
        nodes.push(GraphcodeNode {
            id,
            layer: as_usize(field(n, "layer")?, "layer")?,
            bar: Bar {
                birth: as_f64(field(n, "birth")?, "birth")?,
                death: as_f64(field(n, "death")?, "death")?,
                essential: field(n, "essential")?.as_bool().ok_or_else(|| {
                    Error::InvalidArgument("`essential` must be a boolean".into())
                })?,
            },
            representative: None,
        });
    }
    let mut edges = Vec::new();
    for e in arr("edges")? {
        match e.as_array().map(Vec::as_slice) {
            Some([a, b]) => {
                let (a, b) = (as_usize(a, "edges")?, as_usize(b, "edges")?);
                if a >= nodes.len() || b >= nodes.len() {
                    return Err(Error::InvalidArgument(format!(
                        "edge [{a}, {b}] references a missing node"
                    )));
                }
                edges.push((a, b));
            }
            _ => return Err(Error::InvalidArgument("edges must be pairs".into())),
        }
    }
    Ok(Graphcode {
        slices: as_usize(field(&v, "slices")?, "slices")?,
        cuts,
        sentinel: as_f64(field(&v, "sentinel")?, "sentinel")?,
        nodes,
        edges,
    })
}

/// Representatives as a JSON array of row-index lists, indexed by node id.
pub fn write_representatives(gc: &Graphcode) -> Result<String> {
    let reps: Vec<&[usize]> = gc
        .nodes
        .iter()
        .map(|n| {
            n.representative
                .as_ref()
                .map(Z2Column::support)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("node {} has no representative", n.id))
                })
        })
        .collect::<Result<_>>()?;
    Ok(serde_json::to_string(&reps)? + "\n")
}

pub fn attach_representatives(gc: &mut Graphcode, text: &str) -> Result<()> {
    let reps: Vec<Vec<usize>> = serde_json::from_str(text)?;
    if reps.len() != gc.nodes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} representatives for {} nodes",
            reps.len(),
            gc.nodes.len()
        )));
    }
    for (n, r) in gc.nodes.iter_mut().zip(reps) {
        n.representative = Some(Z2Column::from_sorted(r)?);
    }
    Ok(())
}
