//! Plain-text file formats.
//!
//! * Edge lists: one `i j` pair per line, 0-based, `#` starts a comment.
//! * Labels: CSV `vertex,label`, label 0 meaning unlabeled.
//! * Points: CSV of floats, optionally with a trailing label column.
//! * Predictions: CSV `vertex,class,score_1..score_C,bfs_depth_used,overlapping`.
//! * Domination dumps: `c i j value` triplets sorted by `(c, i, j)`.
//! * Run reports: pretty-printed JSON.
//!
//! Writers are deterministic and floats are printed in shortest round-trip
//! form, so reading a file back reproduces the exact values. Line numbers in
//! errors are 1-based.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LcuError, Result};
use crate::graph::{Dataset, Graph};
use crate::unfolding::{CumulativeDomination, Prediction, Unfolding, VertexPrediction};

pub const RUN_REPORT_SCHEMA: u32 = 1;

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| LcuError::io(path, e))
}

fn write_string(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| LcuError::io(path, e))
}

/// Shortest decimal that parses back to exactly `x`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Non-empty lines with comments stripped, paired with their 1-based number.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((k + 1, body))
    })
}

fn parse_vertex(path: &Path, line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| LcuError::parse(path, line, format!("invalid vertex id {token:?}")))
}

/// Reads an edge list into an unlabeled graph on `max id + 1` vertices.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut edges = Vec::new();
    let mut n = 0;
    for (line, body) in content_lines(&text) {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(LcuError::parse(
                path,
                line,
                format!("expected two vertex ids, found {}", tokens.len()),
            ));
        }
        let i = parse_vertex(path, line, tokens[0])?;
        let j = parse_vertex(path, line, tokens[1])?;
        if i == j {
            return Err(LcuError::parse(path, line, format!("self-loop on vertex {i}")));
        }
        n = n.max(i + 1).max(j + 1);
        edges.push((i, j));
    }
    Graph::from_edges(n, edges)
}

fn edge_list_text(edges: impl Iterator<Item = (usize, usize)>) -> String {
    let mut out = String::new();
    for (i, j) in edges {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

/// Writes every undirected edge once as `i j` with `i < j`, sorted.
pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &edge_list_text(g.edges().iter().copied()))
}

/// Writes the edges of class `c` of an unfolding (`c = 0`: unassigned edges).
pub fn write_unfolding_edges(g: &Graph, u: &Unfolding, c: usize, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &edge_list_text(u.edges(g, c)))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_records(path: &Path, text: &str) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut records = Vec::new();
    for rec in csv_reader(text).records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            LcuError::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((line, rec));
    }
    Ok(records)
}

/// Reads `vertex,label` rows for a graph on `num_vertices` vertices.
///
/// Vertices without a row are unlabeled. When `num_classes` is `None` the
/// largest label present defines the number of classes. Returns the labels
/// and the number of classes.
pub fn read_labels(
    path: impl AsRef<Path>,
    num_vertices: usize,
    num_classes: Option<usize>,
) -> Result<(Vec<usize>, usize)> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut labels = vec![0usize; num_vertices];
    let mut seen = vec![false; num_vertices];
    for (k, (line, rec)) in csv_records(path, &text)?.into_iter().enumerate() {
        if k == 0 && rec.get(0) == Some("vertex") {
            continue;
        }
        if rec.len() != 2 {
            return Err(LcuError::parse(
                path,
                line,
                format!("expected `vertex,label`, found {} fields", rec.len()),
            ));
        }
        let v = parse_vertex(path, line, &rec[0])?;
        let label: i64 = rec[1]
            .parse()
            .map_err(|_| LcuError::parse(path, line, format!("invalid label {:?}", &rec[1])))?;
        if label < 0 {
            return Err(LcuError::parse(path, line, format!("negative label {label}")));
        }
        if v >= num_vertices {
            return Err(LcuError::parse(
                path,
                line,
                format!("vertex {v} outside 0..{num_vertices}"),
            ));
        }
        if seen[v] {
            return Err(LcuError::parse(path, line, format!("vertex {v} labeled twice")));
        }
        seen[v] = true;
        labels[v] = label as usize;
    }
    let max = labels.iter().copied().max().unwrap_or(0);
    let c = match num_classes {
        Some(c) if max > c => {
            let v = labels.iter().position(|&l| l == max).unwrap_or(0);
            return Err(LcuError::InvalidParameter(format!(
                "vertex {v} has label {max} but only {c} classes are declared"
            )));
        }
        Some(c) => c,
        None => max,
    };
    Ok((labels, c))
}

/// Writes `vertex,label` rows for every labeled vertex.
pub fn write_labels(labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("vertex,label\n");
    for (v, &l) in labels.iter().enumerate() {
        if l != 0 {
            let _ = writeln!(out, "{v},{l}");
        }
    }
    write_string(path.as_ref(), &out)
}

/// Reads a points CSV. With `label_column`, the last column is the label.
pub fn read_points(path: impl AsRef<Path>, label_column: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (line, rec) in csv_records(path, &text)? {
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(LcuError::parse(
                path,
                line,
                format!("row has {} fields, expected {w}", rec.len()),
            ));
        }
        let features = if label_column { w.saturating_sub(1) } else { w };
        if features == 0 {
            return Err(LcuError::parse(path, line, "row has no feature columns"));
        }
        let mut row = Vec::with_capacity(features);
        for field in rec.iter().take(features) {
            let x: f64 = field
                .parse()
                .map_err(|_| LcuError::parse(path, line, format!("invalid number {field:?}")))?;
            row.push(x);
        }
        let label = if label_column {
            rec[w - 1]
                .parse()
                .map_err(|_| LcuError::parse(path, line, format!("invalid label {:?}", &rec[w - 1])))?
        } else {
            0
        };
        rows.push(row);
        labels.push(label);
    }
    Dataset::new(rows, labels)
}

/// Writes points, with a trailing label column when `with_labels` is set.
pub fn write_points(data: &Dataset, with_labels: bool, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for i in 0..data.len() {
        let fields: Vec<String> = data.point(i).iter().map(|&x| format_float(x)).collect();
        out.push_str(&fields.join(","));
        if with_labels {
            let _ = write!(out, ",{}", data.labels()[i]);
        }
        out.push('\n');
    }
    write_string(path.as_ref(), &out)
}

pub fn write_predictions(pred: &Prediction, path: impl AsRef<Path>) -> Result<()> {
    let c = pred.vertices.first().map_or(0, |v| v.scores.len());
    let mut out = String::from("vertex,class");
    for q in 1..=c {
        let _ = write!(out, ",score_{q}");
    }
    out.push_str(",bfs_depth_used,overlapping\n");
    for (i, v) in pred.vertices.iter().enumerate() {
        let _ = write!(out, "{i},{}", v.class);
        for s in &v.scores {
            let _ = write!(out, ",{s}");
        }
        let _ = writeln!(out, ",{},{}", v.bfs_depth_used, u8::from(v.overlapping));
    }
    write_string(path.as_ref(), &out)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Prediction> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let records = csv_records(path, &text)?;
    let Some((_, header)) = records.first() else {
        return Err(LcuError::parse(path, 1, "missing header"));
    };
    let width = header.len();
    if width < 4 || &header[0] != "vertex" {
        return Err(LcuError::parse(path, 1, "malformed prediction header"));
    }
    let c = width - 4;
    let field = |line: usize, s: &str| -> Result<u64> {
        s.parse()
            .map_err(|_| LcuError::parse(path, line, format!("invalid integer {s:?}")))
    };
    let mut vertices = Vec::new();
    for (line, rec) in records.iter().skip(1) {
        if rec.len() != width {
            return Err(LcuError::parse(
                path,
                *line,
                format!("row has {} fields, expected {width}", rec.len()),
            ));
        }
        if field(*line, &rec[0])? as usize != vertices.len() {
            return Err(LcuError::parse(path, *line, "vertices out of order"));
        }
        let scores = (0..c)
            .map(|q| field(*line, &rec[2 + q]))
            .collect::<Result<Vec<_>>>()?;
        vertices.push(VertexPrediction {
            class: field(*line, &rec[1])? as usize,
            scores,
            bfs_depth_used: field(*line, &rec[2 + c])? as usize,
            overlapping: field(*line, &rec[3 + c])? != 0,
        });
    }
    Ok(Prediction { vertices })
}

/// Writes the nonzero cumulative domination entries as `c i j value`.
pub fn dump_domination<D: CumulativeDomination + ?Sized>(
    g: &Graph,
    dom: &D,
    t: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = format!(
        "# cumulative domination t={t} classes={}\n# c i j value\n",
        dom.num_classes()
    );
    for q in 0..dom.num_classes() {
        for i in 0..g.num_vertices() {
            for slot in g.slots(i) {
                let v = dom.domination(q, slot);
                if v != 0.0 {
                    let _ = writeln!(out, "{} {i} {} {}", q + 1, g.target(slot), format_float(v));
                }
            }
        }
    }
    write_string(path.as_ref(), &out)
}

/// Reads a domination dump back into per-class slot vectors over `g`.
pub fn read_domination(g: &Graph, path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut classes = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| {
            l.split_whitespace()
                .find_map(|tok| tok.strip_prefix("classes="))
                .and_then(|v| v.parse::<usize>().ok())
        })
        .unwrap_or(0);
    let mut entries = Vec::new();
    for (line, body) in content_lines(&text) {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(LcuError::parse(path, line, "expected `c i j value`"));
        }
        let c = parse_vertex(path, line, tokens[0])?;
        let i = parse_vertex(path, line, tokens[1])?;
        let j = parse_vertex(path, line, tokens[2])?;
        let v: f64 = tokens[3]
            .parse()
            .map_err(|_| LcuError::parse(path, line, format!("invalid value {:?}", tokens[3])))?;
        if c == 0 {
            return Err(LcuError::parse(path, line, "class ids start at 1"));
        }
        let slot = (i < g.num_vertices())
            .then(|| g.slot(i, j))
            .flatten()
            .ok_or_else(|| LcuError::parse(path, line, format!("no edge ({i}, {j}) in graph")))?;
        classes = classes.max(c);
        entries.push((c, slot, v));
    }
    let mut dom = vec![vec![0.0; g.num_slots()]; classes];
    for (c, slot, v) in entries {
        dom[c - 1][slot] = v;
    }
    Ok(dom)
}

/// Reads an initial population as CSV `class,vertex,value` rows (optional
/// header). Entries not listed are zero. Returns one vector per class.
pub fn read_initial_population(
    path: impl AsRef<Path>,
    num_vertices: usize,
    num_classes: usize,
) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut pop = vec![vec![0.0; num_vertices]; num_classes];
    for (k, (line, rec)) in csv_records(path, &text)?.into_iter().enumerate() {
        if k == 0 && rec.get(0) == Some("class") {
            continue;
        }
        if rec.len() != 3 {
            return Err(LcuError::parse(path, line, "expected `class,vertex,value`"));
        }
        let c = parse_vertex(path, line, &rec[0])?;
        let v = parse_vertex(path, line, &rec[1])?;
        let x: f64 = rec[2]
            .parse()
            .map_err(|_| LcuError::parse(path, line, format!("invalid value {:?}", &rec[2])))?;
        if c == 0 || c > num_classes {
            return Err(LcuError::parse(path, line, format!("class {c} outside 1..={num_classes}")));
        }
        if v >= num_vertices {
            return Err(LcuError::parse(path, line, format!("vertex {v} outside 0..{num_vertices}")));
        }
        if !(x.is_finite() && x >= 0.0) {
            return Err(LcuError::parse(path, line, format!("population {x} must be finite and nonnegative")));
        }
        pop[c - 1][v] = x;
    }
    Ok(pop)
}

/// Parameters echoed into a run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub lambda: f64,
    pub tau: usize,
    pub k: Option<usize>,
    pub init: String,
    pub update_order: String,
    pub seed: Option<u64>,
    pub stochastic: Option<StochasticParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticParams {
    pub particles: u64,
    pub runs: usize,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub classes: usize,
    pub labeled: usize,
    pub diameter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: usize,
    /// Total population after each iteration.
    pub population_by_iteration: Vec<f64>,
    pub unfolding_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub build_seconds: f64,
    pub unfold_seconds: f64,
    pub classify_seconds: f64,
}

/// Summary of one classification or simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub params: ReportParams,
    pub graph: GraphSummary,
    pub iterations: usize,
    pub classes: Vec<ClassSummary>,
    pub unassigned_edges: usize,
    pub predictions: Vec<VertexPrediction>,
    pub overlapping_vertices: Vec<usize>,
    pub accuracy: Option<f64>,
    pub correlation: Option<f64>,
    pub warnings: Vec<String>,
    pub timings: Option<Timings>,
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_string(path.as_ref(), &text)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| LcuError::parse(path, e.line(), e.to_string()))
}

pub fn write_run_report(report: &RunReport, path: impl AsRef<Path>) -> Result<()> {
    write_json(report, path)
}

pub fn read_run_report(path: impl AsRef<Path>) -> Result<RunReport> {
    read_json(path)
}
