use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use log::warn;
use ndarray::Array2;

use super::Graph;
use crate::{Error, Result, Scalar};

/// Input lines dropped while loading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadWarnings {
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

fn load_err(file: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Load {
        file: file.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_features<S: Scalar>(path: &Path) -> Result<Array2<S>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => load_err(path, 0, format!("{other:?}")),
        })?;
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| load_err(path, line, e.to_string()))?;
        if *width.get_or_insert(record.len()) != record.len() {
            return Err(load_err(
                path,
                line,
                format!("expected {} columns, found {}", width.unwrap(), record.len()),
            ));
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| load_err(path, line, format!("cannot parse feature {field:?}")))?;
            if !v.is_finite() {
                return Err(load_err(path, line, "non-finite feature"));
            }
            values.push(S::of(v));
        }
        rows += 1;
    }
    let width = width.unwrap_or(0);
    Array2::from_shape_vec((rows, width), values)
        .map_err(|e| load_err(path, rows, e.to_string()))
}

fn parse_labels(path: &Path, n: usize, num_classes: Option<usize>) -> Result<(Vec<usize>, usize)> {
    let text = read(path)?;
    let mut labels = Vec::with_capacity(n);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let y: usize = line
            .parse()
            .map_err(|_| load_err(path, i + 1, format!("cannot parse label {line:?}")))?;
        if let Some(c) = num_classes {
            if y >= c {
                return Err(load_err(path, i + 1, format!("label {y} outside [0, {c})")));
            }
        }
        labels.push(y);
    }
    if labels.len() != n {
        return Err(load_err(
            path,
            text.lines().count(),
            format!("{} labels for {n} feature rows", labels.len()),
        ));
    }
    let c = num_classes.unwrap_or_else(|| labels.iter().max().map_or(0, |m| m + 1));
    Ok((labels, c))
}

/// Loads a graph from a TSV edge list, a headerless feature CSV and a label file.
///
/// The node count is the number of feature rows. When `num_classes` is `None`
/// it is inferred as `max(label) + 1`.
pub fn load_graph<S: Scalar>(
    edges_path: impl AsRef<Path>,
    features_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    num_classes: Option<usize>,
) -> Result<(Graph<S>, LoadWarnings)> {
    let (edges_path, features_path, labels_path) =
        (edges_path.as_ref(), features_path.as_ref(), labels_path.as_ref());
    let features = parse_features::<S>(features_path)?;
    let n = features.nrows();
    let (labels, c) = parse_labels(labels_path, n, num_classes)?;

    let text = read(edges_path)?;
    let mut warnings = LoadWarnings::default();
    let mut seen = HashSet::new();
    let mut adjacency = Array2::<u8>::zeros((n, n));
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(load_err(edges_path, i + 1, format!("expected two node ids, got {line:?}")));
        };
        let parse = |s: &str| -> Result<usize> {
            let u: usize = s
                .parse()
                .map_err(|_| load_err(edges_path, i + 1, format!("cannot parse node id {s:?}")))?;
            if u >= n {
                return Err(load_err(edges_path, i + 1, format!("node {u} outside {n} nodes")));
            }
            Ok(u)
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            warnings.self_loops += 1;
            continue;
        }
        if !seen.insert((u.min(v), u.max(v))) {
            warnings.duplicate_edges += 1;
            continue;
        }
        adjacency[[u, v]] = 1;
        adjacency[[v, u]] = 1;
    }
    if warnings != LoadWarnings::default() {
        warn!(
            "{}: dropped {} self-loops and {} duplicate edges",
            edges_path.display(),
            warnings.self_loops,
            warnings.duplicate_edges
        );
    }
    let graph = Graph::new(adjacency, features, labels, c)?;
    Ok((graph, warnings))
}

/// Writes the three files read by [`load_graph`].
pub fn save_graph<S: Scalar>(
    graph: &Graph<S>,
    edges_path: impl AsRef<Path>,
    features_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<()> {
    let write = |path: &Path, body: String| -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
    };
    let mut edges = String::new();
    for (s, t) in graph.edges() {
        edges.push_str(&format!("{s}\t{t}\n"));
    }
    write(edges_path.as_ref(), edges)?;
    let mut feats = String::new();
    for row in graph.features().rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_f64_lossy().to_string()).collect();
        feats.push_str(&cells.join(","));
        feats.push('\n');
    }
    write(features_path.as_ref(), feats)?;
    let labels: String = graph.labels().iter().map(|y| format!("{y}\n")).collect();
    write(labels_path.as_ref(), labels)
}
