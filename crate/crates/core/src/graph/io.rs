use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::Serialize;

use super::{DataGraph, GraphError, VertexId, UNLABELED};
use crate::pattern::Label;

/// Summary of a graph load, printed by the CLI on standard error.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub vertices: usize,
    pub edges: usize,
    pub edge_lines: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
    pub labeled_vertices: usize,
    pub unlabeled_vertices: usize,
    /// Label lines naming a vertex absent from the edge list.
    pub unknown_label_vertices: usize,
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "load vertices={} edges={} edge_lines={} self_loops_dropped={} duplicate_edges={} labeled={} unlabeled={} unknown_label_vertices={}",
            self.vertices,
            self.edges,
            self.edge_lines,
            self.self_loops_dropped,
            self.duplicate_edges,
            self.labeled_vertices,
            self.unlabeled_vertices,
            self.unknown_label_vertices
        )
    }
}

fn content(line: &str) -> &str {
    line.split(['#', '%']).next().unwrap_or("").trim()
}

/// Loads an edge list (`u v` per line; a lone `u` declares an isolated
/// vertex) and an optional label file (`v label` per line). Vertex ids are
/// arbitrary non-negative integers, remapped to dense ids in ascending order.
pub fn load_graph<E: BufRead, L: BufRead>(edges: E, labels: Option<L>) -> Result<(DataGraph, LoadReport), GraphError> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut ids: Vec<u64> = Vec::new();
    let mut report = LoadReport::default();
    for (idx, line) in edges.lines().enumerate() {
        let line = line?;
        let body = content(&line);
        if body.is_empty() {
            continue;
        }
        let parse_err = |message: String| GraphError::Parse { file: "edges", line: idx + 1, message };
        let mut tokens = body.split_whitespace();
        let mut next_id = || -> Result<Option<u64>, GraphError> {
            tokens
                .next()
                .map(|t| t.parse::<u64>().map_err(|_| parse_err(format!("expected a vertex id, got `{t}`"))))
                .transpose()
        };
        let u = next_id()?.expect("non-empty line has a token");
        let v = next_id()?;
        if next_id()?.is_some() {
            return Err(parse_err("expected `u v`".into()));
        }
        ids.push(u);
        if let Some(v) = v {
            ids.push(v);
            raw.push((u, v));
            report.edge_lines += 1;
        }
    }
    ids.sort_unstable();
    ids.dedup();
    let dense = |id: u64| ids.binary_search(&id).expect("id was recorded") as VertexId;

    let n = ids.len();
    let label_vec = match labels {
        Some(reader) => {
            let mut out = vec![UNLABELED; n];
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                let body = content(&line);
                if body.is_empty() {
                    continue;
                }
                let parse_err = |message: String| GraphError::Parse { file: "labels", line: idx + 1, message };
                let tokens: Vec<&str> = body.split_whitespace().collect();
                if tokens.len() != 2 {
                    return Err(parse_err("expected `vertex label`".into()));
                }
                let v: u64 = tokens[0].parse().map_err(|_| parse_err(format!("bad vertex id `{}`", tokens[0])))?;
                let l: Label = tokens[1].parse().map_err(|_| parse_err(format!("bad label `{}`", tokens[1])))?;
                if l == UNLABELED {
                    return Err(parse_err(format!("label {l} is reserved")));
                }
                match ids.binary_search(&v) {
                    Ok(d) => out[d] = l,
                    Err(_) => report.unknown_label_vertices += 1,
                }
            }
            Some(out)
        }
        None => None,
    };

    let (graph, self_loops) = DataGraph::build(n, raw.iter().map(|&(u, v)| (dense(u), dense(v))), label_vec, ids.clone())?;
    report.vertices = graph.vertex_count();
    report.edges = graph.edge_count();
    report.self_loops_dropped = self_loops;
    report.duplicate_edges = report.edge_lines - self_loops - graph.edge_count();
    report.unlabeled_vertices = graph.labels().iter().filter(|&&l| l == UNLABELED).count();
    report.labeled_vertices = if graph.is_labeled() { n - report.unlabeled_vertices } else { 0 };
    Ok((graph, report))
}

fn open_maybe_gzip(path: &Path) -> Result<Box<dyn BufRead>, GraphError> {
    let mut reader = BufReader::new(File::open(path)?);
    let magic = reader.fill_buf()?;
    if magic.len() >= 2 && magic[0] == 0x1f && magic[1] == 0x8b {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// [`load_graph`] from files; gzip input is detected and decompressed.
pub fn load_graph_files(edges: &Path, labels: Option<&Path>) -> Result<(DataGraph, LoadReport), GraphError> {
    let edge_reader = open_maybe_gzip(edges)?;
    let label_reader = labels.map(open_maybe_gzip).transpose()?;
    load_graph(edge_reader, label_reader)
}

/// Writes the edge list in original ids; isolated vertices get a line of
/// their own so that loading the output reproduces the graph exactly.
pub fn write_edge_list<W: Write>(g: &DataGraph, mut out: W) -> std::io::Result<()> {
    for v in 0..g.vertex_count() as VertexId {
        if g.degree(v) == 0 {
            writeln!(out, "{}", g.original_id(v))?;
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", g.original_id(u), g.original_id(v))?;
    }
    Ok(())
}

/// Writes `vertex label` lines for every labeled vertex.
pub fn write_labels<W: Write>(g: &DataGraph, mut out: W) -> std::io::Result<()> {
    for v in 0..g.vertex_count() as VertexId {
        let l = g.label(v);
        if l != UNLABELED {
            writeln!(out, "{} {}", g.original_id(v), l)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn load(edges: &str, labels: Option<&str>) -> Result<(DataGraph, LoadReport), GraphError> {
        load_graph(Cursor::new(edges.to_string()), labels.map(|l| Cursor::new(l.to_string())))
    }

    #[test]
    fn remaps_and_deduplicates() {
        let (g, report) = load("1 2\n2 1\n2 3\n", None).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.duplicate_edges, 1);
        assert_eq!(g.original_id(0), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn self_loops_reported() {
        let (g, report) = load("# comment\n5 5\n5 9\n\n", None).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.self_loops_dropped, 1);
    }

    #[test]
    fn parse_errors_have_line_numbers() {
        match load("1 2\n3 x\n", None) {
            Err(GraphError::Parse { file: "edges", line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match load("1 2 3\n", None) {
            Err(GraphError::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match load("1 2\n", Some("1\n")) {
            Err(GraphError::Parse { file: "labels", line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn labels_with_sentinel_for_missing() {
        let (g, report) = load("10 20\n20 30\n", Some("10 1\n30 2\n99 4\n")).unwrap();
        assert_eq!(g.labels(), &[1, UNLABELED, 2]);
        assert_eq!(report.unknown_label_vertices, 1);
        assert_eq!(report.labeled_vertices, 2);
        assert_eq!(report.unlabeled_vertices, 1);
        assert_eq!(g.stats().label_histogram.values().sum::<usize>(), g.vertex_count());
    }

    #[test]
    fn roundtrip_through_files() {
        let (g, _) = load("7\n1 2\n2 3\n3 1\n", Some("1 4\n2 4\n3 5\n7 6\n")).unwrap();
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        write_edge_list(&g, &mut edges).unwrap();
        write_labels(&g, &mut labels).unwrap();
        let (h, _) = load_graph(Cursor::new(edges), Some(Cursor::new(labels))).unwrap();
        assert_eq!(g, h);
        assert_eq!(h.degree(3), 0);
    }

    #[test]
    fn gzip_is_transparent() {
        use flate2::write::GzEncoder;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::default());
        enc.write_all(b"0 1\n1 2\n").unwrap();
        enc.finish().unwrap();
        let (g, _) = load_graph_files(&path, None).unwrap();
        assert_eq!(g.edge_count(), 2);
    }
}
