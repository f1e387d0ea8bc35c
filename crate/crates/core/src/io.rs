//! Graph file formats.
//!
//! * Edge list: first line `n m`, then `m` lines `u v`. Blank lines and
//!   lines starting with `#` are skipped.
//! * JSON: `{"n": 4, "edges": [[0,1],[1,2],[2,3]]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid JSON graph: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let syntax = |line, msg: &str| FormatError::Syntax { line, msg: msg.to_string() };
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing \"n m\" header"))?;
    let [n, m] = parse_pair(header).ok_or_else(|| syntax(hline, "expected \"n m\""))?;

    let mut pairs = Vec::with_capacity(m);
    for (line, l) in lines {
        let [u, v] = parse_pair(l).ok_or_else(|| syntax(line, "expected \"u v\""))?;
        pairs.push((u, v));
    }
    if pairs.len() != m {
        return Err(syntax(
            hline,
            &format!("header declares {m} edges but {} were listed", pairs.len()),
        ));
    }
    Ok(Graph::new(n, pairs)?)
}

fn parse_pair(line: &str) -> Option<[usize; 2]> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    let a = it.next()?.ok()?;
    let b = it.next()?.ok()?;
    it.next().is_none().then_some([a, b])
}

pub fn parse_json(text: &str) -> Result<Graph, FormatError> {
    let raw: JsonGraph = serde_json::from_str(text)?;
    Ok(Graph::new(raw.n, raw.edges.into_iter().map(|[u, v]| (u, v)))?)
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn to_json(g: &Graph) -> String {
    let raw = JsonGraph {
        n: g.vertex_count(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&raw).expect("graph serialization cannot fail")
}

fn is_json_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a graph, choosing the format from the `.json` extension.
pub fn load_graph(path: &Path) -> Result<Graph, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if is_json_path(path) {
        parse_json(&text)
    } else {
        parse_edge_list(&text)
    }
}

pub fn save_graph(g: &Graph, path: &Path) -> Result<(), FormatError> {
    let text = if is_json_path(path) { to_json(g) + "\n" } else { to_edge_list(g) };
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = parse_edge_list("4 3\n0 1\n# comment\n1 2\n\n2 3\n").unwrap();
        assert_eq!(g, Graph::path(4));
        assert_eq!(parse_edge_list(&to_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n0 1\n"),
            Err(FormatError::Graph(GraphError::DuplicateEdge(0, 1)))
        ));
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n"),
            Err(FormatError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("3 1\n0 x\n"),
            Err(FormatError::Syntax { line: 2, .. })
        ));
        assert!(matches!(parse_edge_list(""), Err(FormatError::Syntax { .. })));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let g = parse_json(r#"{"n": 6, "edges": [[0,1],[1,2],[2,3],[3,4],[4,5],[5,0]]}"#).unwrap();
        assert_eq!(g, Graph::cycle(6));
        assert_eq!(parse_json(&to_json(&g)).unwrap(), g);
        assert!(matches!(
            parse_json(r#"{"n": 2, "edges": [[0,0]]}"#),
            Err(FormatError::Graph(GraphError::SelfLoop(0)))
        ));
        assert!(matches!(
            parse_json(r#"{"n": 2, "edges": [[0,2]]}"#),
            Err(FormatError::Graph(GraphError::VertexOutOfRange { .. }))
        ));
        assert!(matches!(parse_json(r#"{"n": 2}"#), Err(FormatError::Json(_))));
    }

    #[test]
    fn files_pick_format_from_extension() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::star(3);
        for name in ["g.json", "g.txt"] {
            let path = dir.path().join(name);
            save_graph(&g, &path).unwrap();
            assert_eq!(load_graph(&path).unwrap(), g);
        }
        assert!(matches!(
            load_graph(&dir.path().join("missing.json")),
            Err(FormatError::Io { .. })
        ));
    }
}
