//! Edge-list text format: whitespace-separated `u v` lines, `#` comments.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Loads a graph from an edge-list file. Node ids are ordered by first
/// appearance; duplicate undirected edges are merged; self-loops are errors.
pub fn load_edge_list<P: AsRef<Path>>(path: P) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// Parses edge-list text. See [`load_edge_list`].
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();

    let intern = |tok: &str, labels: &mut Vec<String>, index: &mut HashMap<String, usize>| {
        if let Some(&i) = index.get(tok) {
            i
        } else {
            let i = labels.len();
            labels.push(tok.to_string());
            index.insert(tok.to_string(), i);
            i
        }
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (u, v) = match (toks.next(), toks.next(), toks.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected two tokens, got {line:?}"),
                })
            }
        };
        if u == v {
            return Err(Error::SelfLoop {
                line: lineno + 1,
                node: u.to_string(),
            });
        }
        let ui = intern(u, &mut labels, &mut index);
        let vi = intern(v, &mut labels, &mut index);
        edges.push((ui, vi));
    }
    if edges.is_empty() {
        return Err(Error::EmptyEdgeList);
    }
    Graph::with_labels(labels, &edges)
}

/// Writes the graph's edges as `u v` label lines.
pub fn write_edge_list<P: AsRef<Path>>(g: &Graph, path: P) -> Result<()> {
    let mut f = fs::File::create(path)?;
    for (u, v) in g.edges() {
        writeln!(f, "{} {}", g.label(u), g.label(v))?;
    }
    Ok(())
}
