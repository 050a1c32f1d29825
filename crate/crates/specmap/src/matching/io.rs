//! Landmark files and candidate-ranking dumps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::CandidateRanking;

/// Parses a landmark file of `g1_node g2_node` label lines ('#' comments)
/// into `(g1_index, g2_index)` pairs.
pub fn load_landmarks<P: AsRef<Path>>(path: P, g1: &Graph, g2: &Graph) -> Result<Vec<(usize, usize)>> {
    let text = std::fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (a, b) = match (toks.next(), toks.next(), toks.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected two tokens, got {line:?}"),
                })
            }
        };
        let i = g1
            .index_of_label(a)
            .ok_or_else(|| Error::UnknownNode(a.to_string()))?;
        let j = g2
            .index_of_label(b)
            .ok_or_else(|| Error::UnknownNode(b.to_string()))?;
        pairs.push((i, j));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyEdgeList);
    }
    Ok(pairs)
}

/// Dumps rankings as `query_node,rank,candidate,distance` rows; `top_n`
/// limits each query's list when given.
pub fn write_rankings_csv<P: AsRef<Path>>(
    ranking: &CandidateRanking,
    path: P,
    top_n: Option<usize>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "query_node,rank,candidate,distance")?;
    for y in 0..ranking.query_count() {
        let list = ranking.candidates(y);
        let take = top_n.unwrap_or(list.len()).min(list.len());
        for (r, &(x, d)) in list[..take].iter().enumerate() {
            writeln!(w, "{y},{},{x},{d}", r + 1)?;
        }
    }
    w.flush()?;
    Ok(())
}
