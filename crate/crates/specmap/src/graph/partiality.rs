//! Subgraph extraction: BFS patches, hole punching, largest component.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeCorrespondence};

/// Induced subgraph on a BFS ball around `seed`, truncated to exactly
/// `target_size` nodes. Complete BFS levels are taken in order; the last
/// (frontier) level is truncated in ascending node-index order, which makes
/// the result deterministic.
pub fn khop_subgraph(
    g: &Graph,
    seed: usize,
    target_size: usize,
) -> Result<(Graph, NodeCorrespondence)> {
    let n = g.node_count();
    if seed >= n {
        return Err(Error::NodeOutOfRange { index: seed, n });
    }
    if target_size == 0 || target_size > n {
        return Err(Error::InvalidParameter(format!(
            "target_size {target_size} out of range 1..={n}"
        )));
    }
    let mut kept: Vec<usize> = Vec::with_capacity(target_size);
    let mut seen = vec![false; n];
    seen[seed] = true;
    let mut level = vec![seed];
    while !level.is_empty() && kept.len() < target_size {
        if kept.len() + level.len() <= target_size {
            kept.extend_from_slice(&level);
        } else {
            // level is already ascending; take the lowest indices
            let take = target_size - kept.len();
            kept.extend_from_slice(&level[..take]);
        }
        let mut next = Vec::new();
        for &u in &level {
            for &v in g.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    next.push(v as usize);
                }
            }
        }
        next.sort_unstable();
        level = next;
    }
    if kept.len() < target_size {
        return Err(Error::InvalidParameter(format!(
            "component of seed {seed} has only {} nodes, requested {target_size}",
            kept.len()
        )));
    }
    kept.sort_unstable();
    g.induced_subgraph(&kept)
}

/// Induced subgraph on V minus the closed neighborhoods of `centers`.
pub fn holes_subgraph(g: &Graph, centers: &[usize]) -> Result<(Graph, NodeCorrespondence)> {
    let n = g.node_count();
    let mut removed = vec![false; n];
    for &c in centers {
        if c >= n {
            return Err(Error::NodeOutOfRange { index: c, n });
        }
        removed[c] = true;
        for &v in g.neighbors(c) {
            removed[v as usize] = true;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
    if kept.is_empty() {
        return Err(Error::EmptySubgraph);
    }
    g.induced_subgraph(&kept)
}

/// Largest connected component (ties broken by lowest contained node index).
pub fn largest_component(g: &Graph) -> Result<(Graph, NodeCorrespondence)> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptySubgraph);
    }
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0usize;
        let mut q = VecDeque::from([start]);
        comp[start] = id;
        while let Some(u) = q.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if comp[v as usize] == usize::MAX {
                    comp[v as usize] = id;
                    q.push_back(v as usize);
                }
            }
        }
        sizes.push(size);
    }
    let best = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(id, _)| id)
        .unwrap();
    let kept: Vec<usize> = (0..n).filter(|&i| comp[i] == best).collect();
    g.induced_subgraph(&kept)
}
