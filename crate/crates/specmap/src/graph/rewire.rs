//! Same-count random edge rewiring and the edit-distance fraction.

use std::collections::HashSet;
use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Record of one rewiring perturbation: the same number of edges removed and
/// added, expressed as node-index pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerturbationRecord {
    pub removed: Vec<(u32, u32)>,
    pub added: Vec<(u32, u32)>,
    pub fraction: f64,
}

/// Removes `r = round(fraction * m)` uniformly random existing edges and adds
/// `r` uniformly random absent ones; the node set is unchanged and the same
/// seed reproduces the same output.
///
/// With `max_hop`, added edges may only join nodes within `max_hop` hops of a
/// removed edge's endpoint (hop-limited rewiring). Absent candidates are drawn
/// by rejection sampling capped at `100 * r` attempts.
pub fn rewire(
    g: &Graph,
    fraction: f64,
    rng_seed: u64,
    max_hop: Option<usize>,
) -> Result<(Graph, PerturbationRecord)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rewire fraction {fraction} not in (0, 1]"
        )));
    }
    let n = g.node_count();
    let m = g.edge_count();
    let r = (fraction * m as f64).round() as usize;
    if r == 0 {
        return Err(Error::InvalidParameter(format!(
            "fraction {fraction} of {m} edges rounds to zero rewired edges"
        )));
    }
    let absent_total = n * (n - 1) / 2 - m;
    if absent_total < r {
        return Err(Error::InsufficientAbsentEdges {
            needed: r,
            attempts: 0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let edges: Vec<(usize, usize)> = g.edges().collect();

    // sample r distinct edge indices (partial Fisher-Yates)
    let mut idx: Vec<usize> = (0..m).collect();
    for i in 0..r {
        let j = rng.gen_range(i..m);
        idx.swap(i, j);
    }
    let removed_set: HashSet<usize> = idx[..r].iter().copied().collect();
    let mut removed: Vec<(u32, u32)> = idx[..r]
        .iter()
        .map(|&e| (edges[e].0 as u32, edges[e].1 as u32))
        .collect();
    removed.sort_unstable();

    let hop_ok: Option<Vec<bool>> = max_hop.map(|h| {
        let sources: Vec<usize> = removed
            .iter()
            .flat_map(|&(u, v)| [u as usize, v as usize])
            .collect();
        within_hops(g, &sources, h)
    });

    let mut added: Vec<(u32, u32)> = Vec::with_capacity(r);
    let mut added_set: HashSet<(u32, u32)> = HashSet::with_capacity(r);
    let max_attempts = 100 * r;
    let mut attempts = 0;
    while added.len() < r {
        if attempts >= max_attempts {
            return Err(Error::InsufficientAbsentEdges {
                needed: r,
                attempts,
            });
        }
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let (a, b) = (u.min(v) as u32, u.max(v) as u32);
        if g.has_edge(a as usize, b as usize) || added_set.contains(&(a, b)) {
            continue;
        }
        if let Some(ok) = &hop_ok {
            if !ok[a as usize] || !ok[b as usize] {
                continue;
            }
        }
        added_set.insert((a, b));
        added.push((a, b));
    }
    added.sort_unstable();

    let mut new_edges: Vec<(usize, usize)> = edges
        .iter()
        .enumerate()
        .filter(|(e, _)| !removed_set.contains(e))
        .map(|(_, &(u, v))| (u, v))
        .collect();
    new_edges.extend(added.iter().map(|&(u, v)| (u as usize, v as usize)));

    let rewired = Graph::with_labels(g.labels().to_vec(), &new_edges)?;
    let record = PerturbationRecord {
        removed,
        added,
        fraction,
    };
    Ok((rewired, record))
}

fn within_hops(g: &Graph, sources: &[usize], max_hop: usize) -> Vec<bool> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut q = VecDeque::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            q.push_back(s);
        }
    }
    while let Some(u) = q.pop_front() {
        if dist[u] >= max_hop {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v as usize] == usize::MAX {
                dist[v as usize] = dist[u] + 1;
                q.push_back(v as usize);
            }
        }
    }
    dist.into_iter().map(|d| d <= max_hop).collect()
}

/// `(|E - E'| + |E' - E|) / |E|` for two graphs on the same node set.
pub fn edit_fraction(g: &Graph, g2: &Graph) -> Result<f64> {
    if g.node_count() != g2.node_count() {
        return Err(Error::NodeSetMismatch(g.node_count(), g2.node_count()));
    }
    let e1: HashSet<(usize, usize)> = g.edges().collect();
    let e2: HashSet<(usize, usize)> = g2.edges().collect();
    let sym_diff = e1.symmetric_difference(&e2).count();
    Ok(sym_diff as f64 / g.edge_count() as f64)
}
