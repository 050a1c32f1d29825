//! Desk-scale graph sources: the bundled Karate club and seeded synthetic
//! families used by tests and experiment configs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

const KARATE_EDGES: &str = include_str!("../../data/karate.edges");

/// Zachary's karate club: 34 nodes, 78 edges, node index equal to the
/// conventional 0-based label.
pub fn karate() -> Graph {
    let edges: Vec<(usize, usize)> = KARATE_EDGES
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut toks = l.split_whitespace();
            let u = toks.next().and_then(|t| t.parse().ok());
            let v = toks.next().and_then(|t| t.parse().ok());
            (u.expect("bundled edges parse"), v.expect("bundled edges parse"))
        })
        .collect();
    Graph::from_edges(34, &edges).expect("bundled karate edge list is valid")
}

/// Path 0-1-...-(n-1).
pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).expect("path edges are valid")
}

/// rows x cols lattice with 4-neighborhoods.
pub fn grid_graph(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    let at = |r: usize, c: usize| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((at(r, c), at(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((at(r, c), at(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges).expect("grid edges are valid")
}

/// Complete graph K_n.
pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).expect("complete edges are valid")
}

/// Star with center 0 and `n - 1` leaves.
pub fn star_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
    Graph::from_edges(n, &edges).expect("star edges are valid")
}

/// G(n, p) with a seeded RNG.
pub fn erdos_renyi(n: usize, p: f64, rng_seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("sampled edges are valid")
}

/// Random geometric graph: n points uniform in the unit square, edge when
/// the Euclidean distance is at most `radius`.
pub fn random_geometric(n: usize, radius: f64, rng_seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
        .collect();
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let dx = pts[u].0 - pts[v].0;
            let dy = pts[u].1 - pts[v].1;
            if dx * dx + dy * dy <= r2 {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("sampled edges are valid")
}

/// Planted-partition (equal-block stochastic block model): `communities`
/// blocks, within-block edge probability `p_in`, across `p_out`.
pub fn planted_partition(
    n: usize,
    communities: usize,
    p_in: f64,
    p_out: f64,
    rng_seed: u64,
) -> Graph {
    let q = communities.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let block = |i: usize| i * q / n.max(1);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block(u) == block(v) { p_in } else { p_out };
            if p > 0.0 && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("sampled edges are valid")
}
