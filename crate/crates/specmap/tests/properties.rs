//! Property tests for the library's structural invariants.

use ndarray::Array2;
use proptest::prelude::*;

use specmap::fmap::{map_distance, normalize_signal, BasisMeta, MapSource, SignalMatrix, SpectralMap};
use specmap::graph::{
    combinatorial_laplacian, erdos_renyi, holes_subgraph, khop_subgraph, normalized_laplacian,
    rewire, LaplacianKind,
};
use specmap::spectral::{eigendecompose, KSpec};

fn small_graph(n: usize, density: f64, seed: u64) -> specmap::graph::Graph {
    // reseeded until at least one edge exists so Laplacians are non-trivial
    for s in seed.. {
        let g = erdos_renyi(n, density, s);
        if g.edge_count() > 0 {
            return g;
        }
    }
    unreachable!()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalized_spectrum_in_unit_band(n in 3usize..28, density in 0.05f64..0.6, seed in 0u64..500) {
        let g = small_graph(n, density, seed);
        let basis = eigendecompose(&normalized_laplacian(&g), n, LaplacianKind::Normalized).unwrap();
        for &lam in basis.lambda() {
            prop_assert!((-1e-9..=2.0 + 1e-9).contains(&lam), "eigenvalue {lam}");
        }
        prop_assert!(basis.orthonormality_defect() <= 1e-8);
    }

    #[test]
    fn combinatorial_row_sums_vanish(n in 3usize..28, density in 0.05f64..0.6, seed in 0u64..500) {
        let g = small_graph(n, density, seed);
        let l = combinatorial_laplacian(&g);
        for s in l.row_sums() {
            prop_assert!(s.abs() <= 1e-12);
        }
    }

    #[test]
    fn subgraphs_are_induced(n in 8usize..30, density in 0.1f64..0.5, seed in 0u64..500, pick in 0usize..1000) {
        let g = small_graph(n, density, seed);
        let seed_node = pick % n;
        let target = 2 + pick % (n - 2);
        if let Ok((sub, corr)) = khop_subgraph(&g, seed_node, target) {
            for u in 0..sub.node_count() {
                for v in (u + 1)..sub.node_count() {
                    prop_assert_eq!(
                        sub.has_edge(u, v),
                        g.has_edge(corr.target_of(u), corr.target_of(v))
                    );
                }
            }
        }
        if let Ok((sub, corr)) = holes_subgraph(&g, &[pick % n]) {
            for u in 0..sub.node_count() {
                for v in (u + 1)..sub.node_count() {
                    prop_assert_eq!(
                        sub.has_edge(u, v),
                        g.has_edge(corr.target_of(u), corr.target_of(v))
                    );
                }
            }
        }
    }

    #[test]
    fn correspondence_matrix_sums(n in 8usize..30, density in 0.1f64..0.5, seed in 0u64..500, pick in 0usize..1000) {
        let g = small_graph(n, density, seed);
        let target = 2 + pick % (n - 2);
        if let Ok((_, corr)) = khop_subgraph(&g, pick % n, target) {
            let s = corr.matrix();
            for col in s.columns() {
                prop_assert_eq!(col.sum(), 1.0);
            }
            for row in s.rows() {
                prop_assert!(row.sum() <= 1.0);
            }
        }
    }

    #[test]
    fn rewire_deterministic_and_exact(n in 10usize..30, density in 0.2f64..0.6, seed in 0u64..300, fraction in 0.05f64..0.6) {
        let g = small_graph(n, density, seed);
        let m = g.edge_count();
        let r = (fraction * m as f64).round() as usize;
        prop_assume!(r >= 1);
        prop_assume!(n * (n - 1) / 2 - m >= r);
        match (rewire(&g, fraction, seed, None), rewire(&g, fraction, seed, None)) {
            (Ok((a, ra)), Ok((b, rb))) => {
                prop_assert_eq!(&a, &b);
                prop_assert_eq!(ra, rb);
                let expect = 2.0 * r as f64 / m as f64;
                prop_assert_eq!(specmap::graph::edit_fraction(&g, &a).unwrap(), expect);
            }
            // hop-free rewiring may still exhaust attempts on dense graphs
            (Err(specmap::Error::InsufficientAbsentEdges { .. }), Err(_)) => {}
            (a, b) => prop_assert!(false, "mismatched outcomes {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn map_distance_sign_invariant_pseudometric(k1 in 1usize..8, k2 in 1usize..8, seed in 0u64..1000, mask in 0u32..256) {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c = Array2::zeros((k2, k1));
        for v in c.iter_mut() {
            *v = rng.gen_range(-2.0..2.0);
        }
        let meta1 = BasisMeta { n: 10, k: k1, kind: LaplacianKind::Normalized };
        let meta2 = BasisMeta { n: 10, k: k2, kind: LaplacianKind::Normalized };
        let base = SpectralMap::from_parts(c.clone(), meta1, meta2, MapSource::GroundTruth).unwrap();
        // flip an arbitrary subset of rows; the distance must vanish
        let mut flipped = c.clone();
        for i in 0..k2 {
            if mask & (1 << (i % 32)) != 0 {
                for j in 0..k1 {
                    flipped[[i, j] ] = -flipped[[i, j]];
                }
            }
        }
        let other = SpectralMap::from_parts(flipped, meta1, meta2, MapSource::GroundTruth).unwrap();
        prop_assert!(map_distance(&base, &other).unwrap() <= 1e-12);
        prop_assert!(map_distance(&other, &base).unwrap() <= 1e-12);
        prop_assert_eq!(map_distance(&base, &base).unwrap(), 0.0);
    }

    #[test]
    fn normalization_standardizes_columns(n in 2usize..40, d in 1usize..5, seed in 0u64..500) {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut values = Array2::zeros((n, d));
        for v in values.iter_mut() {
            *v = rng.gen_range(-5.0..5.0);
        }
        let f = SignalMatrix::new(values).unwrap();
        let z = normalize_signal(&f).unwrap();
        for col in z.values().columns() {
            let mean = col.sum() / n as f64;
            let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            prop_assert!(mean.abs() <= 1e-10);
            let is_zeroed = col.iter().all(|&v| v == 0.0);
            prop_assert!(is_zeroed || (var.sqrt() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn kspec_resolution_bounds(n in 1usize..5000, pct in 0.0001f64..100.0) {
        let k = KSpec::Percent(pct).resolve(n);
        prop_assert!(k >= 1 && k <= n);
        // half-up rounding
        let raw = pct / 100.0 * n as f64;
        prop_assert!((k as f64 - raw).abs() <= 0.5 + 1e-9 || k == 1 || k == n);
    }
}
