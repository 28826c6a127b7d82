use ftsynth_decode::{brute_force_apm, exact_mwpm, min_weight_apm, MatchingError, WeightedGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The worked example: V \ A = {0, 1, 2}, A = {3, 4, 5, 6}.
fn worked_example() -> WeightedGraph {
    let mut g = WeightedGraph::new(7);
    let (n0, n1, n2) = (0, 1, 2);
    let (a, b, c, d) = (3, 4, 5, 6);
    for (u, v, w) in [
        (n0, n1, 0.0),
        (n0, n2, 0.0),
        (n1, n2, 0.0),
        (n1, a, 5.0),
        (n1, b, 1.0),
        (n2, b, 3.0),
        (n2, d, 2.0),
        (n0, d, 4.0),
        (d, b, 2.0),
        (d, c, 1.0),
        (a, d, 8.0),
        (c, a, 6.0),
        (b, a, 7.0),
    ] {
        g.add_edge(u, v, w).unwrap();
    }
    g.set_a(&[a, b, c, d]);
    g
}

#[test]
fn worked_example_expands_relabeled_edge() {
    let g = worked_example();
    let m = min_weight_apm(&g).unwrap();
    assert_eq!(m, vec![(1, 3), (1, 4), (5, 6)]);
    assert_eq!(g.total(&m), Some(7.0));
    assert!(g.is_a_perfect(&m));
    assert_eq!(brute_force_apm(&g).unwrap().0, 7.0);
}

#[test]
fn empty_a_gives_empty_matching() {
    let mut g = WeightedGraph::new(3);
    g.add_edge(0, 1, 1.0).unwrap();
    assert!(min_weight_apm(&g).unwrap().is_empty());
}

#[test]
fn exact_mwpm_basics() {
    assert_eq!(exact_mwpm(2, &[(0, 1, 3.5)]).unwrap(), vec![(0, 1)]);
    assert_eq!(
        exact_mwpm(3, &[(0, 1, 1.0)]),
        Err(MatchingError::OddVertexCount(3))
    );
    assert_eq!(
        exact_mwpm(4, &[(0, 1, 1.0)]),
        Err(MatchingError::NoPerfectMatching)
    );
    // K4 with weights 1..6: the three perfect matchings weigh 1+6, 2+5, 3+4.
    let edges = [
        (0, 1, 1.0),
        (0, 2, 2.0),
        (0, 3, 3.0),
        (2, 3, 6.0),
        (1, 3, 5.0),
        (1, 2, 4.0),
    ];
    let m = exact_mwpm(4, &edges).unwrap();
    let w: f64 = m
        .iter()
        .map(|&(u, v)| edges.iter().find(|e| (e.0, e.1) == (u, v)).unwrap().2)
        .sum();
    assert_eq!(w, 7.0);
}

#[test]
fn infeasible_when_a_vertex_is_isolated() {
    let mut g = WeightedGraph::new(3);
    g.add_edge(0, 1, 1.0).unwrap();
    g.set_a(&[0, 1, 2]);
    assert!(matches!(
        min_weight_apm(&g),
        Err(MatchingError::Infeasible(_))
    ));
    assert!(brute_force_apm(&g).is_none());
}

#[test]
fn rejects_bad_edges() {
    let mut g = WeightedGraph::new(2);
    assert!(g.add_edge(0, 0, 1.0).is_err());
    assert!(g.add_edge(0, 1, -1.0).is_err());
    assert!(g.add_edge(0, 1, f64::INFINITY).is_err());
}

fn random_graph(rng: &mut ChaCha8Rng) -> WeightedGraph {
    let n = rng.gen_range(1..=10);
    let density = rng.gen_range(0.2..1.0);
    let mut g = WeightedGraph::new(n);
    let zero_escapes = rng.gen_bool(0.3);
    let a: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
    g.set_a(&a);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                let w = if zero_escapes && (!g.in_a(u) || !g.in_a(v)) {
                    0.0
                } else {
                    rng.gen_range(0..8) as f64
                };
                g.add_edge(u, v, w).unwrap();
            }
        }
    }
    g
}

#[test]
fn matches_brute_force_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA9);
    let mut feasible = 0;
    for _ in 0..200 {
        let g = random_graph(&mut rng);
        match (brute_force_apm(&g), min_weight_apm(&g)) {
            (Some((w, _)), Ok(m)) => {
                assert!(g.is_a_perfect(&m));
                assert_eq!(g.total(&m), Some(w));
                feasible += 1;
            }
            (None, Err(_)) => {}
            (b, m) => panic!("disagreement: brute {b:?} vs reduction {m:?} on {g:?}"),
        }
    }
    assert!(feasible > 100);
}

proptest! {
    #[test]
    fn output_is_a_perfect(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng);
        if let Ok(m) = min_weight_apm(&g) {
            prop_assert!(g.is_a_perfect(&m));
            let (w, _) = brute_force_apm(&g).unwrap();
            prop_assert_eq!(g.total(&m), Some(w));
        }
    }
}
