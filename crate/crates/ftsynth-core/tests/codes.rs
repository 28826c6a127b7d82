use std::collections::BTreeSet;

use ftsynth_core::codes::{
    boundary_1, build_color_code, build_merged_code, build_surface_code, Color, Label, QubitClass,
    StabilizerCode, SyndromeGraph,
};
use ftsynth_core::f2::PauliType;
use proptest::prelude::*;

const DISTANCES: [usize; 4] = [3, 5, 7, 9];

/// Minimum weight of an operator of type `t` that commutes with every
/// stabilizer of the opposite type and anticommutes with the opposite
/// logical, by exhaustive search.
fn brute_distance(code: &StabilizerCode, t: PauliType) -> usize {
    let n = code.n();
    assert!(n <= 20);
    let (checks, logical) = match t {
        PauliType::X => (&code.z_stabilizers, &code.logical_z),
        PauliType::Z => (&code.x_stabilizers, &code.logical_x),
    };
    let masks: Vec<u32> = checks.iter().map(|s| s.support.iter().map(|&q| 1u32 << q).sum()).collect();
    let lmask: u32 = logical.iter().map(|&q| 1u32 << q).sum();
    (1u32..1 << n)
        .filter(|v| (v & lmask).count_ones() % 2 == 1 && masks.iter().all(|m| (v & m).count_ones() % 2 == 0))
        .map(|v| v.count_ones() as usize)
        .min()
        .unwrap()
}

#[test]
fn surface_code_counts_and_commutation() {
    for l in DISTANCES {
        let sc = build_surface_code(l).unwrap();
        assert_eq!(sc.n(), l * l);
        assert_eq!(sc.x_stabilizers.len(), (l * l - 1) / 2);
        assert_eq!(sc.z_stabilizers.len(), (l * l - 1) / 2);
        assert!(sc.stabilizers_commute());
        assert!(sc.logicals_valid());
        assert_eq!(sc.logical_qubits(), 1);
    }
}

#[test]
fn surface_code_boundary_layout() {
    let sc = build_surface_code(3).unwrap();
    let xs: BTreeSet<Vec<usize>> = sc.x_stabilizers.iter().map(|s| s.support.clone()).collect();
    let zs: BTreeSet<Vec<usize>> = sc.z_stabilizers.iter().map(|s| s.support.clone()).collect();
    let expect_x: BTreeSet<Vec<usize>> = [vec![0, 1], vec![1, 2, 4, 5], vec![3, 4, 6, 7], vec![7, 8]].into();
    let expect_z: BTreeSet<Vec<usize>> = [vec![0, 1, 3, 4], vec![2, 5], vec![3, 6], vec![4, 5, 7, 8]].into();
    assert_eq!(xs, expect_x);
    assert_eq!(zs, expect_z);
    assert_eq!(sc.virtual_x[0].1, vec![0, 2, 3, 5, 6, 8]);
    assert_eq!(sc.virtual_z[0].1, vec![0, 1, 2, 6, 7, 8]);
}

#[test]
fn color_code_counts_and_colors() {
    for l in DISTANCES {
        let cc = build_color_code(l).unwrap();
        assert_eq!(cc.n(), (3 * l * l + 1) / 4);
        assert_eq!(cc.x_stabilizers.len(), (cc.n() - 1) / 2);
        assert!(cc.stabilizers_commute());
        assert!(cc.logicals_valid());
        assert_eq!(cc.logical_qubits(), 1);
        for s in &cc.x_stabilizers {
            assert!(s.support.len() == 4 || s.support.len() == 6);
        }
        for (i, a) in cc.x_stabilizers.iter().enumerate() {
            for b in &cc.x_stabilizers[i + 1..] {
                let shared = a.support.iter().filter(|q| b.support.contains(q)).count();
                if shared > 0 {
                    assert_eq!(shared, 2);
                    assert_ne!(a.color, b.color);
                }
            }
        }
        for (_, side) in &cc.virtual_x {
            assert_eq!(side.len(), l);
        }
    }
}

#[test]
fn distance_three_codes_by_exhaustive_search() {
    let sc = build_surface_code(3).unwrap();
    assert_eq!(brute_distance(&sc, PauliType::X), 3);
    assert_eq!(brute_distance(&sc, PauliType::Z), 3);
    let cc = build_color_code(3).unwrap();
    assert_eq!(brute_distance(&cc, PauliType::X), 3);
    assert_eq!(brute_distance(&cc, PauliType::Z), 3);
    let mc = build_merged_code(3).unwrap();
    assert_eq!(mc.code.n(), 16);
    assert_eq!(brute_distance(&mc.code, PauliType::X), 3);
    assert_eq!(brute_distance(&mc.code, PauliType::Z), 6);
}

#[test]
fn merged_code_structure() {
    for l in DISTANCES {
        let mc = build_merged_code(l).unwrap();
        let code = &mc.code;
        assert_eq!(code.n(), l * l + (3 * l * l + 1) / 4);
        assert_eq!(mc.zeta.len(), (l + 1) / 2);
        assert_eq!(mc.eta.len(), (l - 1) / 2);
        assert!(code.stabilizers_commute());
        assert!(code.logicals_valid());
        assert_eq!(code.logical_qubits(), 1);
        assert_eq!(code.rank(PauliType::X) + code.rank(PauliType::Z), code.n() - 1);
        assert_eq!(code.logical_x.len(), l);
        assert_eq!(code.logical_z.len(), 2 * l);
        for (i, (a, b)) in mc.alpha.iter().zip(&mc.beta).enumerate() {
            assert_eq!(a.len(), 2);
            assert_eq!(b.len(), 4);
            let eta = &code.z_stabilizers[mc.eta[i]];
            assert_eq!(eta.label, Label::Eta(i));
            assert_eq!(eta.support.len(), 6);
            for &z in &mc.zeta {
                let zeta = &code.x_stabilizers[z].support;
                let ov = |s: &[usize]| s.iter().filter(|q| zeta.contains(q)).count() % 2;
                assert_eq!(ov(a), ov(b));
            }
        }
        let z0 = &code.x_stabilizers[mc.zeta[0]].support;
        assert_eq!(z0.len(), 2);
        let ov = |s: &[usize]| s.iter().filter(|q| z0.contains(q)).count();
        assert_eq!(ov(&mc.alpha[0]), 1);
        assert_eq!(ov(&mc.beta[0]), 1);
        let left: Vec<usize> = (0..l).map(|i| i * l).collect();
        assert_eq!(code.virtual_x.iter().find(|(c, _)| *c == Color::R).unwrap().1, left);
    }
}

#[test]
fn merged_graph_qubit_classes() {
    for l in DISTANCES {
        let mc = build_merged_code(l).unwrap();
        for p in [PauliType::X, PauliType::Z] {
            let g = SyndromeGraph::build(&mc.code, p, 1.0, 1.0);
            assert_eq!(g.real_count, mc.code.stabilizers(p).len());
            assert_eq!(g.n_vertices(), g.real_count + 3);
            for q in 0..mc.code.n() {
                let expect = if q < mc.sc_qubits { QubitClass::Edge } else { QubitClass::Face };
                assert_eq!(g.class[q], expect, "L={l} {p:?} qubit {q}");
            }
        }
    }
}

#[test]
fn weights_follow_face_sharing() {
    let mc = build_merged_code(5).unwrap();
    let g = SyndromeGraph::build(&mc.code, PauliType::X, 2.0, 7.0);
    for e in &g.edges {
        let face = e.qubits.iter().any(|&q| g.class[q] == QubitClass::Face);
        assert_eq!(e.weight, if face { 7.0 } else { 2.0 });
        let a = &g.vertices[e.u].support;
        let b = &g.vertices[e.v].support;
        assert!(e.qubits.iter().all(|q| a.contains(q) && b.contains(q)));
    }
    for u in 0..g.n_vertices() {
        for v in u + 1..g.n_vertices() {
            let shares = g.vertices[u].support.iter().any(|q| g.vertices[v].support.contains(q));
            assert_eq!(shares, g.edge_between(u, v).is_some());
        }
    }
}

#[test]
fn restricted_graphs_cover_the_graph() {
    for l in DISTANCES {
        let mc = build_merged_code(l).unwrap();
        for p in [PauliType::X, PauliType::Z] {
            let g = SyndromeGraph::build(&mc.code, p, 1.0, 1.0);
            let mut covered = BTreeSet::new();
            for c in Color::ALL {
                let (c1, c2) = c.others();
                let r = g.restricted_graph(c1, c2);
                let parent = r.parent.as_ref().unwrap();
                for e in &r.edges {
                    let (u, v) = (parent[e.u], parent[e.v]);
                    assert!(r.vertices[e.u].color != c && r.vertices[e.v].color != c);
                    covered.insert(g.edge_between(u, v).unwrap());
                }
            }
            let all: BTreeSet<usize> = g
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| g.vertices[e.u].color != g.vertices[e.v].color || !g.vertices[e.u].is_virtual)
                .map(|(i, _)| i)
                .collect();
            assert!(all.is_subset(&covered));
            assert_eq!(covered.len(), g.edges.len());
        }
    }
}

#[test]
fn face_boundaries() {
    let mc = build_merged_code(3).unwrap();
    let g = SyndromeGraph::build(&mc.code, PauliType::X, 1.0, 1.0);
    let cc: Vec<usize> = (mc.sc_qubits..mc.code.n()).collect();
    assert!(boundary_1(&[0], &g).is_err());
    let one = boundary_1(&cc[..1], &g).unwrap();
    assert_eq!(one.len(), 3);
    let twice = boundary_1(&[cc[0], cc[0]], &g).unwrap();
    assert!(twice.is_empty());
    for k in 1..cc.len() {
        let b = boundary_1(&cc[..k], &g).unwrap();
        let mut degree = vec![0usize; g.n_vertices()];
        for &e in &b {
            degree[g.edges[e].u] += 1;
            degree[g.edges[e].v] += 1;
        }
        assert!(degree.iter().all(|d| d % 2 == 0));
    }
}

proptest! {
    #[test]
    fn syndrome_of_stabilizer_is_trivial(l in prop::sample::select(vec![3usize, 5, 7]), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let mc = build_merged_code(l).unwrap();
        let code = &mc.code;
        let mut e = vec![false; code.n()];
        for p in &picks {
            let s = &code.x_stabilizers[p.index(code.x_stabilizers.len())];
            for &q in &s.support {
                e[q] ^= true;
            }
        }
        prop_assert!(code.syndrome(PauliType::Z, &e).iter().all(|b| !b));
        prop_assert!(!code.is_logical(PauliType::X, &e));
    }

    #[test]
    fn graph_syndrome_matches_code(l in prop::sample::select(vec![3usize, 5]), qs in prop::collection::vec(any::<prop::sample::Index>(), 1..5)) {
        let mc = build_merged_code(l).unwrap();
        let g = SyndromeGraph::build(&mc.code, PauliType::X, 1.0, 1.0);
        let mut e = vec![false; mc.code.n()];
        for q in &qs {
            e[q.index(mc.code.n())] ^= true;
        }
        let s = mc.code.syndrome(PauliType::X, &e);
        let mut from_graph = vec![false; g.n_vertices()];
        for (q, &b) in e.iter().enumerate() {
            if b {
                for &v in &g.incidence[q] {
                    from_graph[v] ^= true;
                }
            }
        }
        prop_assert_eq!(&from_graph[..g.real_count], &s[..]);
    }
}
