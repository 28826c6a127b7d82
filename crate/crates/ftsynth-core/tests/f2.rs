use ftsynth_core::f2::*;
use ftsynth_core::F2Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Conjugation rules applied directly to the (x, z) components, independent
/// of the matrix code.
fn apply_rule(kind: GateKind, qs: &[usize], x: &mut [bool], z: &mut [bool]) {
    match kind {
        GateKind::Cnot => {
            let (c, t) = (qs[0], qs[1]);
            x[t] ^= x[c];
            z[c] ^= z[t];
        }
        GateKind::H => {
            let q = qs[0];
            core::mem::swap(&mut x[q], &mut z[q]);
        }
        GateKind::S => {
            let q = qs[0];
            z[q] ^= x[q];
        }
        _ => {}
    }
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> Vec<Vec<GateSpec>> {
    let kinds = [GateKind::Cnot, GateKind::H, GateKind::S, GateKind::X, GateKind::Z, GateKind::I];
    (0..steps)
        .map(|_| {
            let mut free: Vec<usize> = (0..n).collect();
            let mut layer = Vec::new();
            while !free.is_empty() && rng.gen_bool(0.7) {
                let kind = kinds[rng.gen_range(0..kinds.len())];
                if kind.arity() > free.len() {
                    break;
                }
                let mut qs = Vec::new();
                for _ in 0..kind.arity() {
                    let k = rng.gen_range(0..free.len());
                    qs.push(free.swap_remove(k));
                }
                layer.push(GateSpec::new(0, kind, &qs, n).unwrap());
            }
            layer
        })
        .collect()
}

#[test]
fn cnot_matrix_matches_rows() {
    let m = bit_matrix_of_gate(GateKind::Cnot, &[0, 1], 2).unwrap();
    let expected = BitMatrix::from_rows(&[&[1, 0, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 0, 1]]);
    assert_eq!(m, expected);
}

#[test]
fn hadamard_swaps_x_and_z_of_its_qubit() {
    let m = bit_matrix_of_gate(GateKind::H, &[2], 3).unwrap();
    let mut expected = BitMatrix::identity(6);
    expected.set(2, 2, false);
    expected.set(5, 5, false);
    expected.set(2, 5, true);
    expected.set(5, 2, true);
    assert_eq!(m, expected);
}

#[test]
fn identity_gate_is_identity() {
    assert_eq!(bit_matrix_of_gate(GateKind::I, &[0], 4).unwrap(), BitMatrix::identity(8));
}

#[test]
fn gate_errors() {
    assert_eq!(GateKind::parse("T"), Err(F2Error::UnknownGate));
    assert!(matches!(bit_matrix_of_gate(GateKind::Cnot, &[1, 1], 3), Err(F2Error::DuplicateQubit { .. })));
    assert!(matches!(bit_matrix_of_gate(GateKind::H, &[3], 3), Err(F2Error::QubitOutOfRange { .. })));
}

#[test]
fn cnot_propagation_rules() {
    let c = bit_matrix_of_gate(GateKind::Cnot, &[0, 1], 2).unwrap();
    let x_ctrl = PauliVec::single(2, 0, true, false);
    assert_eq!(propagate(&x_ctrl, &c).unwrap(), PauliVec::from_support(2, &[0, 1], &[]));
    let z_ctrl = PauliVec::single(2, 0, false, true);
    assert_eq!(propagate(&z_ctrl, &c).unwrap(), z_ctrl);
    let z_targ = PauliVec::single(2, 1, false, true);
    assert_eq!(propagate(&z_targ, &c).unwrap(), PauliVec::from_support(2, &[], &[0, 1]));
    let zero = PauliVec::identity(2);
    assert_eq!(propagate(&zero, &c).unwrap(), zero);
}

#[test]
fn reduced_blocks_of_cnot() {
    let c = bit_matrix_of_gate(GateKind::Cnot, &[0, 1], 2).unwrap();
    assert_eq!(reduced_block(&c, PauliType::X), vec![vec![true, false], vec![true, true]]);
    assert_eq!(reduced_block(&c, PauliType::Z), vec![vec![true, true], vec![false, true]]);
    let id = BitMatrix::identity(4);
    assert_eq!(reduced_block(&id, PauliType::X), vec![vec![true, false], vec![false, true]]);
}

#[test]
fn single_timestep_product_sum() {
    let n = 3;
    let cnot = GateSpec::new(0, GateKind::Cnot, &[0, 1], n).unwrap();
    let h = GateSpec::new(1, GateKind::H, &[2], n).unwrap();
    let ps = product_sum_compose(&[vec![&cnot, &h]], n).unwrap();
    let mut sum = BitMatrix::identity(6);
    sum.xor_assign(&cnot.delta);
    sum.xor_assign(&h.delta);
    assert_eq!(ps, sum);
    assert_eq!(ps, cnot.matrix.mul(&h.matrix).unwrap());
    assert!(h.delta.mul(&cnot.delta).unwrap().is_zero());
    assert_eq!(product_sum_compose(&[], n).unwrap(), BitMatrix::identity(6));
}

#[test]
fn overlapping_support_rejected() {
    let n = 3;
    let a = GateSpec::new(0, GateKind::Cnot, &[0, 1], n).unwrap();
    let b = GateSpec::new(1, GateKind::H, &[1], n).unwrap();
    assert_eq!(product_sum_compose(&[vec![&a, &b]], n), Err(F2Error::OverlappingSupport { qubit: 1 }));
}

#[test]
fn delta_supported_on_gate_rectangle() {
    let n = 5;
    for kind in [GateKind::Cnot, GateKind::H, GateKind::S] {
        let qs: Vec<usize> = if kind == GateKind::Cnot { vec![3, 1] } else { vec![2] };
        let g = GateSpec::new(0, kind, &qs, n).unwrap();
        let rect: Vec<usize> = qs.iter().flat_map(|&q| [q, q + n]).collect();
        for i in 0..2 * n {
            for j in 0..2 * n {
                if g.delta.get(i, j) {
                    assert!(rect.contains(&i) && rect.contains(&j));
                }
            }
        }
    }
}

#[test]
fn gate_matrices_match_conjugation_rules_and_are_symplectic() {
    let n = 3;
    for (kind, qs) in [
        (GateKind::Cnot, vec![0, 2]),
        (GateKind::Cnot, vec![2, 1]),
        (GateKind::H, vec![1]),
        (GateKind::S, vec![0]),
        (GateKind::Y, vec![2]),
    ] {
        let m = bit_matrix_of_gate(kind, &qs, n).unwrap();
        assert!(m.is_symplectic());
        for col in 0..2 * n {
            let mut x = vec![false; n];
            let mut z = vec![false; n];
            if col < n {
                x[col] = true;
            } else {
                z[col - n] = true;
            }
            apply_rule(kind, &qs, &mut x, &mut z);
            for q in 0..n {
                assert_eq!(m.get(q, col), x[q]);
                assert_eq!(m.get(n + q, col), z[q]);
            }
        }
    }
}

#[test]
fn cnot_products_are_block_diagonal_with_inverse_transpose_z_block() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(2..7);
        let mut m = BitMatrix::identity(2 * n);
        for _ in 0..rng.gen_range(0..12) {
            let c = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n);
            while t == c {
                t = rng.gen_range(0..n);
            }
            m = bit_matrix_of_gate(GateKind::Cnot, &[c, t], n).unwrap().mul(&m).unwrap();
        }
        let mx = reduced_block(&m, PauliType::X);
        let mz = reduced_block(&m, PauliType::Z);
        for i in 0..n {
            for j in 0..n {
                assert!(!m.get(i, n + j) && !m.get(n + i, j));
            }
        }
        // M|_X^T M|_Z = I
        for i in 0..n {
            for j in 0..n {
                let v = (0..n).fold(false, |acc, k| acc ^ (mx[k][i] & mz[k][j]));
                assert_eq!(v, i == j);
            }
        }
    }
}

#[test]
fn product_sum_matches_naive_product_on_random_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let steps = rng.gen_range(0..=10);
        let circ = random_circuit(&mut rng, n, steps);
        let refs: Vec<Vec<&GateSpec>> = circ.iter().map(|l| l.iter().collect()).collect();
        let ps = product_sum_compose(&refs, n).unwrap();
        let mut naive = BitMatrix::identity(2 * n);
        for layer in &circ {
            for g in layer {
                naive = g.matrix.mul(&naive).unwrap();
            }
        }
        assert_eq!(ps, naive);
        assert!(ps.is_symplectic());
    }
}

proptest! {
    #[test]
    fn propagation_is_linear(seed in any::<u64>(), e1 in prop::collection::vec(any::<bool>(), 12), e2 in prop::collection::vec(any::<bool>(), 12)) {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = random_circuit(&mut rng, n, 5);
        let refs: Vec<Vec<&GateSpec>> = circ.iter().map(|l| l.iter().collect()).collect();
        let c = product_sum_compose(&refs, n).unwrap();
        let a = PauliVec::from_bits(n, BitVec::from_bools(&e1)).unwrap();
        let b = PauliVec::from_bits(n, BitVec::from_bools(&e2)).unwrap();
        let mut ab = a.clone();
        ab.mul_assign(&b);
        let mut lhs = propagate(&a, &c).unwrap();
        lhs.mul_assign(&propagate(&b, &c).unwrap());
        prop_assert_eq!(propagate(&ab, &c).unwrap(), lhs);
    }

    #[test]
    fn products_of_symplectic_matrices_are_symplectic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..6);
        let a = random_circuit(&mut rng, n, 4);
        let b = random_circuit(&mut rng, n, 4);
        let ma = product_sum_compose(&a.iter().map(|l| l.iter().collect()).collect::<Vec<_>>(), n).unwrap();
        let mb = product_sum_compose(&b.iter().map(|l| l.iter().collect()).collect::<Vec<_>>(), n).unwrap();
        prop_assert!(ma.mul(&mb).unwrap().is_symplectic());
    }

    #[test]
    fn weight_counts_nontrivial_qubits(xs in prop::collection::vec(any::<bool>(), 7), zs in prop::collection::vec(any::<bool>(), 7)) {
        let n = 7;
        let mut p = PauliVec::identity(n);
        for q in 0..n { p.set_x(q, xs[q]); p.set_z(q, zs[q]); }
        let expected = (0..n).filter(|&q| xs[q] || zs[q]).count();
        prop_assert_eq!(p.weight(), expected);
        prop_assert_eq!(p.support().len(), expected);
    }
}
