use ftsynth::schedule::{dual_circuit, surface_pairs, surface_schedule_spec};
use ftsynth::smt::SolverConfig;
use ftsynth::synth::{synthesize, violations, Outcome, Solution, SynthConfig};
use ftsynth_core::circuit::CircuitAssignment;
use ftsynth_core::constraints::ProblemSpec;
use ftsynth_core::f2::{GateKind, PauliType};
use ftsynth_core::oracle::{check_schedule_ft, ScheduleCheckInput, ScheduleViolation};

fn solver() -> Option<SolverConfig> {
    match SolverConfig::from_env() {
        Ok(s) => Some(s),
        Err(e) => {
            eprintln!("skipping: {e}");
            None
        }
    }
}

fn schedule_check(spec: &ProblemSpec, c: &CircuitAssignment, t: PauliType) -> Option<ScheduleViolation> {
    let (gates, circuit) = match t {
        PauliType::X => (spec.gates.clone(), c.clone()),
        PauliType::Z => dual_circuit(&spec.gates, c).unwrap(),
    };
    let ops: Vec<_> = spec.operators.iter().map(|o| (o.clone(), t)).collect();
    let input = ScheduleCheckInput {
        gates: &gates,
        circuit: &circuit,
        a_qubits: &spec.a_qubits,
        data_qubits: &spec.data_qubits,
        operators: &ops,
        x_pairs: &surface_pairs(3, PauliType::X),
        z_pairs: &surface_pairs(3, PauliType::Z),
    };
    check_schedule_ft(&input).unwrap()
}

fn synth(spec: &ProblemSpec) -> Solution {
    let cfg = solver().unwrap();
    let r = synthesize(std::slice::from_ref(spec), &SynthConfig { v: 1, ..SynthConfig::default() }, &cfg).unwrap();
    let Outcome::Found(mut s) = r.outcome else { panic!("{:?}", r.outcome) };
    s.remove(0)
}

#[test]
fn pairs_follow_columns_and_rows() {
    let x = surface_pairs(3, PauliType::X);
    let z = surface_pairs(3, PauliType::Z);
    assert_eq!(x.len(), 9);
    assert_eq!(z.len(), 9);
    assert!(x.contains(&(1, 4)) && x.contains(&(2, 8)) && !x.contains(&(0, 1)));
    assert!(z.contains(&(0, 1)) && z.contains(&(6, 8)) && !z.contains(&(0, 3)));
}

#[test]
fn column_ordered_plaquette_leaves_aligned_hook() {
    let spec = surface_schedule_spec(3, PauliType::X, 4).unwrap();
    let op = &spec.operators[0];
    assert_eq!(op.support, vec![1, 2, 4, 5]);
    let a = op.candidates[0];
    let order = [1, 4, 2, 5];
    let schedule: Vec<Vec<usize>> =
        order.iter().map(|&d| vec![spec.gates.find(GateKind::Cnot, &[a, d]).unwrap()]).collect();
    let c = CircuitAssignment::from_schedule(spec.gates.len(), &schedule).unwrap();
    let v = schedule_check(&spec, &c, PauliType::X).expect("aligned hook");
    assert_eq!(v.component, PauliType::X);
    let data: Vec<usize> = v.propagated.component_support(PauliType::X).into_iter().filter(|&q| q < 9).collect();
    assert_eq!(data, vec![2, 5]);

    let row_first = [1, 2, 4, 5];
    let schedule: Vec<Vec<usize>> =
        row_first.iter().map(|&d| vec![spec.gates.find(GateKind::Cnot, &[a, d]).unwrap()]).collect();
    let c = CircuitAssignment::from_schedule(spec.gates.len(), &schedule).unwrap();
    assert!(schedule_check(&spec, &c, PauliType::X).is_none());
}

#[test]
fn dual_circuit_is_an_involution() {
    let spec = surface_schedule_spec(3, PauliType::Z, 4).unwrap();
    let c = CircuitAssignment::from_schedule(spec.gates.len(), &[vec![0], vec![1, 5], vec![], vec![2]]).unwrap();
    let (g1, c1) = dual_circuit(&spec.gates, &c).unwrap();
    let g = &g1.gates()[0];
    assert_eq!(g.qubits, vec![spec.gates.gate(0).qubits[1], spec.gates.gate(0).qubits[0]]);
    let (g2, c2) = dual_circuit(&g1, &c1).unwrap();
    assert_eq!(g2.gates(), spec.gates.gates());
    assert_eq!(c2, c);
}

#[test]
fn both_halves_synthesize_in_four_steps() {
    if solver().is_none() {
        return;
    }
    for t in [PauliType::X, PauliType::Z] {
        let spec = surface_schedule_spec(3, t, 4).unwrap();
        let sol = synth(&spec);
        assert!(violations(&spec, &sol, 1, 1).unwrap().is_empty());
        assert!(schedule_check(&spec, &sol.circuit, t).is_none(), "{t:?}");
    }
}

#[test]
fn three_steps_are_not_enough() {
    let Some(cfg) = solver() else { return };
    let spec = surface_schedule_spec(3, PauliType::X, 3).unwrap();
    let r = synthesize(&[spec], &SynthConfig::default(), &cfg).unwrap();
    assert!(matches!(r.outcome, Outcome::Unsat));
}

#[test]
fn fixtures_match_programmatic_specs() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for (file, t) in [("surface_x.json", PauliType::X), ("surface_z.json", PauliType::Z)] {
        let from_file = ftsynth::io::SpecFile::load(&dir.join(file)).unwrap().problems().unwrap().remove(0);
        let built = surface_schedule_spec(3, t, 4).unwrap();
        assert_eq!(format!("{from_file:?}"), format!("{built:?}"), "{file}");
    }
}
