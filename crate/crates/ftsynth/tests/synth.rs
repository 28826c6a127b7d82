use std::time::Duration;

use ftsynth::smt::{emit, solve, Session, SolverConfig, Status};
use ftsynth::synth::{prove_min_timesteps, solve_full, synthesize, violations, Minimality, Outcome, SynthConfig};
use ftsynth_core::circuit::{
    build_gate_set, circuit_to_bitmatrix, is_valid_circuit, CircuitAssignment, GateSetOptions, InteractionGraph,
};
use ftsynth_core::constraints::*;
use ftsynth_core::f2::{propagate, PauliType, PauliVec};
use ftsynth_core::faults::{FaultModel, Operator, Roles};
use ftsynth_core::formula::FormulaStore;

const FIG5_SCRIPT: &str = "\
(set-logic QF_LIA)
(declare-const x_1_1 Bool)
(declare-const x_1_2 Bool)
(declare-const x_2_1 Bool)
(declare-const x_2_2 Bool)
(define-fun t6 () Bool (xor x_1_1 x_1_2))
(define-fun t7 () Bool (xor x_2_1 x_2_2))
(define-fun t8 () Bool (and t6 t7))
(assert t8)
(define-fun t9 () Bool (and x_1_1 x_2_1))
(define-fun t10 () Bool (not t9))
(define-fun t11 () Bool (and x_1_2 x_2_2))
(define-fun t12 () Bool (not t11))
(define-fun t13 () Bool (and t10 t12))
(assert t13)
(check-sat)
";

fn solver() -> Option<SolverConfig> {
    match SolverConfig::from_env() {
        Ok(s) => Some(s),
        Err(e) => {
            eprintln!("skipping: {e}");
            None
        }
    }
}

/// One A-qubit fanning out to two data qubits: the root's X must reach
/// both data qubits while the data columns stay untouched.
fn fig5_spec(steps: usize, use_aux: bool) -> ProblemSpec {
    let g = InteractionGraph::new(3, &[(0, 1), (0, 2)], &[0]).unwrap();
    let gs = build_gate_set(&g, &GateSetOptions::default()).unwrap();
    ProblemSpec {
        name: String::new(),
        gates: gs,
        steps,
        a_qubits: vec![0],
        data_qubits: vec![1, 2],
        operators: vec![],
        roles: RoleMode::Fixed(Roles::default()),
        basis: BasisMode::Tied,
        effect: Effect::Columns(vec![
            ColumnSpec::Exact(vec![true, true, true]),
            ColumnSpec::Exact(vec![false, true, false]),
            ColumnSpec::Exact(vec![false, false, true]),
        ]),
        faults: FaultModel::default(),
        predicate: NotFtPredicate::VFlag,
        exclude_cross_group: false,
        use_aux,
    }
}

/// Every gate-time assignment that is a valid circuit and maps X on the
/// A-qubit to X on all three qubits while fixing X on the data.
fn fig5_ground_truth(spec: &ProblemSpec) -> Vec<CircuitAssignment> {
    let w = spec.gates.len();
    let n = 3;
    let mut out = Vec::new();
    for bits in 0u32..1 << (w * spec.steps) {
        let x: Vec<Vec<bool>> =
            (0..w).map(|i| (0..spec.steps).map(|j| bits >> (i * spec.steps + j) & 1 == 1).collect()).collect();
        let c = CircuitAssignment::from_array(x, spec.steps).unwrap();
        if !is_valid_circuit(&c, &spec.gates) {
            continue;
        }
        let m = circuit_to_bitmatrix(&c, &spec.gates).unwrap();
        let image = |q: usize| propagate(&PauliVec::single(n, q, true, false), &m).unwrap();
        if image(0).component_support(PauliType::X) == vec![0, 1, 2]
            && (1..n).all(|q| image(q).component_support(PauliType::X) == vec![q])
        {
            out.push(c);
        }
    }
    out
}

#[test]
fn fig5_script_is_frozen() {
    let mut store = FormulaStore::new();
    let p = SynthesisProblem::new(fig5_spec(2, false), &mut store).unwrap();
    let base = p.base_constraints(&mut store);
    let script = emit(&store, &base);
    assert_eq!(script, FIG5_SCRIPT);
    assert_eq!(script.matches("(declare-const").count(), 4);
    assert_eq!(script.matches("(assert").count(), 2);
}

#[test]
fn emission_is_deterministic() {
    let build = || {
        let mut store = FormulaStore::new();
        let p = SynthesisProblem::new(fig5_spec(3, true), &mut store).unwrap();
        let base = p.base_constraints(&mut store);
        emit(&store, &base)
    };
    assert_eq!(build(), build());
}

#[test]
fn aux_variables_are_declared_and_tied() {
    let mut store = FormulaStore::new();
    let p = SynthesisProblem::new(fig5_spec(3, true), &mut store).unwrap();
    let base = p.base_constraints(&mut store);
    let script = emit(&store, &base);
    let declared = script.lines().filter(|l| l.starts_with("(declare-const aux!")).count();
    let tied = script.lines().filter(|l| l.starts_with("(assert (= aux!")).count();
    assert!(declared > 0);
    assert_eq!(declared, tied);
}

#[test]
fn fig5_has_two_valid_circuits() {
    let spec = fig5_spec(2, true);
    let truth = fig5_ground_truth(&spec);
    assert_eq!(truth.len(), 2);
    let schedules: Vec<_> = truth.iter().map(|c| c.schedule()).collect();
    assert!(schedules.contains(&vec![vec![0], vec![1]]));
    assert!(schedules.contains(&vec![vec![1], vec![0]]));
}

#[test]
fn fig5_synthesis_returns_a_ground_truth_circuit() {
    let Some(cfg) = solver() else { return };
    for use_aux in [false, true] {
        let spec = fig5_spec(2, use_aux);
        let truth = fig5_ground_truth(&spec);
        let r = synthesize(std::slice::from_ref(&spec), &SynthConfig { v: 0, ..SynthConfig::default() }, &cfg).unwrap();
        assert_eq!(r.iterations.len(), 1);
        let Outcome::Found(s) = r.outcome else { panic!("{:?}", r.outcome) };
        assert!(truth.contains(&s[0].circuit));
    }
}

#[test]
fn one_timestep_is_unsat_and_two_is_minimal() {
    let Some(cfg) = solver() else { return };
    let r = synthesize(&[fig5_spec(1, true)], &SynthConfig { v: 0, ..SynthConfig::default() }, &cfg).unwrap();
    assert!(matches!(r.outcome, Outcome::Unsat));
    let m = prove_min_timesteps(&fig5_spec(2, true), &SynthConfig { v: 0, ..SynthConfig::default() }, &cfg).unwrap();
    assert!(matches!(m, Minimality::Minimal { steps: 2, .. }), "{m:?}");
    let m = prove_min_timesteps(&fig5_spec(3, true), &SynthConfig { v: 0, ..SynthConfig::default() }, &cfg).unwrap();
    assert!(matches!(m, Minimality::NotMinimal { steps: 2, .. }), "{m:?}");
}

#[test]
fn trivial_and_contradictory_assertions() {
    let Some(cfg) = solver() else { return };
    let mut store = FormulaStore::new();
    assert_eq!(solve(&cfg, &store, &[], None).unwrap().status, Status::Sat);
    let f = store.constant(false);
    assert_eq!(solve(&cfg, &store, &[f], None).unwrap().status, Status::Unsat);

    let p = SynthesisProblem::new(fig5_spec(2, true), &mut store).unwrap();
    let mut base = p.base_constraints(&mut store);
    let both_first = store.and2(p.x(0, 0), p.x(1, 0));
    base.push(both_first);
    assert_eq!(solve(&cfg, &store, &base, None).unwrap().status, Status::Unsat);
}

#[test]
fn push_pop_restores_satisfiability() {
    let Some(cfg) = solver() else { return };
    let mut store = FormulaStore::new();
    let p = SynthesisProblem::new(fig5_spec(2, true), &mut store).unwrap();
    let base = p.base_constraints(&mut store);
    let clash = store.and2(p.x(0, 0), p.x(1, 0));
    let mut s = Session::start(&cfg).unwrap();
    for &b in &base {
        s.assert(&store, b).unwrap();
    }
    s.push().unwrap();
    s.assert(&store, clash).unwrap();
    assert_eq!(s.check(&store, None).unwrap().status, Status::Unsat);
    s.pop().unwrap();
    let res = s.check(&store, Some(Duration::from_secs(10))).unwrap();
    assert_eq!(res.status, Status::Sat);
    assert_eq!(s.assertions().len(), base.len());
}

#[test]
fn missing_solver_is_reported() {
    let cfg = SolverConfig::z3("/nonexistent/solver");
    assert!(matches!(Session::start(&cfg), Err(ftsynth::smt::SmtError::NotFound(_))));
}

/// Weight-4 X stabilizer, three A-qubits, every edge allowed, degree 3.
fn weight4_spec(steps: usize) -> ProblemSpec {
    let a: Vec<usize> = (4..7).collect();
    let mut edges = Vec::new();
    for &x in &a {
        edges.extend((0..4).map(|d| (x, d)));
        edges.extend(a.iter().filter(|&&y| x < y).map(|&y| (x, y)));
    }
    let g = InteractionGraph::new(7, &edges, &a).unwrap();
    ProblemSpec {
        name: "w4".into(),
        gates: build_gate_set(&g, &GateSetOptions::default()).unwrap(),
        steps,
        a_qubits: a.clone(),
        data_qubits: (0..4).collect(),
        operators: vec![Operator { name: "S".into(), candidates: a, support: (0..4).collect() }],
        roles: RoleMode::Symbolic,
        basis: BasisMode::Tied,
        effect: Effect::Operators,
        faults: FaultModel::default(),
        predicate: NotFtPredicate::VFlag,
        exclude_cross_group: true,
        use_aux: true,
    }
}

#[test]
fn flagged_weight4_measurement_passes_oracle() {
    let Some(cfg) = solver() else { return };
    let spec = weight4_spec(6);
    let sc = SynthConfig { v: 1, degree: Some(3), ..SynthConfig::default() };
    let r = synthesize(std::slice::from_ref(&spec), &sc, &cfg).unwrap();
    let Outcome::Found(s) = r.outcome else { panic!("{:?}", r.outcome) };
    assert!(r.iterations.len() > 1);
    assert!(r.iterations.iter().all(|it| it.status == Status::Sat));
    assert!(violations(&spec, &s[0], 1, 1).unwrap().is_empty());
    assert!(!s[0].roles.flags.is_empty());
    assert_eq!(s[0].roles.roots.len(), 1);
}

#[test]
fn batched_and_cold_restart_loops_agree_on_validity() {
    let Some(cfg) = solver() else { return };
    let spec = weight4_spec(6);
    for sc in [
        SynthConfig { v: 1, degree: Some(3), cex_batch: 4, ..SynthConfig::default() },
        SynthConfig { v: 1, degree: Some(3), incremental: false, ..SynthConfig::default() },
    ] {
        let r = synthesize(std::slice::from_ref(&spec), &sc, &cfg).unwrap();
        let Outcome::Found(s) = r.outcome else { panic!("{:?}", r.outcome) };
        assert!(violations(&spec, &s[0], 1, 1).unwrap().is_empty());
    }
}

#[test]
fn full_constraint_agrees_with_loop() {
    let Some(cfg) = solver() else { return };
    let spec = weight4_spec(6);
    let (status, sol) = solve_full(&spec, 1, Some(3), &cfg, None).unwrap();
    assert_eq!(status, Status::Sat);
    assert!(violations(&spec, &sol.unwrap(), 1, 1).unwrap().is_empty());
}

#[test]
fn iteration_budget_is_respected() {
    let Some(cfg) = solver() else { return };
    let spec = weight4_spec(6);
    let sc = SynthConfig { v: 1, degree: Some(3), max_iters: 1, ..SynthConfig::default() };
    let r = synthesize(std::slice::from_ref(&spec), &sc, &cfg).unwrap();
    assert_eq!(r.iterations.len(), 1);
    let Outcome::Exhausted { last, pending } = r.outcome else { panic!("{:?}", r.outcome) };
    assert!(last.is_some());
    assert_eq!(pending.len(), 1);
}
