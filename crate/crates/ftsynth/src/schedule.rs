//! Syndrome-extraction schedules for the rotated surface code with one
//! ancilla per stabilizer. A schedule is fault-tolerant when no single
//! fault leaves a data error with two qubits on a common minimum-weight
//! logical, in every representative up to the measured stabilizer.
//!
//! Both halves are posed as X-type problems: a Z-stabilizer circuit is the
//! X-stabilizer circuit on the same supports with every CNOT reversed, and
//! its Z hook errors land on the same data qubits.

use ftsynth_core::circuit::{build_gate_set, CircuitAssignment, GateSet, GateSetOptions, InteractionGraph};
use ftsynth_core::codes::{build_surface_code, StabilizerCode};
use ftsynth_core::constraints::{BasisMode, Effect, NotFtPredicate, ProblemSpec, RoleMode};
use ftsynth_core::f2::{GateKind, PauliType};
use ftsynth_core::faults::{FaultModel, Operator, PauliFilter, Roles};
use ftsynth_core::{CircuitError, CodeError};

/// Data pairs on a common minimum-weight logical of type `t`: columns for
/// X, rows for Z.
pub fn surface_pairs(l: usize, t: PauliType) -> Vec<(usize, usize)> {
    let key = |q: usize| match t {
        PauliType::X => q % l,
        PauliType::Z => q / l,
    };
    let n = l * l;
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| key(a) == key(b)).collect()
}

/// Measured stabilizers of type `t`, each owned by its own ancilla
/// numbered after the data qubits.
pub fn surface_operators(code: &StabilizerCode, t: PauliType) -> Vec<Operator> {
    let n = code.n();
    code.stabilizers(t)
        .iter()
        .enumerate()
        .map(|(i, s)| Operator {
            name: format!("{}{}", if t == PauliType::X { "X" } else { "Z" }, i + 1),
            candidates: vec![n + i],
            support: s.support.clone(),
        })
        .collect()
}

/// X-type synthesis problem for the `t` stabilizers of the distance-`l`
/// surface code. Only gate faults with X components are considered.
pub fn surface_schedule_spec(l: usize, t: PauliType, steps: usize) -> Result<ProblemSpec, CodeError> {
    let code = build_surface_code(l)?;
    let operators = surface_operators(&code, t);
    let n_data = code.n();
    let a_qubits: Vec<usize> = (n_data..n_data + operators.len()).collect();
    let edges: Vec<(usize, usize)> =
        operators.iter().flat_map(|op| op.support.iter().map(move |&d| (op.candidates[0], d))).collect();
    let graph = InteractionGraph::new(n_data + operators.len(), &edges, &a_qubits).expect("valid surface code graph");
    let gates = build_gate_set(&graph, &GateSetOptions::default()).expect("CNOT-only gate set");
    Ok(ProblemSpec {
        name: String::new(),
        gates,
        steps,
        a_qubits: a_qubits.clone(),
        data_qubits: (0..n_data).collect(),
        operators,
        roles: RoleMode::Fixed(Roles::with_tied_bases(a_qubits.clone(), vec![], &a_qubits)),
        basis: BasisMode::Tied,
        effect: Effect::Operators,
        faults: FaultModel { gates: true, prep: false, meas: false, idle: false, paulis: PauliFilter::XOnly },
        predicate: NotFtPredicate::Parallel(surface_pairs(l, t)),
        exclude_cross_group: true,
        use_aux: true,
    })
}

/// The circuit with every CNOT reversed, over the reversed gate set.
pub fn dual_circuit(gates: &GateSet, c: &CircuitAssignment) -> Result<(GateSet, CircuitAssignment), CircuitError> {
    let reversed: Vec<(GateKind, Vec<usize>)> = gates
        .gates()
        .iter()
        .map(|g| match g.kind {
            GateKind::Cnot => (g.kind, vec![g.qubits[1], g.qubits[0]]),
            _ => (g.kind, g.qubits.clone()),
        })
        .collect();
    let dual = GateSet::from_gates(gates.n(), &reversed)?;
    let schedule: Vec<Vec<usize>> = c
        .schedule()
        .into_iter()
        .map(|step| step.into_iter().map(|gi| dual.find(reversed[gi].0, &reversed[gi].1).expect("gate present")).collect())
        .collect();
    let dc = CircuitAssignment::from_schedule(dual.len(), &schedule)?;
    Ok((dual, dc))
}
