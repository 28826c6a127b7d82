//! Fault locations, measured operators, qubit roles and the fault model
//! shared by the symbolic constraints and the exhaustive oracle.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{CircuitAssignment, GateSet};
use crate::f2::PauliVec;

/// An operator measured by the circuit: X on `support` (data qubits),
/// measured through the A-qubits in `candidates`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    pub name: String,
    pub candidates: Vec<usize>,
    pub support: Vec<usize>,
}

/// Measurement basis of a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn measured_in_x(self) -> bool {
        matches!(self, Basis::X | Basis::Y)
    }

    pub fn measured_in_z(self) -> bool {
        matches!(self, Basis::Z | Basis::Y)
    }

    pub fn from_flags(mx: bool, mz: bool) -> Option<Basis> {
        match (mx, mz) {
            (true, false) => Some(Basis::X),
            (false, true) => Some(Basis::Z),
            (true, true) => Some(Basis::Y),
            (false, false) => None,
        }
    }
}

/// Concrete role assignment: root ancillas, flag qubits and measurement
/// bases of the A-qubits. A-qubits that are neither roots nor flags are
/// plain ancillas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Roles {
    pub roots: Vec<usize>,
    pub flags: Vec<usize>,
    pub bases: Vec<(usize, Basis)>,
}

impl Roles {
    pub fn is_flag(&self, q: usize) -> bool {
        self.flags.contains(&q)
    }

    pub fn is_root(&self, q: usize) -> bool {
        self.roots.contains(&q)
    }

    pub fn basis(&self, q: usize) -> Option<Basis> {
        self.bases.iter().find(|(p, _)| *p == q).map(|&(_, b)| b)
    }

    /// Roles with CSS bases: flags measured in Z, everything else in X.
    pub fn with_tied_bases(roots: Vec<usize>, flags: Vec<usize>, a_qubits: &[usize]) -> Self {
        let bases = a_qubits
            .iter()
            .map(|&q| (q, if flags.contains(&q) { Basis::Z } else { Basis::X }))
            .collect();
        Roles { roots, flags, bases }
    }
}

/// Which single-location Pauli errors are considered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliFilter {
    All,
    XOnly,
    ZOnly,
}

impl PauliFilter {
    fn admits(self, x: bool, z: bool) -> bool {
        match self {
            PauliFilter::All => true,
            PauliFilter::XOnly => !z,
            PauliFilter::ZOnly => !x,
        }
    }
}

/// Locations at which faults are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaultModel {
    /// Output errors of every active gate, on the gate's support.
    pub gates: bool,
    /// Single-qubit errors on A-qubits right after preparation (k = 0).
    pub prep: bool,
    /// Single-qubit errors on A-qubits right before measurement (k = N).
    pub meas: bool,
    /// Single-qubit errors on qubits left idle in a timestep.
    pub idle: bool,
    pub paulis: PauliFilter,
}

impl Default for FaultModel {
    fn default() -> Self {
        FaultModel { gates: true, prep: true, meas: true, idle: false, paulis: PauliFilter::All }
    }
}

/// Where a fault happens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaultKind {
    Prep,
    Gate,
    Idle,
    Meas,
}

/// A fault: the error `e` appears right after timestep `k` (k = 0 is
/// preparation) inside the measurement circuit of operator `stab`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaultLocation {
    pub kind: FaultKind,
    pub k: usize,
    pub e: PauliVec,
    pub stab: usize,
    /// The concrete gate, when known (set by the oracle).
    pub gate: Option<usize>,
}

/// Nontrivial Paulis on the given qubits, admitted by the filter, in a
/// fixed order (binary counting over (x, z) pairs).
pub fn paulis_on(n: usize, qubits: &[usize], filter: PauliFilter) -> Vec<PauliVec> {
    let m = qubits.len();
    let mut out = Vec::new();
    for code in 1u32..(1 << (2 * m)) {
        let mut p = PauliVec::identity(n);
        let mut ok = true;
        for (i, &q) in qubits.iter().enumerate() {
            let x = code >> (2 * i) & 1 == 1;
            let z = code >> (2 * i + 1) & 1 == 1;
            if (x || z) && !filter.admits(x, z) {
                ok = false;
            }
            p.set_x(q, x);
            p.set_z(q, z);
        }
        if ok {
            out.push(p);
        }
    }
    out
}

/// Owner operator of each qubit (A-qubits only) given the operators'
/// candidate lists.
pub fn qubit_owners(n: usize, operators: &[Operator]) -> Vec<Option<usize>> {
    let mut owner = vec![None; n];
    for (s, op) in operators.iter().enumerate() {
        for &a in &op.candidates {
            owner[a] = Some(s);
        }
    }
    owner
}

/// Owner of a gate: the owner of its control if that is an A-qubit,
/// otherwise the owner of any A-qubit it touches.
pub fn gate_owner(gs: &GateSet, gate: usize, owners: &[Option<usize>]) -> Option<usize> {
    gs.gate(gate).qubits.iter().find_map(|&q| owners[q])
}

/// All faults of the model on a concrete circuit, in deterministic order:
/// preparation faults by qubit, then per timestep gate faults by gate index
/// and idle faults by qubit, then measurement faults by qubit. Faults with
/// no owning operator are skipped.
pub fn concrete_faults(
    c: &CircuitAssignment,
    gs: &GateSet,
    a_qubits: &[usize],
    operators: &[Operator],
    model: &FaultModel,
) -> Vec<FaultLocation> {
    let n = gs.n();
    let owners = qubit_owners(n, operators);
    let mut out = Vec::new();
    if model.prep {
        for &a in a_qubits {
            if let Some(s) = owners[a] {
                for e in paulis_on(n, &[a], model.paulis) {
                    out.push(FaultLocation { kind: FaultKind::Prep, k: 0, e, stab: s, gate: None });
                }
            }
        }
    }
    let sched = c.schedule();
    for (j, step) in sched.iter().enumerate() {
        let k = j + 1;
        if model.gates {
            for &g in step {
                let Some(s) = gate_owner(gs, g, &owners) else { continue };
                for e in paulis_on(n, &gs.gate(g).qubits, model.paulis) {
                    out.push(FaultLocation { kind: FaultKind::Gate, k, e, stab: s, gate: Some(g) });
                }
            }
        }
        if model.idle {
            let mut busy = vec![false; n];
            for &g in step {
                for &q in &gs.gate(g).qubits {
                    busy[q] = true;
                }
            }
            for &a in a_qubits {
                if busy[a] {
                    continue;
                }
                if let Some(s) = owners[a] {
                    for e in paulis_on(n, &[a], model.paulis) {
                        out.push(FaultLocation { kind: FaultKind::Idle, k, e, stab: s, gate: None });
                    }
                }
            }
        }
    }
    if model.meas {
        for &a in a_qubits {
            if let Some(s) = owners[a] {
                for e in paulis_on(n, &[a], model.paulis) {
                    out.push(FaultLocation { kind: FaultKind::Meas, k: c.steps(), e, stab: s, gate: None });
                }
            }
        }
    }
    out
}

/// Identifier of the spacetime location of a concrete fault; two faults in
/// a set must have different locations.
pub fn location_key(f: &FaultLocation) -> (FaultKind, usize, usize) {
    match f.kind {
        FaultKind::Gate => (f.kind, f.k, f.gate.unwrap_or(usize::MAX)),
        _ => (f.kind, f.k, f.e.support().first().copied().unwrap_or(usize::MAX)),
    }
}
