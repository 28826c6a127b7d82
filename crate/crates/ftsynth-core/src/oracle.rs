//! Exhaustive fault-tolerance checks of concrete circuits.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::circuit::{partial_matrices, CircuitAssignment, GateSet};
use crate::constraints::{next_combination, NotFtPredicate};
use crate::error::CircuitError;
use crate::f2::{propagate, BitMatrix, PauliType, PauliVec};
use crate::faults::{concrete_faults, location_key, FaultLocation, FaultModel, Operator, Roles};

/// A concrete circuit together with its roles and measured operators.
#[derive(Clone, Debug)]
pub struct FlagCheckInput<'a> {
    pub gates: &'a GateSet,
    pub circuit: &'a CircuitAssignment,
    pub a_qubits: &'a [usize],
    pub data_qubits: &'a [usize],
    pub operators: &'a [Operator],
    pub roles: &'a Roles,
    pub faults: FaultModel,
}

/// A fault set that breaks fault tolerance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub faults: Vec<FaultLocation>,
    pub propagated: PauliVec,
    pub min_weight: usize,
    pub flagged: bool,
}

/// Calls `f` on every set of at most `v` faults at pairwise distinct
/// locations, in lexicographic order of fault indices.
pub fn for_each_fault_set<B>(
    faults: &[FaultLocation],
    v: usize,
    mut f: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    let keys: Vec<_> = faults.iter().map(location_key).collect();
    let mut idx = Vec::new();
    for size in 1..=v.min(faults.len()) {
        idx.clear();
        idx.extend(0..size);
        loop {
            let distinct = {
                let set: BTreeSet<_> = idx.iter().map(|&i| keys[i]).collect();
                set.len() == size
            };
            if distinct {
                if let ControlFlow::Break(b) = f(&idx) {
                    return Some(b);
                }
            }
            if !next_combination(&mut idx, faults.len()) {
                break;
            }
        }
    }
    None
}

/// Every set of at most `v` faults at distinct locations.
pub fn enumerate_fault_sets(faults: &[FaultLocation], v: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_fault_set::<()>(faults, v, |s| {
        out.push(s.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Minimum weight on `data` of `e` times any product of the X operators
/// with the given supports.
pub fn min_data_weight(e: &PauliVec, supports: &[Vec<usize>], data: &[usize]) -> usize {
    let l = supports.len();
    (0u32..1 << l)
        .map(|mask| {
            data.iter()
                .filter(|&&d| {
                    let flip = (0..l).filter(|&j| mask >> j & 1 == 1 && supports[j].contains(&d)).count() % 2 == 1;
                    (e.x(d) ^ flip) || e.z(d)
                })
                .count()
        })
        .min()
        .unwrap_or(0)
}

/// Whether some flag qubit reports a nontrivial outcome.
pub fn is_flagged(e: &PauliVec, roles: &Roles) -> bool {
    roles.flags.iter().any(|&f| {
        let b = roles.basis(f).unwrap_or(crate::faults::Basis::Z);
        (e.x(f) && b.measured_in_z()) ^ (e.z(f) && b.measured_in_x())
    })
}

fn combined(faults: &[&FaultLocation], parts: &[BitMatrix], n: usize) -> Result<PauliVec, CircuitError> {
    let mut e = PauliVec::identity(n);
    for f in faults {
        e.mul_assign(&propagate(&f.e, &parts[f.k])?);
    }
    Ok(e)
}

/// Whether the X components of `e` on `data`, multiplied by every product of
/// the operators with the given supports, always contain an aligned pair.
pub fn always_aligned(e: &PauliVec, supports: &[Vec<usize>], pairs: &[(usize, usize)]) -> bool {
    let l = supports.len();
    (0u32..1 << l).all(|mask| {
        let bit = |q: usize| {
            let flip = (0..l).filter(|&j| mask >> j & 1 == 1 && supports[j].contains(&q)).count() % 2 == 1;
            e.x(q) ^ flip
        };
        pairs.iter().any(|&(a, b)| bit(a) && bit(b))
    })
}

/// Up to `limit` sets of at most `v` faults that break fault tolerance in
/// the sense of `predicate`, in enumeration order.
pub fn find_violations(
    input: &FlagCheckInput<'_>,
    predicate: &NotFtPredicate,
    v: usize,
    limit: usize,
) -> Result<Vec<Counterexample>, CircuitError> {
    let n = input.gates.n();
    let parts = partial_matrices(input.circuit, input.gates)?;
    let faults = concrete_faults(input.circuit, input.gates, input.a_qubits, input.operators, &input.faults);
    let mut out = Vec::new();
    if limit == 0 {
        return Ok(out);
    }
    let stopped = for_each_fault_set(&faults, v, |idx| {
        let set: Vec<&FaultLocation> = idx.iter().map(|&i| &faults[i]).collect();
        let e = match combined(&set, &parts, n) {
            Ok(e) => e,
            Err(err) => return ControlFlow::Break(Some(err)),
        };
        let stabs: BTreeSet<usize> = set.iter().map(|f| f.stab).collect();
        let supports: Vec<Vec<usize>> = stabs.iter().map(|&s| input.operators[s].support.clone()).collect();
        let w = min_data_weight(&e, &supports, input.data_qubits);
        let flagged = is_flagged(&e, input.roles);
        let bad = match predicate {
            NotFtPredicate::VFlag => w > set.len() && !flagged,
            NotFtPredicate::Parallel(pairs) => always_aligned(&e, &supports, pairs),
        };
        if bad {
            out.push(Counterexample { faults: set.into_iter().cloned().collect(), propagated: e, min_weight: w, flagged });
            if out.len() >= limit {
                return ControlFlow::Break(None);
            }
        }
        ControlFlow::Continue(())
    });
    match stopped {
        Some(Some(err)) => Err(err),
        _ => Ok(out),
    }
}

/// Searches for a set of at most `v` faults whose propagated error has
/// minimum data weight above the number of faults without any flag firing.
/// Returns `Ok(None)` when the circuit is v-flag.
pub fn check_v_flag(input: &FlagCheckInput<'_>, v: usize) -> Result<Option<Counterexample>, CircuitError> {
    Ok(find_violations(input, &NotFtPredicate::VFlag, v, 1)?.pop())
}

/// A syndrome-extraction circuit for a CSS code together with the data
/// pairs aligned with each logical operator.
#[derive(Clone, Debug)]
pub struct ScheduleCheckInput<'a> {
    pub gates: &'a GateSet,
    pub circuit: &'a CircuitAssignment,
    pub a_qubits: &'a [usize],
    pub data_qubits: &'a [usize],
    /// Measured stabilizers with their Pauli type.
    pub operators: &'a [(Operator, PauliType)],
    /// Pairs of data qubits on a common minimum-weight X logical.
    pub x_pairs: &'a [(usize, usize)],
    /// Pairs of data qubits on a common minimum-weight Z logical.
    pub z_pairs: &'a [(usize, usize)],
}

/// A single fault whose propagated error is aligned with a logical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleViolation {
    pub fault: FaultLocation,
    pub propagated: PauliVec,
    pub component: PauliType,
}

fn aligned(bits: &dyn Fn(usize) -> bool, pairs: &[(usize, usize)]) -> bool {
    pairs.iter().any(|&(a, b)| bits(a) && bits(b))
}

/// Checks every single gate fault (all Paulis on the gate's support). A
/// fault violates the schedule when every representative of its propagated
/// X (Z) component, up to the stabilizer being measured, contains an
/// aligned pair.
pub fn check_schedule_ft(input: &ScheduleCheckInput<'_>) -> Result<Option<ScheduleViolation>, CircuitError> {
    let ops: Vec<Operator> = input.operators.iter().map(|(o, _)| o.clone()).collect();
    let model = FaultModel { prep: false, meas: false, ..FaultModel::default() };
    let parts = partial_matrices(input.circuit, input.gates)?;
    let faults = concrete_faults(input.circuit, input.gates, input.a_qubits, &ops, &model);
    for f in faults {
        let e = propagate(&f.e, &parts[f.k])?;
        let (op, ty) = &input.operators[f.stab];
        for (component, pairs) in [(PauliType::X, input.x_pairs), (PauliType::Z, input.z_pairs)] {
            let get = |q: usize| if component == PauliType::X { e.x(q) } else { e.z(q) };
            let plain = aligned(&get, pairs);
            let bad = if *ty == component {
                let flipped = |q: usize| get(q) ^ op.support.contains(&q);
                plain && aligned(&flipped, pairs)
            } else {
                plain
            };
            if bad {
                return Ok(Some(ScheduleViolation { fault: f.clone(), propagated: e, component }));
            }
        }
    }
    Ok(None)
}
