//! Symbolic synthesis problems: gate-time variables, role and basis
//! variables, symbolic circuit matrices and the constraint formulas built
//! from them.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{CircuitAssignment, GateSet};
use crate::error::ConstraintError;
use crate::f2::{GateKind, PauliVec};
use crate::faults::{gate_owner, paulis_on, qubit_owners, Basis, FaultKind, FaultLocation, FaultModel, Operator, Roles};
use crate::formula::{Evaluator, FormulaStore, Node, SymbolicBitMatrix, F};

/// Target of one column of the X block of the circuit matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnSpec {
    Exact(Vec<bool>),
    Partial(Vec<Option<bool>>),
    Wildcard,
}

/// The desired effect of the circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    /// Fixed targets for the columns of the X block.
    Columns(Vec<ColumnSpec>),
    /// Root columns derived from the measured operators and the roles; data
    /// columns are unit vectors.
    Operators,
    /// No effect constraint.
    Free,
}

/// How ancilla roles are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoleMode {
    Symbolic,
    Fixed(Roles),
}

/// How measurement bases are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisMode {
    /// Flags in Z, roots and ancillas in X.
    Tied,
    /// Free basis variables per A-qubit.
    Free,
}

/// When a propagated error counts as a fault-tolerance violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotFtPredicate {
    /// More than t data errors after minimizing over the measured operators,
    /// without any flag firing.
    VFlag,
    /// Every representative (after multiplying by the measured operators)
    /// has X errors on both qubits of one of the listed data pairs.
    Parallel(Vec<(usize, usize)>),
}

/// Everything needed to build a synthesis problem.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    /// Prefix for variable names; empty for none.
    pub name: String,
    pub gates: GateSet,
    pub steps: usize,
    pub a_qubits: Vec<usize>,
    pub data_qubits: Vec<usize>,
    pub operators: Vec<Operator>,
    pub roles: RoleMode,
    pub basis: BasisMode,
    pub effect: Effect,
    pub faults: FaultModel,
    pub predicate: NotFtPredicate,
    /// Forbid gates between A-qubits owned by different operators.
    pub exclude_cross_group: bool,
    /// Introduce auxiliary variables after every timestep product.
    pub use_aux: bool,
}

/// Symbolic Pauli error: X and Z components per qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPauli {
    pub x: Vec<F>,
    pub z: Vec<F>,
}

#[derive(Clone, Debug)]
enum SymClifford {
    Css { x: SymbolicBitMatrix, z: SymbolicBitMatrix },
    Full(SymbolicBitMatrix),
}

/// A synthesis problem whose formulas live in an external [`FormulaStore`],
/// so several problems can share one solver session.
#[derive(Clone, Debug)]
pub struct SynthesisProblem {
    spec: ProblemSpec,
    x: Vec<Vec<F>>,
    is_root: Vec<F>,
    is_flag: Vec<F>,
    meas_x: Vec<F>,
    meas_z: Vec<F>,
    owners: Vec<Option<usize>>,
    gate_owners: Vec<Option<usize>>,
    partial: Vec<SymClifford>,
}

fn prefixed(name: &str, var: &str) -> String {
    if name.is_empty() {
        String::from(var)
    } else {
        format!("{name}.{var}")
    }
}

impl SynthesisProblem {
    pub fn new(spec: ProblemSpec, store: &mut FormulaStore) -> Result<Self, ConstraintError> {
        let n = spec.gates.n();
        let w = spec.gates.len();
        let steps = spec.steps;
        for (s, op) in spec.operators.iter().enumerate() {
            if op.candidates.is_empty() {
                return Err(ConstraintError::EmptyCandidates(s));
            }
        }
        if let Effect::Columns(cols) = &spec.effect {
            if cols.len() != n {
                return Err(ConstraintError::SpecDimension { expected: n, found: cols.len() });
            }
        }
        let owners = qubit_owners(n, &spec.operators);
        let gate_owners: Vec<Option<usize>> = (0..w).map(|g| gate_owner(&spec.gates, g, &owners)).collect();
        let zero = store.constant(false);
        let x: Vec<Vec<F>> = (0..w)
            .map(|g| {
                let gate = spec.gates.gate(g);
                let cross = spec.exclude_cross_group && {
                    let os: BTreeSet<usize> = gate.qubits.iter().filter_map(|&q| owners[q]).collect();
                    os.len() > 1
                };
                (0..steps)
                    .map(|j| if cross { zero } else { store.var(&prefixed(&spec.name, &format!("x_{}_{}", g + 1, j + 1))) })
                    .collect()
            })
            .collect();
        let mut is_root = vec![zero; n];
        let mut is_flag = vec![zero; n];
        match &spec.roles {
            RoleMode::Symbolic => {
                for &a in &spec.a_qubits {
                    is_root[a] = store.var(&prefixed(&spec.name, &format!("root_{}", a + 1)));
                    is_flag[a] = store.var(&prefixed(&spec.name, &format!("flag_{}", a + 1)));
                }
            }
            RoleMode::Fixed(r) => {
                for &a in &spec.a_qubits {
                    is_root[a] = store.constant(r.is_root(a));
                    is_flag[a] = store.constant(r.is_flag(a));
                }
            }
        }
        let mut meas_x = vec![zero; n];
        let mut meas_z = vec![zero; n];
        for &a in &spec.a_qubits {
            match spec.basis {
                BasisMode::Tied => {
                    meas_x[a] = store.not(is_flag[a]);
                    meas_z[a] = is_flag[a];
                }
                BasisMode::Free => {
                    if let RoleMode::Fixed(r) = &spec.roles {
                        let b = r.basis(a).unwrap_or(Basis::X);
                        meas_x[a] = store.constant(b.measured_in_x());
                        meas_z[a] = store.constant(b.measured_in_z());
                    } else {
                        meas_x[a] = store.var(&prefixed(&spec.name, &format!("mx_{}", a + 1)));
                        meas_z[a] = store.var(&prefixed(&spec.name, &format!("mz_{}", a + 1)));
                    }
                }
            }
        }
        let partial = build_partials(&spec, &x, store);
        Ok(SynthesisProblem { spec, x, is_root, is_flag, meas_x, meas_z, owners, gate_owners, partial })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.gates.n()
    }

    pub fn steps(&self) -> usize {
        self.spec.steps
    }

    /// Gate-time variable of gate `g` (0-based) at timestep `j` (0-based).
    pub fn x(&self, g: usize, j: usize) -> F {
        self.x[g][j]
    }

    pub fn is_root(&self, q: usize) -> F {
        self.is_root[q]
    }

    pub fn is_flag(&self, q: usize) -> F {
        self.is_flag[q]
    }

    pub fn owner(&self, q: usize) -> Option<usize> {
        self.owners[q]
    }

    /// Entry `(r, c)` of the X block of `C^(k)`.
    pub fn x_block_entry(&self, k: usize, r: usize, c: usize) -> F {
        match &self.partial[k] {
            SymClifford::Css { x, .. } => x.get(r, c),
            SymClifford::Full(m) => m.get(r, c),
        }
    }

    /// No qubit takes part in two gates in the same timestep.
    pub fn gate_exclusion(&self, store: &mut FormulaStore) -> F {
        let n = self.n();
        let mut clauses = Vec::new();
        for j in 0..self.steps() {
            for q in 0..n {
                let on: Vec<F> = self
                    .spec
                    .gates
                    .gates_on(q)
                    .into_iter()
                    .map(|g| self.x[g][j])
                    .filter(|&f| store.as_const(f) != Some(false))
                    .collect();
                for a in 0..on.len() {
                    for b in a + 1..on.len() {
                        let both = store.and2(on[a], on[b]);
                        clauses.push(store.not(both));
                    }
                }
            }
        }
        store.fast_and(&clauses)
    }

    /// Whether the edge `{q, r}` carries a gate at any timestep.
    pub fn edge_used(&self, q: usize, r: usize, store: &mut FormulaStore) -> F {
        let mut lits = Vec::new();
        for (g, gate) in self.spec.gates.gates().iter().enumerate() {
            if gate.qubits.len() == 2 && gate.qubits.contains(&q) && gate.qubits.contains(&r) {
                lits.extend_from_slice(&self.x[g]);
            }
        }
        store.fast_or(&lits)
    }

    /// Every qubit interacts with at most `d` distinct partners.
    pub fn degree_constraint(&self, d: usize, store: &mut FormulaStore) -> F {
        joint_degree_constraint(&[self], d, store)
    }

    /// Exactly one root per operator among its candidates, and no qubit is
    /// both root and flag.
    pub fn is_valid_role_assignment(&self, store: &mut FormulaStore) -> F {
        let mut cs = Vec::new();
        for op in &self.spec.operators {
            let roots: Vec<F> = op.candidates.iter().map(|&a| self.is_root[a]).collect();
            cs.push(store.exactly(&roots, 1));
        }
        for &a in &self.spec.a_qubits {
            let both = store.and2(self.is_root[a], self.is_flag[a]);
            cs.push(store.not(both));
        }
        store.fast_and(&cs)
    }

    /// Every A-qubit is measured in at least one basis.
    pub fn basis_consistency(&self, store: &mut FormulaStore) -> F {
        let cs: Vec<F> = self.spec.a_qubits.iter().map(|&a| store.or2(self.meas_x[a], self.meas_z[a])).collect();
        store.fast_and(&cs)
    }

    /// The X block of the circuit matrix matches the desired effect.
    pub fn has_desired_effect(&self, store: &mut FormulaStore) -> F {
        let n = self.n();
        let mut cs = Vec::new();
        match &self.spec.effect {
            Effect::Free => {}
            Effect::Columns(cols) => {
                for (c, spec) in cols.iter().enumerate() {
                    let target: Vec<Option<bool>> = match spec {
                        ColumnSpec::Exact(v) => v.iter().map(|&b| Some(b)).collect(),
                        ColumnSpec::Partial(v) => v.clone(),
                        ColumnSpec::Wildcard => continue,
                    };
                    for (r, t) in target.into_iter().enumerate() {
                        if let Some(b) = t {
                            let e = self.x_block_entry(0, r, c);
                            cs.push(if b { e } else { store.not(e) });
                        }
                    }
                }
            }
            Effect::Operators => {
                for &d in &self.spec.data_qubits {
                    for r in 0..n {
                        let e = self.x_block_entry(0, r, d);
                        cs.push(if r == d { e } else { store.not(e) });
                    }
                }
                for (s, op) in self.spec.operators.iter().enumerate() {
                    for &i in &op.candidates {
                        let mut eqs = Vec::new();
                        for r in 0..n {
                            let target = if self.owners[r] == Some(s) {
                                store.not(self.is_flag[r])
                            } else {
                                store.constant(op.support.contains(&r))
                            };
                            let e = self.x_block_entry(0, r, i);
                            let diff = store.xor2(e, target);
                            eqs.push(store.not(diff));
                        }
                        let body = store.fast_and(&eqs);
                        cs.push(store.implies(self.is_root[i], body));
                    }
                }
            }
        }
        store.fast_and(&cs)
    }

    /// Conjunction of the constraints every solution must satisfy, before
    /// any fault-tolerance clause.
    pub fn base_constraints(&self, store: &mut FormulaStore) -> Vec<F> {
        let mut out = vec![self.has_desired_effect(store), self.gate_exclusion(store)];
        if matches!(self.spec.roles, RoleMode::Symbolic) && !self.spec.operators.is_empty() {
            out.push(self.is_valid_role_assignment(store));
        }
        if self.spec.basis == BasisMode::Free {
            out.push(self.basis_consistency(store));
        }
        out.retain(|&f| store.as_const(f) != Some(true));
        out
    }

    /// Symbolic image of a constant error inserted after timestep `k`.
    pub fn propagate(&self, k: usize, e: &PauliVec, store: &mut FormulaStore) -> Result<SymPauli, ConstraintError> {
        if k > self.steps() {
            return Err(ConstraintError::Timestep { k, n: self.steps() });
        }
        let n = self.n();
        let ex: Vec<bool> = (0..n).map(|q| e.x(q)).collect();
        let ez: Vec<bool> = (0..n).map(|q| e.z(q)).collect();
        Ok(match &self.partial[k] {
            SymClifford::Css { x, z } => SymPauli { x: x.mul_const_vec(&ex, store), z: z.mul_const_vec(&ez, store) },
            SymClifford::Full(m) => {
                let mut v = ex;
                v.extend(ez);
                let mut full = m.mul_const_vec(&v, store);
                let z = full.split_off(n);
                SymPauli { x: full, z }
            }
        })
    }

    /// Symbolic image of the combined error of a fault set.
    pub fn fault_propagation(&self, faults: &[FaultLocation], store: &mut FormulaStore) -> Result<SymPauli, ConstraintError> {
        let n = self.n();
        let mut xs: Vec<Vec<F>> = vec![Vec::new(); n];
        let mut zs: Vec<Vec<F>> = vec![Vec::new(); n];
        for f in faults {
            let p = self.propagate(f.k, &f.e, store)?;
            for q in 0..n {
                xs[q].push(p.x[q]);
                zs[q].push(p.z[q]);
            }
        }
        Ok(SymPauli {
            x: xs.iter().map(|t| store.fast_xor(t)).collect(),
            z: zs.iter().map(|t| store.fast_xor(t)).collect(),
        })
    }

    /// Whether a single fault location is realized by the circuit.
    pub fn is_valid_fault(&self, f: &FaultLocation, store: &mut FormulaStore) -> Result<F, ConstraintError> {
        let steps = self.steps();
        match f.kind {
            FaultKind::Prep | FaultKind::Meas => Ok(store.constant(true)),
            FaultKind::Gate | FaultKind::Idle if f.k == 0 || f.k > steps => {
                Err(ConstraintError::Timestep { k: f.k, n: steps })
            }
            FaultKind::Gate => {
                let supp = f.e.support();
                let mut lits = Vec::new();
                for (g, gate) in self.spec.gates.gates().iter().enumerate() {
                    if self.gate_owners[g] == Some(f.stab) && supp.iter().all(|q| gate.qubits.contains(q)) {
                        lits.push(self.x[g][f.k - 1]);
                    }
                }
                Ok(store.fast_or(&lits))
            }
            FaultKind::Idle => {
                let mut lits = Vec::new();
                for q in f.e.support() {
                    for g in self.spec.gates.gates_on(q) {
                        lits.push(self.x[g][f.k - 1]);
                    }
                }
                let busy = store.fast_or(&lits);
                Ok(store.not(busy))
            }
        }
    }

    pub fn is_valid_fault_set(&self, faults: &[FaultLocation], store: &mut FormulaStore) -> Result<F, ConstraintError> {
        let mut lits = Vec::new();
        for f in faults {
            lits.push(self.is_valid_fault(f, store)?);
        }
        Ok(store.fast_and(&lits))
    }

    fn stab_supports(&self, faults: &[FaultLocation]) -> Vec<Vec<usize>> {
        let stabs: BTreeSet<usize> = faults.iter().map(|f| f.stab).collect();
        stabs.into_iter().map(|s| self.spec.operators[s].support.clone()).collect()
    }

    /// Data X components of every representative `e' * prod S_j^{x_j}`.
    fn representatives(&self, e: &SymPauli, stabs: &[Vec<usize>], store: &mut FormulaStore) -> Vec<Vec<F>> {
        let l = stabs.len();
        (0u32..1 << l)
            .map(|mask| {
                self.spec
                    .data_qubits
                    .iter()
                    .map(|&d| {
                        let flip = (0..l).filter(|&j| mask >> j & 1 == 1 && stabs[j].contains(&d)).count() % 2 == 1;
                        if flip {
                            store.not(e.x[d])
                        } else {
                            e.x[d]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Integer formula for the minimum data weight of `e'` over all products
    /// of the operators in `stabs`, as an if-then-else minimum chain.
    pub fn min_wt_formula(&self, e: &SymPauli, stabs: &[Vec<usize>], store: &mut FormulaStore) -> F {
        let reps = self.representatives(e, stabs, store);
        let mut best: Option<F> = None;
        for xs in reps {
            let bits: Vec<F> = self
                .spec
                .data_qubits
                .iter()
                .zip(&xs)
                .map(|(&d, &xb)| store.or2(xb, e.z[d]))
                .collect();
            let wt = store.count(&bits);
            best = Some(match best {
                None => wt,
                Some(m) => {
                    let c = store.le(wt, m);
                    store.ite(c, wt, m)
                }
            });
        }
        best.unwrap_or_else(|| store.int_const(0))
    }

    /// Per-qubit nontrivial outcome formulas and the overall flag formula.
    pub fn flag_outcome_formulas(&self, e: &SymPauli, store: &mut FormulaStore) -> (Vec<F>, F) {
        let mut outcomes = Vec::new();
        let mut flagged = Vec::new();
        for &a in &self.spec.a_qubits {
            let zx = store.and2(e.x[a], self.meas_z[a]);
            let xz = store.and2(e.z[a], self.meas_x[a]);
            let o = store.xor2(zx, xz);
            outcomes.push(o);
            flagged.push(store.and2(self.is_flag[a], o));
        }
        (outcomes, store.fast_or(&flagged))
    }

    /// Formula that is true when the fault set breaks fault tolerance in the
    /// sense of the problem's predicate.
    pub fn is_not_ft(&self, faults: &[FaultLocation], store: &mut FormulaStore) -> Result<F, ConstraintError> {
        let e = self.fault_propagation(faults, store)?;
        let valid = self.is_valid_fault_set(faults, store)?;
        let stabs = self.stab_supports(faults);
        let bad = match &self.spec.predicate {
            NotFtPredicate::VFlag => {
                let m = self.min_wt_formula(&e, &stabs, store);
                let t = store.int_const(faults.len() as i64);
                let small = store.le(m, t);
                let large = store.not(small);
                let (_, flagged) = self.flag_outcome_formulas(&e, store);
                let unflagged = store.not(flagged);
                store.fast_and(&[large, unflagged])
            }
            NotFtPredicate::Parallel(pairs) => {
                let reps = self.representatives(&e, &stabs, store);
                let mut all = Vec::new();
                for xs in reps {
                    let val = |q: usize| self.spec.data_qubits.iter().position(|&d| d == q).map(|i| xs[i]);
                    let mut any = Vec::new();
                    for &(p, q) in pairs {
                        if let (Some(a), Some(b)) = (val(p), val(q)) {
                            any.push(store.and2(a, b));
                        }
                    }
                    all.push(store.fast_or(&any));
                }
                store.fast_and(&all)
            }
        };
        Ok(store.and2(bad, valid))
    }

    /// Clause excluding every circuit on which this fault set breaks fault
    /// tolerance.
    pub fn vflag_clause(&self, faults: &[FaultLocation], store: &mut FormulaStore) -> Result<F, ConstraintError> {
        let bad = self.is_not_ft(faults, store)?;
        Ok(store.not(bad))
    }

    /// Every fault location the model allows in some circuit, deduplicated
    /// and in a fixed order.
    pub fn fault_candidates(&self) -> Vec<FaultLocation> {
        let n = self.n();
        let model = &self.spec.faults;
        let mut set = BTreeSet::new();
        let mut push = |kind, k, e, stab| {
            set.insert(FaultLocation { kind, k, e, stab, gate: None });
        };
        for &a in &self.spec.a_qubits {
            let Some(s) = self.owners[a] else { continue };
            if model.prep {
                for e in paulis_on(n, &[a], model.paulis) {
                    push(FaultKind::Prep, 0, e, s);
                }
            }
            if model.meas {
                for e in paulis_on(n, &[a], model.paulis) {
                    push(FaultKind::Meas, self.steps(), e, s);
                }
            }
            if model.idle {
                for k in 1..=self.steps() {
                    for e in paulis_on(n, &[a], model.paulis) {
                        push(FaultKind::Idle, k, e, s);
                    }
                }
            }
        }
        if model.gates {
            for (g, gate) in self.spec.gates.gates().iter().enumerate() {
                let Some(s) = self.gate_owners[g] else { continue };
                if self.x[g].iter().all(|&f| f == F::FALSE) {
                    continue;
                }
                for k in 1..=self.steps() {
                    for e in paulis_on(n, &gate.qubits, model.paulis) {
                        push(FaultKind::Gate, k, e, s);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    /// The full fault-tolerance formula: no set of at most `v` faults
    /// breaks fault tolerance.
    pub fn is_vflag(&self, v: usize, store: &mut FormulaStore) -> Result<F, ConstraintError> {
        let cands = self.fault_candidates();
        let mut clauses = Vec::new();
        let mut idx: Vec<usize> = Vec::new();
        for size in 1..=v {
            idx.clear();
            idx.extend(0..size);
            if size > cands.len() {
                break;
            }
            loop {
                let set: Vec<FaultLocation> = idx.iter().map(|&i| cands[i].clone()).collect();
                clauses.push(self.vflag_clause(&set, store)?);
                if !next_combination(&mut idx, cands.len()) {
                    break;
                }
            }
        }
        Ok(store.fast_and(&clauses))
    }

    /// Concrete circuit from an evaluator over the gate-time variables.
    pub fn decode_assignment(&self, ev: &mut Evaluator<'_>) -> CircuitAssignment {
        let x: Vec<Vec<bool>> = self.x.iter().map(|row| row.iter().map(|&f| ev.eval_bool(f)).collect()).collect();
        CircuitAssignment::from_array(x, self.steps()).expect("shape matches problem")
    }

    /// Concrete roles from an evaluator over the role and basis variables.
    pub fn decode_roles(&self, ev: &mut Evaluator<'_>) -> Roles {
        let mut roles = Roles::default();
        for &a in &self.spec.a_qubits {
            if ev.eval_bool(self.is_root[a]) {
                roles.roots.push(a);
            }
            if ev.eval_bool(self.is_flag[a]) {
                roles.flags.push(a);
            }
            let b = Basis::from_flags(ev.eval_bool(self.meas_x[a]), ev.eval_bool(self.meas_z[a])).unwrap_or(Basis::X);
            roles.bases.push((a, b));
        }
        roles
    }

    /// Every free Boolean variable of this problem.
    pub fn variables(&self, store: &FormulaStore) -> Vec<F> {
        let mut out: Vec<F> = self.x.iter().flatten().copied().collect();
        out.extend(self.spec.a_qubits.iter().flat_map(|&a| [self.is_root[a], self.is_flag[a], self.meas_x[a], self.meas_z[a]]));
        let mut seen = BTreeSet::new();
        out.retain(|&f| matches!(store.node(f), Node::Var(_)) && seen.insert(f));
        out
    }
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic
/// order; returns false after the last one.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Degree bound shared by several problems over the same qubits: an edge
/// counts once if any of the problems uses it.
pub fn joint_degree_constraint(problems: &[&SynthesisProblem], d: usize, store: &mut FormulaStore) -> F {
    let Some(first) = problems.first() else { return store.constant(true) };
    let n = first.n();
    let mut partners: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for p in problems {
        for gate in p.spec.gates.gates() {
            if gate.qubits.len() == 2 {
                partners[gate.qubits[0]].insert(gate.qubits[1]);
                partners[gate.qubits[1]].insert(gate.qubits[0]);
            }
        }
    }
    let mut cs = Vec::new();
    for q in 0..n {
        let used: Vec<F> = partners[q]
            .iter()
            .map(|&r| {
                let per: Vec<F> = problems.iter().map(|p| p.edge_used(q, r, store)).collect();
                store.fast_or(&per)
            })
            .collect();
        cs.push(store.at_most(&used, d as i64));
    }
    store.fast_and(&cs)
}

fn build_partials(spec: &ProblemSpec, x: &[Vec<F>], store: &mut FormulaStore) -> Vec<SymClifford> {
    let n = spec.gates.n();
    let css = spec.gates.gates().iter().all(|g| matches!(g.kind, GateKind::Cnot | GateKind::I));
    let layer = |j: usize, store: &mut FormulaStore| -> SymClifford {
        let dim = if css { n } else { 2 * n };
        let mut terms_x: Vec<Vec<F>> = vec![Vec::new(); dim * dim];
        let mut terms_z: Vec<Vec<F>> = vec![Vec::new(); if css { n * n } else { 0 }];
        for (g, gate) in spec.gates.gates().iter().enumerate() {
            let v = x[g][j];
            if store.as_const(v) == Some(false) {
                continue;
            }
            for r in 0..2 * n {
                for c in 0..2 * n {
                    if !gate.delta.get(r, c) {
                        continue;
                    }
                    if !css {
                        terms_x[r * dim + c].push(v);
                    } else if r < n && c < n {
                        terms_x[r * n + c].push(v);
                    } else if r >= n && c >= n {
                        terms_z[(r - n) * n + (c - n)].push(v);
                    }
                }
            }
        }
        let build = |terms: &mut Vec<Vec<F>>, d: usize, store: &mut FormulaStore| {
            SymbolicBitMatrix::from_fn(d, d, |r, c| {
                let t = &mut terms[r * d + c];
                if r == c {
                    t.push(store.constant(true));
                }
                store.fast_xor(t)
            })
        };
        if css {
            SymClifford::Css { x: build(&mut terms_x, n, store), z: build(&mut terms_z, n, store) }
        } else {
            SymClifford::Full(build(&mut terms_x, dim, store))
        }
    };
    let steps = spec.steps;
    let mut out: Vec<SymClifford> = Vec::with_capacity(steps + 1);
    let last = if css {
        SymClifford::Css { x: SymbolicBitMatrix::identity(store, n), z: SymbolicBitMatrix::identity(store, n) }
    } else {
        SymClifford::Full(SymbolicBitMatrix::identity(store, 2 * n))
    };
    out.push(last);
    for j in (0..steps).rev() {
        let t = layer(j, store);
        let next = out.last().expect("nonempty");
        let prod = match (next, &t) {
            (SymClifford::Css { x: cx, z: cz }, SymClifford::Css { x: tx, z: tz }) => SymClifford::Css {
                x: cx.mul(tx, store, spec.use_aux).expect("square"),
                z: cz.mul(tz, store, spec.use_aux).expect("square"),
            },
            (SymClifford::Full(c), SymClifford::Full(tm)) => SymClifford::Full(c.mul(tm, store, spec.use_aux).expect("square")),
            _ => unreachable!("mode fixed per problem"),
        };
        out.push(prod);
    }
    out.reverse();
    out
}
