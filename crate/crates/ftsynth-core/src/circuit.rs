//! Interaction graphs, the gate sets they induce, and the gate-time encoding
//! of circuits as a `w x N` Boolean array.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CircuitError, F2Error};
use crate::f2::{product_sum_compose, BitMatrix, GateKind, GateSpec};

/// Qubit connectivity. Qubits in `a_qubits` may host ancillas, flags or
/// roots; the others are data qubits, which never interact directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    is_a: Vec<bool>,
}

impl InteractionGraph {
    /// Validates and normalizes the graph: edges are stored as `(min, max)`,
    /// sorted and deduplicated.
    pub fn new(n: usize, edges: &[(usize, usize)], a_qubits: &[usize]) -> Result<Self, CircuitError> {
        let mut is_a = vec![false; n];
        for &a in a_qubits {
            if a >= n {
                return Err(F2Error::QubitOutOfRange { qubit: a, n }.into());
            }
            is_a[a] = true;
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(CircuitError::BadEdge(u, v));
            }
            if !is_a[u] && !is_a[v] {
                return Err(CircuitError::DataDataEdge(u, v));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let g = InteractionGraph { n, edges: set.into_iter().collect(), is_a };
        if !g.is_connected() {
            return Err(CircuitError::Disconnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_a(&self, q: usize) -> bool {
        self.is_a[q]
    }

    pub fn a_qubits(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.is_a[q]).collect()
    }

    pub fn data_qubits(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| !self.is_a[q]).collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degree(&self, q: usize) -> usize {
        self.edges.iter().filter(|&&(u, v)| u == q || v == q).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|q| self.degree(q)).max().unwrap_or(0)
    }
}

/// Options for [`build_gate_set`].
#[derive(Clone, Debug, Default)]
pub struct GateSetOptions {
    /// Single-qubit gate kinds added on every qubit (off by default).
    pub single_qubit: Vec<GateKind>,
}

/// An ordered list of gates; the index of a gate is its identity in the
/// gate-time encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateSet {
    n: usize,
    gates: Vec<GateSpec>,
}

impl GateSet {
    /// Builds a gate set from explicit `(kind, qubits)` pairs, keeping the
    /// given order.
    pub fn from_gates(n: usize, gates: &[(GateKind, Vec<usize>)]) -> Result<Self, CircuitError> {
        let gates = gates
            .iter()
            .enumerate()
            .map(|(id, (k, qs))| GateSpec::new(id, *k, qs, n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GateSet { n, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn gate(&self, i: usize) -> &GateSpec {
        &self.gates[i]
    }

    /// Index of the gate with this kind and qubit list.
    pub fn find(&self, kind: GateKind, qubits: &[usize]) -> Option<usize> {
        self.gates.iter().position(|g| g.kind == kind && g.qubits == qubits)
    }

    /// Indices of gates touching qubit `q`.
    pub fn gates_on(&self, q: usize) -> Vec<usize> {
        (0..self.gates.len()).filter(|&i| self.gates[i].qubits.contains(&q)).collect()
    }
}

/// CNOTs along every edge: both directions between two A-qubits, and only
/// A-to-data otherwise. CNOTs come first ordered by `(control, target)`,
/// followed by optional single-qubit gates ordered by `(qubit, kind)`.
pub fn build_gate_set(g: &InteractionGraph, opts: &GateSetOptions) -> Result<GateSet, CircuitError> {
    let mut cnots = Vec::new();
    for &(u, v) in g.edges() {
        match (g.is_a(u), g.is_a(v)) {
            (true, true) => {
                cnots.push((u, v));
                cnots.push((v, u));
            }
            (true, false) => cnots.push((u, v)),
            (false, true) => cnots.push((v, u)),
            (false, false) => return Err(CircuitError::DataDataEdge(u, v)),
        }
    }
    cnots.sort_unstable();
    let mut list: Vec<(GateKind, Vec<usize>)> =
        cnots.into_iter().map(|(c, t)| (GateKind::Cnot, vec![c, t])).collect();
    let mut kinds = opts.single_qubit.clone();
    kinds.sort_unstable();
    kinds.dedup();
    for q in 0..g.n() {
        for &k in &kinds {
            list.push((k, vec![q]));
        }
    }
    GateSet::from_gates(g.n(), &list)
}

/// Gate-time encoding: `x[i][j]` is set when gate `i` fires at timestep `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircuitAssignment {
    w: usize,
    steps: usize,
    x: Vec<Vec<bool>>,
}

impl CircuitAssignment {
    pub fn empty(w: usize, steps: usize) -> Self {
        CircuitAssignment { w, steps, x: vec![vec![false; steps]; w] }
    }

    pub fn from_array(x: Vec<Vec<bool>>, steps: usize) -> Result<Self, CircuitError> {
        let w = x.len();
        if let Some(r) = x.iter().find(|r| r.len() != steps) {
            return Err(CircuitError::Shape { expected: (w, steps), found: (w, r.len()) });
        }
        Ok(CircuitAssignment { w, steps, x })
    }

    /// Builds the assignment from per-timestep gate index lists.
    pub fn from_schedule(w: usize, schedule: &[Vec<usize>]) -> Result<Self, CircuitError> {
        let mut c = CircuitAssignment::empty(w, schedule.len());
        for (j, step) in schedule.iter().enumerate() {
            for &i in step {
                if i >= w {
                    return Err(CircuitError::UnknownGate(i));
                }
                c.x[i][j] = true;
            }
        }
        Ok(c)
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn get(&self, gate: usize, step: usize) -> bool {
        self.x[gate][step]
    }

    pub fn set(&mut self, gate: usize, step: usize, b: bool) {
        self.x[gate][step] = b;
    }

    pub fn array(&self) -> &[Vec<bool>] {
        &self.x
    }

    /// Gate indices active at each timestep.
    pub fn schedule(&self) -> Vec<Vec<usize>> {
        (0..self.steps).map(|j| (0..self.w).filter(|&i| self.x[i][j]).collect()).collect()
    }

    /// Number of active (gate, timestep) pairs.
    pub fn active_count(&self) -> usize {
        self.x.iter().map(|r| r.iter().filter(|&&b| b).count()).sum()
    }

    fn check_shape(&self, gs: &GateSet) -> Result<(), CircuitError> {
        if self.w != gs.len() {
            return Err(CircuitError::Shape { expected: (gs.len(), self.steps), found: (self.w, self.steps) });
        }
        Ok(())
    }
}

/// True when no qubit is touched by two active gates in the same timestep.
pub fn is_valid_circuit(c: &CircuitAssignment, gs: &GateSet) -> bool {
    if c.check_shape(gs).is_err() {
        return false;
    }
    for step in c.schedule() {
        let mut used = vec![false; gs.n()];
        for i in step {
            for &q in gs.gate(i).support() {
                if used[q] {
                    return false;
                }
                used[q] = true;
            }
        }
    }
    true
}

/// Concrete circuit matrix via the product-sum rule.
pub fn circuit_to_bitmatrix(c: &CircuitAssignment, gs: &GateSet) -> Result<BitMatrix, CircuitError> {
    c.check_shape(gs)?;
    let steps: Vec<Vec<&GateSpec>> =
        c.schedule().into_iter().map(|s| s.into_iter().map(|i| gs.gate(i)).collect()).collect();
    Ok(product_sum_compose(&steps, gs.n())?)
}

/// Partial circuit matrices `C^(k)` for `k = 0..=N`: the product of
/// timesteps `k+1..N`, so `C^(N)` is the identity and `C^(0)` is the whole
/// circuit. An error appearing right after timestep `k` propagates to the
/// output as `C^(k) e`.
pub fn partial_matrices(c: &CircuitAssignment, gs: &GateSet) -> Result<Vec<BitMatrix>, CircuitError> {
    c.check_shape(gs)?;
    let dim = 2 * gs.n();
    let sched = c.schedule();
    let mut out = vec![BitMatrix::identity(dim); c.steps() + 1];
    for k in (0..c.steps()).rev() {
        let layer = product_sum_compose(&[sched[k].iter().map(|&i| gs.gate(i)).collect()], gs.n())?;
        out[k] = out[k + 1].mul(&layer)?;
    }
    Ok(out)
}
