//! JSON file formats. Qubits, stabilizers and timesteps are 1-based in
//! files and 0-based in the library.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ftsynth_core::circuit::{build_gate_set, CircuitAssignment, GateSet, GateSetOptions, InteractionGraph};
use ftsynth_core::constraints::{BasisMode, ColumnSpec, Effect, NotFtPredicate, ProblemSpec, RoleMode};
use ftsynth_core::f2::GateKind;
use ftsynth_core::faults::{Basis, FaultKind, FaultModel, Operator, PauliFilter, Roles};
use ftsynth_core::oracle::Counterexample;
use ftsynth_core::CircuitError;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::synth::Solution;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

/// Reads and parses a JSON file.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Read { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json { path: path.into(), source })
}

fn zero_based(q: usize, n: usize) -> Result<usize, FormatError> {
    if q == 0 || q > n {
        return Err(invalid(format!("qubit {q} out of range 1..={n}")));
    }
    Ok(q - 1)
}

fn zero_based_all(qs: &[usize], n: usize) -> Result<Vec<usize>, FormatError> {
    qs.iter().map(|&q| zero_based(q, n)).collect()
}

/// Interaction graph: vertex count, edges and the A-qubits. Every other
/// vertex is a data qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub a_qubits: Vec<usize>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<InteractionGraph, FormatError> {
        let edges = self
            .edges
            .iter()
            .map(|&[u, v]| Ok((zero_based(u, self.n)?, zero_based(v, self.n)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(InteractionGraph::new(self.n, &edges, &zero_based_all(&self.a_qubits, self.n)?)?)
    }

    pub fn from_graph(g: &InteractionGraph) -> Self {
        GraphFile {
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect(),
            a_qubits: g.a_qubits().iter().map(|q| q + 1).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub name: String,
    pub candidates: Vec<usize>,
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliFilterFile {
    All,
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FaultsFile {
    pub gates: bool,
    pub prep: bool,
    pub meas: bool,
    pub idle: bool,
    pub paulis: PauliFilterFile,
}

impl Default for FaultsFile {
    fn default() -> Self {
        FaultsFile { gates: true, prep: true, meas: true, idle: false, paulis: PauliFilterFile::All }
    }
}

impl FaultsFile {
    fn to_model(&self) -> FaultModel {
        FaultModel {
            gates: self.gates,
            prep: self.prep,
            meas: self.meas,
            idle: self.idle,
            paulis: match self.paulis {
                PauliFilterFile::All => PauliFilter::All,
                PauliFilterFile::X => PauliFilter::XOnly,
                PauliFilterFile::Z => PauliFilter::ZOnly,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisFile {
    #[default]
    Tied,
    Free,
}

/// Roles as written in circuit and spec files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RolesFile {
    #[serde(default)]
    pub flags: Vec<usize>,
    #[serde(default)]
    pub roots: Vec<usize>,
    /// Basis per qubit label; missing entries follow the tied convention.
    #[serde(default)]
    pub bases: BTreeMap<String, String>,
}

impl RolesFile {
    pub fn from_roles(r: &Roles) -> Self {
        RolesFile {
            flags: r.flags.iter().map(|q| q + 1).collect(),
            roots: r.roots.iter().map(|q| q + 1).collect(),
            bases: r
                .bases
                .iter()
                .map(|&(q, b)| {
                    let name = match b {
                        Basis::X => "X",
                        Basis::Y => "Y",
                        Basis::Z => "Z",
                    };
                    ((q + 1).to_string(), name.to_string())
                })
                .collect(),
        }
    }

    pub fn to_roles(&self, n: usize, a_qubits: &[usize]) -> Result<Roles, FormatError> {
        let mut roles = Roles::with_tied_bases(zero_based_all(&self.roots, n)?, zero_based_all(&self.flags, n)?, a_qubits);
        for (q, b) in &self.bases {
            let q: usize = q.parse().map_err(|_| invalid(format!("bad qubit label {q:?} in bases")))?;
            let q = zero_based(q, n)?;
            let b = match b.as_str() {
                "X" => Basis::X,
                "Y" => Basis::Y,
                "Z" => Basis::Z,
                _ => return Err(invalid(format!("bad basis {b:?}"))),
            };
            match roles.bases.iter_mut().find(|(p, _)| *p == q) {
                Some(entry) => entry.1 = b,
                None => roles.bases.push((q, b)),
            }
        }
        roles.bases.sort_unstable();
        Ok(roles)
    }
}

/// One synthesis problem. `effect` is `"operators"`, `"free"` or
/// `{"columns": [...]}` where each column is `"*"` or a list of 0, 1 and
/// `"*"` entries, one per qubit. `roles` is `"symbolic"` or a [`RolesFile`].
/// `predicate` is `"vflag"` or `{"parallel": [[a, b], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: String,
    pub steps: usize,
    #[serde(default)]
    pub operators: Vec<OperatorFile>,
    #[serde(default = "default_effect")]
    pub effect: Value,
    #[serde(default = "default_roles")]
    pub roles: Value,
    #[serde(default)]
    pub basis: BasisFile,
    #[serde(default)]
    pub faults: FaultsFile,
    #[serde(default = "default_predicate")]
    pub predicate: Value,
    #[serde(default)]
    pub exclude_cross_group: bool,
    #[serde(default = "default_true")]
    pub use_aux: bool,
}

fn default_effect() -> Value {
    Value::String("operators".into())
}

fn default_roles() -> Value {
    Value::String("symbolic".into())
}

fn default_predicate() -> Value {
    Value::String("vflag".into())
}

fn default_true() -> bool {
    true
}

fn default_v() -> usize {
    1
}

/// A synthesis specification: one interaction graph shared by one or
/// more problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub graph: GraphFile,
    /// Single-qubit gates available on every qubit, by name.
    #[serde(default)]
    pub single_qubit_gates: Vec<String>,
    /// Joint bound on partners per qubit across all problems.
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default = "default_v")]
    pub v: usize,
    pub problems: Vec<ProblemFile>,
}

fn parse_column(c: &Value, n: usize) -> Result<ColumnSpec, FormatError> {
    if c.as_str() == Some("*") {
        return Ok(ColumnSpec::Wildcard);
    }
    let entries = c.as_array().ok_or_else(|| invalid(format!("bad column {c}")))?;
    if entries.len() != n {
        return Err(invalid(format!("column has {} entries, expected {n}", entries.len())));
    }
    let cells = entries
        .iter()
        .map(|e| match (e.as_u64(), e.as_str()) {
            (Some(0), _) => Ok(Some(false)),
            (Some(1), _) => Ok(Some(true)),
            (_, Some("*")) => Ok(None),
            _ => Err(invalid(format!("bad column entry {e}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(if cells.iter().all(Option::is_some) {
        ColumnSpec::Exact(cells.into_iter().map(|b| b.unwrap_or(false)).collect())
    } else {
        ColumnSpec::Partial(cells)
    })
}

fn parse_effect(v: &Value, n: usize) -> Result<Effect, FormatError> {
    match v {
        Value::String(s) if s == "operators" => Ok(Effect::Operators),
        Value::String(s) if s == "free" => Ok(Effect::Free),
        Value::Object(m) => {
            let cols = m.get("columns").and_then(Value::as_array).ok_or_else(|| invalid("effect needs \"columns\""))?;
            Ok(Effect::Columns(cols.iter().map(|c| parse_column(c, n)).collect::<Result<_, _>>()?))
        }
        _ => Err(invalid(format!("bad effect {v}"))),
    }
}

fn parse_pairs(v: &Value, n: usize) -> Result<Vec<(usize, usize)>, FormatError> {
    let pairs: Vec<[usize; 2]> =
        serde_json::from_value(v.clone()).map_err(|e| invalid(format!("bad pair list: {e}")))?;
    pairs.iter().map(|&[a, b]| Ok((zero_based(a, n)?, zero_based(b, n)?))).collect()
}

fn parse_predicate(v: &Value, n: usize) -> Result<NotFtPredicate, FormatError> {
    match v {
        Value::String(s) if s == "vflag" => Ok(NotFtPredicate::VFlag),
        Value::Object(m) => match m.get("parallel") {
            Some(p) => Ok(NotFtPredicate::Parallel(parse_pairs(p, n)?)),
            None => Err(invalid("predicate object needs \"parallel\"")),
        },
        _ => Err(invalid(format!("bad predicate {v}"))),
    }
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        read_json(path)
    }

    pub fn gate_set(&self) -> Result<GateSet, FormatError> {
        let g = self.graph.to_graph()?;
        let single_qubit = self
            .single_qubit_gates
            .iter()
            .map(|s| GateKind::parse(s).map_err(|_| invalid(format!("unknown gate {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(build_gate_set(&g, &GateSetOptions { single_qubit })?)
    }

    /// Library problem specs, in file order.
    pub fn problems(&self) -> Result<Vec<ProblemSpec>, FormatError> {
        if self.problems.is_empty() {
            return Err(invalid("spec has no problems"));
        }
        let n = self.graph.n;
        let gates = self.gate_set()?;
        let a_qubits = zero_based_all(&self.graph.a_qubits, n)?;
        let data_qubits: Vec<usize> = (0..n).filter(|q| !a_qubits.contains(q)).collect();
        self.problems
            .iter()
            .map(|p| {
                let operators = p
                    .operators
                    .iter()
                    .map(|o| {
                        Ok(Operator {
                            name: o.name.clone(),
                            candidates: zero_based_all(&o.candidates, n)?,
                            support: zero_based_all(&o.support, n)?,
                        })
                    })
                    .collect::<Result<Vec<_>, FormatError>>()?;
                let roles = match &p.roles {
                    Value::String(s) if s == "symbolic" => RoleMode::Symbolic,
                    v => {
                        let r: RolesFile =
                            serde_json::from_value(v.clone()).map_err(|e| invalid(format!("bad roles: {e}")))?;
                        RoleMode::Fixed(r.to_roles(n, &a_qubits)?)
                    }
                };
                Ok(ProblemSpec {
                    name: p.name.clone(),
                    gates: gates.clone(),
                    steps: p.steps,
                    a_qubits: a_qubits.clone(),
                    data_qubits: data_qubits.clone(),
                    operators,
                    roles,
                    basis: match p.basis {
                        BasisFile::Tied => BasisMode::Tied,
                        BasisFile::Free => BasisMode::Free,
                    },
                    effect: parse_effect(&p.effect, n)?,
                    faults: p.faults.to_model(),
                    predicate: parse_predicate(&p.predicate, n)?,
                    exclude_cross_group: p.exclude_cross_group,
                    use_aux: p.use_aux,
                })
            })
            .collect()
    }
}

/// One gate in a timestep: `control`/`target` for CNOT, `qubit` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateEntry {
    pub gate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitFile {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub steps: usize,
    pub timesteps: Vec<Vec<GateEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<RolesFile>,
}

impl CircuitFile {
    pub fn from_assignment(name: &str, gates: &GateSet, c: &CircuitAssignment, roles: Option<&Roles>) -> Self {
        let timesteps = c
            .schedule()
            .into_iter()
            .map(|step| {
                step.into_iter()
                    .map(|gi| {
                        let g = gates.gate(gi);
                        match g.kind {
                            GateKind::Cnot => GateEntry {
                                gate: g.kind.name().into(),
                                control: Some(g.qubits[0] + 1),
                                target: Some(g.qubits[1] + 1),
                                qubit: None,
                            },
                            _ => GateEntry {
                                gate: g.kind.name().into(),
                                control: None,
                                target: None,
                                qubit: Some(g.qubits[0] + 1),
                            },
                        }
                    })
                    .collect()
            })
            .collect();
        CircuitFile {
            name: name.into(),
            n: gates.n(),
            steps: c.steps(),
            timesteps,
            roles: roles.map(RolesFile::from_roles),
        }
    }

    pub fn from_solution(spec: &ProblemSpec, sol: &Solution) -> Self {
        Self::from_assignment(&sol.name, &spec.gates, &sol.circuit, Some(&sol.roles))
    }

    /// Gate-time assignment over `gates`; every gate must be in the set.
    pub fn to_assignment(&self, gates: &GateSet) -> Result<CircuitAssignment, FormatError> {
        if self.n != gates.n() {
            return Err(invalid(format!("circuit has n = {}, gate set has n = {}", self.n, gates.n())));
        }
        if self.timesteps.len() > self.steps {
            return Err(invalid(format!("{} timesteps listed, N = {}", self.timesteps.len(), self.steps)));
        }
        let mut schedule = Vec::with_capacity(self.steps);
        for step in &self.timesteps {
            let mut ids = Vec::with_capacity(step.len());
            for e in step {
                let kind = GateKind::parse(&e.gate).map_err(|_| invalid(format!("unknown gate {:?}", e.gate)))?;
                let qubits = match (kind, e.control, e.target, e.qubit) {
                    (GateKind::Cnot, Some(c), Some(t), None) => vec![zero_based(c, self.n)?, zero_based(t, self.n)?],
                    (GateKind::Cnot, ..) => return Err(invalid("CNOT needs control and target")),
                    (_, None, None, Some(q)) => vec![zero_based(q, self.n)?],
                    _ => return Err(invalid(format!("{} needs exactly one qubit", e.gate))),
                };
                let id = gates
                    .find(kind, &qubits)
                    .ok_or_else(|| invalid(format!("{} on {:?} is not allowed by the interaction graph", e.gate, qubits.iter().map(|q| q + 1).collect::<Vec<_>>())))?;
                ids.push(id);
            }
            schedule.push(ids);
        }
        schedule.resize(self.steps, Vec::new());
        Ok(CircuitAssignment::from_schedule(gates.len(), &schedule)?)
    }

    pub fn roles_for(&self, a_qubits: &[usize]) -> Result<Option<Roles>, FormatError> {
        self.roles.as_ref().map(|r| r.to_roles(self.n, a_qubits)).transpose()
    }
}

/// A list of circuits, as written by `synth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CircuitsFile {
    Many { circuits: Vec<CircuitFile> },
    One(CircuitFile),
}

impl CircuitsFile {
    pub fn into_vec(self) -> Vec<CircuitFile> {
        match self {
            CircuitsFile::Many { circuits } => circuits,
            CircuitsFile::One(c) => vec![c],
        }
    }
}

/// Decoder input: either syndromes (1-based indices of nontrivial X and Z
/// stabilizers) or errors (1-based qubits), from which syndromes follow.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeInput {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(default)]
    pub x_syndrome: Vec<usize>,
    #[serde(default)]
    pub z_syndrome: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_error: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_error: Option<Vec<usize>>,
}

/// Decoder output: 1-based qubits of the Z and X corrections and, when
/// errors were given, whether the residual is a logical operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutput {
    #[serde(rename = "L")]
    pub l: usize,
    pub z_correction: Vec<usize>,
    pub x_correction: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_logical_failure: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_logical_failure: Option<bool>,
}

/// Indicator vector of 1-based indices.
pub fn indicator(indices: &[usize], len: usize) -> Result<Vec<bool>, FormatError> {
    let mut v = vec![false; len];
    for &i in indices {
        let i = zero_based(i, len)?;
        v[i] ^= true;
    }
    Ok(v)
}

/// 1-based indices of the set entries.
pub fn indices(v: &[bool]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect()
}

/// One fault of a counterexample. `after_step` is 0 for preparation and
/// counts timesteps from 1; `pauli` lists one letter per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEntry {
    pub kind: String,
    pub after_step: usize,
    pub pauli: String,
    pub operator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleFile {
    pub faults: Vec<FaultEntry>,
    pub propagated: String,
    pub min_weight: usize,
    pub flagged: bool,
}

impl CounterexampleFile {
    pub fn new(c: &Counterexample, operators: &[Operator]) -> Self {
        let faults = c
            .faults
            .iter()
            .map(|f| FaultEntry {
                kind: match f.kind {
                    FaultKind::Prep => "prep",
                    FaultKind::Gate => "gate",
                    FaultKind::Idle => "idle",
                    FaultKind::Meas => "meas",
                }
                .into(),
                after_step: f.k,
                pauli: format!("{:?}", f.e),
                operator: operators.get(f.stab).map(|o| o.name.clone()).unwrap_or_default(),
                gate: f.gate.map(|g| g + 1),
            })
            .collect();
        CounterexampleFile { faults, propagated: format!("{:?}", c.propagated), min_weight: c.min_weight, flagged: c.flagged }
    }
}
