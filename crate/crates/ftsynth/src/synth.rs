//! Iterative solve, check and refine loop: the solver proposes circuits
//! without fault-tolerance constraints, the exhaustive oracle looks for
//! violating fault sets, and each violation becomes a clause.

use std::time::{Duration, Instant};

use ftsynth_core::circuit::CircuitAssignment;
use ftsynth_core::constraints::{joint_degree_constraint, ProblemSpec, RoleMode, SynthesisProblem};
use ftsynth_core::faults::Roles;
use ftsynth_core::formula::{Evaluator, FormulaStore, Node, VarId, F};
use ftsynth_core::oracle::{find_violations, Counterexample, FlagCheckInput};
use ftsynth_core::{CircuitError, ConstraintError};
use serde::Serialize;
use thiserror::Error;

use crate::smt::{SmtError, SolverConfig, SolverResult, Session, Status};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("counterexample clause for problem {problem} is satisfied by the model it refutes")]
    ClauseNotViolated { problem: String },
    #[error("returned circuit for problem {0} fails the oracle")]
    NotFaultTolerant(String),
    #[error("no problems given")]
    Empty,
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    /// Number of faults the circuits must tolerate.
    pub v: usize,
    pub max_iters: usize,
    /// Wall-clock budget for the whole run.
    pub timeout: Option<Duration>,
    /// Joint bound on the number of partners of every qubit.
    pub degree: Option<usize>,
    /// Counterexamples added per problem and iteration.
    pub cex_batch: usize,
    /// Keep one solver session; otherwise restart it every iteration.
    pub incremental: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { v: 1, max_iters: 500, timeout: None, degree: None, cex_batch: 1, incremental: true }
    }
}

/// A concrete circuit with its roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub name: String,
    pub circuit: CircuitAssignment,
    pub roles: Roles,
}

/// One line of the run log.
#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub status: Status,
    pub solver_ms: u128,
    pub oracle_ms: u128,
    pub clauses_added: usize,
    /// Per problem: size of the first counterexample, if any.
    pub counterexample_sizes: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Found(Vec<Solution>),
    Unsat,
    /// Iteration or time budget used up; carries the last candidate and a
    /// counterexample against it.
    Exhausted { last: Option<Vec<Solution>>, pending: Vec<(String, Counterexample)> },
    Unknown,
}

#[derive(Clone, Debug)]
pub struct SynthReport {
    pub outcome: Outcome,
    pub iterations: Vec<IterationRecord>,
}

struct Run {
    store: FormulaStore,
    problems: Vec<SynthesisProblem>,
    base: Vec<F>,
}

impl Run {
    fn new(specs: &[ProblemSpec], degree: Option<usize>) -> Result<Self, SynthError> {
        if specs.is_empty() {
            return Err(SynthError::Empty);
        }
        let mut store = FormulaStore::new();
        let problems = specs
            .iter()
            .map(|s| SynthesisProblem::new(s.clone(), &mut store))
            .collect::<Result<Vec<_>, _>>()?;
        let mut base = Vec::new();
        for p in &problems {
            base.extend(p.base_constraints(&mut store));
        }
        if let Some(d) = degree {
            let refs: Vec<&SynthesisProblem> = problems.iter().collect();
            base.push(joint_degree_constraint(&refs, d, &mut store));
        }
        Ok(Run { store, problems, base })
    }

    fn decode(&self, res: &SolverResult) -> Vec<Solution> {
        let assign = |v: VarId| res.value(v);
        let mut ev = Evaluator::new(&self.store, &assign);
        self.problems
            .iter()
            .map(|p| Solution {
                name: p.spec().name.clone(),
                circuit: p.decode_assignment(&mut ev),
                roles: p.decode_roles(&mut ev),
            })
            .collect()
    }
}

/// Oracle input for a problem and a concrete solution.
pub fn check_input<'a>(spec: &'a ProblemSpec, sol: &'a Solution) -> FlagCheckInput<'a> {
    FlagCheckInput {
        gates: &spec.gates,
        circuit: &sol.circuit,
        a_qubits: &spec.a_qubits,
        data_qubits: &spec.data_qubits,
        operators: &spec.operators,
        roles: &sol.roles,
        faults: spec.faults,
    }
}

/// Whether a concrete solution satisfies the base constraints of its
/// problem: gate exclusion, the desired effect and, for fixed roles, the
/// role assignment. Gates the problem rules out make the check fail.
pub fn check_effect(spec: &ProblemSpec, sol: &Solution) -> Result<bool, SynthError> {
    let fixed = ProblemSpec { roles: RoleMode::Fixed(sol.roles.clone()), use_aux: false, ..spec.clone() };
    let mut store = FormulaStore::new();
    let p = SynthesisProblem::new(fixed, &mut store)?;
    if sol.circuit.w() != spec.gates.len() || sol.circuit.steps() != spec.steps {
        return Ok(false);
    }
    if spec.operators.iter().any(|op| op.candidates.iter().filter(|&&c| sol.roles.is_root(c)).count() != 1) {
        return Ok(false);
    }
    let mut value = vec![false; store.num_vars()];
    for g in 0..spec.gates.len() {
        for j in 0..spec.steps {
            let used = sol.circuit.get(g, j);
            match store.node(p.x(g, j)) {
                Node::Var(v) => value[v.index()] = used,
                _ if used => return Ok(false),
                _ => {}
            }
        }
    }
    let base = p.base_constraints(&mut store);
    let assign = |v: VarId| value.get(v.index()).copied().unwrap_or(false);
    let mut ev = Evaluator::new(&store, &assign);
    Ok(base.iter().all(|&f| ev.eval_bool(f)))
}

/// Up to `limit` violating fault sets of a concrete solution.
pub fn violations(spec: &ProblemSpec, sol: &Solution, v: usize, limit: usize) -> Result<Vec<Counterexample>, CircuitError> {
    find_violations(&check_input(spec, sol), &spec.predicate, v, limit)
}

fn remaining(start: Instant, budget: Option<Duration>) -> Option<Duration> {
    budget.map(|b| b.saturating_sub(start.elapsed()))
}

/// Runs the iterative loop on one or more problems sharing a solver
/// session. Returned circuits always pass the oracle.
pub fn synthesize(specs: &[ProblemSpec], cfg: &SynthConfig, solver: &SolverConfig) -> Result<SynthReport, SynthError> {
    let start = Instant::now();
    let mut run = Run::new(specs, cfg.degree)?;
    let mut clauses: Vec<F> = Vec::new();
    let mut session: Option<Session> = None;
    let mut iterations = Vec::new();
    let mut last = None;
    let mut pending = Vec::new();
    for iteration in 1..=cfg.max_iters {
        if remaining(start, cfg.timeout) == Some(Duration::ZERO) {
            break;
        }
        if session.is_none() || !cfg.incremental {
            let mut s = Session::start(solver)?;
            for &f in run.base.iter().chain(&clauses) {
                s.assert(&run.store, f)?;
            }
            session = Some(s);
        }
        let s = session.as_mut().expect("session started");
        let res = s.check(&run.store, remaining(start, cfg.timeout))?;
        let mut record = IterationRecord {
            iteration,
            status: res.status,
            solver_ms: res.elapsed.as_millis(),
            oracle_ms: 0,
            clauses_added: 0,
            counterexample_sizes: Vec::new(),
        };
        match res.status {
            Status::Sat => {}
            Status::Unsat => {
                iterations.push(record);
                return Ok(SynthReport { outcome: Outcome::Unsat, iterations });
            }
            Status::Timeout => {
                iterations.push(record);
                break;
            }
            Status::Unknown => {
                iterations.push(record);
                return Ok(SynthReport { outcome: Outcome::Unknown, iterations });
            }
        }
        let sols = run.decode(&res);
        let oracle_start = Instant::now();
        let mut found = Vec::new();
        for (p, sol) in run.problems.iter().zip(&sols) {
            found.push(violations(p.spec(), sol, cfg.v, cfg.cex_batch.max(1))?);
        }
        record.oracle_ms = oracle_start.elapsed().as_millis();
        record.counterexample_sizes = found.iter().map(|c| c.first().map(|x| x.faults.len())).collect();
        if found.iter().all(Vec::is_empty) {
            iterations.push(record);
            return Ok(SynthReport { outcome: Outcome::Found(sols), iterations });
        }
        let mut new = Vec::new();
        pending.clear();
        for (pi, cexs) in found.into_iter().enumerate() {
            let p = &run.problems[pi];
            for cex in cexs {
                let clause = p.vflag_clause(&cex.faults, &mut run.store)?;
                new.push((pi, clause));
                pending.push((p.spec().name.clone(), cex));
            }
        }
        {
            let assign = |v: VarId| res.value(v);
            let mut ev = Evaluator::new(&run.store, &assign);
            for &(pi, c) in &new {
                if ev.eval_bool(c) {
                    return Err(SynthError::ClauseNotViolated { problem: run.problems[pi].spec().name.clone() });
                }
            }
        }
        for (_, c) in new {
            clauses.push(c);
            if cfg.incremental {
                session.as_mut().expect("session started").assert(&run.store, c)?;
            }
            record.clauses_added += 1;
        }
        iterations.push(record);
        last = Some(sols);
    }
    Ok(SynthReport { outcome: Outcome::Exhausted { last, pending }, iterations })
}

/// Result of checking that no circuit with one timestep fewer exists.
#[derive(Clone, Debug)]
pub enum Minimality {
    /// A solution at `steps` exists and none at `steps - 1`.
    Minimal { steps: usize, witness: Solution },
    /// A solution with fewer timesteps exists.
    NotMinimal { steps: usize, shorter: Solution },
    /// No solution at `steps` at all.
    NoSolution { steps: usize },
    /// The solver gave up; nothing is claimed.
    Inconclusive { steps: usize, status: Status },
}

fn with_steps(spec: &ProblemSpec, steps: usize) -> ProblemSpec {
    ProblemSpec { steps, ..spec.clone() }
}

/// Decides the fault-tolerance constrained problem with every fault set
/// clause asserted up front, so that unsat is a proof.
pub fn solve_full(
    spec: &ProblemSpec,
    v: usize,
    degree: Option<usize>,
    solver: &SolverConfig,
    timeout: Option<Duration>,
) -> Result<(Status, Option<Solution>), SynthError> {
    let mut run = Run::new(std::slice::from_ref(spec), degree)?;
    let full = run.problems[0].is_vflag(v, &mut run.store)?;
    run.base.push(full);
    let mut s = Session::start(solver)?;
    for &f in &run.base {
        s.assert(&run.store, f)?;
    }
    let res = s.check(&run.store, timeout)?;
    if res.status != Status::Sat {
        return Ok((res.status, None));
    }
    let sol = run.decode(&res).remove(0);
    if !violations(spec, &sol, v, 1)?.is_empty() {
        return Err(SynthError::NotFaultTolerant(sol.name));
    }
    Ok((Status::Sat, Some(sol)))
}

/// Synthesizes at `spec.steps` with the iterative loop, then proves that
/// `spec.steps - 1` timesteps are impossible.
pub fn prove_min_timesteps(spec: &ProblemSpec, cfg: &SynthConfig, solver: &SolverConfig) -> Result<Minimality, SynthError> {
    let steps = spec.steps;
    let report = synthesize(std::slice::from_ref(spec), cfg, solver)?;
    let witness = match report.outcome {
        Outcome::Found(mut s) => s.remove(0),
        Outcome::Unsat => return Ok(Minimality::NoSolution { steps }),
        Outcome::Unknown => return Ok(Minimality::Inconclusive { steps, status: Status::Unknown }),
        Outcome::Exhausted { .. } => return Ok(Minimality::Inconclusive { steps, status: Status::Timeout }),
    };
    if steps == 0 {
        return Ok(Minimality::Minimal { steps, witness });
    }
    let shorter = with_steps(spec, steps - 1);
    match solve_full(&shorter, cfg.v, cfg.degree, solver, cfg.timeout)? {
        (Status::Unsat, _) => Ok(Minimality::Minimal { steps, witness }),
        (Status::Sat, Some(sol)) => Ok(Minimality::NotMinimal { steps: steps - 1, shorter: sol }),
        (status, _) => Ok(Minimality::Inconclusive { steps, status }),
    }
}
