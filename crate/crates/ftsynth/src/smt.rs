//! SMT-LIB 2 emission and an incremental driver for an external solver
//! process speaking the standard over stdin/stdout.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::time::{Duration, Instant};

use ftsynth_core::formula::{Evaluator, FormulaStore, Node, Sort, VarId, VarKind, F};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("solver executable not found: {0}")]
    NotFound(PathBuf),
    #[error("solver i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("unexpected solver output: {0}")]
    Protocol(String),
    #[error("solver reported an error: {0}")]
    Solver(String),
    #[error("solver exited early with status {0}")]
    Exited(String),
    #[error("model does not satisfy assertion {0}")]
    BadModel(usize),
}

/// Where to find the solver and how to call it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub args: Vec<String>,
}

impl SolverConfig {
    /// z3 in interactive SMT-LIB mode.
    pub fn z3(path: impl Into<PathBuf>) -> Self {
        SolverConfig { path: path.into(), args: vec!["-in".into(), "-smt2".into()] }
    }

    /// The solver named by `FTSYNTH_SOLVER`, else `z3` from `PATH`.
    pub fn from_env() -> Result<Self, SmtError> {
        let path = match std::env::var_os("FTSYNTH_SOLVER") {
            Some(p) => PathBuf::from(p),
            None => find_in_path("z3").ok_or_else(|| SmtError::NotFound(PathBuf::from("z3")))?,
        };
        if !path.exists() {
            return Err(SmtError::NotFound(path));
        }
        Ok(SolverConfig::z3(path))
    }

    pub fn name(&self) -> String {
        self.path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    }
}

fn find_in_path(exe: &str) -> Option<PathBuf> {
    let paths = std::env::var_os("PATH")?;
    std::env::split_paths(&paths).map(|d| d.join(exe)).find(|p| p.is_file())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
    Timeout,
}

/// Outcome of one `check-sat`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult {
    pub status: Status,
    /// Values of every declared user variable; empty unless sat.
    pub model: BTreeMap<VarId, bool>,
    pub elapsed: Duration,
    pub solver: String,
}

impl SolverResult {
    pub fn value(&self, v: VarId) -> bool {
        self.model.get(&v).copied().unwrap_or(false)
    }
}

/// Incremental SMT-LIB writer: remembers which nodes and variables have
/// been defined so later assertions only add what is new.
#[derive(Clone, Debug, Default)]
pub struct Emitter {
    defined: Vec<bool>,
    declared: Vec<VarId>,
}

fn symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{}|", name.replace('|', "_"))
    }
}

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Bool => "Bool",
        Sort::Int => "Int",
    }
}

impl Emitter {
    pub fn new() -> Self {
        Self::default()
    }

    /// User variables declared so far, in declaration order.
    pub fn declared_user_vars(&self, store: &FormulaStore) -> Vec<VarId> {
        self.declared.iter().copied().filter(|&v| *store.var_kind(v) == VarKind::User).collect()
    }

    fn term(&self, store: &FormulaStore, f: F) -> String {
        match store.node(f) {
            Node::Var(v) => symbol(store.var_name(*v)),
            Node::Const(b) => b.to_string(),
            Node::IntConst(c) if *c < 0 => format!("(- {})", -c),
            Node::IntConst(c) => c.to_string(),
            _ => format!("t{}", f.index()),
        }
    }

    fn body(&self, store: &FormulaStore, f: F) -> String {
        let t = |g: &F| self.term(store, *g);
        let nary = |op: &str, cs: &[F], empty: &str| match cs.len() {
            0 => empty.to_string(),
            1 => t(&cs[0]),
            _ => format!("({op} {})", cs.iter().map(t).collect::<Vec<_>>().join(" ")),
        };
        match store.node(f) {
            Node::And(cs) => nary("and", cs, "true"),
            Node::Or(cs) => nary("or", cs, "false"),
            Node::Xor(cs) => nary("xor", cs, "false"),
            Node::IntSum(cs) => nary("+", cs, "0"),
            Node::Not(a) => format!("(not {})", t(a)),
            Node::Ite(c, a, b) => format!("(ite {} {} {})", t(c), t(a), t(b)),
            Node::BoolToInt(a) => format!("(ite {} 1 0)", t(a)),
            Node::Le(a, b) => format!("(<= {} {})", t(a), t(b)),
            Node::Eq(a, b) => format!("(= {} {})", t(a), t(b)),
            Node::Var(_) | Node::Const(_) | Node::IntConst(_) => self.term(store, f),
        }
    }

    /// Appends the definitions `f` depends on and `(assert f)` to `out`.
    /// Auxiliary variables are declared and tied to their definitions.
    pub fn assert(&mut self, store: &FormulaStore, f: F, out: &mut String) {
        if self.defined.len() < store.len() {
            self.defined.resize(store.len(), false);
        }
        let mut aux = Vec::new();
        for g in store.reachable(&[f]) {
            if self.defined[g.index()] {
                continue;
            }
            self.defined[g.index()] = true;
            match store.node(g) {
                Node::Const(_) | Node::IntConst(_) => {}
                Node::Var(v) => {
                    let _ = writeln!(out, "(declare-const {} Bool)", symbol(store.var_name(*v)));
                    self.declared.push(*v);
                    if let VarKind::Aux(def) = store.var_kind(*v) {
                        aux.push((*v, *def));
                    }
                }
                _ => {
                    let _ = writeln!(
                        out,
                        "(define-fun t{} () {} {})",
                        g.index(),
                        sort_name(store.sort(g)),
                        self.body(store, g)
                    );
                }
            }
        }
        for (v, def) in aux {
            let _ = writeln!(out, "(assert (= {} {}))", symbol(store.var_name(v)), self.term(store, def));
        }
        let _ = writeln!(out, "(assert {})", self.term(store, f));
    }
}

/// Complete SMT-LIB script for a conjunction of assertions, ending with
/// `(check-sat)`. Output is deterministic.
pub fn emit(store: &FormulaStore, assertions: &[F]) -> String {
    let mut out = String::from("(set-logic QF_LIA)\n");
    let mut em = Emitter::new();
    for &a in assertions {
        em.assert(store, a, &mut out);
    }
    out.push_str("(check-sat)\n");
    out
}

/// A running solver process with incrementally added assertions.
pub struct Session {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    emitter: Emitter,
    assertions: Vec<F>,
    frames: Vec<(usize, Emitter)>,
    solver: String,
    transcript: Option<String>,
}

impl Session {
    pub fn start(cfg: &SolverConfig) -> Result<Self, SmtError> {
        let mut child = Command::new(&cfg.path)
            .args(&cfg.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
                    SmtError::NotFound(cfg.path.clone())
                }
                _ => SmtError::Io(e),
            })?;
        let stdin = child.stdin.take().ok_or_else(|| SmtError::Protocol("no stdin".into()))?;
        let stdout = BufReader::new(child.stdout.take().ok_or_else(|| SmtError::Protocol("no stdout".into()))?);
        let mut s = Session {
            child,
            stdin,
            stdout,
            emitter: Emitter::new(),
            assertions: Vec::new(),
            frames: Vec::new(),
            solver: cfg.name(),
            transcript: None,
        };
        s.send("(set-option :print-success false)\n(set-logic QF_LIA)\n")?;
        Ok(s)
    }

    /// Keeps a copy of everything sent to the solver.
    pub fn record(&mut self) {
        self.transcript.get_or_insert_with(String::new);
    }

    pub fn transcript(&self) -> Option<&str> {
        self.transcript.as_deref()
    }

    fn send(&mut self, text: &str) -> Result<(), SmtError> {
        if let Some(t) = &mut self.transcript {
            t.push_str(text);
        }
        self.stdin.write_all(text.as_bytes())?;
        self.stdin.flush()?;
        Ok(())
    }

    pub fn assert(&mut self, store: &FormulaStore, f: F) -> Result<(), SmtError> {
        let mut out = String::new();
        self.emitter.assert(store, f, &mut out);
        self.assertions.push(f);
        self.send(&out)
    }

    pub fn assertions(&self) -> &[F] {
        &self.assertions
    }

    pub fn push(&mut self) -> Result<(), SmtError> {
        self.frames.push((self.assertions.len(), self.emitter.clone()));
        self.send("(push 1)\n")
    }

    pub fn pop(&mut self) -> Result<(), SmtError> {
        let (len, em) = self.frames.pop().ok_or_else(|| SmtError::Protocol("pop without push".into()))?;
        self.assertions.truncate(len);
        self.emitter = em;
        self.send("(pop 1)\n")
    }

    fn read_line(&mut self) -> Result<String, SmtError> {
        let mut line = String::new();
        loop {
            line.clear();
            if self.stdout.read_line(&mut line)? == 0 {
                let status = self.child.try_wait()?.map(|s| s.to_string()).unwrap_or_else(|| "running".into());
                return Err(SmtError::Exited(status));
            }
            if !line.trim().is_empty() {
                return Ok(line.trim().to_string());
            }
        }
    }

    /// Reads one balanced s-expression, possibly spanning lines.
    fn read_sexpr(&mut self) -> Result<String, SmtError> {
        let mut text = String::new();
        let mut depth = 0i64;
        loop {
            let line = self.read_line()?;
            for c in line.chars() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
            }
            text.push_str(&line);
            text.push(' ');
            if depth <= 0 {
                return Ok(text);
            }
        }
    }

    /// Runs `check-sat` with an optional time limit. On sat, reads the
    /// values of all declared user variables and verifies that the model
    /// satisfies every assertion.
    pub fn check(&mut self, store: &FormulaStore, timeout: Option<Duration>) -> Result<SolverResult, SmtError> {
        let start = Instant::now();
        if let Some(t) = timeout {
            let ms = t.as_millis().clamp(1, u32::MAX as u128);
            self.send(&format!("(set-option :timeout {ms})\n"))?;
        }
        self.send("(check-sat)\n")?;
        let line = self.read_line()?;
        let status = match line.as_str() {
            "sat" => Status::Sat,
            "unsat" => Status::Unsat,
            "unknown" => {
                self.send("(get-info :reason-unknown)\n")?;
                let reason = self.read_sexpr()?;
                if reason.contains("timeout") || reason.contains("canceled") {
                    Status::Timeout
                } else {
                    Status::Unknown
                }
            }
            other if other.starts_with("(error") => return Err(SmtError::Solver(other.to_string())),
            other => return Err(SmtError::Protocol(other.to_string())),
        };
        let elapsed = start.elapsed();
        let mut model = BTreeMap::new();
        if status == Status::Sat {
            let vars = self.emitter.declared_user_vars(store);
            if !vars.is_empty() {
                let names: Vec<String> = vars.iter().map(|&v| symbol(store.var_name(v))).collect();
                self.send(&format!("(get-value ({}))\n", names.join(" ")))?;
                let reply = self.read_sexpr()?;
                if reply.starts_with("(error") {
                    return Err(SmtError::Solver(reply));
                }
                let values = parse_values(&reply)?;
                for (&v, name) in vars.iter().zip(&names) {
                    let b = values.get(name).copied().ok_or_else(|| SmtError::Protocol(format!("no value for {name}")))?;
                    model.insert(v, b);
                }
            }
            let assign = |v: VarId| model.get(&v).copied().unwrap_or(false);
            let mut ev = Evaluator::new(store, &assign);
            if let Some(i) = self.assertions.iter().position(|&a| !ev.eval_bool(a)) {
                return Err(SmtError::BadModel(i));
            }
        }
        Ok(SolverResult { status, model, elapsed, solver: self.solver.clone() })
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = self.stdin.write_all(b"(exit)\n");
        let _ = self.stdin.flush();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Parses a `get-value` reply `((a true) (b false) ...)` into a name map.
fn parse_values(reply: &str) -> Result<BTreeMap<String, bool>, SmtError> {
    let tokens = tokenize(reply);
    let mut out = BTreeMap::new();
    let mut i = 0;
    let bad = || SmtError::Protocol(reply.chars().take(200).collect());
    if tokens.first().map(String::as_str) != Some("(") {
        return Err(bad());
    }
    i += 1;
    while i < tokens.len() && tokens[i] != ")" {
        if tokens[i] != "(" || i + 3 >= tokens.len() || tokens[i + 3] != ")" {
            return Err(bad());
        }
        let value = match tokens[i + 2].as_str() {
            "true" => true,
            "false" => false,
            _ => return Err(bad()),
        };
        out.insert(tokens[i + 1].clone(), value);
        i += 4;
    }
    Ok(out)
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                out.push(c.to_string());
                chars.next();
            }
            '|' => {
                let mut tok = String::from("|");
                chars.next();
                for d in chars.by_ref() {
                    tok.push(d);
                    if d == '|' {
                        break;
                    }
                }
                out.push(tok);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut tok = String::new();
                while let Some(&d) = chars.peek() {
                    if d == '(' || d == ')' || d.is_whitespace() {
                        break;
                    }
                    tok.push(d);
                    chars.next();
                }
                out.push(tok);
            }
        }
    }
    out
}

/// One-shot solve of a conjunction of assertions.
pub fn solve(
    cfg: &SolverConfig,
    store: &FormulaStore,
    assertions: &[F],
    timeout: Option<Duration>,
) -> Result<SolverResult, SmtError> {
    let mut s = Session::start(cfg)?;
    for &a in assertions {
        s.assert(store, a)?;
    }
    s.check(store, timeout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse_across_quoted_symbols() {
        let v = parse_values("((x_1_1 true) (|a b| false) (p.x_2_1 true))").unwrap();
        assert_eq!(v["x_1_1"], true);
        assert_eq!(v["|a b|"], false);
        assert_eq!(v["p.x_2_1"], true);
        assert!(parse_values("(x true)").is_err());
    }

    #[test]
    fn symbols_are_quoted_only_when_needed() {
        assert_eq!(symbol("x_1_2"), "x_1_2");
        assert_eq!(symbol("aux!7"), "aux!7");
        assert_eq!(symbol("1x"), "|1x|");
        assert_eq!(symbol("a b"), "|a b|");
    }
}
