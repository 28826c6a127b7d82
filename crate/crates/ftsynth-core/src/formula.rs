//! Hash-consed Boolean and linear-integer formulas, auxiliary variable
//! definitions, and matrices of formulas over F2.
//!
//! Formulas live in a [`FormulaStore`] and are referred to by copyable
//! handles ([`F`]). Structurally equal nodes share one handle. The
//! `fast_*` constructors fold constant arguments away so that products of
//! sparse symbolic matrices stay small.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// Handle of a formula node inside a [`FormulaStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F(u32);

impl F {
    pub const FALSE: F = F(0);
    pub const TRUE: F = F(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Identifier of a Boolean variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Sort of a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Int,
}

/// A formula node. Children are handles into the same store.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Var(VarId),
    Const(bool),
    And(Vec<F>),
    Or(Vec<F>),
    Xor(Vec<F>),
    Not(F),
    Ite(F, F, F),
    IntConst(i64),
    BoolToInt(F),
    IntSum(Vec<F>),
    Le(F, F),
    Eq(F, F),
}

/// Whether a variable is a free user variable or an auxiliary variable with
/// a recorded definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    User,
    Aux(F),
}

#[derive(Clone, Debug)]
struct VarInfo {
    name: String,
    kind: VarKind,
}

/// Arena of hash-consed formula nodes plus the variable table.
#[derive(Clone, Debug)]
pub struct FormulaStore {
    nodes: Vec<Node>,
    sorts: Vec<Sort>,
    index: BTreeMap<Node, F>,
    vars: Vec<VarInfo>,
    var_nodes: Vec<F>,
    by_name: BTreeMap<String, VarId>,
    size_memo: Vec<Option<u64>>,
}

impl Default for FormulaStore {
    fn default() -> Self {
        Self::new()
    }
}

impl FormulaStore {
    pub fn new() -> Self {
        let mut s = FormulaStore {
            nodes: Vec::new(),
            sorts: Vec::new(),
            index: BTreeMap::new(),
            vars: Vec::new(),
            var_nodes: Vec::new(),
            by_name: BTreeMap::new(),
            size_memo: Vec::new(),
        };
        s.intern(Node::Const(false));
        s.intern(Node::Const(true));
        s
    }

    fn intern(&mut self, node: Node) -> F {
        if let Some(&f) = self.index.get(&node) {
            return f;
        }
        let sort = match &node {
            Node::IntConst(_) | Node::BoolToInt(_) | Node::IntSum(_) => Sort::Int,
            Node::Ite(_, a, _) => self.sorts[a.index()],
            _ => Sort::Bool,
        };
        let f = F(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.sorts.push(sort);
        self.size_memo.push(None);
        self.index.insert(node, f);
        f
    }

    pub fn node(&self, f: F) -> &Node {
        &self.nodes[f.index()]
    }

    pub fn sort(&self, f: F) -> Sort {
        self.sorts[f.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    pub fn var_kind(&self, v: VarId) -> &VarKind {
        &self.vars[v.index()].kind
    }

    pub fn var_node(&self, v: VarId) -> F {
        self.var_nodes[v.index()]
    }

    pub fn lookup_var(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// All user (non-auxiliary) variables in creation order.
    pub fn user_vars(&self) -> Vec<VarId> {
        (0..self.vars.len() as u32)
            .map(VarId)
            .filter(|v| self.vars[v.index()].kind == VarKind::User)
            .collect()
    }

    /// Auxiliary variables with their definitions, in creation order.
    pub fn aux_definitions(&self) -> Vec<(VarId, F)> {
        self.vars
            .iter()
            .enumerate()
            .filter_map(|(i, info)| match info.kind {
                VarKind::Aux(def) => Some((VarId(i as u32), def)),
                VarKind::User => None,
            })
            .collect()
    }

    fn push_var(&mut self, name: String, kind: VarKind) -> F {
        let id = VarId(self.vars.len() as u32);
        self.by_name.insert(name.clone(), id);
        self.vars.push(VarInfo { name, kind });
        let f = self.intern(Node::Var(id));
        self.var_nodes.push(f);
        f
    }

    /// The user variable with this name, created on first use.
    pub fn var(&mut self, name: &str) -> F {
        if let Some(&v) = self.by_name.get(name) {
            return self.var_nodes[v.index()];
        }
        self.push_var(name.to_string(), VarKind::User)
    }

    /// A fresh auxiliary variable standing for `def`. Auxiliary names use a
    /// reserved prefix so they never collide with user variables.
    pub fn fresh_aux(&mut self, def: F) -> F {
        debug_assert_eq!(self.sort(def), Sort::Bool);
        let name = alloc::format!("aux!{}", self.vars.len());
        self.push_var(name, VarKind::Aux(def))
    }

    pub fn constant(&self, b: bool) -> F {
        F(b as u32)
    }

    pub fn as_const(&self, f: F) -> Option<bool> {
        match self.nodes[f.index()] {
            Node::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_int_const(&self, f: F) -> Option<i64> {
        match self.nodes[f.index()] {
            Node::IntConst(c) => Some(c),
            _ => None,
        }
    }

    /// Conjunction with constants folded and duplicates removed.
    pub fn fast_and(&mut self, args: &[F]) -> F {
        let mut rest = Vec::with_capacity(args.len());
        for &a in args {
            match self.as_const(a) {
                Some(false) => return self.constant(false),
                Some(true) => {}
                None => rest.push(a),
            }
        }
        rest.sort_unstable();
        rest.dedup();
        match rest.len() {
            0 => self.constant(true),
            1 => rest[0],
            _ => self.intern(Node::And(rest)),
        }
    }

    /// Disjunction with constants folded and duplicates removed.
    pub fn fast_or(&mut self, args: &[F]) -> F {
        let mut rest = Vec::with_capacity(args.len());
        for &a in args {
            match self.as_const(a) {
                Some(true) => return self.constant(true),
                Some(false) => {}
                None => rest.push(a),
            }
        }
        rest.sort_unstable();
        rest.dedup();
        match rest.len() {
            0 => self.constant(false),
            1 => rest[0],
            _ => self.intern(Node::Or(rest)),
        }
    }

    /// Exclusive or with constants folded into a final negation and equal
    /// arguments cancelled in pairs.
    pub fn fast_xor(&mut self, args: &[F]) -> F {
        let mut parity = false;
        let mut rest = Vec::with_capacity(args.len());
        for &a in args {
            match self.as_const(a) {
                Some(b) => parity ^= b,
                None => rest.push(a),
            }
        }
        rest.sort_unstable();
        let mut kept: Vec<F> = Vec::with_capacity(rest.len());
        for a in rest {
            if kept.last() == Some(&a) {
                kept.pop();
            } else {
                kept.push(a);
            }
        }
        let body = match kept.len() {
            0 => self.constant(false),
            1 => kept[0],
            _ => self.intern(Node::Xor(kept)),
        };
        if parity {
            self.not(body)
        } else {
            body
        }
    }

    pub fn and2(&mut self, a: F, b: F) -> F {
        self.fast_and(&[a, b])
    }

    pub fn or2(&mut self, a: F, b: F) -> F {
        self.fast_or(&[a, b])
    }

    pub fn xor2(&mut self, a: F, b: F) -> F {
        self.fast_xor(&[a, b])
    }

    pub fn not(&mut self, a: F) -> F {
        match self.nodes[a.index()] {
            Node::Const(b) => self.constant(!b),
            Node::Not(inner) => inner,
            _ => self.intern(Node::Not(a)),
        }
    }

    pub fn implies(&mut self, a: F, b: F) -> F {
        let na = self.not(a);
        self.fast_or(&[na, b])
    }

    /// If-then-else; the branches must share a sort.
    pub fn ite(&mut self, c: F, a: F, b: F) -> F {
        debug_assert_eq!(self.sort(a), self.sort(b));
        if a == b {
            return a;
        }
        match self.as_const(c) {
            Some(true) => a,
            Some(false) => b,
            None => self.intern(Node::Ite(c, a, b)),
        }
    }

    pub fn int_const(&mut self, c: i64) -> F {
        self.intern(Node::IntConst(c))
    }

    pub fn bool_to_int(&mut self, b: F) -> F {
        match self.as_const(b) {
            Some(v) => self.int_const(v as i64),
            None => self.intern(Node::BoolToInt(b)),
        }
    }

    /// Sum of integer terms with constant terms merged into one.
    pub fn int_sum(&mut self, terms: &[F]) -> F {
        let mut c = 0i64;
        let mut rest = Vec::with_capacity(terms.len());
        for &t in terms {
            debug_assert_eq!(self.sort(t), Sort::Int);
            match self.nodes[t.index()] {
                Node::IntConst(v) => c += v,
                Node::IntSum(ref inner) => {
                    for &s in inner.clone().iter() {
                        match self.nodes[s.index()] {
                            Node::IntConst(v) => c += v,
                            _ => rest.push(s),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        rest.sort_unstable();
        if rest.is_empty() {
            return self.int_const(c);
        }
        if c != 0 {
            let k = self.int_const(c);
            rest.push(k);
        }
        if rest.len() == 1 {
            return rest[0];
        }
        self.intern(Node::IntSum(rest))
    }

    /// Number of true literals among `bools`, as an integer term.
    pub fn count(&mut self, bools: &[F]) -> F {
        let terms: Vec<F> = bools.iter().map(|&b| self.bool_to_int(b)).collect();
        self.int_sum(&terms)
    }

    pub fn le(&mut self, a: F, b: F) -> F {
        debug_assert_eq!(self.sort(a), Sort::Int);
        debug_assert_eq!(self.sort(b), Sort::Int);
        if let (Some(x), Some(y)) = (self.as_int_const(a), self.as_int_const(b)) {
            return self.constant(x <= y);
        }
        self.intern(Node::Le(a, b))
    }

    pub fn eq(&mut self, a: F, b: F) -> F {
        debug_assert_eq!(self.sort(a), self.sort(b));
        if a == b {
            return self.constant(true);
        }
        if let (Some(x), Some(y)) = (self.as_const(a), self.as_const(b)) {
            return self.constant(x == y);
        }
        if let (Some(x), Some(y)) = (self.as_int_const(a), self.as_int_const(b)) {
            return self.constant(x == y);
        }
        self.intern(Node::Eq(a, b))
    }

    /// `sum(bools) <= k`, folded to a constant when decidable from the
    /// number of non-constant literals.
    pub fn at_most(&mut self, bools: &[F], k: i64) -> F {
        let forced = bools.iter().filter(|&&b| self.as_const(b) == Some(true)).count() as i64;
        let free = bools.iter().filter(|&&b| self.as_const(b).is_none()).count() as i64;
        if forced > k {
            return self.constant(false);
        }
        if forced + free <= k {
            return self.constant(true);
        }
        let s = self.count(bools);
        let kk = self.int_const(k);
        self.le(s, kk)
    }

    /// `sum(bools) == k`.
    pub fn exactly(&mut self, bools: &[F], k: i64) -> F {
        let s = self.count(bools);
        let kk = self.int_const(k);
        self.eq(s, kk)
    }

    /// Formula size on the tree: variable occurrences plus connectives,
    /// constants excluded. Shared subterms are counted with multiplicity.
    pub fn size(&mut self, f: F) -> u64 {
        if let Some(s) = self.size_memo[f.index()] {
            return s;
        }
        let node = self.nodes[f.index()].clone();
        let s = match node {
            Node::Var(_) => 1,
            Node::Const(_) | Node::IntConst(_) => 0,
            Node::And(cs) | Node::Or(cs) | Node::Xor(cs) | Node::IntSum(cs) => {
                let mut acc = 1u64;
                for c in cs {
                    acc = acc.saturating_add(self.size(c));
                }
                acc
            }
            Node::Not(a) | Node::BoolToInt(a) => 1u64.saturating_add(self.size(a)),
            Node::Le(a, b) | Node::Eq(a, b) => 1u64.saturating_add(self.size(a)).saturating_add(self.size(b)),
            Node::Ite(c, a, b) => 1u64
                .saturating_add(self.size(c))
                .saturating_add(self.size(a))
                .saturating_add(self.size(b)),
        };
        self.size_memo[f.index()] = Some(s);
        s
    }

    /// Handles reachable from `roots`, in increasing (topological) order.
    /// Auxiliary variables pull in their definitions.
    pub fn reachable(&self, roots: &[F]) -> Vec<F> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<F> = roots.to_vec();
        while let Some(f) = stack.pop() {
            if seen[f.index()] {
                continue;
            }
            seen[f.index()] = true;
            match &self.nodes[f.index()] {
                Node::Var(v) => {
                    if let VarKind::Aux(def) = self.vars[v.index()].kind {
                        stack.push(def);
                    }
                }
                Node::Const(_) | Node::IntConst(_) => {}
                Node::And(cs) | Node::Or(cs) | Node::Xor(cs) | Node::IntSum(cs) => stack.extend(cs.iter().copied()),
                Node::Not(a) | Node::BoolToInt(a) => stack.push(*a),
                Node::Le(a, b) | Node::Eq(a, b) => {
                    stack.push(*a);
                    stack.push(*b);
                }
                Node::Ite(c, a, b) => {
                    stack.push(*c);
                    stack.push(*a);
                    stack.push(*b);
                }
            }
        }
        (0..self.nodes.len() as u32).map(F).filter(|f| seen[f.index()]).collect()
    }

    /// Replaces variables by constants according to `subst` and rebuilds the
    /// formula with constant folding. Auxiliary variables are expanded
    /// through their definitions.
    pub fn substitute(&mut self, f: F, subst: &dyn Fn(VarId) -> Option<bool>) -> F {
        let mut memo: BTreeMap<F, F> = BTreeMap::new();
        self.subst_rec(f, subst, &mut memo)
    }

    fn subst_rec(&mut self, f: F, subst: &dyn Fn(VarId) -> Option<bool>, memo: &mut BTreeMap<F, F>) -> F {
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let node = self.nodes[f.index()].clone();
        let r = match node {
            Node::Var(v) => match subst(v) {
                Some(b) => self.constant(b),
                None => match self.vars[v.index()].kind {
                    VarKind::Aux(def) => self.subst_rec(def, subst, memo),
                    VarKind::User => f,
                },
            },
            Node::Const(_) | Node::IntConst(_) => f,
            Node::And(cs) => {
                let cs: Vec<F> = cs.into_iter().map(|c| self.subst_rec(c, subst, memo)).collect();
                self.fast_and(&cs)
            }
            Node::Or(cs) => {
                let cs: Vec<F> = cs.into_iter().map(|c| self.subst_rec(c, subst, memo)).collect();
                self.fast_or(&cs)
            }
            Node::Xor(cs) => {
                let cs: Vec<F> = cs.into_iter().map(|c| self.subst_rec(c, subst, memo)).collect();
                self.fast_xor(&cs)
            }
            Node::IntSum(cs) => {
                let cs: Vec<F> = cs.into_iter().map(|c| self.subst_rec(c, subst, memo)).collect();
                self.int_sum(&cs)
            }
            Node::Not(a) => {
                let a = self.subst_rec(a, subst, memo);
                self.not(a)
            }
            Node::BoolToInt(a) => {
                let a = self.subst_rec(a, subst, memo);
                self.bool_to_int(a)
            }
            Node::Le(a, b) => {
                let a = self.subst_rec(a, subst, memo);
                let b = self.subst_rec(b, subst, memo);
                self.le(a, b)
            }
            Node::Eq(a, b) => {
                let a = self.subst_rec(a, subst, memo);
                let b = self.subst_rec(b, subst, memo);
                self.eq(a, b)
            }
            Node::Ite(c, a, b) => {
                let c = self.subst_rec(c, subst, memo);
                let a = self.subst_rec(a, subst, memo);
                let b = self.subst_rec(b, subst, memo);
                self.ite(c, a, b)
            }
        };
        memo.insert(f, r);
        r
    }
}

/// Value of an evaluated formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Val {
    B(bool),
    I(i64),
}

impl Val {
    pub fn as_bool(self) -> bool {
        match self {
            Val::B(b) => b,
            Val::I(_) => panic!("integer value used as Boolean"),
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Val::I(i) => i,
            Val::B(_) => panic!("Boolean value used as integer"),
        }
    }
}

/// Evaluates formulas under a total assignment of user variables. Auxiliary
/// variables are resolved through their definitions. Results are cached, so
/// one evaluator can evaluate many roots under the same assignment.
pub struct Evaluator<'a> {
    store: &'a FormulaStore,
    assign: &'a dyn Fn(VarId) -> bool,
    cache: Vec<Option<Val>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(store: &'a FormulaStore, assign: &'a dyn Fn(VarId) -> bool) -> Self {
        Evaluator { store, assign, cache: vec![None; store.len()] }
    }

    pub fn eval(&mut self, f: F) -> Val {
        if let Some(v) = self.cache[f.index()] {
            return v;
        }
        // Iterative post-order walk so deep formulas cannot overflow the stack.
        let mut stack: Vec<(F, bool)> = vec![(f, false)];
        while let Some((g, ready)) = stack.pop() {
            if self.cache[g.index()].is_some() {
                continue;
            }
            let node = &self.store.nodes[g.index()];
            if !ready {
                stack.push((g, true));
                match node {
                    Node::Var(v) => {
                        if let VarKind::Aux(def) = self.store.vars[v.index()].kind {
                            stack.push((def, false));
                        }
                    }
                    Node::Const(_) | Node::IntConst(_) => {}
                    Node::And(cs) | Node::Or(cs) | Node::Xor(cs) | Node::IntSum(cs) => {
                        stack.extend(cs.iter().map(|&c| (c, false)))
                    }
                    Node::Not(a) | Node::BoolToInt(a) => stack.push((*a, false)),
                    Node::Le(a, b) | Node::Eq(a, b) => {
                        stack.push((*a, false));
                        stack.push((*b, false));
                    }
                    Node::Ite(c, a, b) => {
                        stack.push((*c, false));
                        stack.push((*a, false));
                        stack.push((*b, false));
                    }
                }
                continue;
            }
            let get = |c: &F| self.cache[c.index()].expect("child evaluated");
            let val = match node {
                Node::Var(v) => match self.store.vars[v.index()].kind {
                    VarKind::Aux(def) => get(&def),
                    VarKind::User => Val::B((self.assign)(*v)),
                },
                Node::Const(b) => Val::B(*b),
                Node::IntConst(c) => Val::I(*c),
                Node::And(cs) => Val::B(cs.iter().all(|c| get(c).as_bool())),
                Node::Or(cs) => Val::B(cs.iter().any(|c| get(c).as_bool())),
                Node::Xor(cs) => Val::B(cs.iter().fold(false, |acc, c| acc ^ get(c).as_bool())),
                Node::IntSum(cs) => Val::I(cs.iter().map(|c| get(c).as_int()).sum()),
                Node::Not(a) => Val::B(!get(a).as_bool()),
                Node::BoolToInt(a) => Val::I(get(a).as_bool() as i64),
                Node::Le(a, b) => Val::B(get(a).as_int() <= get(b).as_int()),
                Node::Eq(a, b) => Val::B(get(a) == get(b)),
                Node::Ite(c, a, b) => {
                    if get(c).as_bool() {
                        get(a)
                    } else {
                        get(b)
                    }
                }
            };
            self.cache[g.index()] = Some(val);
        }
        self.cache[f.index()].expect("root evaluated")
    }

    pub fn eval_bool(&mut self, f: F) -> bool {
        self.eval(f).as_bool()
    }

    pub fn eval_int(&mut self, f: F) -> i64 {
        self.eval(f).as_int()
    }
}

/// A rectangular matrix of Boolean formulas, multiplied over F2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicBitMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<F>,
}

impl SymbolicBitMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        SymbolicBitMatrix { rows, cols, entries }
    }

    pub fn identity(store: &FormulaStore, dim: usize) -> Self {
        let (zero, one) = (store.constant(false), store.constant(true));
        Self::from_fn(dim, dim, |i, j| if i == j { one } else { zero })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: F) {
        self.entries[i * self.cols + j] = f;
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    /// Product over F2: entry `(i, j)` is the XOR over `k` of `A_ik AND B_kj`.
    /// With `use_aux`, every non-atomic entry of the result is replaced by a
    /// fresh auxiliary variable whose definition is recorded in the store.
    pub fn mul(&self, other: &SymbolicBitMatrix, store: &mut FormulaStore, use_aux: bool) -> Option<Self> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        let mut terms = Vec::new();
        for i in 0..self.rows {
            for j in 0..other.cols {
                terms.clear();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if store.as_const(a) == Some(false) || store.as_const(b) == Some(false) {
                        continue;
                    }
                    terms.push(store.fast_and(&[a, b]));
                }
                let mut e = store.fast_xor(&terms);
                if use_aux && store.as_const(e).is_none() && !matches!(store.node(e), Node::Var(_)) {
                    e = store.fresh_aux(e);
                }
                out.push(e);
            }
        }
        Some(SymbolicBitMatrix { rows: self.rows, cols: other.cols, entries: out })
    }

    /// Matrix times a constant vector: row `i` is the XOR of the entries in
    /// columns where `v` is set.
    pub fn mul_const_vec(&self, v: &[bool], store: &mut FormulaStore) -> Vec<F> {
        (0..self.rows)
            .map(|i| {
                let terms: Vec<F> = (0..self.cols).filter(|&j| v[j]).map(|j| self.get(i, j)).collect();
                store.fast_xor(&terms)
            })
            .collect()
    }

    /// Concrete matrix under an evaluator.
    pub fn eval(&self, ev: &mut Evaluator<'_>) -> Vec<Vec<bool>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| ev.eval_bool(self.get(i, j))).collect()).collect()
    }
}
