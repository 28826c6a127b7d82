//! Dense F2 vectors and matrices for the symplectic representation of Pauli
//! operators and Clifford circuits.
//!
//! A Pauli operator on `n` qubits is a length-`2n` bit vector whose first `n`
//! entries are the X components and whose last `n` entries are the Z
//! components. A Clifford operation acts on such vectors by left
//! multiplication with a `2n x 2n` bit matrix. Qubit indices are 0-based.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::F2Error;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length packed bit vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    /// Builds a vector from a slice of booleans.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector with ones at the given indices.
    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if b {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// In-place XOR with another vector of the same length.
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Parity of the bitwise AND, i.e. the F2 dot product.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the set bits in increasing order.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Pauli type selector used for reduced blocks and error components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliType {
    X,
    Z,
}

/// A Pauli operator on `n` qubits in symplectic form, phases discarded.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliVec {
    n: usize,
    bits: BitVec,
}

impl PauliVec {
    pub fn identity(n: usize) -> Self {
        PauliVec { n, bits: BitVec::zeros(2 * n) }
    }

    /// Wraps a length-`2n` bit vector.
    pub fn from_bits(n: usize, bits: BitVec) -> Result<Self, F2Error> {
        if bits.len() != 2 * n {
            return Err(F2Error::DimensionMismatch { expected: 2 * n, found: bits.len() });
        }
        Ok(PauliVec { n, bits })
    }

    /// Pauli with X components on `xs` and Z components on `zs`.
    pub fn from_support(n: usize, xs: &[usize], zs: &[usize]) -> Self {
        let mut p = PauliVec::identity(n);
        for &q in xs {
            p.bits.flip(q);
        }
        for &q in zs {
            p.bits.flip(n + q);
        }
        p
    }

    /// Single-qubit Pauli. `x`/`z` select the components, so `(true, true)` is Y.
    pub fn single(n: usize, q: usize, x: bool, z: bool) -> Self {
        let mut p = PauliVec::identity(n);
        p.bits.set(q, x);
        p.bits.set(n + q, z);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn x(&self, q: usize) -> bool {
        self.bits.get(q)
    }

    pub fn z(&self, q: usize) -> bool {
        self.bits.get(self.n + q)
    }

    pub fn set_x(&mut self, q: usize, b: bool) {
        self.bits.set(q, b);
    }

    pub fn set_z(&mut self, q: usize, b: bool) {
        let n = self.n;
        self.bits.set(n + q, b);
    }

    /// Number of qubits acted on nontrivially.
    pub fn weight(&self) -> usize {
        (0..self.n).filter(|&q| self.x(q) || self.z(q)).count()
    }

    /// Weight counted only on the listed qubits.
    pub fn weight_on(&self, qubits: &[usize]) -> usize {
        qubits.iter().filter(|&&q| self.x(q) || self.z(q)).count()
    }

    /// Qubits acted on nontrivially, increasing.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x(q) || self.z(q)).collect()
    }

    /// Qubits carrying the given component, increasing.
    pub fn component_support(&self, t: PauliType) -> Vec<usize> {
        match t {
            PauliType::X => (0..self.n).filter(|&q| self.x(q)).collect(),
            PauliType::Z => (0..self.n).filter(|&q| self.z(q)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn mul_assign(&mut self, other: &PauliVec) {
        self.bits.xor_assign(&other.bits);
    }

    /// True when the two operators commute.
    pub fn commutes_with(&self, other: &PauliVec) -> bool {
        let mut acc = false;
        for q in 0..self.n {
            acc ^= (self.x(q) & other.z(q)) ^ (self.z(q) & other.x(q));
        }
        !acc
    }
}

impl fmt::Debug for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            let c = match (self.x(q), self.z(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Dense square matrix over F2, stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    dim: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(dim: usize) -> Self {
        BitMatrix { dim, rows: vec![BitVec::zeros(dim); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = BitMatrix::zeros(dim);
        for i in 0..dim {
            m.rows[i].set(i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let dim = rows.len();
        let mut m = BitMatrix::zeros(dim);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), dim, "matrix must be square");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.rows[i].set(j, b);
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn xor_assign(&mut self, other: &BitMatrix) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.xor_assign(b);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in self.rows[i].ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.dim != other.dim {
            return Err(F2Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = BitMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for k in self.rows[i].ones() {
                out.rows[i].xor_assign(&other.rows[k]);
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.dim {
            return Err(F2Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut out = BitVec::zeros(self.dim);
        for i in 0..self.dim {
            if self.rows[i].dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Rank over F2 by Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.rows.clone())
    }

    /// True when `M^T Λ M = Λ` for the standard symplectic form Λ.
    pub fn is_symplectic(&self) -> bool {
        if self.dim % 2 != 0 {
            return false;
        }
        let n = self.dim / 2;
        let mut lambda = BitMatrix::zeros(self.dim);
        for q in 0..n {
            lambda.set(q, n + q, true);
            lambda.set(n + q, q, true);
        }
        let lhs = self
            .transpose()
            .mul(&lambda)
            .and_then(|m| m.mul(self))
            .expect("square matrices of equal size");
        lhs == lambda
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix({}x{})", self.dim, self.dim)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Rank over F2 of a list of equal-length rows.
pub fn rank_of_rows(mut rows: Vec<BitVec>) -> usize {
    let Some(len) = rows.first().map(BitVec::len) else {
        return 0;
    };
    let mut rank = 0;
    for col in 0..len {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&prow);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Gate kinds with a fixed symplectic action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Cnot,
    H,
    S,
    X,
    Y,
    Z,
    I,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Cnot => "CNOT",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::I => "I",
        }
    }

    pub fn parse(name: &str) -> Result<Self, F2Error> {
        Ok(match name {
            "CNOT" | "CX" => GateKind::Cnot,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "I" => GateKind::I,
            _ => return Err(F2Error::UnknownGate),
        })
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }
}

/// Symplectic matrix of a gate on `n` qubits. For CNOT the qubits are
/// `[control, target]`.
pub fn bit_matrix_of_gate(kind: GateKind, qubits: &[usize], n: usize) -> Result<BitMatrix, F2Error> {
    if qubits.len() != kind.arity() {
        return Err(F2Error::Arity { gate: kind.name(), expected: kind.arity(), found: qubits.len() });
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(F2Error::QubitOutOfRange { qubit: q, n });
        }
        if qubits[..i].contains(&q) {
            return Err(F2Error::DuplicateQubit { qubit: q });
        }
    }
    let mut m = BitMatrix::identity(2 * n);
    match kind {
        GateKind::Cnot => {
            let (c, t) = (qubits[0], qubits[1]);
            m.set(t, c, true);
            m.set(n + c, n + t, true);
        }
        GateKind::H => {
            let q = qubits[0];
            m.set(q, q, false);
            m.set(n + q, n + q, false);
            m.set(q, n + q, true);
            m.set(n + q, q, true);
        }
        GateKind::S => {
            let q = qubits[0];
            m.set(n + q, q, true);
        }
        GateKind::X | GateKind::Y | GateKind::Z | GateKind::I => {}
    }
    Ok(m)
}

/// A gate placed on specific qubits together with its matrix and its
/// deviation from the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateSpec {
    pub id: usize,
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub matrix: BitMatrix,
    pub delta: BitMatrix,
}

impl GateSpec {
    pub fn new(id: usize, kind: GateKind, qubits: &[usize], n: usize) -> Result<Self, F2Error> {
        let matrix = bit_matrix_of_gate(kind, qubits, n)?;
        let mut delta = matrix.clone();
        delta.xor_assign(&BitMatrix::identity(2 * n));
        Ok(GateSpec { id, kind, qubits: qubits.to_vec(), matrix, delta })
    }

    pub fn support(&self) -> &[usize] {
        &self.qubits
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }
}

/// `e' = C e`.
pub fn propagate(e: &PauliVec, c: &BitMatrix) -> Result<PauliVec, F2Error> {
    let bits = c.mul_vec(e.bits())?;
    PauliVec::from_bits(e.n(), bits)
}

/// Composes a circuit given as timesteps of simultaneous gates using the
/// product-sum rule: each timestep contributes `I + sum of deltas`, and later
/// timesteps multiply on the left.
pub fn product_sum_compose(timesteps: &[Vec<&GateSpec>], n: usize) -> Result<BitMatrix, F2Error> {
    let dim = 2 * n;
    let mut acc = BitMatrix::identity(dim);
    for step in timesteps {
        let mut used = vec![false; n];
        let mut layer = BitMatrix::identity(dim);
        for g in step {
            if g.matrix.dim() != dim {
                return Err(F2Error::DimensionMismatch { expected: dim, found: g.matrix.dim() });
            }
            for &q in &g.qubits {
                if used[q] {
                    return Err(F2Error::OverlappingSupport { qubit: q });
                }
                used[q] = true;
            }
            layer.xor_assign(&g.delta);
        }
        acc = layer.mul(&acc)?;
    }
    Ok(acc)
}

/// The upper-left (X) or lower-right (Z) `n x n` quadrant, as rows of bits.
pub fn reduced_block(m: &BitMatrix, p: PauliType) -> Vec<Vec<bool>> {
    let n = m.dim() / 2;
    let off = match p {
        PauliType::X => 0,
        PauliType::Z => n,
    };
    (0..n).map(|i| (0..n).map(|j| m.get(off + i, off + j)).collect()).collect()
}
