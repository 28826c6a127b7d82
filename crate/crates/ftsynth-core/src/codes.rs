//! Surface code, triangular color code, the merged code obtained by gauge
//! fixing the two along a shared boundary, and their syndrome graphs.
//!
//! Layout: surface code data qubit `(i, j)` (row `i` from the top, column
//! `j` from the left) has index `i * L + j` and coordinates `(j, i)`. Color
//! code qubits live on the points `(r, c)`, `0 <= c <= r <= 3(L-1)/2`, that
//! are not plaquette centers (`(r + c) % 3 == 1`); in the merged code they
//! follow the surface code qubits and sit to its right, with the `c = 0`
//! side glued to the rightmost surface code column. The vertical coordinate
//! of a color code point is `r - (r + 1) / 3`, so seam qubit `p` (0-based)
//! shares its height with surface code row `p`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CodeError;
use crate::f2::{rank_of_rows, BitVec, PauliType};

/// Stabilizer and virtual-vertex colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    R,
    G,
    B,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::R, Color::G, Color::B];

    /// The two colors other than `self`.
    pub fn others(self) -> (Color, Color) {
        match self {
            Color::R => (Color::G, Color::B),
            Color::G => (Color::R, Color::B),
            Color::B => (Color::R, Color::G),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::R => 'R',
            Color::G => 'G',
            Color::B => 'B',
        }
    }
}

/// Which constituent code a qubit or stabilizer belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    Surface,
    Color,
}

/// Role of a stabilizer in the merged code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Plain,
    /// Merging X operator `zeta_i` (0-based).
    Zeta(usize),
    /// Product `eta_i = alpha_i beta_i` (0-based).
    Eta(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub support: Vec<usize>,
    pub color: Color,
    pub part: Part,
    pub label: Label,
}

/// Which family a code belongs to; decides the virtual stabilizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    Surface,
    Color,
    Merged,
}

/// A CSS stabilizer code on a planar layout.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    pub kind: CodeKind,
    pub distance: usize,
    pub coords: Vec<(i64, i64)>,
    pub part: Vec<Part>,
    pub x_stabilizers: Vec<Stabilizer>,
    pub z_stabilizers: Vec<Stabilizer>,
    pub logical_x: Vec<usize>,
    pub logical_z: Vec<usize>,
    /// Virtual stabilizers of the X and Z syndrome graphs.
    pub virtual_x: Vec<(Color, Vec<usize>)>,
    pub virtual_z: Vec<(Color, Vec<usize>)>,
}

impl StabilizerCode {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn stabilizers(&self, p: PauliType) -> &[Stabilizer] {
        match p {
            PauliType::X => &self.x_stabilizers,
            PauliType::Z => &self.z_stabilizers,
        }
    }

    pub fn virtuals(&self, p: PauliType) -> &[(Color, Vec<usize>)] {
        match p {
            PauliType::X => &self.virtual_x,
            PauliType::Z => &self.virtual_z,
        }
    }

    /// Syndrome of `p`-type stabilizers for an error given by the qubits
    /// where it anticommutes with `p` (Z errors for X stabilizers).
    pub fn syndrome(&self, p: PauliType, error: &[bool]) -> Vec<bool> {
        self.stabilizers(p).iter().map(|s| s.support.iter().filter(|&&q| error[q]).count() % 2 == 1).collect()
    }

    fn rows(&self, p: PauliType) -> Vec<BitVec> {
        self.stabilizers(p).iter().map(|s| BitVec::from_indices(self.n(), &s.support)).collect()
    }

    /// Rank of the `p`-type stabilizer generators over F2.
    pub fn rank(&self, p: PauliType) -> usize {
        rank_of_rows(self.rows(p))
    }

    /// Number of encoded qubits.
    pub fn logical_qubits(&self) -> usize {
        self.n() - self.rank(PauliType::X) - self.rank(PauliType::Z)
    }

    /// Whether every X stabilizer overlaps every Z stabilizer evenly.
    pub fn stabilizers_commute(&self) -> bool {
        self.x_stabilizers.iter().all(|x| self.z_stabilizers.iter().all(|z| overlap(&x.support, &z.support) % 2 == 0))
    }

    /// Whether the logical representatives commute with every stabilizer
    /// and anticommute with each other.
    pub fn logicals_valid(&self) -> bool {
        self.z_stabilizers.iter().all(|z| overlap(&z.support, &self.logical_x) % 2 == 0)
            && self.x_stabilizers.iter().all(|x| overlap(&x.support, &self.logical_z) % 2 == 0)
            && overlap(&self.logical_x, &self.logical_z) % 2 == 1
    }

    /// Whether an error (qubits where it anticommutes with `p`) lies in the
    /// span of the stabilizers of the opposite type, i.e. acts trivially,
    /// given that its syndrome is empty.
    pub fn is_logical(&self, error_type: PauliType, error: &[bool]) -> bool {
        let rep = match error_type {
            PauliType::X => &self.logical_z,
            PauliType::Z => &self.logical_x,
        };
        rep.iter().filter(|&&q| error[q]).count() % 2 == 1
    }
}

fn overlap(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|q| b.contains(q)).count()
}

fn check_distance(l: usize) -> Result<(), CodeError> {
    if l < 3 || l % 2 == 0 {
        Err(CodeError::BadDistance(l))
    } else {
        Ok(())
    }
}

fn qubits_in_exactly(n: usize, stabs: &[Stabilizer], k: usize, filter: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut count = vec![0usize; n];
    for s in stabs {
        for &q in &s.support {
            count[q] += 1;
        }
    }
    (0..n).filter(|&q| filter(q) && count[q] == k).collect()
}

/// Rotated surface code of distance `l`. X stabilizers are red, Z blue;
/// weight-2 X stabilizers sit on the top and bottom boundaries, weight-2 Z
/// stabilizers on the left and right.
pub fn build_surface_code(l: usize) -> Result<StabilizerCode, CodeError> {
    check_distance(l)?;
    let n = l * l;
    let q = |i: usize, j: usize| i * l + j;
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    let stab = |support: Vec<usize>, color| Stabilizer { support, color, part: Part::Surface, label: Label::Plain };
    for i in 0..l - 1 {
        for j in 0..l - 1 {
            let s = vec![q(i, j), q(i, j + 1), q(i + 1, j), q(i + 1, j + 1)];
            if (i + j) % 2 == 1 {
                xs.push(stab(s, Color::R));
            } else {
                zs.push(stab(s, Color::B));
            }
        }
    }
    for j in (0..l - 1).step_by(2) {
        xs.push(stab(vec![q(0, j), q(0, j + 1)], Color::R));
    }
    for j in (1..l - 1).step_by(2) {
        xs.push(stab(vec![q(l - 1, j), q(l - 1, j + 1)], Color::R));
    }
    for i in (1..l - 1).step_by(2) {
        zs.push(stab(vec![q(i, 0), q(i + 1, 0)], Color::B));
    }
    for i in (0..l - 1).step_by(2) {
        zs.push(stab(vec![q(i, l - 1), q(i + 1, l - 1)], Color::B));
    }
    let coords = (0..n).map(|k| ((k % l) as i64, (k / l) as i64)).collect();
    let virtual_x = vec![(Color::R, qubits_in_exactly(n, &xs, 1, |_| true))];
    let virtual_z = vec![(Color::B, qubits_in_exactly(n, &zs, 1, |_| true))];
    Ok(StabilizerCode {
        kind: CodeKind::Surface,
        distance: l,
        coords,
        part: vec![Part::Surface; n],
        logical_x: (0..l).map(|i| q(i, 0)).collect(),
        logical_z: (0..l).map(|j| q(0, j)).collect(),
        x_stabilizers: xs,
        z_stabilizers: zs,
        virtual_x,
        virtual_z,
    })
}

/// Points of the triangular color code: qubit coordinates `(r, c)` in
/// index order and plaquette centers.
fn color_code_points(l: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let rmax = 3 * (l - 1) / 2;
    let mut qubits = Vec::new();
    let mut centers = Vec::new();
    for r in 0..=rmax {
        for c in 0..=r {
            if (r + c) % 3 == 1 {
                centers.push((r, c));
            } else {
                qubits.push((r, c));
            }
        }
    }
    (qubits, centers)
}

fn color_code_height(r: usize) -> i64 {
    (r - (r + 1) / 3) as i64
}

/// Triangular color code of distance `l` with identical X and Z plaquettes.
pub fn build_color_code(l: usize) -> Result<StabilizerCode, CodeError> {
    check_distance(l)?;
    let rmax = 3 * (l - 1) / 2;
    let (points, centers) = color_code_points(l);
    let index: BTreeMap<(usize, usize), usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = points.len();
    let mut plaquettes = Vec::new();
    for &(r, c) in &centers {
        let (ri, ci) = (r as i64, c as i64);
        let nbrs = [(ri - 1, ci), (ri + 1, ci), (ri, ci - 1), (ri, ci + 1), (ri + 1, ci + 1), (ri - 1, ci - 1)];
        let mut support: Vec<usize> = nbrs
            .iter()
            .filter(|&&(a, b)| a >= 0 && b >= 0 && b <= a && a <= rmax as i64)
            .filter_map(|&(a, b)| index.get(&(a as usize, b as usize)).copied())
            .collect();
        support.sort_unstable();
        let color = match r % 3 {
            1 => Color::B,
            0 => Color::G,
            _ => Color::R,
        };
        plaquettes.push(Stabilizer { support, color, part: Part::Color, label: Label::Plain });
    }
    let virtuals: Vec<(Color, Vec<usize>)> = Color::ALL
        .iter()
        .map(|&col| {
            let covered: BTreeSet<usize> =
                plaquettes.iter().filter(|p| p.color == col).flat_map(|p| p.support.iter().copied()).collect();
            (col, (0..n).filter(|q| !covered.contains(q)).collect())
        })
        .collect();
    let coords = points.iter().map(|&(r, c)| (c as i64, color_code_height(r))).collect();
    let green_side: Vec<usize> = points.iter().enumerate().filter(|(_, &(r, c))| r == c).map(|(i, _)| i).collect();
    Ok(StabilizerCode {
        kind: CodeKind::Color,
        distance: l,
        coords,
        part: vec![Part::Color; n],
        logical_x: green_side.clone(),
        logical_z: green_side,
        x_stabilizers: plaquettes.clone(),
        z_stabilizers: plaquettes,
        virtual_x: virtuals.clone(),
        virtual_z: virtuals,
    })
}

/// The merged code together with the stabilizers removed by the merge.
#[derive(Clone, Debug)]
pub struct MergedCode {
    pub code: StabilizerCode,
    pub l: usize,
    /// Number of surface code qubits; color code qubits follow.
    pub sc_qubits: usize,
    /// Indices of the `zeta_i` among the X stabilizers.
    pub zeta: Vec<usize>,
    /// Indices of the `eta_i` among the Z stabilizers.
    pub eta: Vec<usize>,
    /// Supports of the removed weight-2 surface code Z stabilizers.
    pub alpha: Vec<Vec<usize>>,
    /// Supports of the removed weight-4 color code Z stabilizers.
    pub beta: Vec<Vec<usize>>,
    /// Color code qubits on the seam, top to bottom.
    pub seam: Vec<usize>,
}

/// Gauge-fixes a surface code and a color code of equal distance into the
/// merged code.
pub fn merge(sc: &StabilizerCode, cc: &StabilizerCode) -> Result<MergedCode, CodeError> {
    if sc.distance != cc.distance {
        return Err(CodeError::Mismatch(sc.distance, cc.distance));
    }
    let l = sc.distance;
    let ns = sc.n();
    let n = ns + cc.n();
    let shift = |s: &Stabilizer| Stabilizer { support: s.support.iter().map(|&q| q + ns).collect(), ..s.clone() };
    let (points, _) = color_code_points(l);
    let seam: Vec<usize> = points.iter().enumerate().filter(|(_, &(_, c))| c == 0).map(|(i, _)| i + ns).collect();
    let right_col: Vec<usize> = (0..l).map(|i| i * l + l - 1).collect();

    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut eta_supports = Vec::new();
    for i in 0..(l - 1) / 2 {
        let a = vec![right_col[2 * i], right_col[2 * i + 1]];
        let b_pair = [seam[2 * i], seam[2 * i + 1]];
        let b: Vec<usize> = cc
            .z_stabilizers
            .iter()
            .map(shift)
            .find(|s| s.color == Color::B && b_pair.iter().all(|q| s.support.contains(q)))
            .expect("blue seam plaquette")
            .support;
        let mut e = a.clone();
        e.extend(&b);
        e.sort_unstable();
        alpha.push(a);
        beta.push(b);
        eta_supports.push(e);
    }

    let mut xs: Vec<Stabilizer> = sc.x_stabilizers.clone();
    xs.extend(cc.x_stabilizers.iter().map(shift));
    let mut zeta = Vec::new();
    let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
    for j in (1..l).step_by(2) {
        blocks.push(vec![j, j + 1]);
    }
    for (k, block) in blocks.iter().enumerate() {
        let mut support: Vec<usize> = block.iter().flat_map(|&p| [right_col[p], seam[p]]).collect();
        support.sort_unstable();
        zeta.push(xs.len());
        xs.push(Stabilizer { support, color: Color::R, part: Part::Surface, label: Label::Zeta(k) });
    }

    let mut zs: Vec<Stabilizer> = sc.z_stabilizers.iter().filter(|s| !alpha.contains(&s.support)).cloned().collect();
    zs.extend(cc.z_stabilizers.iter().map(shift).filter(|s| !beta.contains(&s.support)));
    let mut eta = Vec::new();
    for (k, support) in eta_supports.into_iter().enumerate() {
        eta.push(zs.len());
        zs.push(Stabilizer { support, color: Color::B, part: Part::Color, label: Label::Eta(k) });
    }

    let mut coords: Vec<(i64, i64)> = sc.coords.clone();
    coords.extend(cc.coords.iter().map(|&(x, y)| (x + l as i64, y)));
    let mut part = vec![Part::Surface; ns];
    part.extend(vec![Part::Color; cc.n()]);

    let lift_virtual = |v: &[(Color, Vec<usize>)], col: Color| -> Vec<usize> {
        v.iter().filter(|(c, _)| *c == col).flat_map(|(_, s)| s.iter().copied()).collect()
    };
    let mut virtual_x = Vec::new();
    let mut virtual_z = Vec::new();
    for col in Color::ALL {
        let cc_x: Vec<usize> = lift_virtual(&cc.virtual_x, col).into_iter().map(|q| q + ns).collect();
        let cc_z: Vec<usize> = lift_virtual(&cc.virtual_z, col).into_iter().map(|q| q + ns).collect();
        let x_support = if col == Color::R {
            qubits_in_exactly(n, &xs, 1, |q| q < ns)
        } else {
            let mut s = lift_virtual(&sc.virtual_x, col);
            s.extend(cc_x);
            s
        };
        let mut z_support = lift_virtual(&sc.virtual_z, col);
        z_support.extend(cc_z);
        virtual_x.push((col, x_support));
        virtual_z.push((col, z_support));
    }

    let logical_x = sc.logical_x.clone();
    let mut logical_z = sc.logical_z.clone();
    logical_z.extend(cc.logical_z.iter().map(|&q| q + ns));
    Ok(MergedCode {
        code: StabilizerCode {
            kind: CodeKind::Merged,
            distance: l,
            coords,
            part,
            x_stabilizers: xs,
            z_stabilizers: zs,
            logical_x,
            logical_z,
            virtual_x,
            virtual_z,
        },
        l,
        sc_qubits: ns,
        zeta,
        eta,
        alpha,
        beta,
        seam,
    })
}

/// Builds the merged code of distance `l`.
pub fn build_merged_code(l: usize) -> Result<MergedCode, CodeError> {
    merge(&build_surface_code(l)?, &build_color_code(l)?)
}

/// Face qubits lie in three stabilizers of a syndrome graph (virtual ones
/// included), edge qubits in two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitClass {
    Edge,
    Face,
    /// Any other count; does not occur for the codes built here.
    Other(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub color: Color,
    pub is_virtual: bool,
    pub part: Part,
    pub label: Label,
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    /// Qubits shared by the two stabilizers.
    pub qubits: Vec<usize>,
    /// Whether a shared qubit is a face qubit.
    pub face: bool,
}

/// Syndrome graph of one Pauli type: real stabilizers first (in the code's
/// order, so vertex `i < real_count` is syndrome bit `i`), then virtual
/// vertices.
#[derive(Clone, Debug)]
pub struct SyndromeGraph {
    pub p: PauliType,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub real_count: usize,
    pub incidence: Vec<Vec<usize>>,
    pub class: Vec<QubitClass>,
    adjacency: Vec<Vec<(usize, usize)>>,
    edge_index: BTreeMap<(usize, usize), usize>,
    /// For restricted graphs: the vertex index in the parent graph.
    pub parent: Option<Vec<usize>>,
}

impl SyndromeGraph {
    fn from_vertices(p: PauliType, n: usize, vertices: Vec<Vertex>, real_count: usize, w1: f64, w2: f64) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (i, v) in vertices.iter().enumerate() {
            for &q in &v.support {
                incidence[q].push(i);
            }
        }
        let class: Vec<QubitClass> = incidence
            .iter()
            .map(|vs| match vs.len() {
                2 => QubitClass::Edge,
                3 => QubitClass::Face,
                k => QubitClass::Other(k),
            })
            .collect();
        let mut shared: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (q, vs) in incidence.iter().enumerate() {
            for a in 0..vs.len() {
                for b in a + 1..vs.len() {
                    shared.entry((vs[a].min(vs[b]), vs[a].max(vs[b]))).or_default().push(q);
                }
            }
        }
        let mut g = SyndromeGraph {
            p,
            vertices,
            edges: Vec::new(),
            real_count,
            incidence,
            class,
            adjacency: Vec::new(),
            edge_index: BTreeMap::new(),
            parent: None,
        };
        for ((u, v), qubits) in shared {
            let face = qubits.iter().any(|&q| g.class[q] == QubitClass::Face);
            g.edges.push(Edge { u, v, weight: if face { w2 } else { w1 }, qubits, face });
        }
        g.index_edges();
        g
    }

    fn index_edges(&mut self) {
        self.adjacency = vec![Vec::new(); self.vertices.len()];
        self.edge_index.clear();
        for (i, e) in self.edges.iter().enumerate() {
            self.adjacency[e.u].push((e.v, i));
            self.adjacency[e.v].push((e.u, i));
            self.edge_index.insert((e.u, e.v), i);
        }
    }

    /// Syndrome graph of a code for stabilizer type `p` with edge weights
    /// `w1` (no shared face qubit) and `w2` (some shared face qubit).
    pub fn build(code: &StabilizerCode, p: PauliType, w1: f64, w2: f64) -> Self {
        let mut vertices: Vec<Vertex> = code
            .stabilizers(p)
            .iter()
            .map(|s| Vertex { color: s.color, is_virtual: false, part: s.part, label: s.label, support: s.support.clone() })
            .collect();
        let real = vertices.len();
        for (color, support) in code.virtuals(p) {
            let part = if support.iter().any(|&q| code.part[q] == Part::Color) { Part::Color } else { Part::Surface };
            vertices.push(Vertex { color: *color, is_virtual: true, part, label: Label::Plain, support: support.clone() });
        }
        Self::from_vertices(p, code.n(), vertices, real, w1, w2)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adjacency[u]
    }

    /// Index of the edge joining `u` and `v`.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    /// The virtual vertex of a color, if present.
    pub fn virtual_of(&self, c: Color) -> Option<usize> {
        (self.real_count..self.vertices.len()).find(|&i| self.vertices[i].color == c)
    }

    /// Whether `u` counts as a color code vertex.
    pub fn is_color_vertex(&self, u: usize) -> bool {
        self.vertices[u].part == Part::Color
    }

    /// Subgraph on the vertices of colors `c1` and `c2` and the edges among
    /// them; `parent` maps back to this graph.
    pub fn restricted_graph(&self, c1: Color, c2: Color) -> SyndromeGraph {
        let keep: Vec<usize> =
            (0..self.vertices.len()).filter(|&i| self.vertices[i].color == c1 || self.vertices[i].color == c2).collect();
        let mut map = vec![usize::MAX; self.vertices.len()];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let vertices: Vec<Vertex> = keep.iter().map(|&i| self.vertices[i].clone()).collect();
        let real_count = keep.iter().filter(|&&i| i < self.real_count).count();
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| map[e.u] != usize::MAX && map[e.v] != usize::MAX)
            .map(|e| Edge { u: map[e.u], v: map[e.v], ..e.clone() })
            .collect();
        let incidence = self
            .incidence
            .iter()
            .map(|vs| vs.iter().filter(|&&v| map[v] != usize::MAX).map(|&v| map[v]).collect())
            .collect();
        let mut g = SyndromeGraph {
            p: self.p,
            vertices,
            edges,
            real_count,
            incidence,
            class: self.class.clone(),
            adjacency: Vec::new(),
            edge_index: BTreeMap::new(),
            parent: Some(keep),
        };
        g.index_edges();
        g
    }

    /// Subgraph keeping the listed vertices (indices of this graph).
    pub fn induced(&self, keep: &[usize]) -> SyndromeGraph {
        let mut map = vec![usize::MAX; self.vertices.len()];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| map[e.u] != usize::MAX && map[e.v] != usize::MAX)
            .map(|e| Edge { u: map[e.u], v: map[e.v], ..e.clone() })
            .collect();
        let mut g = SyndromeGraph {
            p: self.p,
            vertices: keep.iter().map(|&i| self.vertices[i].clone()).collect(),
            edges,
            real_count: keep.iter().filter(|&&i| i < self.real_count).count(),
            incidence: self
                .incidence
                .iter()
                .map(|vs| vs.iter().filter(|&&v| map[v] != usize::MAX).map(|&v| map[v]).collect())
                .collect(),
            class: self.class.clone(),
            adjacency: Vec::new(),
            edge_index: BTreeMap::new(),
            parent: Some(keep.to_vec()),
        };
        g.index_edges();
        g
    }

    /// Keeps only the edges satisfying `keep`.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(&Edge) -> bool) {
        self.edges.retain(|e| keep(e));
        self.index_edges();
    }

    /// The three edges joining the three stabilizers of a face qubit.
    pub fn face_boundary(&self, q: usize) -> Result<[usize; 3], CodeError> {
        let vs = &self.incidence[q];
        if self.class[q] != QubitClass::Face || vs.len() != 3 {
            return Err(CodeError::NotFace(q));
        }
        let e = |a: usize, b: usize| self.edge_between(vs[a], vs[b]).ok_or(CodeError::NotFace(q));
        Ok([e(0, 1)?, e(0, 2)?, e(1, 2)?])
    }

    /// DOT rendering for debugging.
    pub fn to_dot(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::from("graph syndrome {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if v.is_virtual { "box" } else { "circle" };
            let _ = writeln!(s, "  v{i} [label=\"{}{i}\", shape={shape}];", v.color.letter());
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -- v{} [label=\"{}\"];", e.u, e.v, e.weight);
        }
        s.push_str("}\n");
        s
    }
}

/// Symmetric difference of the face boundaries of the given face qubits.
pub fn boundary_1(faces: &[usize], g: &SyndromeGraph) -> Result<BTreeSet<usize>, CodeError> {
    let mut out = BTreeSet::new();
    for &q in faces {
        for e in g.face_boundary(q)? {
            if !out.remove(&e) {
                out.insert(e);
            }
        }
    }
    Ok(out)
}
