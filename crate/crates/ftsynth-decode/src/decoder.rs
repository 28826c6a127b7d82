//! Decoder for the merged color/surface code.
//!
//! Each syndrome type is decoded independently in two stages. The color
//! code stage pairs marked stabilizers inside the three restricted graphs,
//! extracts the components that connect to the green boundary, and lifts the
//! pairing paths to face-qubit corrections. The surface code stage matches
//! whatever remains among the surface code stabilizers and the `eta_i`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use ftsynth_core::codes::{Color, Edge, Label, MergedCode, Part, QubitClass, SyndromeGraph};
use ftsynth_core::f2::PauliType;

use crate::apm::{min_weight_apm, WeightedGraph};
use crate::error::DecodeError;

/// Edge weights of the syndrome graphs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderConfig {
    /// Weight of edges whose stabilizers share no face qubit.
    pub w1: f64,
    /// Weight of edges whose stabilizers share a face qubit.
    pub w2: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { w1: 1.0, w2: 1.0 }
    }
}

/// A matched pair and the legal path joining it (edges of the full graph).
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    pub u: usize,
    pub v: usize,
    pub color: Color,
    pub weight: f64,
    pub edges: Vec<usize>,
}

/// A boundary-connected component: a walk from the green virtual vertex
/// along matched pairs of alternating colors, ending at a virtual vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Bcc {
    pub vertices: Vec<usize>,
    pub colors: Vec<Color>,
    pub color: Color,
    pub chain: Vec<usize>,
}

/// Intermediate results of decoding one syndrome type.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecodeTrace {
    /// Pairings of the restricted graphs that exclude R, G and B.
    pub pairings: [Vec<Pairing>; 3],
    pub bccs: Vec<Bcc>,
    /// Marked vertices after the color code stage.
    pub after_color_stage: Vec<usize>,
    pub surface_pairings: Vec<Pairing>,
    /// Lifts requested at virtual vertices; always zero by construction.
    pub virtual_lifts: usize,
    /// Lifts at surface code vertices, which return nothing.
    pub surface_lifts: usize,
}

/// Both corrections: `z` fixes the X syndrome, `x` the Z syndrome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub z: Vec<bool>,
    pub x: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
struct Tree {
    dist: Vec<f64>,
    pred: Vec<Option<(usize, usize)>>,
}

/// All-pairs legal shortest paths on a subgraph of the full syndrome graph.
#[derive(Clone, Debug)]
struct PathTable {
    sub: SyndromeGraph,
    local: Vec<Option<usize>>,
    /// Parent edge index of each subgraph edge.
    parent_edge: Vec<usize>,
    full: Vec<Option<Tree>>,
    color_only: Vec<Option<Tree>>,
}

impl PathTable {
    fn new(parent: &SyndromeGraph, sub: SyndromeGraph) -> Self {
        let map = sub.parent.clone().expect("subgraph");
        let mut local = vec![None; parent.n_vertices()];
        for (i, &p) in map.iter().enumerate() {
            local[p] = Some(i);
        }
        let parent_edge = sub
            .edges
            .iter()
            .map(|e| {
                parent
                    .edge_between(map[e.u], map[e.v])
                    .expect("parent edge")
            })
            .collect();
        let mut t = PathTable {
            sub,
            local,
            parent_edge,
            full: Vec::new(),
            color_only: Vec::new(),
        };
        let n = t.sub.n_vertices();
        t.full = (0..n)
            .map(|s| (!t.sub.vertices[s].is_virtual).then(|| t.dijkstra(s, false)))
            .collect();
        t.color_only = (0..n)
            .map(|s| {
                let v = &t.sub.vertices[s];
                (!v.is_virtual && v.part == Part::Color).then(|| t.dijkstra(s, true))
            })
            .collect();
        t
    }

    fn dijkstra(&self, s: usize, color_only: bool) -> Tree {
        let n = self.sub.n_vertices();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[s] = 0.0;
        heap.push(HeapItem(0.0, s));
        while let Some(HeapItem(d, x)) = heap.pop() {
            if done[x] {
                continue;
            }
            done[x] = true;
            if x != s && self.sub.vertices[x].is_virtual {
                continue;
            }
            for &(y, e) in self.sub.neighbors(x) {
                if color_only && self.sub.vertices[y].part == Part::Surface {
                    continue;
                }
                let nd = d + self.sub.edges[e].weight;
                if nd < dist[y] {
                    dist[y] = nd;
                    pred[y] = Some((x, e));
                    heap.push(HeapItem(nd, y));
                }
            }
        }
        Tree { dist, pred }
    }

    /// Minimum-weight legal path between two vertices of the full graph, as
    /// parent edge indices; `None` when no legal path exists.
    fn path(&self, u: usize, v: usize) -> Option<(f64, Vec<usize>)> {
        let (lu, lv) = (self.local[u]?, self.local[v]?);
        if lu == lv {
            return Some((0.0, Vec::new()));
        }
        let (s, t) = if self.sub.vertices[lu].is_virtual {
            (lv, lu)
        } else {
            (lu, lv)
        };
        if self.sub.vertices[s].is_virtual {
            return None;
        }
        let both_color =
            self.sub.vertices[s].part == Part::Color && self.sub.vertices[t].part == Part::Color;
        let tree = if both_color {
            self.color_only[s].as_ref()?
        } else {
            self.full[s].as_ref()?
        };
        if !tree.dist[t].is_finite() {
            return None;
        }
        let mut edges = Vec::new();
        let mut x = t;
        while let Some((p, e)) = tree.pred[x] {
            edges.push(self.parent_edge[e]);
            x = p;
        }
        edges.reverse();
        Some((tree.dist[t], edges))
    }
}

/// Decoder state for one syndrome graph.
#[derive(Clone, Debug)]
struct GraphDecoder {
    g: SyndromeGraph,
    /// Indexed by the excluded color.
    restricted: [PathTable; 3],
    surface: PathTable,
    /// Qubit flipped by each surface-stage edge of the full graph.
    surface_qubit: BTreeMap<usize, usize>,
    /// Seam qubits and their doubled heights, top to bottom.
    seam: Vec<(usize, i64)>,
}

fn color_index(c: Color) -> usize {
    match c {
        Color::R => 0,
        Color::G => 1,
        Color::B => 2,
    }
}

fn xor_edges(chain: &mut [bool], edges: &[usize]) {
    for &e in edges {
        chain[e] ^= true;
    }
}

impl GraphDecoder {
    fn new(code: &MergedCode, p: PauliType, cfg: DecoderConfig) -> Self {
        let g = SyndromeGraph::build(&code.code, p, cfg.w1, cfg.w2);
        let restricted = Color::ALL.map(|c| {
            let (c1, c2) = c.others();
            PathTable::new(&g, g.restricted_graph(c1, c2))
        });
        let keep: Vec<usize> = (0..g.n_vertices())
            .filter(|&i| {
                let v = &g.vertices[i];
                if v.is_virtual {
                    v.color == Color::R || v.color == Color::B
                } else {
                    v.part == Part::Surface || matches!(v.label, Label::Eta(_))
                }
            })
            .collect();
        let mut surface_qubit = BTreeMap::new();
        for (i, e) in g.edges.iter().enumerate() {
            if let Some(q) = clean_qubit(&g, e) {
                surface_qubit.insert(i, q);
            }
        }
        let mut sub = g.induced(&keep);
        let map = sub.parent.clone().unwrap();
        sub.retain_edges(|e| {
            g.edge_between(map[e.u], map[e.v])
                .is_some_and(|pe| surface_qubit.contains_key(&pe))
        });
        let surface = PathTable::new(&g, sub);
        let seam = code
            .seam
            .iter()
            .map(|&q| (q, 2 * code.code.coords[q].1))
            .collect();
        GraphDecoder {
            g,
            restricted,
            surface,
            surface_qubit,
            seam,
        }
    }

    fn is_red_surface(&self, u: usize) -> bool {
        let v = &self.g.vertices[u];
        !v.is_virtual && v.part == Part::Surface && v.color == Color::R
    }

    /// Face qubits `F` of vertex `u` whose boundary, restricted to the edges
    /// at `u` that face qubits can produce, equals `chain` on those edges.
    /// Surface code vertices return nothing. Edges from an `eta_i` into the
    /// surface code are left to the surface code stage, and an `eta_i` may
    /// miss edges to virtual vertices when nothing else fits; it then stays
    /// marked for the surface code stage.
    fn lift(
        &self,
        u: usize,
        chain: &[bool],
        trace: &mut DecodeTrace,
    ) -> Result<Vec<usize>, DecodeError> {
        let v = &self.g.vertices[u];
        if v.is_virtual {
            trace.virtual_lifts += 1;
            return Ok(Vec::new());
        }
        if v.part == Part::Surface {
            trace.surface_lifts += 1;
            return Ok(Vec::new());
        }
        let face_qubits: Vec<usize> = v
            .support
            .iter()
            .copied()
            .filter(|&q| self.g.class[q] == QubitClass::Face)
            .collect();
        let mut local: Vec<usize> = Vec::new();
        for &q in &face_qubits {
            for &w in &self.g.incidence[q] {
                if w != u {
                    let e = self.g.edge_between(u, w).expect("face edge");
                    if !local.contains(&e) {
                        local.push(e);
                    }
                }
            }
        }
        let target: Vec<bool> = local.iter().map(|&e| chain[e]).collect();
        if target.iter().all(|b| !b) {
            return Ok(Vec::new());
        }
        let faces: Vec<(usize, Vec<bool>)> = face_qubits
            .iter()
            .map(|&q| {
                let mut col = vec![false; local.len()];
                for &w in &self.g.incidence[q] {
                    if w != u {
                        let e = self.g.edge_between(u, w).expect("face edge");
                        let k = local.iter().position(|&x| x == e).expect("local edge");
                        col[k] ^= true;
                    }
                }
                (q, col)
            })
            .collect();
        let is_eta = matches!(v.label, Label::Eta(_));
        let to_virtual: Vec<bool> = local
            .iter()
            .map(|&e| {
                let ed = &self.g.edges[e];
                self.g.vertices[if ed.u == u { ed.v } else { ed.u }].is_virtual
            })
            .collect();
        // Ranked by (mismatches on virtual edges, faces used).
        let mut best: Option<((u32, u32), u32)> = None;
        for mask in 0u32..1 << faces.len() {
            let mut acc = vec![false; local.len()];
            for (i, (_, col)) in faces.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (a, &c) in acc.iter_mut().zip(col) {
                        *a ^= c;
                    }
                }
            }
            let mut slack = 0u32;
            let mut ok = true;
            for k in 0..local.len() {
                if acc[k] != target[k] {
                    if is_eta && to_virtual[k] {
                        slack += 1;
                    } else {
                        ok = false;
                    }
                }
            }
            let rank = (slack, mask.count_ones());
            if ok && best.is_none_or(|(r, _)| rank < r) {
                best = Some((rank, mask));
            }
        }
        let (_, mask) = best.ok_or(DecodeError::NoLift(u))?;
        Ok(faces
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, (q, _))| *q)
            .collect())
    }

    /// Doubled seam height of a color code vertex adjacent to the seam.
    fn seam_position(&self, x: usize) -> Option<i64> {
        let ys: Vec<i64> = self
            .seam
            .iter()
            .filter(|(q, _)| self.g.vertices[x].support.contains(q))
            .map(|&(_, y)| y)
            .collect();
        match ys.as_slice() {
            [a, b] => Some((a + b) / 2),
            [a] if *a == 0 => Some(-1),
            [a] => Some(a + 1),
            _ => None,
        }
    }

    /// Seam qubits sandwiched between consecutive crossing edges of the
    /// chain, the crossing edges being those joining a red surface code
    /// vertex to a color code vertex, ordered top to bottom.
    fn sc_red_lift(&self, chain: &[bool]) -> Result<Vec<usize>, DecodeError> {
        let mut crossings: Vec<(i64, usize)> = Vec::new();
        for (i, e) in self.g.edges.iter().enumerate() {
            if !chain[i] {
                continue;
            }
            let other = if self.is_red_surface(e.u) {
                e.v
            } else if self.is_red_surface(e.v) {
                e.u
            } else {
                continue;
            };
            if self.g.vertices[other].part != Part::Color {
                continue;
            }
            if let Some(y) = self.seam_position(other) {
                crossings.push((y, i));
            }
        }
        if crossings.len() % 2 == 1 {
            return Err(DecodeError::OddCrossings(crossings.len()));
        }
        crossings.sort_unstable();
        let mut out = Vec::new();
        for pair in crossings.chunks(2) {
            let (lo, hi) = (pair[0].0, pair[1].0);
            out.extend(
                self.seam
                    .iter()
                    .filter(|&&(_, y)| y > lo && y < hi)
                    .map(|&(q, _)| q),
            );
        }
        Ok(out)
    }

    fn pair_up(
        &self,
        table: &PathTable,
        marked: &[usize],
        virtuals: &[usize],
        color: Color,
    ) -> Result<Vec<Pairing>, DecodeError> {
        let mut verts: Vec<usize> = marked.to_vec();
        verts.extend_from_slice(virtuals);
        let mut wg = WeightedGraph::new(verts.len());
        let mut paths = BTreeMap::new();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                if i >= marked.len() && j >= marked.len() {
                    continue;
                }
                if let Some((w, edges)) = table.path(verts[i], verts[j]) {
                    wg.add_edge(i, j, w)?;
                    paths.insert((i, j), (w, edges));
                }
            }
        }
        wg.set_a(&(0..marked.len()).collect::<Vec<_>>());
        let m = min_weight_apm(&wg)?;
        Ok(m.into_iter()
            .map(|(i, j)| {
                let (w, edges) = paths[&(i, j)].clone();
                Pairing {
                    u: verts[i],
                    v: verts[j],
                    color,
                    weight: w,
                    edges,
                }
            })
            .collect())
    }

    fn decode(&self, syndrome: &[bool], n: usize) -> Result<(Vec<bool>, DecodeTrace), DecodeError> {
        if syndrome.len() != self.g.real_count {
            return Err(DecodeError::SyndromeLength {
                expected: self.g.real_count,
                found: syndrome.len(),
            });
        }
        let g = &self.g;
        let mut trace = DecodeTrace::default();
        let mut correction = vec![false; n];
        let apply = |corr: &mut Vec<bool>, qs: &[usize]| {
            for &q in qs {
                corr[q] ^= true;
            }
        };
        let marked: Vec<usize> = (0..g.real_count).filter(|&i| syndrome[i]).collect();

        let mut total = vec![false; g.edges.len()];
        for c in Color::ALL {
            let (c1, c2) = c.others();
            let a_c: Vec<usize> = marked
                .iter()
                .copied()
                .filter(|&u| g.vertices[u].color != c)
                .collect();
            let virtuals: Vec<usize> = [c1, c2].iter().filter_map(|&x| g.virtual_of(x)).collect();
            let pairs = self.pair_up(&self.restricted[color_index(c)], &a_c, &virtuals, c)?;
            for p in &pairs {
                xor_edges(&mut total, &p.edges);
            }
            trace.pairings[color_index(c)] = pairs;
        }

        let vg = g.virtual_of(Color::G);
        let vr = g.virtual_of(Color::R);
        let mut used: Vec<Vec<bool>> = trace
            .pairings
            .iter()
            .map(|ps| vec![false; ps.len()])
            .collect();
        if let Some(vg) = vg {
            loop {
                let mut vertices = vec![vg];
                let mut colors = Vec::new();
                let mut chain = vec![false; g.edges.len()];
                let mut cur = vg;
                let mut prev: Option<Color> = None;
                loop {
                    let next = Color::ALL
                        .iter()
                        .filter(|&&c| Some(c) != prev)
                        .find_map(|&c| {
                            let ci = color_index(c);
                            trace.pairings[ci]
                                .iter()
                                .enumerate()
                                .find(|(k, p)| !used[ci][*k] && (p.u == cur || p.v == cur))
                                .map(|(k, _)| (c, k))
                        });
                    let Some((c, k)) = next else { break };
                    let ci = color_index(c);
                    used[ci][k] = true;
                    let p = &trace.pairings[ci][k];
                    xor_edges(&mut chain, &p.edges);
                    cur = if p.u == cur { p.v } else { p.u };
                    vertices.push(cur);
                    colors.push(c);
                    prev = Some(c);
                    if g.vertices[cur].is_virtual {
                        break;
                    }
                }
                if colors.is_empty() {
                    break;
                }
                let last = *vertices.last().unwrap();
                let color = if last == vg || Some(last) == vr {
                    Color::B
                } else {
                    Color::R
                };
                let lift_at: Vec<usize> = (0..g.n_vertices())
                    .filter(|&u| g.vertices[u].color == color)
                    .filter(|&u| g.neighbors(u).iter().any(|&(_, e)| chain[e]))
                    .collect();
                for u in lift_at {
                    let qs = self.lift(u, &chain, &mut trace)?;
                    apply(&mut correction, &qs);
                }
                if color == Color::R {
                    let qs = self.sc_red_lift(&chain)?;
                    apply(&mut correction, &qs);
                }
                for (t, c) in total.iter_mut().zip(&chain) {
                    *t ^= c;
                }
                trace.bccs.push(Bcc {
                    vertices,
                    colors,
                    color,
                    chain: (0..chain.len()).filter(|&e| chain[e]).collect(),
                });
            }
        }
        let greens: Vec<usize> = (0..g.n_vertices())
            .filter(|&u| g.vertices[u].color == Color::G)
            .filter(|&u| g.neighbors(u).iter().any(|&(_, e)| total[e]))
            .collect();
        for u in greens {
            let qs = self.lift(u, &total, &mut trace)?;
            apply(&mut correction, &qs);
        }

        let mut residual = syndrome.to_vec();
        for (q, &b) in correction.iter().enumerate() {
            if b {
                for &v in &g.incidence[q] {
                    if v < g.real_count {
                        residual[v] ^= true;
                    }
                }
            }
        }
        let remaining: Vec<usize> = (0..g.real_count).filter(|&i| residual[i]).collect();
        trace.after_color_stage = remaining.clone();
        let virtuals: Vec<usize> = [Color::R, Color::B]
            .iter()
            .filter_map(|&c| g.virtual_of(c))
            .collect();
        let pairs = self.pair_up(&self.surface, &remaining, &virtuals, Color::G)?;
        for p in &pairs {
            for e in &p.edges {
                correction[self.surface_qubit[e]] ^= true;
            }
        }
        trace.surface_pairings = pairs;
        Ok((correction, trace))
    }
}

/// A shared qubit of the edge that touches no other real stabilizer, lowest
/// index first.
fn clean_qubit(g: &SyndromeGraph, e: &Edge) -> Option<usize> {
    e.qubits.iter().copied().find(|&q| {
        g.incidence[q]
            .iter()
            .all(|&w| w == e.u || w == e.v || w >= g.real_count)
    })
}

/// The merged code decoder with precomputed legal paths.
#[derive(Clone, Debug)]
pub struct MergedDecoder {
    code: MergedCode,
    x: GraphDecoder,
    z: GraphDecoder,
}

impl MergedDecoder {
    pub fn new(code: MergedCode, cfg: DecoderConfig) -> Self {
        let x = GraphDecoder::new(&code, PauliType::X, cfg);
        let z = GraphDecoder::new(&code, PauliType::Z, cfg);
        MergedDecoder { code, x, z }
    }

    pub fn code(&self) -> &MergedCode {
        &self.code
    }

    /// The syndrome graph of stabilizer type `p`.
    pub fn graph(&self, p: PauliType) -> &SyndromeGraph {
        match p {
            PauliType::X => &self.x.g,
            PauliType::Z => &self.z.g,
        }
    }

    /// Minimum-weight legal path between two vertices of the restricted
    /// graph that excludes `excluded`.
    pub fn legal_path(
        &self,
        p: PauliType,
        excluded: Color,
        u: usize,
        v: usize,
    ) -> Option<(f64, Vec<usize>)> {
        let d = match p {
            PauliType::X => &self.x,
            PauliType::Z => &self.z,
        };
        d.restricted[color_index(excluded)].path(u, v)
    }

    /// Lift at vertex `u` of the `p` graph for a chain given as edge indices.
    pub fn lift(&self, p: PauliType, u: usize, chain: &[usize]) -> Result<Vec<usize>, DecodeError> {
        let d = match p {
            PauliType::X => &self.x,
            PauliType::Z => &self.z,
        };
        let mut c = vec![false; d.g.edges.len()];
        xor_edges(&mut c, chain);
        d.lift(u, &c, &mut DecodeTrace::default())
    }

    /// Seam correction for a red component's chain in the `p` graph.
    pub fn sc_red_lift(&self, p: PauliType, chain: &[usize]) -> Result<Vec<usize>, DecodeError> {
        let d = match p {
            PauliType::X => &self.x,
            PauliType::Z => &self.z,
        };
        let mut c = vec![false; d.g.edges.len()];
        xor_edges(&mut c, chain);
        d.sc_red_lift(&c)
    }

    /// Decodes one syndrome: `p`-type stabilizer outcomes give a correction
    /// of the other Pauli type. Returns the correction and a trace.
    pub fn decode_type(
        &self,
        p: PauliType,
        syndrome: &[bool],
    ) -> Result<(Vec<bool>, DecodeTrace), DecodeError> {
        let d = match p {
            PauliType::X => &self.x,
            PauliType::Z => &self.z,
        };
        let n = self.code.code.n();
        let (corr, trace) = d.decode(syndrome, n)?;
        let check = self.code.code.syndrome(p, &corr);
        if check != syndrome {
            let left = (0..check.len())
                .filter(|&i| check[i] != syndrome[i])
                .collect();
            return Err(DecodeError::NotClosed(left));
        }
        Ok((corr, trace))
    }

    /// Decodes both syndromes.
    pub fn decode(&self, sx: &[bool], sz: &[bool]) -> Result<Correction, DecodeError> {
        let (z, _) = self.decode_type(PauliType::X, sx)?;
        let (x, _) = self.decode_type(PauliType::Z, sz)?;
        Ok(Correction { z, x })
    }
}
