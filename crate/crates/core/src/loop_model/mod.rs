//! Combinatorial planar graphs and loops drawn on them.
//!
//! A graph is given by four edge maps: source and target vertex, left and
//! right face. A loop is a cyclic word of edge traversals that uses every
//! edge once. All indices are 0-based; the loop-spec text format shifts
//! them to 1-based.
//!
//! Half-edges: edge `e` has the half-edge `2e` at its source (pointing
//! along `e`) and `2e + 1` at its target (pointing back along `e`). The
//! rotation at a vertex lists its half-edges anticlockwise, and the face
//! between a half-edge `h` and its anticlockwise successor is `left(h)`.

mod build;
mod spec_format;
mod split;
mod winding;

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, ValidationError};

pub use build::{figure_eight, loop_from_polyline, maximally_winding, random_loop, simple_loop, trefoil_projection};
pub use spec_format::{format_g17, parse_loop_spec, write_loop_spec};
pub use split::{SplitResult, SplittableTree};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanarGraph {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl PlanarGraph {
    pub fn new(source: Vec<usize>, target: Vec<usize>, left: Vec<usize>, right: Vec<usize>) -> Self {
        Self { source, target, left, right }
    }

    pub fn edge_count(&self) -> usize {
        self.source.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.source.iter().chain(&self.target).map(|&v| v + 1).max().unwrap_or(0)
    }

    pub fn face_count(&self) -> usize {
        self.left.iter().chain(&self.right).map(|&f| f + 1).max().unwrap_or(0)
    }

    pub(crate) fn half_vertex(&self, h: usize) -> usize {
        if h % 2 == 0 {
            self.source[h / 2]
        } else {
            self.target[h / 2]
        }
    }

    /// Face on the left of half-edge `h`, looking outward from its vertex.
    pub(crate) fn half_left(&self, h: usize) -> usize {
        if h % 2 == 0 {
            self.left[h / 2]
        } else {
            self.right[h / 2]
        }
    }

    pub(crate) fn half_right(&self, h: usize) -> usize {
        if h % 2 == 0 {
            self.right[h / 2]
        } else {
            self.left[h / 2]
        }
    }
}

/// One letter of a loop word: an edge traversed along (`forward`) or against its orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

impl Step {
    pub const fn new(edge: usize, forward: bool) -> Self {
        Self { edge, forward }
    }

    pub fn reversed(self) -> Self {
        Self { edge: self.edge, forward: !self.forward }
    }

    pub fn sign(self) -> i64 {
        if self.forward {
            1
        } else {
            -1
        }
    }

    /// Half-edge the loop leaves along.
    pub fn out_half(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }

    /// Half-edge the loop arrives along.
    pub fn in_half(self) -> usize {
        2 * self.edge + usize::from(self.forward)
    }

    pub fn tail(self, g: &PlanarGraph) -> usize {
        g.half_vertex(self.out_half())
    }

    pub fn head(self, g: &PlanarGraph) -> usize {
        g.half_vertex(self.in_half())
    }

    /// Face on the left of the loop while it traverses this step.
    pub fn loop_left(self, g: &PlanarGraph) -> usize {
        g.half_left(self.out_half())
    }

    pub fn loop_right(self, g: &PlanarGraph) -> usize {
        g.half_right(self.out_half())
    }
}

/// A regular loop: a validated graph plus a word using each edge once, whose
/// base vertex has degree 2 and whose other vertices are transverse
/// self-intersections of degree 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialLoop {
    graph: PlanarGraph,
    word: Vec<Step>,
    q: usize,
    p: usize,
    rotation: Vec<Vec<usize>>,
    visits: Vec<Vec<usize>>,
    intersections: Vec<usize>,
}

/// Old-to-new index maps produced by [`CombinatorialLoop::canonical_with_relabelling`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabelling {
    pub edge: Vec<usize>,
    pub vertex: Vec<usize>,
    pub face: Vec<usize>,
}

/// Check a graph and word and build the loop, reporting the first violated invariant.
pub fn validate(graph: PlanarGraph, word: Vec<Step>) -> core::result::Result<CombinatorialLoop, ValidationError> {
    let m = graph.edge_count();
    if m == 0 || word.is_empty() {
        return Err(ValidationError::Empty);
    }
    if graph.target.len() != m || graph.left.len() != m || graph.right.len() != m {
        return Err(ValidationError::Shape(alloc::format!(
            "source {}, target {}, left {}, right {}",
            m,
            graph.target.len(),
            graph.left.len(),
            graph.right.len()
        )));
    }
    let q = graph.vertex_count();
    let p = graph.face_count();
    let mut seen_v = vec![false; q];
    let mut seen_f = vec![false; p];
    for e in 0..m {
        seen_v[graph.source[e]] = true;
        seen_v[graph.target[e]] = true;
        seen_f[graph.left[e]] = true;
        seen_f[graph.right[e]] = true;
    }
    if let Some(v) = seen_v.iter().position(|&s| !s) {
        return Err(ValidationError::Unused { what: "vertex", index: v });
    }
    if let Some(f) = seen_f.iter().position(|&s| !s) {
        return Err(ValidationError::Unused { what: "face", index: f });
    }

    let mut usage = vec![0usize; m];
    for (k, st) in word.iter().enumerate() {
        if st.edge >= m {
            return Err(ValidationError::IndexRange { what: "word edge", edge: k, index: st.edge });
        }
        usage[st.edge] += 1;
    }
    if let Some(e) = usage.iter().position(|&c| c != 1) {
        return Err(ValidationError::EdgeUsage { edge: e, count: usage[e] });
    }
    let len = word.len();
    for k in 0..len {
        let next = (k + 1) % len;
        if word[k].head(&graph) != word[next].tail(&graph) {
            return Err(ValidationError::Concatenation { position: k, next });
        }
    }

    let base = word[0].tail(&graph);
    let mut degree = vec![0usize; q];
    for e in 0..m {
        degree[graph.source[e]] += 1;
        degree[graph.target[e]] += 1;
    }
    for (v, &d) in degree.iter().enumerate() {
        let expected = if v == base { 2 } else { 4 };
        if d != expected {
            return Err(ValidationError::Degree { vertex: v, degree: d, expected });
        }
    }
    if q + p != m + 2 {
        return Err(ValidationError::Euler { q, m, p });
    }

    let mut visits = vec![Vec::new(); q];
    for (k, st) in word.iter().enumerate() {
        visits[st.tail(&graph)].push(k);
    }
    let chained = |rot: &[usize]| {
        (0..rot.len()).all(|i| graph.half_right(rot[(i + 1) % rot.len()]) == graph.half_left(rot[i]))
    };
    let mut rotation = vec![Vec::new(); q];
    let mut intersections = Vec::new();
    for v in 0..q {
        let arrive = |k: usize| word[(k + len - 1) % len].in_half();
        if v == base {
            let rot = vec![word[0].out_half(), arrive(0)];
            if !chained(&rot) {
                return Err(ValidationError::FaceMismatch {
                    first: graph.half_left(rot[0]),
                    second: graph.half_right(rot[1]),
                });
            }
            rotation[v] = rot;
            continue;
        }
        let (k1, k2) = (visits[v][0], visits[v][1]);
        let (a, b) = (arrive(k1), word[k1].out_half());
        let (c, d) = (arrive(k2), word[k2].out_half());
        // transverse: each exit sits opposite its entry
        let opt1 = [b, c, a, d];
        let opt2 = [b, d, a, c];
        rotation[v] = match (chained(&opt1), chained(&opt2)) {
            (true, false) => opt1.to_vec(),
            (false, true) => opt2.to_vec(),
            (false, false) => return Err(ValidationError::Transversality { vertex: v }),
            (true, true) => return Err(ValidationError::AmbiguousRotation { vertex: v }),
        };
        intersections.push(v);
    }

    // trace face boundaries: after arriving along h_in, continue along the
    // clockwise neighbour of h_in, which keeps the face on the left
    let mut position = vec![0usize; 2 * m];
    for rot in &rotation {
        for (i, &h) in rot.iter().enumerate() {
            position[h] = i;
        }
    }
    let mut done = vec![false; 2 * m];
    let mut cycles = vec![0usize; p];
    for start in 0..2 * m {
        if done[start] {
            continue;
        }
        let face = graph.half_left(start);
        let mut h = start;
        while !done[h] {
            done[h] = true;
            if graph.half_left(h) != face {
                return Err(ValidationError::FaceMismatch { first: face, second: graph.half_left(h) });
            }
            let h_in = h ^ 1;
            let rot = &rotation[graph.half_vertex(h_in)];
            h = rot[(position[h_in] + rot.len() - 1) % rot.len()];
        }
        cycles[face] += 1;
    }
    if let Some(f) = cycles.iter().position(|&c| c != 1) {
        return Err(ValidationError::FaceCoherence { face: f, cycles: cycles[f] });
    }

    Ok(CombinatorialLoop { graph, word, q, p, rotation, visits, intersections })
}

impl CombinatorialLoop {
    pub fn graph(&self) -> &PlanarGraph {
        &self.graph
    }

    pub fn word(&self) -> &[Step] {
        &self.word
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.q
    }

    pub fn face_count(&self) -> usize {
        self.p
    }

    /// Number of self-intersections.
    pub fn n_self(&self) -> usize {
        self.intersections.len()
    }

    pub fn base_vertex(&self) -> usize {
        self.word[0].tail(&self.graph)
    }

    /// Self-intersection vertices in increasing order.
    pub fn intersections(&self) -> &[usize] {
        &self.intersections
    }

    /// Half-edges at `v` in anticlockwise order.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    /// Word positions whose step leaves `v`.
    pub fn visits(&self, v: usize) -> &[usize] {
        &self.visits[v]
    }

    fn check_intersection(&self, v: usize) -> Result<()> {
        if self.intersections.binary_search(&v).is_err() {
            return Err(Error::Domain(alloc::format!("vertex {v} is not a self-intersection")));
        }
        Ok(())
    }

    /// Makeenko–Migdal vector at the self-intersection `v`: going anticlockwise
    /// from the corner between the two outgoing strands, faces get `+1, −1, +1, −1`.
    pub fn mm_vector(&self, v: usize) -> Result<MMVector> {
        self.check_intersection(v)?;
        let rot = &self.rotation[v];
        let outgoing = |h: usize| self.visits[v].iter().any(|&k| self.word[k].out_half() == h);
        let mut coefficients = vec![0i64; self.p];
        for i in 0..4 {
            let (h, g) = (rot[i], rot[(i + 1) % 4]);
            let same = outgoing(h) == outgoing(g);
            coefficients[self.graph.half_left(h)] += if same { 1 } else { -1 };
        }
        Ok(MMVector { vertex: v, coefficients })
    }

    /// The inverse loop: same graph, word read backwards.
    pub fn reversed(&self) -> CombinatorialLoop {
        let word: Vec<Step> = self.word.iter().rev().map(|s| s.reversed()).collect();
        validate(self.graph.clone(), word).expect("reversal preserves validity")
    }

    /// Mirror image: left and right faces exchanged on every edge.
    pub fn mirrored(&self) -> CombinatorialLoop {
        let g = PlanarGraph::new(
            self.graph.source.clone(),
            self.graph.target.clone(),
            self.graph.right.clone(),
            self.graph.left.clone(),
        );
        validate(g, self.word.clone()).expect("mirroring preserves validity")
    }

    /// Standard labelling: edges numbered in word order and oriented along
    /// the loop, vertices and faces numbered by first appearance along the
    /// word (base vertex first; left face before right face).
    pub fn canonical_with_relabelling(&self) -> (CombinatorialLoop, Relabelling) {
        let g = &self.graph;
        let m = g.edge_count();
        let mut edge = vec![0; m];
        let mut vertex = vec![usize::MAX; self.q];
        let mut face = vec![usize::MAX; self.p];
        let (mut nv, mut nf) = (0, 0);
        let assign = |map: &mut Vec<usize>, next: &mut usize, i: usize| {
            if map[i] == usize::MAX {
                map[i] = *next;
                *next += 1;
            }
        };
        assign(&mut vertex, &mut nv, self.base_vertex());
        let mut out = PlanarGraph::new(vec![0; m], vec![0; m], vec![0; m], vec![0; m]);
        for (k, st) in self.word.iter().enumerate() {
            edge[st.edge] = k;
            assign(&mut vertex, &mut nv, st.head(g));
            assign(&mut face, &mut nf, st.loop_left(g));
            assign(&mut face, &mut nf, st.loop_right(g));
        }
        for (k, st) in self.word.iter().enumerate() {
            out.source[k] = vertex[st.tail(g)];
            out.target[k] = vertex[st.head(g)];
            out.left[k] = face[st.loop_left(g)];
            out.right[k] = face[st.loop_right(g)];
        }
        let word = (0..m).map(|k| Step::new(k, true)).collect();
        let canon = validate(out, word).expect("relabelling preserves validity");
        (canon, Relabelling { edge, vertex, face })
    }

    pub fn canonical(&self) -> CombinatorialLoop {
        self.canonical_with_relabelling().0
    }

    pub fn is_canonical(&self) -> bool {
        self.word.iter().enumerate().all(|(k, s)| s.edge == k && s.forward) && self.canonical() == *self
    }

    /// Winding numbers of the loop on each face, normalised to 0 on `reference_face`.
    pub fn winding_numbers(&self, reference_face: usize) -> Result<Vec<i64>> {
        winding::winding_of_steps(&self.graph, &self.word, self.p, reference_face, None)
    }

    /// [`Self::winding_numbers`] with the dual breadth-first search visiting
    /// edges in the given order, so that different spanning trees can be compared.
    pub fn winding_numbers_with_order(&self, reference_face: usize, edge_order: &[usize]) -> Result<Vec<i64>> {
        winding::winding_of_steps(&self.graph, &self.word, self.p, reference_face, Some(edge_order))
    }
}

/// Face-area vector on the closed simplex `{a ≥ 0, Σa = T}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceAreaVector {
    areas: Vec<f64>,
    total: f64,
}

impl FaceAreaVector {
    pub fn new(areas: Vec<f64>) -> Result<Self> {
        if areas.is_empty() {
            return Err(Error::Domain("no face areas".into()));
        }
        if let Some(a) = areas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::Domain(alloc::format!("face area {a} is not a finite non-negative number")));
        }
        let total = areas.iter().sum();
        Ok(Self { areas, total })
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn is_interior(&self) -> bool {
        self.areas.iter().all(|&a| a > 0.0)
    }

    /// Sum the areas over the fibres of `face_map` (parent face → image face).
    pub fn push_forward(&self, face_map: &[usize]) -> FaceAreaVector {
        let p = face_map.iter().map(|&f| f + 1).max().unwrap_or(0);
        let mut areas = vec![0.0; p];
        for (i, &f) in face_map.iter().enumerate() {
            areas[f] += self.areas[i];
        }
        FaceAreaVector { areas, total: self.total }
    }

    /// Apply a face relabelling (old index → new index).
    pub fn permuted(&self, face: &[usize]) -> FaceAreaVector {
        self.push_forward(face)
    }

    pub fn dot(&self, v: &[i64]) -> f64 {
        self.areas.iter().zip(v).map(|(a, &n)| a * n as f64).sum()
    }
}

/// `μ_v` as integer coefficients over the faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MMVector {
    pub vertex: usize,
    pub coefficients: Vec<i64>,
}

impl MMVector {
    pub fn dot(&self, v: &[i64]) -> i64 {
        self.coefficients.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}
