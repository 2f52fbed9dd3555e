use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::winding::winding_of_steps;
use super::{validate, CombinatorialLoop, PlanarGraph, Step};
use crate::{Error, Result};

/// The two loops obtained by following each outgoing strand at a
/// self-intersection until it first returns.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub vertex: usize,
    /// Canonically labelled sub-loops; the first starts with the strand leaving at the earlier word position.
    pub sub_loops: [CombinatorialLoop; 2],
    /// Parent face → sub-loop face.
    pub face_maps: [Vec<usize>; 2],
    /// Parent word positions covered by each sub-loop.
    pub positions: [Vec<usize>; 2],
}

/// Simple loops of a splittable loop, in terms of the parent's edges and faces.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittableTree {
    pub distinguished_face: usize,
    /// Parent word positions of each simple loop `s_j`, ordered by first position.
    pub simple_loops: Vec<Vec<usize>>,
    /// `n_{s_j}` over the parent faces, zero on the distinguished face.
    pub windings: Vec<Vec<i64>>,
    /// Value of `n_{s_j}` on the side away from the distinguished face.
    pub sigma: Vec<i64>,
    /// Orientation of `s_j` around the distinguished face, `−σ_j`.
    pub eps: Vec<i64>,
    /// Tree edges `(j, j', vertex)` with `j < j'`.
    pub adjacency: Vec<(usize, usize, usize)>,
    /// Breadth-first order from a loop bounding the distinguished face.
    pub adapted_order: Vec<usize>,
    /// For each self-intersection: `(vertex, j(i,l), j(i,r))`, where `μ_i·n_{s_j}` is −1 for `j(i,l)` and +1 for `j(i,r)`.
    pub crossing_map: Vec<(usize, usize, usize)>,
}

impl CombinatorialLoop {
    fn tail_at(&self, k: usize) -> usize {
        self.word[k].tail(&self.graph)
    }

    /// Split at the self-intersection `v`.
    pub fn split(&self, v: usize) -> Result<SplitResult> {
        self.check_intersection(v)?;
        let len = self.word.len();
        let (k1, k2) = (self.visits[v][0], self.visits[v][1]);
        let first: Vec<usize> = (k1..k2).collect();
        let second: Vec<usize> = (k2..k1 + len).map(|k| k % len).collect();
        let (l0, f0) = self.sub_loop(&first)?;
        let (l1, f1) = self.sub_loop(&second)?;
        Ok(SplitResult { vertex: v, sub_loops: [l0, l1], face_maps: [f0, f1], positions: [first, second] })
    }

    /// Keep the edges at `positions` (a closed sub-path), smooth the vertices
    /// it passes only once, and merge parent faces across the dropped edges.
    fn sub_loop(&self, positions: &[usize]) -> Result<(CombinatorialLoop, Vec<usize>)> {
        let g = &self.graph;
        let steps: Vec<Step> = positions.iter().map(|&k| self.word[k]).collect();
        let mut count = vec![0usize; self.q];
        for s in &steps {
            count[s.tail(g)] += 1;
        }
        let base = steps[0].tail(g);
        let kept = |u: usize| u == base || count[u] == 2;

        let mut parent = (0..self.p).collect::<Vec<_>>();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut used = vec![false; g.edge_count()];
        for s in &steps {
            used[s.edge] = true;
        }
        for e in 0..g.edge_count() {
            if !used[e] {
                let (a, b) = (find(&mut parent, g.left[e]), find(&mut parent, g.right[e]));
                parent[a] = b;
            }
        }

        let mut vertex_id = vec![usize::MAX; self.q];
        let mut class_id = vec![usize::MAX; self.p];
        let (mut nv, mut nf) = (0, 0);
        let mut out = PlanarGraph::new(Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for s in &steps {
            let u = s.tail(g);
            if kept(u) {
                if vertex_id[u] == usize::MAX {
                    vertex_id[u] = nv;
                    nv += 1;
                }
                for x in [s.loop_left(g), s.loop_right(g)] {
                    let c = find(&mut parent, x);
                    if class_id[c] == usize::MAX {
                        class_id[c] = nf;
                        nf += 1;
                    }
                }
                out.source.push(vertex_id[u]);
                out.left.push(class_id[find(&mut parent, s.loop_left(g))]);
                out.right.push(class_id[find(&mut parent, s.loop_right(g))]);
            }
            let w = s.head(g);
            if kept(w) {
                if vertex_id[w] == usize::MAX {
                    vertex_id[w] = nv;
                    nv += 1;
                }
                out.target.push(vertex_id[w]);
            }
        }
        let mut face_map = vec![0; self.p];
        for (f, slot) in face_map.iter_mut().enumerate() {
            let c = class_id[find(&mut parent, f)];
            if c == usize::MAX {
                return Err(Error::Guard(alloc::format!("face {f} does not touch the sub-loop")));
            }
            *slot = c;
        }
        let word = (0..out.edge_count()).map(|k| Step::new(k, true)).collect();
        let sub = validate(out, word)?;
        let (canon, relabel) = sub.canonical_with_relabelling();
        for f in face_map.iter_mut() {
            *f = relabel.face[*f];
        }
        Ok((canon, face_map))
    }

    /// Split recursively at every self-intersection. Succeeds when at each
    /// split the two halves meet only at the split vertex; otherwise
    /// returns `Ok(None)`.
    pub fn splittable_tree(&self, distinguished_face: usize) -> Result<Option<SplittableTree>> {
        if distinguished_face >= self.p {
            return Err(Error::Domain(alloc::format!("face {distinguished_face} out of range")));
        }
        let mut pieces = Vec::new();
        if !self.decompose((0..self.word.len()).collect(), &mut pieces) {
            return Ok(None);
        }
        pieces.sort_by_key(|p| p.iter().copied().min());
        let nloops = pieces.len();

        let g = &self.graph;
        let mut windings = Vec::with_capacity(nloops);
        let mut sigma = Vec::with_capacity(nloops);
        for piece in &pieces {
            let steps: Vec<Step> = piece.iter().map(|&k| self.word[k]).collect();
            let n = winding_of_steps(g, &steps, self.p, distinguished_face, None)?;
            let s = n.iter().copied().find(|&x| x != 0).unwrap_or(0);
            if s.abs() != 1 || n.iter().any(|&x| x != 0 && x != s) {
                return Err(Error::Guard("sub-loop is not simple".into()));
            }
            windings.push(n);
            sigma.push(s);
        }
        let eps = sigma.iter().map(|s| -s).collect();

        let owner = |v: usize| -> Vec<usize> {
            (0..nloops).filter(|&j| pieces[j].iter().any(|&k| self.tail_at(k) == v)).collect()
        };
        let mut adjacency = Vec::new();
        let mut crossing_map = Vec::new();
        for &v in &self.intersections {
            let js = owner(v);
            if js.len() != 2 {
                return Err(Error::Guard(alloc::format!("vertex {v} lies on {} simple loops", js.len())));
            }
            adjacency.push((js[0], js[1], v));
            let mu = self.mm_vector(v)?;
            let d0 = mu.dot(&windings[js[0]]);
            let d1 = mu.dot(&windings[js[1]]);
            match (d0, d1) {
                (-1, 1) => crossing_map.push((v, js[0], js[1])),
                (1, -1) => crossing_map.push((v, js[1], js[0])),
                _ => return Err(Error::Guard(alloc::format!("crossing at {v} pairs to ({d0}, {d1})"))),
            }
        }

        let root = (0..nloops)
            .find(|&j| pieces[j].iter().any(|&k| {
                let s = self.word[k];
                s.loop_left(g) == distinguished_face || s.loop_right(g) == distinguished_face
            }))
            .ok_or_else(|| Error::Guard("no simple loop bounds the distinguished face".into()))?;
        let mut adapted_order = Vec::with_capacity(nloops);
        let mut seen = vec![false; nloops];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(j) = queue.pop_front() {
            adapted_order.push(j);
            let mut next: Vec<usize> = adjacency
                .iter()
                .filter_map(|&(a, b, _)| if a == j { Some(b) } else if b == j { Some(a) } else { None })
                .filter(|&x| !seen[x])
                .collect();
            next.sort_unstable();
            for x in next {
                seen[x] = true;
                queue.push_back(x);
            }
        }
        if adapted_order.len() != nloops {
            return Err(Error::Guard("simple loops do not form a tree".into()));
        }
        Ok(Some(SplittableTree {
            distinguished_face,
            simple_loops: pieces,
            windings,
            sigma,
            eps,
            adjacency,
            adapted_order,
            crossing_map,
        }))
    }

    fn decompose(&self, piece: Vec<usize>, out: &mut Vec<Vec<usize>>) -> bool {
        let mut count = vec![0usize; self.q];
        for &k in &piece {
            count[self.tail_at(k)] += 1;
        }
        let Some(v) = count.iter().position(|&c| c >= 2) else {
            out.push(piece);
            return true;
        };
        let at: Vec<usize> = (0..piece.len()).filter(|&i| self.tail_at(piece[i]) == v).collect();
        let a: Vec<usize> = piece[at[0]..at[1]].to_vec();
        let b: Vec<usize> = piece[at[1]..].iter().chain(&piece[..at[0]]).copied().collect();
        let mut on_a = vec![false; self.q];
        for &k in &a {
            on_a[self.tail_at(k)] = true;
        }
        if b.iter().any(|&k| self.tail_at(k) != v && on_a[self.tail_at(k)]) {
            return false;
        }
        self.decompose(a, out) && self.decompose(b, out)
    }
}
