//! Loop constructors: fixed examples, the maximally winding family, and
//! loops read off closed polylines in the plane.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;
use rand::{Rng, RngExt};

use super::{validate, CombinatorialLoop, PlanarGraph, Step};
use crate::{Error, Result};

fn forward_word(m: usize) -> Vec<Step> {
    (0..m).map(|k| Step::new(k, true)).collect()
}

/// One edge from the base vertex to itself; face 0 is inside, face 1 outside.
pub fn simple_loop() -> CombinatorialLoop {
    let g = PlanarGraph::new(vec![0], vec![0], vec![0], vec![1]);
    validate(g, forward_word(1)).expect("simple loop")
}

/// Transverse figure-eight with lobes on opposite sides: face 0 is the
/// outside, face 1 the anticlockwise lobe through the base point, face 2
/// the clockwise lobe.
pub fn figure_eight() -> CombinatorialLoop {
    let g = PlanarGraph::new(vec![0, 1, 1], vec![1, 1, 0], vec![1, 0, 1], vec![0, 2, 0]);
    validate(g, forward_word(3)).expect("figure-eight")
}

/// The spiral `𝔩_n` winding `n` times, with its native labelling: vertices
/// `0..n`, spiral edges `0..n` (edge `j` runs from vertex `j` to `j + 1`,
/// the last one closes on vertex `n − 1`), return edges `n..2n−1` (edge
/// `n + j` runs back from vertex `j + 1` to `j`) and faces `0..=n` with
/// winding number equal to the face index.
pub fn maximally_winding(n: usize) -> Result<CombinatorialLoop> {
    if n == 0 {
        return Err(Error::Domain("maximally winding loop needs n >= 1".into()));
    }
    let m = 2 * n - 1;
    let mut g = PlanarGraph::new(vec![0; m], vec![0; m], vec![0; m], vec![0; m]);
    for j in 0..n - 1 {
        (g.source[j], g.target[j], g.left[j], g.right[j]) = (j, j + 1, j + 1, j);
        let e = n + j;
        (g.source[e], g.target[e], g.left[e], g.right[e]) = (j + 1, j, j + 1, j);
    }
    (g.source[n - 1], g.target[n - 1], g.left[n - 1], g.right[n - 1]) = (n - 1, n - 1, n, n - 1);
    let word = (0..n).chain((n..m).rev()).map(|e| Step::new(e, true)).collect();
    Ok(validate(g, word)?)
}

/// The three-crossing trefoil projection, whose splits always re-intersect.
pub fn trefoil_projection() -> CombinatorialLoop {
    let pts: Vec<[f64; 2]> = (0..360)
        .map(|i| {
            let t = TAU * (i as f64 + 0.5) / 360.0;
            [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos()]
        })
        .collect();
    loop_from_polyline(&pts).expect("trefoil polyline is generic")
}

struct Crossing {
    // positions along the curve, segment index + fraction
    at: [f64; 2],
    dir: [[f64; 2]; 2],
}

/// Read the loop traced by a closed polyline (the last point joins the
/// first). The base point is `points[0]`. The polyline must be generic:
/// only transverse double points, none at a vertex of the polyline.
pub fn loop_from_polyline(points: &[[f64; 2]]) -> Result<CombinatorialLoop> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Domain("polyline needs at least 3 points".into()));
    }
    let seg = |i: usize| {
        let (a, b) = (points[i], points[(i + 1) % n]);
        (a, [b[0] - a[0], b[1] - a[1]])
    };
    let cross = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
    let mut crossings = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let ((p, d), (q, e)) = (seg(i), seg(j));
            let den = cross(d, e);
            let w = [q[0] - p[0], q[1] - p[1]];
            let scale = (d[0].hypot(d[1])) * (e[0].hypot(e[1]));
            if den.abs() <= 1e-12 * scale {
                if cross(w, d).abs() <= 1e-12 * scale {
                    return Err(Error::Domain("polyline has overlapping segments".into()));
                }
                continue;
            }
            let t = cross(w, e) / den;
            let u = cross(w, d) / den;
            let margin = 1e-9;
            if t > -margin && t < 1.0 + margin && u > -margin && u < 1.0 + margin {
                if t < margin || t > 1.0 - margin || u < margin || u > 1.0 - margin {
                    return Err(Error::Domain("polyline crosses itself at a corner".into()));
                }
                crossings.push(Crossing { at: [i as f64 + t, j as f64 + u], dir: [d, e] });
            }
        }
    }

    // events along the curve: (position, crossing, which pass)
    let mut events: Vec<(f64, usize, usize)> = Vec::with_capacity(2 * crossings.len());
    for (c, x) in crossings.iter().enumerate() {
        events.push((x.at[0], c, 0));
        events.push((x.at[1], c, 1));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    if events.windows(2).any(|w| w[1].0 - w[0].0 < 1e-9) {
        return Err(Error::Domain("polyline has a triple point".into()));
    }

    let m = events.len() + 1;
    let mut vertex_of = vec![usize::MAX; crossings.len()];
    let mut next_vertex = 1;
    let mut g = PlanarGraph::new(vec![0; m], vec![0; m], vec![0; m], vec![0; m]);
    for (k, &(_, c, _)) in events.iter().enumerate() {
        if vertex_of[c] == usize::MAX {
            vertex_of[c] = next_vertex;
            next_vertex += 1;
        }
        g.target[k] = vertex_of[c];
        g.source[k + 1] = vertex_of[c];
    }
    let q = next_vertex;

    // outward direction of each half-edge, then rotations by angle
    let mut direction = vec![[0.0; 2]; 2 * m];
    direction[0] = seg(0).1;
    let last = seg(n - 1).1;
    direction[2 * (m - 1) + 1] = [-last[0], -last[1]];
    for (k, &(_, c, pass)) in events.iter().enumerate() {
        let d = crossings[c].dir[pass];
        direction[2 * k + 1] = [-d[0], -d[1]];
        direction[2 * (k + 1)] = d;
    }
    let mut rotation = vec![Vec::new(); q];
    for h in 0..2 * m {
        let v = if h % 2 == 0 { g.source[h / 2] } else { g.target[h / 2] };
        rotation[v].push(h);
    }
    let mut position = vec![0; 2 * m];
    for rot in rotation.iter_mut() {
        rot.sort_by(|&a, &b| {
            let ang = |h: usize| direction[h][1].atan2(direction[h][0]);
            ang(a).total_cmp(&ang(b))
        });
        for (i, &h) in rot.iter().enumerate() {
            position[h] = i;
        }
    }

    // trace faces: the face left of the dart leaving along h
    let mut face = vec![usize::MAX; 2 * m];
    let mut p = 0;
    for start in 0..2 * m {
        if face[start] != usize::MAX {
            continue;
        }
        let mut h = start;
        while face[h] == usize::MAX {
            face[h] = p;
            let h_in = h ^ 1;
            let v = if h_in % 2 == 0 { g.source[h_in / 2] } else { g.target[h_in / 2] };
            let rot = &rotation[v];
            h = rot[(position[h_in] + rot.len() - 1) % rot.len()];
        }
        p += 1;
    }
    for e in 0..m {
        g.left[e] = face[2 * e];
        g.right[e] = face[2 * e + 1];
    }
    Ok(validate(g, forward_word(m))?.canonical())
}

/// A random regular loop with at most `max_crossings` self-intersections,
/// drawn as a random trigonometric curve.
pub fn random_loop<R: Rng + ?Sized>(rng: &mut R, max_crossings: usize) -> CombinatorialLoop {
    const SAMPLES: usize = 256;
    loop {
        let harmonics = rng.random_range(1..=4usize);
        let mut coeff = Vec::new();
        for k in 1..=harmonics as i32 {
            for sign in [1, -1] {
                let scale = 1.0 / k as f64;
                let re = (2.0 * rng.random::<f64>() - 1.0) * scale;
                let im = (2.0 * rng.random::<f64>() - 1.0) * scale;
                coeff.push((sign * k, re, im));
            }
        }
        let phase = rng.random::<f64>();
        let pts: Vec<[f64; 2]> = (0..SAMPLES)
            .map(|i| {
                let t = TAU * (i as f64 + phase) / SAMPLES as f64;
                coeff.iter().fold([0.0, 0.0], |acc, &(k, re, im)| {
                    let (s, c) = (k as f64 * t).sin_cos();
                    [acc[0] + re * c - im * s, acc[1] + re * s + im * c]
                })
            })
            .collect();
        if let Ok(l) = loop_from_polyline(&pts) {
            if l.n_self() <= max_crossings {
                return l;
            }
        }
    }
}
