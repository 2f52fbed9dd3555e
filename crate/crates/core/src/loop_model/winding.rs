use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{PlanarGraph, Step};
use crate::{Error, Result};

/// Winding numbers over the faces of `g` of the closed path `steps`
/// (a subset of the edges), by breadth-first search on the dual graph.
/// Crossing a traversed edge from the path's right to its left adds 1.
pub(crate) fn winding_of_steps(
    g: &PlanarGraph,
    steps: &[Step],
    p: usize,
    reference: usize,
    order: Option<&[usize]>,
) -> Result<Vec<i64>> {
    if reference >= p {
        return Err(Error::Domain(alloc::format!("reference face {reference} out of range (p = {p})")));
    }
    let m = g.edge_count();
    let mut jump = vec![0i64; m];
    for s in steps {
        jump[s.edge] = s.sign();
    }
    let default: Vec<usize> = (0..m).collect();
    let order = order.unwrap_or(&default);
    let mut adjacent = vec![Vec::new(); p];
    for &e in order {
        adjacent[g.right[e]].push(e);
        adjacent[g.left[e]].push(e);
    }
    let mut n = vec![i64::MIN; p];
    n[reference] = 0;
    let mut queue = VecDeque::from([reference]);
    while let Some(f) = queue.pop_front() {
        for &e in &adjacent[f] {
            let (other, value) = if g.right[e] == f {
                (g.left[e], n[f] + jump[e])
            } else {
                (g.right[e], n[f] - jump[e])
            };
            if n[other] == i64::MIN {
                n[other] = value;
                queue.push_back(other);
            } else if n[other] != value {
                return Err(Error::Domain(alloc::format!("winding number on face {other} is not well defined")));
            }
        }
    }
    if let Some(f) = n.iter().position(|&v| v == i64::MIN) {
        return Err(Error::Domain(alloc::format!("face {f} is not reachable in the dual graph")));
    }
    Ok(n)
}
