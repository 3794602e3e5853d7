//! Effective resistance as the minimum energy of a unit `uv`-flow.
//!
//! The minimiser of `||f||^2` subject to `B f = 1_u - 1_v` (with `B` the
//! boundary matrix) is any feasible flow with its cycle-space component
//! removed. We route a unit flow along a BFS spanning tree and project it
//! onto the orthogonal complement of the span of the fundamental cycles.
//! No Laplacian is formed on this path.

use std::collections::VecDeque;

use crate::error::Result;
use crate::graph::{ordered, Graph};
use crate::linalg::{dot, SymMatrix};
use crate::scalar::Scalar;
use crate::spectral::check_pair;

/// Least-norm unit flow from `u` to `v`, one value per edge of `g` in
/// [`Graph::edges`] order. Positive values flow from the lower to the
/// higher endpoint.
pub fn min_energy_flow<T: Scalar>(g: &Graph, u: usize, v: usize) -> Result<Vec<T>> {
    check_pair(g, u, v)?;
    let m = g.m();
    let edges = g.edges();
    let edge_index = |a: usize, b: usize| edges.binary_search(&ordered(a, b)).expect("edge exists");

    // BFS tree of u's component
    let mut parent = vec![usize::MAX; g.n()];
    let mut depth = vec![0usize; g.n()];
    let mut in_tree = vec![false; m];
    parent[u] = u;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                depth[y] = depth[x] + 1;
                in_tree[edge_index(x, y)] = true;
                queue.push_back(y);
            }
        }
    }

    // adds `amount` of flow travelling a -> b along the tree path
    let route = |f: &mut [T], a: usize, b: usize, amount: T| {
        let (mut a, mut b) = (a, b);
        let mut tail_steps = Vec::new();
        while a != b {
            if depth[a] >= depth[b] {
                push_step(f, &edge_index, a, parent[a], amount);
                a = parent[a];
            } else {
                tail_steps.push((parent[b], b));
                b = parent[b];
            }
        }
        for (x, y) in tail_steps {
            push_step(f, &edge_index, x, y, amount);
        }
    };

    let mut flow = vec![T::zero(); m];
    if u == v {
        return Ok(flow);
    }
    route(&mut flow, u, v, T::one());

    let comp = g.component_of(u);
    let cycles: Vec<Vec<T>> = edges
        .iter()
        .enumerate()
        .filter(|&(e, &(a, _))| !in_tree[e] && g.component_of(a) == comp)
        .map(|(e, &(a, b))| {
            let mut c = vec![T::zero(); m];
            c[e] = T::one();
            route(&mut c, b, a, T::one());
            c
        })
        .collect();
    if cycles.is_empty() {
        return Ok(flow);
    }

    // f <- f - C (C^T C)^-1 C^T f
    let k = cycles.len();
    let gram = SymMatrix::from_upper(k, |i, j| dot(&cycles[i], &cycles[j]));
    let rhs: Vec<T> = cycles.iter().map(|c| dot(c, &flow)).collect();
    let coeff = gram.cholesky()?.solve(&rhs);
    for (c, &y) in cycles.iter().zip(&coeff) {
        for (fe, &ce) in flow.iter_mut().zip(c) {
            *fe = *fe - y * ce;
        }
    }
    Ok(flow)
}

fn push_step<T: Scalar>(f: &mut [T], edge_index: &impl Fn(usize, usize) -> usize, from: usize, to: usize, amount: T) {
    let e = edge_index(from, to);
    if from < to {
        f[e] = f[e] + amount;
    } else {
        f[e] = f[e] - amount;
    }
}

/// `R_uv` as the energy of the minimum-energy unit flow.
pub fn effective_resistance_flow<T: Scalar>(g: &Graph, u: usize, v: usize) -> Result<T> {
    let f = min_energy_flow::<T>(g, u, v)?;
    Ok(f.iter().map(|&x| x * x).sum())
}
