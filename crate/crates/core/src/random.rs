//! Seeded random graph generators for property checks and the verify suites.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, Graph};

pub type GraphRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GraphRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random recursive tree: vertex `i` attaches to a uniform `j < i`.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Graph {
    Graph::new(n, tree_edges(rng, n)).expect("tree edges are valid")
}

fn tree_edges(rng: &mut impl Rng, n: usize) -> Vec<Edge> {
    (1..n).map(|i| (rng.random_range(0..i), i)).collect()
}

/// Connected graph: a random tree plus each remaining pair with probability `p`.
pub fn random_connected(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = tree_edges(rng, n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("edges are valid")
}

/// Connected non-bipartite graph on `n >= 3` vertices. A bipartite draw is
/// repaired by joining two vertices of the same colour class.
pub fn random_non_bipartite(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    assert!(n >= 3, "non-bipartite graphs need at least 3 vertices");
    let g = random_connected(rng, n, p);
    if !g.is_bipartite()[0] {
        return g;
    }
    let colour = two_colouring(&g);
    let class: Vec<usize> = {
        let zeros: Vec<usize> = (0..n).filter(|&v| colour[v] == 0).collect();
        if zeros.len() >= 2 {
            zeros
        } else {
            (0..n).filter(|&v| colour[v] == 1).collect()
        }
    };
    let pair: Vec<usize> = class.choose_multiple(rng, 2).copied().collect();
    g.with_edges([(pair[0], pair[1])]).expect("same-colour vertices are non-adjacent")
}

fn two_colouring(g: &Graph) -> Vec<u8> {
    let mut colour = vec![u8::MAX; g.n()];
    let mut stack = vec![0];
    colour[0] = 0;
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if colour[y] == u8::MAX {
                colour[y] = 1 - colour[x];
                stack.push(y);
            }
        }
    }
    colour
}
