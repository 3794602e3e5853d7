//! Incrementally maintained `M = (L + J/n_c)^-1` and `N = M^2` per
//! component, so that scoring a candidate edge and inserting it are both
//! `O(n_c^2)` instead of a fresh `O(n^3)` inversion.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{ordered, Edge, Graph};
use crate::linalg::SymMatrix;
use crate::scalar::Scalar;
use crate::spectral::connected_regularized_inverse;

/// Relative margin within which two deltas count as tied; ties go to the
/// lexicographically smaller pair.
pub const TIE_RELATIVE: f64 = 1e-10;

/// Scores of one candidate pair under the current graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore<T> {
    pub u: usize,
    pub v: usize,
    /// Effective resistance `R_uv`.
    pub resistance: T,
    /// Squared biharmonic distance `B^2_uv`.
    pub biharmonic_sq: T,
    /// Exact drop in total resistance if `{u, v}` is added,
    /// `n_c B^2 / (1 + R)`.
    pub delta: T,
}

#[derive(Debug, Clone)]
struct Block<T> {
    vertices: Vec<usize>,
    m: SymMatrix<T>,
    n: SymMatrix<T>,
}

/// Mutable resistance cache over a graph that only ever gains edges inside
/// existing components.
#[derive(Debug, Clone)]
pub struct ResistanceState<T> {
    original: Graph,
    component: Vec<usize>,
    local: Vec<usize>,
    blocks: Vec<Block<T>>,
    edges: HashSet<Edge>,
    added: Vec<PairScore<T>>,
    rtot: T,
    refresh_every: Option<usize>,
    since_refresh: usize,
}

impl<T: Scalar> ResistanceState<T> {
    pub fn init(g: &Graph) -> Result<Self> {
        let mut local = vec![0; g.n()];
        for comp in g.components() {
            for (i, &v) in comp.iter().enumerate() {
                local[v] = i;
            }
        }
        let mut state = Self {
            original: g.clone(),
            component: g.component_ids().to_vec(),
            local,
            blocks: Vec::new(),
            edges: g.edges().iter().copied().collect(),
            added: Vec::new(),
            rtot: T::zero(),
            refresh_every: None,
            since_refresh: 0,
        };
        state.rebuild()?;
        Ok(state)
    }

    /// Recomputes every block from the current graph.
    pub fn refresh(&mut self) -> Result<()> {
        self.rebuild()?;
        self.since_refresh = 0;
        Ok(())
    }

    /// Recompute from scratch after every `k` insertions (`None` disables).
    pub fn set_refresh_interval(&mut self, k: Option<usize>) {
        self.refresh_every = k.filter(|&k| k > 0);
    }

    fn rebuild(&mut self) -> Result<()> {
        let current = self.graph();
        let mut blocks = Vec::with_capacity(current.component_count());
        let mut rtot = T::zero();
        for c in 0..current.component_count() {
            let (sub, vertices) = current.component_subgraph(c);
            let m = connected_regularized_inverse::<T>(&sub)?;
            let n = m.sym_product(&m);
            let nc = T::from_usize_lossy(vertices.len());
            rtot = rtot + nc * m.trace() - nc;
            blocks.push(Block { vertices, m, n });
        }
        self.blocks = blocks;
        self.rtot = rtot;
        Ok(())
    }

    /// Current total resistance (sum over same-component pairs).
    pub fn rtot(&self) -> T {
        self.rtot
    }

    pub fn original(&self) -> &Graph {
        &self.original
    }

    /// Edges inserted so far, in order, with the scores they had when chosen.
    pub fn added(&self) -> &[PairScore<T>] {
        &self.added
    }

    /// The original graph plus every added edge.
    pub fn graph(&self) -> Graph {
        self.original.with_edges(self.added.iter().map(|s| (s.u, s.v))).expect("added edges are valid")
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&ordered(u, v))
    }

    pub fn component_count(&self) -> usize {
        self.blocks.len()
    }

    /// Vertices of component `c` with its `M` and `N` blocks.
    pub fn block(&self, c: usize) -> (&[usize], &SymMatrix<T>, &SymMatrix<T>) {
        let b = &self.blocks[c];
        (&b.vertices, &b.m, &b.n)
    }

    fn validate(&self, u: usize, v: usize) -> Result<()> {
        self.original.check_vertex(u)?;
        self.original.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidPair { u, v, reason: "endpoints coincide" });
        }
        if self.component[u] != self.component[v] {
            return Err(Error::DifferentComponents { u, v });
        }
        if self.has_edge(u, v) {
            let (u, v) = ordered(u, v);
            return Err(Error::ExistingEdge { u, v });
        }
        Ok(())
    }

    fn score_unchecked(&self, u: usize, v: usize) -> PairScore<T> {
        let b = &self.blocks[self.component[u]];
        let (a, c) = (self.local[u], self.local[v]);
        let resistance = b.m.get(a, a) + b.m.get(c, c) - (b.m.get(a, c) + b.m.get(a, c));
        let biharmonic_sq = b.n.get(a, a) + b.n.get(c, c) - (b.n.get(a, c) + b.n.get(a, c));
        let nc = T::from_usize_lossy(b.vertices.len());
        let (u, v) = ordered(u, v);
        PairScore { u, v, resistance, biharmonic_sq, delta: nc * biharmonic_sq / (T::one() + resistance) }
    }

    /// Scores of a candidate non-edge.
    pub fn pair_scores(&self, u: usize, v: usize) -> Result<PairScore<T>> {
        self.validate(u, v)?;
        Ok(self.score_unchecked(u, v))
    }

    /// One row per same-component non-edge, ordered by `(u, v)`.
    pub fn all_pair_scores(&self) -> Vec<PairScore<T>> {
        let mut out = Vec::new();
        self.for_each_candidate(|s| out.push(s));
        out
    }

    fn for_each_candidate(&self, mut f: impl FnMut(PairScore<T>)) {
        let n = self.original.n();
        for u in 0..n {
            for v in u + 1..n {
                if self.component[u] == self.component[v] && !self.edges.contains(&(u, v)) {
                    f(self.score_unchecked(u, v));
                }
            }
        }
    }

    /// Candidate with the largest delta; near-ties (see [`TIE_RELATIVE`])
    /// resolve to the lexicographically smallest `(u, v)`.
    pub fn best_candidate(&self) -> Option<PairScore<T>> {
        let tie = T::one() + T::lit(TIE_RELATIVE);
        let mut best: Option<PairScore<T>> = None;
        self.for_each_candidate(|s| match best {
            Some(b) if s.delta <= b.delta * tie => {}
            _ => best = Some(s),
        });
        best
    }

    /// Inserts `{u, v}` by a rank-one update of `M` and a rank-two update of
    /// `N`, and returns the pair's scores from before the insertion.
    pub fn apply_edge(&mut self, u: usize, v: usize) -> Result<PairScore<T>> {
        self.validate(u, v)?;
        let score = self.score_unchecked(u, v);
        let c = self.component[u];
        let (a, b) = (self.local[u], self.local[v]);
        let block = &mut self.blocks[c];
        let size = block.vertices.len();

        // w = M e, Mw = N e with e = 1_a - 1_b, all against the old blocks
        let w: Vec<T> = (0..size).map(|i| block.m.get(i, a) - block.m.get(i, b)).collect();
        let mw: Vec<T> = (0..size).map(|i| block.n.get(i, a) - block.n.get(i, b)).collect();
        let scale = T::one() / (T::one() + score.resistance);
        let wtw: T = w.iter().map(|&x| x * x).sum();

        // (M - s ww^T)^2 = N - s (w (Mw)^T + (Mw) w^T) + s^2 (w^T w) ww^T
        block.m.add_outer(-scale, &w);
        block.n.add_sym_outer(-scale, &w, &mw);
        block.n.add_outer(scale * scale * wtw, &w);

        self.rtot = self.rtot - score.delta;
        self.edges.insert((score.u, score.v));
        self.added.push(score);
        self.since_refresh += 1;
        if let Some(k) = self.refresh_every {
            if self.since_refresh >= k {
                self.refresh()?;
            }
        }
        Ok(score)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::total_resistance;

    #[test]
    fn init_examples() {
        let p5 = ResistanceState::<f64>::init(&Graph::path(5)).unwrap();
        assert!((p5.rtot() - 20.0).abs() < 1e-12);

        let k2 = ResistanceState::<f64>::init(&Graph::complete(2)).unwrap();
        let (_, m, _) = k2.block(0);
        assert!((m.get(0, 0) - 0.75).abs() < 1e-15 && (m.get(0, 1) - 0.25).abs() < 1e-15);
        assert!((k2.rtot() - 1.0).abs() < 1e-15);

        let two = ResistanceState::<f64>::init(&Graph::new(4, [(0, 1), (2, 3)]).unwrap()).unwrap();
        assert!((two.rtot() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn p5_end_edge_delta_matches_recompute() {
        let g = Graph::path(5);
        let mut s = ResistanceState::<f64>::init(&g).unwrap();
        let score = s.pair_scores(0, 4).unwrap();
        let after = total_resistance::<f64>(&g.with_edges([(0, 4)]).unwrap()).unwrap();
        assert!((score.delta - (20.0 - after)).abs() < 1e-8);
        s.apply_edge(4, 0).unwrap();
        assert!((s.rtot() - after).abs() < 1e-8);
        let fresh = ResistanceState::<f64>::init(&s.graph()).unwrap();
        assert!(s.block(0).1.max_abs_diff(fresh.block(0).1) < 1e-12);
        assert!(s.block(0).2.max_abs_diff(fresh.block(0).2) < 1e-11);
    }

    #[test]
    fn invalid_pairs() {
        let g = Graph::new(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let mut s = ResistanceState::<f64>::init(&g).unwrap();
        assert!(matches!(s.pair_scores(1, 1), Err(Error::InvalidPair { .. })));
        assert_eq!(s.pair_scores(2, 1), Err(Error::ExistingEdge { u: 1, v: 2 }));
        assert_eq!(s.apply_edge(0, 3), Err(Error::DifferentComponents { u: 0, v: 3 }));
        assert!(s.pair_scores(0, 9).is_err());
        s.apply_edge(0, 2).unwrap();
        assert!(matches!(s.apply_edge(2, 0), Err(Error::ExistingEdge { .. })));
    }

    #[test]
    fn candidate_tables() {
        let k2 = ResistanceState::<f64>::init(&Graph::complete(2)).unwrap();
        assert!(k2.all_pair_scores().is_empty());
        assert!(k2.best_candidate().is_none());

        let p3 = ResistanceState::<f64>::init(&Graph::path(3)).unwrap();
        let rows = p3.all_pair_scores();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].u, rows[0].v), (0, 2));
        assert_eq!(rows[0], p3.pair_scores(2, 0).unwrap());
    }

    #[test]
    fn best_candidate_prefers_lexicographic_ties() {
        // after (0,4) on P5, (0,2) and (2,4) tie by symmetry
        let mut s = ResistanceState::<f64>::init(&Graph::path(5)).unwrap();
        let first = s.best_candidate().unwrap();
        assert_eq!((first.u, first.v), (0, 4));
        s.apply_edge(0, 4).unwrap();
        let second = s.best_candidate().unwrap();
        assert_eq!((second.u, second.v), (0, 2));
    }

    #[test]
    fn refresh_interval_rebuilds() {
        let mut s = ResistanceState::<f64>::init(&Graph::path(8)).unwrap();
        s.set_refresh_interval(Some(2));
        for (u, v) in [(0, 7), (2, 5), (1, 6)] {
            s.apply_edge(u, v).unwrap();
        }
        let fresh = ResistanceState::<f64>::init(&s.graph()).unwrap();
        assert!((s.rtot() - fresh.rtot()).abs() < 1e-10);
        assert_eq!(s.added().len(), 3);
    }

    #[test]
    fn single_precision_state() {
        let mut s = ResistanceState::<f32>::init(&Graph::path(5)).unwrap();
        assert!((s.rtot() - 20.0).abs() < 1e-3);
        s.apply_edge(0, 4).unwrap();
        assert!((s.rtot() - 10.0).abs() < 1e-3);
    }
}
