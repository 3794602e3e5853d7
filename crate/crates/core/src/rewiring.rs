//! Greedy Total Resistance (GTR) rewiring, a random-edge baseline, an
//! exhaustive optimal-set search for small instances, and resistance curves.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::random::rng;
use crate::scalar::Scalar;
use crate::spectral::total_resistance;
use crate::state::{PairScore, ResistanceState};

/// Default cap on the number of edge sets [`brute_force_optimal`] will try.
pub const DEFAULT_SEARCH_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gtr,
    Random,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Gtr => "gtr",
            Method::Random => "random",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gtr" => Ok(Method::Gtr),
            "random" => Ok(Method::Random),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Ordered edge insertions and the resulting total-resistance trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RewirePlan<T> {
    pub method: Method,
    /// Number of edges requested.
    pub requested: usize,
    pub seed: Option<u64>,
    /// Scores of each inserted pair, taken just before its insertion.
    pub added: Vec<PairScore<T>>,
    /// `R_tot` before any insertion and after each one (`added.len() + 1` values).
    pub rtot_trajectory: Vec<T>,
}

impl<T: Scalar> RewirePlan<T> {
    pub fn rtot_initial(&self) -> T {
        self.rtot_trajectory[0]
    }

    pub fn rtot_final(&self) -> T {
        *self.rtot_trajectory.last().expect("trajectory is never empty")
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.added.iter().map(|s| (s.u, s.v)).collect()
    }

    /// True when the graph ran out of candidates before `requested` edges.
    pub fn truncated(&self) -> bool {
        self.added.len() < self.requested
    }
}

fn drive<T: Scalar>(
    g: &Graph,
    k: usize,
    method: Method,
    seed: Option<u64>,
    mut choose: impl FnMut(&ResistanceState<T>) -> Option<Edge>,
) -> Result<RewirePlan<T>> {
    let mut state = ResistanceState::<T>::init(g)?;
    let mut trajectory = Vec::with_capacity(k + 1);
    trajectory.push(state.rtot());
    for step in 0..k {
        let Some((u, v)) = choose(&state) else {
            log::warn!("no candidate non-edges left after {step} of {k} insertions; plan truncated");
            break;
        };
        state.apply_edge(u, v)?;
        trajectory.push(state.rtot());
    }
    Ok(RewirePlan { method, requested: k, seed, added: state.added().to_vec(), rtot_trajectory: trajectory })
}

/// Greedily adds `k` edges, each maximising `n_c B^2 / (1 + R)` over all
/// same-component non-edges of the current graph.
pub fn gtr<T: Scalar>(g: &Graph, k: usize) -> Result<RewirePlan<T>> {
    drive(g, k, Method::Gtr, None, |s| s.best_candidate().map(|b| (b.u, b.v)))
}

/// Adds `k` uniformly random same-component non-edges, one at a time.
pub fn random_baseline<T: Scalar>(g: &Graph, k: usize, seed: u64) -> Result<RewirePlan<T>> {
    let mut rng = rng(seed);
    drive(g, k, Method::Random, Some(seed), |s| {
        let candidates: Vec<Edge> = s.all_pair_scores().iter().map(|p| (p.u, p.v)).collect();
        if candidates.is_empty() {
            None
        } else {
            Some(candidates[rng.random_range(0..candidates.len())])
        }
    })
}

pub fn rewire<T: Scalar>(g: &Graph, k: usize, method: Method, seed: u64) -> Result<RewirePlan<T>> {
    match method {
        Method::Gtr => gtr(g, k),
        Method::Random => random_baseline(g, k, seed),
    }
}

/// Best `k`-edge augmentation found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSet<T> {
    pub edges: Vec<Edge>,
    pub rtot: T,
}

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn brute_force_optimal<T: Scalar>(g: &Graph, k: usize) -> Result<OptimalSet<T>> {
    brute_force_optimal_with_cap(g, k, DEFAULT_SEARCH_CAP)
}

/// Tries every `k`-subset of same-component non-edges, recomputing `R_tot`
/// from scratch for each; the first subset in lexicographic order wins ties.
pub fn brute_force_optimal_with_cap<T: Scalar>(g: &Graph, k: usize, cap: u128) -> Result<OptimalSet<T>> {
    let candidates = g.candidate_non_edges();
    let needed = binomial(candidates.len(), k);
    if needed > cap {
        return Err(Error::SearchTooLarge { needed, cap });
    }
    if k > candidates.len() {
        return Err(Error::InvalidParameter(format!("cannot add {k} edges, only {} candidates", candidates.len())));
    }
    let tie = T::one() - T::lit(crate::state::TIE_RELATIVE);
    let mut best: Option<OptimalSet<T>> = None;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let chosen: Vec<Edge> = idx.iter().map(|&i| candidates[i]).collect();
        let rtot = total_resistance::<T>(&g.with_edges(chosen.iter().copied())?)?;
        if best.as_ref().is_none_or(|b| rtot < b.rtot * tie) {
            best = Some(OptimalSet { edges: chosen, rtot });
        }
        if !next_combination(&mut idx, candidates.len()) {
            break;
        }
    }
    Ok(best.expect("at least one subset"))
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// How the total-resistance drop of `edge` changes once `added` is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaChange<T> {
    pub added: Edge,
    pub edge: Edge,
    pub delta_before: T,
    pub delta_after: T,
}

impl<T: Scalar> DeltaChange<T> {
    pub fn increase(&self) -> T {
        self.delta_after - self.delta_before
    }
}

/// For every candidate `e != f`, its delta in `g` and in `g + f`.
pub fn delta_changes<T: Scalar>(g: &Graph, f: Edge) -> Result<Vec<DeltaChange<T>>> {
    let before = ResistanceState::<T>::init(g)?;
    let mut after = before.clone();
    after.apply_edge(f.0, f.1)?;
    let added = (f.0.min(f.1), f.0.max(f.1));
    Ok(before
        .all_pair_scores()
        .into_iter()
        .filter(|s| (s.u, s.v) != added)
        .map(|s| DeltaChange {
            added,
            edge: (s.u, s.v),
            delta_before: s.delta,
            delta_after: after.pair_scores(s.u, s.v).expect("still a candidate").delta,
        })
        .collect())
}

fn largest_increase<T: Scalar>(changes: impl IntoIterator<Item = DeltaChange<T>>) -> Option<DeltaChange<T>> {
    changes.into_iter().filter(|c| c.delta_after > c.delta_before).fold(None, |best: Option<DeltaChange<T>>, c| {
        match best {
            Some(b) if c.increase() <= b.increase() => Some(b),
            _ => Some(c),
        }
    })
}

/// Edge whose delta grows the most after adding `f`, if any grows at all.
pub fn nonmonotonicity_witness_for<T: Scalar>(g: &Graph, f: Edge) -> Result<Option<DeltaChange<T>>> {
    Ok(largest_increase(delta_changes::<T>(g, f)?))
}

/// Exhaustive scan over all ordered candidate pairs `(f, e)`; returns the
/// pair with the largest strict increase of `e`'s delta after adding `f`.
pub fn nonmonotonicity_witness<T: Scalar>(g: &Graph) -> Result<Option<DeltaChange<T>>> {
    let mut all = Vec::new();
    for f in g.candidate_non_edges() {
        all.extend(delta_changes::<T>(g, f)?);
    }
    Ok(largest_increase(all))
}

/// `(edges_added, rtot)` rows of a rewiring run.
pub fn resistance_curve<T: Scalar>(g: &Graph, k: usize, method: Method, seed: u64) -> Result<Vec<(usize, T)>> {
    let plan = rewire::<T>(g, k, method, seed)?;
    Ok(plan.rtot_trajectory.into_iter().enumerate().collect())
}

/// Pointwise mean of several curves: `(edges_added, mean_rtot, graph_count)`,
/// where each step averages over the curves long enough to reach it.
pub fn mean_curve<T: Scalar>(curves: &[Vec<(usize, T)>]) -> Vec<(usize, T, usize)> {
    let len = curves.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let vals: Vec<T> = curves.iter().filter_map(|c| c.get(i).map(|&(_, r)| r)).collect();
            let count = vals.len();
            let mean = vals.into_iter().sum::<T>() / T::from_usize_lossy(count);
            (i, mean, count)
        })
        .collect()
}
