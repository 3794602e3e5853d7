//! Acceptance suite. One test per criterion; each prints a single
//! `[PASS]` / `[FAIL]` line with the worst observed deviation.
//!
//! Reference values come from oracles in this file that do not share code
//! with the paths they check: dense pseudoinverses and eigenvalues from
//! `nalgebra`, and from-scratch recomputation instead of incremental state.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use resist::random::{random_connected, random_non_bipartite, rng, GraphRng};
use resist::rewiring::delta_changes;
use resist::{
    brute_force_optimal, effective_resistance, effective_resistance_flow, effective_resistance_normalized, gtr,
    jacobian_bound_adjacency, jacobian_bound_resistance, random_baseline, resistance_series_truncated, rmax,
    spectral_gap, spectral_gap_jacobian_bound, total_jacobian_bound, total_resistance, BoundParams, Error, Graph,
    ResistanceState,
};

fn report(name: &str, ok: bool, detail: String, elapsed: Duration, limit: Duration) {
    let within = elapsed <= limit;
    println!(
        "[{}] {name}: {detail}; runtime {:.3}s (limit {:.0}s)",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    assert!(ok, "{name} failed: {detail}");
    assert!(within, "{name} exceeded its runtime limit: {elapsed:?} > {limit:?}");
}

fn laplacian_oracle(g: &Graph) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(g.n(), g.n());
    for &(u, v) in g.edges() {
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
    }
    l
}

/// `n * tr(L^+)` of a connected graph via nalgebra's symmetric eigensolver.
fn rtot_oracle(g: &Graph) -> f64 {
    let eig = SymmetricEigen::new(laplacian_oracle(g));
    let mut sigma: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    sigma.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g.n() as f64 * sigma[1..].iter().map(|s| 1.0 / s).sum::<f64>()
}

fn regularized_oracle(g: &Graph) -> DMatrix<f64> {
    let n = g.n() as f64;
    let shifted = laplacian_oracle(g).add_scalar(1.0 / n);
    shifted.try_inverse().expect("connected graph")
}

fn draw_connected(rng: &mut GraphRng, min_n: usize, max_n: usize) -> Graph {
    let n = rng.random_range(min_n..=max_n);
    let p = rng.random_range(0.05..0.5);
    random_connected(rng, n, p)
}

#[test]
fn p5_counterexample() {
    let start = Instant::now();
    let g = Graph::path(5);
    let plan = gtr::<f64>(&g, 2).unwrap();
    let opt = brute_force_optimal::<f64>(&g, 2).unwrap();
    let first = plan.edges()[0];
    let ok = first == (0, 4)
        && (plan.rtot_final() - 8.18).abs() <= 0.01
        && (opt.rtot - 7.67).abs() <= 0.01
        && opt.rtot < plan.rtot_final();
    report(
        "P5 counterexample",
        ok,
        format!(
            "GTR first edge {first:?}, final R_tot {:.6}; optimal {:?} R_tot {:.6}",
            plan.rtot_final(),
            opt.edges,
            opt.rtot
        ),
        start.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn total_resistance_change_is_exact() {
    let start = Instant::now();
    let mut rng = rng(41);
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < 200 {
        let g = draw_connected(&mut rng, 3, 30);
        let candidates = g.candidate_non_edges();
        if candidates.is_empty() {
            continue;
        }
        let (u, v) = candidates[rng.random_range(0..candidates.len())];
        let state = ResistanceState::<f64>::init(&g).unwrap();
        let score = state.pair_scores(u, v).unwrap();
        let n = g.n() as f64;
        let formula = n * score.biharmonic_sq / (1.0 + score.resistance);
        let before = rtot_oracle(&g);
        let after = rtot_oracle(&g.with_edges([(u, v)]).unwrap());
        worst = worst.max((formula - (before - after)).abs() / before);
        tested += 1;
    }
    report(
        "Delta R_tot exactness (200 graphs, n <= 30)",
        worst <= 1e-6,
        format!("max relative deviation {worst:.3e} (tol 1e-6)"),
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn trace_identity() {
    let start = Instant::now();
    let mut rng = rng(42);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let g = draw_connected(&mut rng, 2, 30);
        let lib = total_resistance::<f64>(&g).unwrap();
        let oracle = rtot_oracle(&g);
        worst = worst.max((lib - oracle).abs() / oracle);
    }
    report(
        "Trace identity (50 graphs, n <= 30)",
        worst <= 1e-7,
        format!("max relative deviation {worst:.3e} (tol 1e-7)"),
        start.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn triple_route_resistance() {
    let start = Instant::now();
    let mut rng = rng(43);
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for _ in 0..50 {
        let g = draw_connected(&mut rng, 2, 15);
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                let r = effective_resistance::<f64>(&g, u, v).unwrap();
                let rn = effective_resistance_normalized::<f64>(&g, u, v).unwrap();
                let rf = effective_resistance_flow::<f64>(&g, u, v).unwrap();
                worst = worst.max((r - rn).abs()).max((r - rf).abs()).max((rn - rf).abs());
                pairs += 1;
            }
        }
    }
    report(
        "Triple-route resistance agreement (50 graphs, n <= 15)",
        worst <= 1e-7,
        format!("{pairs} pairs, max deviation {worst:.3e} (tol 1e-7)"),
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn woodbury_incremental_updates() {
    let start = Instant::now();
    let mut rng = rng(44);
    let g = random_connected(&mut rng, 40, 0.05);
    let mut state = ResistanceState::<f64>::init(&g).unwrap();
    for _ in 0..50 {
        let candidates = state.all_pair_scores();
        let pick = candidates[rng.random_range(0..candidates.len())];
        state.apply_edge(pick.u, pick.v).unwrap();
    }
    let current = state.graph();
    let m_scratch = regularized_oracle(&current);
    let n_scratch = &m_scratch * &m_scratch;
    let (_, m, n) = state.block(0);
    let mut dm = 0.0f64;
    let mut dn = 0.0f64;
    for i in 0..40 {
        for j in 0..40 {
            dm = dm.max((m.get(i, j) - m_scratch[(i, j)]).abs());
            dn = dn.max((n.get(i, j) - n_scratch[(i, j)]).abs());
        }
    }
    let rtot_scratch = rtot_oracle(&current);
    let dr = (state.rtot() - rtot_scratch).abs() / rtot_scratch;
    report(
        "Woodbury incremental correctness (n = 40, 50 insertions)",
        state.added().len() == 50 && dm <= 1e-8 && dn <= 1e-7 && dr <= 1e-6,
        format!("max|dM| {dm:.3e} (1e-8), max|dN| {dn:.3e} (1e-7), rel dR_tot {dr:.3e} (1e-6)"),
        start.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn series_identity() {
    let start = Instant::now();
    let mut rng = rng(45);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(3..=15);
        let p = rng.random_range(0.05..0.5);
        let g = random_non_bipartite(&mut rng, n, p);
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        let est = resistance_series_truncated::<f64>(&g, u, v, 1e-6).unwrap();
        let exact = effective_resistance::<f64>(&g, u, v).unwrap();
        worst = worst.max((est.value - exact).abs());
    }
    let bipartite_rejected = [Graph::cycle(4), Graph::path(6), Graph::cycle(10)]
        .iter()
        .all(|g| matches!(resistance_series_truncated::<f64>(g, 0, 1, 1e-6), Err(Error::Bipartite(_))));
    report(
        "Series identity (50 non-bipartite graphs, n <= 15)",
        worst <= 1e-6 && bipartite_rejected,
        format!("max deviation {worst:.3e} (tol 1e-6); bipartite inputs rejected: {bipartite_rejected}"),
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn rayleigh_monotonicity() {
    let start = Instant::now();
    let mut rng = rng(46);
    let mut insertions = 0usize;
    let mut violations = 0usize;
    let mut check = |trajectory: &[f64], deltas: &[f64]| {
        for (w, &d) in trajectory.windows(2).zip(deltas) {
            insertions += 1;
            if !(w[1] < w[0] && d > 0.0) {
                violations += 1;
            }
        }
    };
    for _ in 0..100 {
        let g = draw_connected(&mut rng, 3, 30);
        let k = rng.random_range(1..=10);
        for plan in [gtr::<f64>(&g, k).unwrap(), random_baseline::<f64>(&g, k, rng.random()).unwrap()] {
            let deltas: Vec<f64> = plan.added.iter().map(|s| s.delta).collect();
            check(&plan.rtot_trajectory, &deltas);
        }
    }
    // the long Woodbury sequence, also checked against from-scratch values
    let g = random_connected(&mut rng, 40, 0.05);
    let mut state = ResistanceState::<f64>::init(&g).unwrap();
    let mut scratch = vec![rtot_oracle(&g)];
    let mut deltas = Vec::new();
    for _ in 0..50 {
        let candidates = state.all_pair_scores();
        let pick = candidates[rng.random_range(0..candidates.len())];
        deltas.push(state.apply_edge(pick.u, pick.v).unwrap().delta);
        scratch.push(rtot_oracle(&state.graph()));
    }
    check(&scratch, &deltas);
    report(
        "Rayleigh monotonicity",
        violations == 0,
        format!("{violations} violations over {insertions} insertions"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn p20_nonmonotonicity_witness() {
    let start = Instant::now();
    let g = Graph::path(20);
    let changes = delta_changes::<f64>(&g, (0, 19)).unwrap();
    let increases: Vec<_> = changes.iter().filter(|c| c.delta_after > c.delta_before).collect();
    let target_pair =
        changes.iter().find(|c| (c.delta_before - 30.33).abs() <= 0.05 && (c.delta_after - 40.17).abs() <= 0.05);
    let best = increases
        .iter()
        .max_by(|a, b| a.increase().partial_cmp(&b.increase()).unwrap())
        .map(|c| format!("{:?}: {:.4} -> {:.4}", c.edge, c.delta_before, c.delta_after))
        .unwrap_or_else(|| "none".into());
    let near_before: Vec<String> = changes
        .iter()
        .filter(|c| (c.delta_before - 30.33).abs() <= 0.05)
        .map(|c| format!("{:?}: {:.4} -> {:.4}", c.edge, c.delta_before, c.delta_after))
        .collect();
    report(
        "P20 non-monotonicity witness",
        !increases.is_empty() && target_pair.is_some(),
        format!(
            "{} edges increase after adding (0, 19), largest {best}; edges with delta 30.33 +- 0.05 before: [{}]; \
             pair (30.33, 40.17) +- 0.05 found: {}",
            increases.len(),
            near_before.join(", "),
            target_pair.is_some()
        ),
        start.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn bound_orderings() {
    let start = Instant::now();
    let mut rng = rng(47);
    let mut dominance = 0.0f64;
    let mut looseness = 0.0f64;
    let mut sandwich = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(3..=20);
        let p = rng.random_range(0.05..0.5);
        let g = random_non_bipartite(&mut rng, n, p);
        let s2 = spectral_gap::<f64>(&g).unwrap();
        let r = rmax::<f64>(&g).unwrap();
        let nf = n as f64;
        sandwich = sandwich.max(1.0 / (nf * s2) - r).max(r - 2.0 / s2);
        for depth in [0, 1, 2, 4] {
            let params = BoundParams::<f64>::new(1.0, 1.0, depth);
            for u in 0..n {
                for v in 0..n {
                    let adj = jacobian_bound_adjacency(&g, u, v, &params).unwrap();
                    let res = jacobian_bound_resistance(&g, u, v, &params).unwrap();
                    dominance = dominance.max(adj - res);
                }
            }
            let total = total_jacobian_bound(&g, &params).unwrap();
            let gap = spectral_gap_jacobian_bound(&g, &params).unwrap();
            looseness = looseness.max(total - gap);
        }
    }
    report(
        "Bound ordering (100 non-bipartite graphs, n <= 20)",
        dominance <= 1e-9 && looseness <= 1e-9 && sandwich <= 1e-9,
        format!(
            "max(adjacency - resistance) {dominance:.3e}, max(total - gap) {looseness:.3e}, \
             sandwich excess {sandwich:.3e} (all <= 1e-9)"
        ),
        start.elapsed(),
        Duration::from_secs(60),
    );
}
