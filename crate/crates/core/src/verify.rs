//! Self-checks that replay the library's identities on seeded random
//! instances and on the path-graph fixtures. Each suite reports its worst
//! observed deviation against a fixed tolerance.

use rand::Rng;

use crate::bounds::{
    jacobian_bound_adjacency, jacobian_bound_resistance, spectral_gap_jacobian_bound, total_jacobian_bound, BoundParams,
};
use crate::error::Result;
use crate::flow::effective_resistance_flow;
use crate::graph::Graph;
use crate::random::{random_connected, random_non_bipartite, rng, GraphRng};
use crate::rewiring::{brute_force_optimal, gtr, nonmonotonicity_witness_for};
use crate::spectral::{
    effective_resistance, effective_resistance_normalized, resistance_series_truncated, rmax, spectral_gap,
    total_resistance, total_resistance_spectral,
};
use crate::state::ResistanceState;

pub const SUITES: &[&str] = &[
    "delta-exactness",
    "trace-identity",
    "triple-route",
    "woodbury",
    "series",
    "rayleigh",
    "p5-counterexample",
    "p20-nonmonotonicity",
    "bounds-ordering",
];

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides each suite's default instance count.
    pub trials: Option<usize>,
    /// Overrides each suite's default maximum vertex count.
    pub n: Option<usize>,
    /// Overrides each suite's default tolerance.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
    /// Edge list of the first failing instance.
    pub failing_instance: Option<String>,
}

struct Tracker {
    max_dev: f64,
    tol: f64,
    failing: Option<String>,
}

impl Tracker {
    fn new(tol: f64) -> Self {
        Self { max_dev: 0.0, tol, failing: None }
    }

    fn observe(&mut self, dev: f64, g: &Graph) {
        if dev.is_nan() || dev > self.max_dev {
            self.max_dev = if dev.is_nan() { f64::INFINITY } else { dev };
        }
        if !(dev <= self.tol) && self.failing.is_none() {
            self.failing = Some(g.to_edge_list());
        }
    }

    fn fail(&mut self, g: &Graph) {
        self.max_dev = f64::INFINITY;
        if self.failing.is_none() {
            self.failing = Some(g.to_edge_list());
        }
    }

    fn report(self, name: &'static str, detail: String) -> SuiteReport {
        SuiteReport {
            name,
            passed: self.failing.is_none() && self.max_dev <= self.tol,
            max_deviation: self.max_dev,
            tolerance: self.tol,
            detail,
            failing_instance: self.failing,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn draw_connected(rng: &mut GraphRng, min_n: usize, max_n: usize) -> Graph {
    let n = rng.random_range(min_n..=max_n.max(min_n));
    let p = rng.random_range(0.05..0.5);
    random_connected(rng, n, p)
}

fn draw_non_bipartite(rng: &mut GraphRng, max_n: usize) -> Graph {
    let n = rng.random_range(3..=max_n.max(3));
    let p = rng.random_range(0.05..0.5);
    random_non_bipartite(rng, n, p)
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Option<SuiteReport> {
    let report = match name {
        "delta-exactness" => delta_exactness(opts),
        "trace-identity" => trace_identity(opts),
        "triple-route" => triple_route(opts),
        "woodbury" => woodbury(opts),
        "series" => series(opts),
        "rayleigh" => rayleigh(opts),
        "p5-counterexample" => p5_counterexample(opts),
        "p20-nonmonotonicity" => p20_nonmonotonicity(opts),
        "bounds-ordering" => bounds_ordering(opts),
        _ => return None,
    };
    Some(report.unwrap_or_else(|e| SuiteReport {
        name: SUITES.iter().find(|s| **s == name).copied().unwrap_or("unknown"),
        passed: false,
        max_deviation: f64::INFINITY,
        tolerance: opts.tolerance.unwrap_or(0.0),
        detail: format!("error: {e}"),
        failing_instance: None,
    }))
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    SUITES.iter().filter_map(|s| run_suite(s, opts)).collect()
}

fn delta_exactness(o: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng(o.seed);
    let mut t = Tracker::new(o.tolerance.unwrap_or(1e-6));
    let trials = o.trials.unwrap_or(200);
    let mut tested = 0;
    while tested < trials {
        let g = draw_connected(&mut rng, 3, o.n.unwrap_or(30));
        let candidates = g.candidate_non_edges();
        if candidates.is_empty() {
            continue;
        }
        let (u, v) = candidates[rng.random_range(0..candidates.len())];
        let state = ResistanceState::<f64>::init(&g)?;
        let delta = state.pair_scores(u, v)?.delta;
        let before = total_resistance::<f64>(&g)?;
        let after = total_resistance::<f64>(&g.with_edges([(u, v)])?)?;
        t.observe((delta - (before - after)).abs() / before, &g);
        tested += 1;
    }
    Ok(t.report("delta-exactness", format!("{trials} random non-edges")))
}

fn trace_identity(o: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng(o.seed);
    let mut t = Tracker::new(o.tolerance.unwrap_or(1e-7));
    let trials = o.trials.unwrap_or(50);
    for _ in 0..trials {
        let g = draw_connected(&mut rng, 2, o.n.unwrap_or(30));
        t.observe(rel(total_resistance::<f64>(&g)?, total_resistance_spectral::<f64>(&g)), &g);
    }
    Ok(t.report("trace-identity", format!("{trials} graphs, relative deviation")))
}

fn triple_route(o: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng(o.seed);
    let mut t = Tracker::new(o.tolerance.unwrap_or(1e-7));
    let trials = o.trials.unwrap_or(50);
    let mut pairs = 0usize;
    for _ in 0..trials {
        let g = draw_connected(&mut rng, 2, o.n.unwrap_or(15));
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                let r = effective_resistance::<f64>(&g, u, v)?;
                let rn = effective_resistance_normalized::<f64>(&g, u, v)?;
                let rf = effective_resistance_flow::<f64>(&g, u, v)?;
                t.observe((r - rn).abs().max((r - rf).abs()).max((rn - rf).abs()), &g);
                pairs += 1;
            }
        }
    }
    Ok(t.report("triple-route", format!("{pairs} pairs over {trials} graphs")))
}

fn woodbury(o: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng(o.seed);
    let n = o.n.unwrap_or(40);
    let steps = o.trials.unwrap_or(50);
    let scale = o.tolerance.map(|t| t / 1e-8).unwrap_or(1.0);
    let (tol_m, tol_n, tol_r) = (1e-8 * scale, 1e-7 * scale, 1e-6 * scale);
    let g = random_connected(&mut rng, n, 0.05);
    let mut state = ResistanceState::<f64>::init(&g)?;
    let mut t = Tracker::new(tol_m);
    let (mut dev_n, mut dev_r) = (0.0f64, 0.0f64);
    for _ in 0..steps {
        let candidates = state.all_pair_scores();
        if candidates.is_empty() {
            break;
        }
        let pick = candidates[rng.random_range(0..candidates.len())];
        state.apply_edge(pick.u, pick.v)?;
    }
    let fresh = ResistanceState::<f64>::init(&state.graph())?;
    t.observe(state.block(0).1.max_abs_diff(fresh.block(0).1), &g);
    dev_n = dev_n.max(state.block(0).2.max_abs_diff(fresh.block(0).2));
    dev_r = dev_r.max(rel(state.rtot(), fresh.rtot()));
    if dev_n > tol_n || dev_r > tol_r {
        t.fail(&g);
    }
    Ok(t.report(
        "woodbury",
        format!(
            "{} insertions on n={n}; max|dN|={dev_n:.3e} (tol {tol_n:e}), rel dR_tot={dev_r:.3e} (tol {tol_r:e})",
            state.added().len()
        ),
    ))
}

fn series(o: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng(o.seed);
    let tol = o.tolerance.unwrap_or(1e-6);
    let mut t = Tracker::new(tol);
    let trials = o.trials.unwrap_or(50);
    let mut bound_violations = 0;
    for _ in 0..trials {
        let g = draw_non_bipartite(&mut rng, o.n.unwrap_or(15));
        let u = rng.random_range(0..g.n());
        let v = (u + rng.random_range(1..g.n())) % g.n();
        let est = resistance_series_truncated::<f64>(&g, u, v, tol)?;
        let exact = effective_resistance::<f64>(&g, u, v)?;
        let err = (est.value - exact).abs();
        if err > est.tail_bound + 1e-12 {
            bound_violations += 1;
            t.fail(&g);
        }
        t.observe(err, &g);
    }
    let bipartite = Graph::cycle(6);
    if resistance_series_truncated::<f64>(&bipartite, 0, 1, tol).is_ok() {
        t.fail(&bipartite);
    }
    Ok(t.report("series", format!("{trials} pairs; tail-bound violations: {bound_violations}")))
}

fn rayleigh(o: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng(o.seed);
    let mut t = Tracker::new(0.0);
    let trials = o.trials.unwrap_or(50);
    let mut insertions = 0;
    let mut violations = 0;
    for _ in 0..trials {
        let g = draw_connected(&mut rng, 3, o.n.unwrap_or(20));
        let mut state = ResistanceState::<f64>::init(&g)?;
        for _ in 0..5 {
            let candidates = state.all_pair_scores();
            if candidates.is_empty() {
                break;
            }
            let pick = candidates[rng.random_range(0..candidates.len())];
            let before = state.rtot();
            state.apply_edge(pick.u, pick.v)?;
            insertions += 1;
            if !(state.rtot() < before) || !(pick.delta > 0.0) {
                violations += 1;
                t.fail(&g);
            }
        }
    }
    Ok(t.report("rayleigh", format!("{violations} violations in {insertions} insertions")))
}

fn p5_counterexample(opts: &VerifyOptions) -> Result<SuiteReport> {
    let g = Graph::path(5);
    let plan = gtr::<f64>(&g, 2)?;
    let opt = brute_force_optimal::<f64>(&g, 2)?;
    let mut t = Tracker::new(opts.tolerance.unwrap_or(0.01));
    t.observe((plan.rtot_final() - 8.18).abs(), &g);
    t.observe((opt.rtot - 7.67).abs(), &g);
    if plan.edges().first() != Some(&(0, 4)) || !(opt.rtot < plan.rtot_final()) {
        t.fail(&g);
    }
    Ok(t.report(
        "p5-counterexample",
        format!(
            "GTR {:?} -> R_tot {:.4}; optimal {:?} -> R_tot {:.4}",
            plan.edges(),
            plan.rtot_final(),
            opt.edges,
            opt.rtot
        ),
    ))
}

fn p20_nonmonotonicity(_: &VerifyOptions) -> Result<SuiteReport> {
    let g = Graph::path(20);
    let mut t = Tracker::new(0.0);
    let detail = match nonmonotonicity_witness_for::<f64>(&g, (0, 19))? {
        Some(w) => {
            format!("after adding {:?}, edge {:?} delta {:.4} -> {:.4}", w.added, w.edge, w.delta_before, w.delta_after)
        }
        None => {
            t.fail(&g);
            "no witness".to_string()
        }
    };
    Ok(t.report("p20-nonmonotonicity", detail))
}

fn bounds_ordering(o: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng(o.seed);
    let mut t = Tracker::new(o.tolerance.unwrap_or(1e-9));
    let trials = o.trials.unwrap_or(100);
    for _ in 0..trials {
        let g = draw_non_bipartite(&mut rng, o.n.unwrap_or(20));
        let n = g.n() as f64;
        let s2 = spectral_gap::<f64>(&g)?;
        let r = rmax::<f64>(&g)?;
        t.observe((1.0 / (n * s2) - r).max(r - 2.0 / s2).max(0.0), &g);
        for depth in [0, 1, 2, 4] {
            let p = BoundParams::<f64>::new(1.0, 1.0, depth);
            for u in 0..g.n() {
                for v in u + 1..g.n() {
                    let adj = jacobian_bound_adjacency(&g, u, v, &p)?;
                    let res = jacobian_bound_resistance(&g, u, v, &p)?;
                    t.observe((adj - res).max(0.0), &g);
                }
            }
            let total = total_jacobian_bound(&g, &p)?;
            let gap = spectral_gap_jacobian_bound(&g, &p)?;
            t.observe((total - gap).max(0.0), &g);
        }
    }
    Ok(t.report("bounds-ordering", format!("{trials} graphs, r in {{0,1,2,4}}")))
}
