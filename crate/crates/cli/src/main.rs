use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use resist::io::{
    curve_csv, fmt_g17, mean_curve_csv, rewired_edge_list, serialize_g17, serialize_g17_opt, spectrum_csv, PlanJson,
};
use resist::rewiring::{mean_curve, rewire};
use resist::verify::{run_suite, VerifyOptions, SUITES};
use resist::{
    effective_resistance, jacobian_bound_adjacency, jacobian_bound_resistance, resistance_curve, rmax,
    spectral_gap_jacobian_bound, total_jacobian_bound, total_resistance, BoundParams, Error, Graph, Method, Spectrum,
};

#[derive(Parser)]
#[command(name = "gtr", version, about = "Total resistance statistics, Jacobian bounds and greedy rewiring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Add k edges and emit the plan and rewired edge list.
    Rewire(RewireArgs),
    /// Size, component and resistance statistics as JSON.
    Stats(StatsArgs),
    /// Jacobian upper bounds as JSON.
    Bounds(BoundsArgs),
    /// Total resistance after each added edge as CSV.
    Curve(CurveArgs),
    /// Run the built-in self-check suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Edge-list file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directory of edge-list files, processed in batch.
    #[arg(long)]
    input_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RewireArgs {
    #[command(flatten)]
    source: Source,
    /// Number of edges to add.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "gtr")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rewired edge list (file), or output directory in batch mode.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Plan JSON path; printed to stdout when omitted.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the normalized-Laplacian spectrum as CSV.
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Restrict pair bounds to one pair; all pairs otherwise.
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pair: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "gtr")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run a single suite; all suites otherwise.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum vertex count of random instances.
    #[arg(long)]
    n: Option<usize>,
    /// Number of random instances per suite.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Self { code, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Bipartite(_) | Error::Disconnected { .. } => 3,
            Error::IllConditioned { .. } | Error::SeriesCap { .. } => 1,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rewire(a) => cmd_rewire(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    Graph::from_edge_list(&text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, contents: &str) -> CmdResult {
    match path {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Regular files of `dir`, sorted by name.
fn list_dir(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::new(2, format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_file()).collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::new(2, format!("{}: no input files", dir.display())));
    }
    Ok(files)
}

fn plan_json(input: &Path, g: &Graph, k: usize, method: Method, seed: u64) -> Result<(PlanJson, String), Failure> {
    let plan = rewire::<f64>(g, k, method, seed)?;
    if plan.truncated() {
        log::warn!("{}: only {} of {k} edges could be added", input.display(), plan.added.len());
    }
    let mut json = PlanJson::from_plan(&input.display().to_string(), &plan);
    json.seed = Some(seed);
    Ok((json, rewired_edge_list(g, &plan)))
}

fn cmd_rewire(a: RewireArgs) -> CmdResult {
    if let Some(input) = &a.source.input {
        let g = load(input)?;
        let (plan, edges) = plan_json(input, &g, a.k, a.method, a.seed)?;
        if let Some(out) = &a.output {
            write(out, &edges)?;
        }
        return emit(a.plan.as_deref(), &(plan.to_json() + "\n"));
    }
    let dir = a.source.input_dir.as_deref().expect("clap enforces one source");
    let out = a.output.as_deref().ok_or_else(|| Failure::new(2, "--output DIR is required with --input-dir"))?;
    let files = list_dir(dir)?;
    fs::create_dir_all(out).map_err(|e| Failure::new(1, format!("{}: {e}", out.display())))?;
    let results: Vec<_> =
        files.par_iter().map(|p| load(p).and_then(|g| plan_json(p, &g, a.k, a.method, a.seed))).collect();
    let mut ok = 0;
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok((plan, edges)) => {
                let s = stem(path);
                write(&out.join(format!("{s}.el")), &edges)?;
                write(&out.join(format!("{s}.plan.json")), &(plan.to_json() + "\n"))?;
                ok += 1;
            }
            Err(f) => eprintln!("error: {}", f.msg),
        }
    }
    batch_outcome(ok, files.len())
}

fn batch_outcome(ok: usize, total: usize) -> CmdResult {
    eprintln!("{ok} of {total} files processed");
    if ok == 0 {
        Err(Failure::new(2, "no input file could be processed"))
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct StatsJson {
    input: String,
    seed: u64,
    n: usize,
    m: usize,
    components: usize,
    #[serde(serialize_with = "serialize_g17")]
    rtot: f64,
    #[serde(serialize_with = "serialize_g17_opt")]
    spectral_gap: Option<f64>,
    #[serde(serialize_with = "serialize_g17_opt")]
    rmax: Option<f64>,
    /// One flag per component, in component order.
    bipartite: Vec<bool>,
}

fn cmd_stats(a: StatsArgs) -> CmdResult {
    let g = load(&a.input)?;
    let spectrum = Spectrum::<f64>::of(&g);
    let connected = g.is_connected() && g.n() > 1;
    let stats = StatsJson {
        input: a.input.display().to_string(),
        seed: a.seed,
        n: g.n(),
        m: g.m(),
        components: g.component_count(),
        rtot: total_resistance(&g)?,
        spectral_gap: if connected { spectrum.spectral_gap() } else { None },
        rmax: if connected { Some(rmax(&g)?) } else { None },
        bipartite: g.is_bipartite(),
    };
    if let Some(p) = &a.spectrum {
        write(p, &spectrum_csv(&spectrum))?;
    }
    emit(a.output.as_deref(), &(serde_json::to_string_pretty(&stats).expect("stats serialise") + "\n"))
}

#[derive(Serialize)]
struct ParamsJson {
    #[serde(serialize_with = "serialize_g17")]
    alpha: f64,
    #[serde(serialize_with = "serialize_g17")]
    beta: f64,
    r: usize,
    seed: u64,
}

#[derive(Serialize)]
struct PairBoundJson {
    u: usize,
    v: usize,
    #[serde(serialize_with = "serialize_g17")]
    resistance: f64,
    #[serde(serialize_with = "serialize_g17")]
    adjacency_bound: f64,
    #[serde(serialize_with = "serialize_g17")]
    resistance_bound: f64,
    negative: bool,
}

#[derive(Serialize)]
struct BoundsJson {
    input: String,
    params: ParamsJson,
    pairs: Vec<PairBoundJson>,
    #[serde(serialize_with = "serialize_g17")]
    total_bound: f64,
    #[serde(serialize_with = "serialize_g17")]
    spectral_gap_bound: f64,
    any_negative: bool,
}

fn cmd_bounds(a: BoundsArgs) -> CmdResult {
    let g = load(&a.input)?;
    let params = BoundParams::new(a.alpha, a.beta, a.r);
    params.validate()?;
    if g.is_bipartite().iter().any(|&b| b) {
        return Err(Failure::new(
            3,
            "resistance-form bounds need a non-bipartite graph (|mu| < 1 fails for a bipartite component)",
        ));
    }
    let pairs: Vec<(usize, usize)> = match &a.pair {
        Some(p) => vec![(p[0], p[1])],
        None => (0..g.n()).flat_map(|u| (u + 1..g.n()).map(move |v| (u, v))).collect(),
    };
    let mut out = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        let resistance_bound = jacobian_bound_resistance(&g, u, v, &params)?;
        out.push(PairBoundJson {
            u,
            v,
            resistance: effective_resistance(&g, u, v)?,
            adjacency_bound: jacobian_bound_adjacency(&g, u, v, &params)?,
            resistance_bound,
            negative: resistance_bound < 0.0,
        });
    }
    let json = BoundsJson {
        input: a.input.display().to_string(),
        params: ParamsJson { alpha: a.alpha, beta: a.beta, r: a.r, seed: a.seed },
        any_negative: out.iter().any(|p| p.negative),
        pairs: out,
        total_bound: total_jacobian_bound(&g, &params)?,
        spectral_gap_bound: spectral_gap_jacobian_bound(&g, &params)?,
    };
    if json.any_negative {
        log::warn!("some pair bounds are negative; values are reported unclamped");
    }
    emit(a.output.as_deref(), &(serde_json::to_string_pretty(&json).expect("bounds serialise") + "\n"))
}

fn cmd_curve(a: CurveArgs) -> CmdResult {
    eprintln!("method {} seed {}", a.method, a.seed);
    if let Some(input) = &a.source.input {
        let g = load(input)?;
        let curve = resistance_curve::<f64>(&g, a.k, a.method, a.seed)?;
        return emit(a.output.as_deref(), &curve_csv(&curve));
    }
    let files = list_dir(a.source.input_dir.as_deref().expect("clap enforces one source"))?;
    let results: Vec<_> = files
        .par_iter()
        .map(|p| load(p).and_then(|g| resistance_curve::<f64>(&g, a.k, a.method, a.seed).map_err(Failure::from)))
        .collect();
    let mut curves = Vec::new();
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(c) => curves.push(c),
            Err(f) => eprintln!("error: {}: {}", stem(path), f.msg),
        }
    }
    batch_outcome(curves.len(), files.len())?;
    emit(a.output.as_deref(), &mean_curve_csv(&mean_curve(&curves)))
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    if a.tolerance.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(Failure::new(2, "--tolerance must be positive"));
    }
    let opts = VerifyOptions { seed: a.seed, trials: a.trials, n: a.n, tolerance: a.tolerance };
    let names: Vec<&str> = match &a.suite {
        Some(s) if SUITES.contains(&s.as_str()) => vec![s.as_str()],
        Some(s) => return Err(Failure::new(2, format!("unknown suite {s:?}; expected one of {}", SUITES.join(", ")))),
        None => SUITES.to_vec(),
    };
    println!("seed {}", a.seed);
    let mut failed = 0;
    for name in names {
        let rep = run_suite(name, &opts).expect("suite name checked");
        println!(
            "{} {}: max deviation {} (tolerance {}); {}",
            if rep.passed { "PASS" } else { "FAIL" },
            rep.name,
            fmt_g17(rep.max_deviation),
            fmt_g17(rep.tolerance),
            rep.detail
        );
        if !rep.passed {
            failed += 1;
            if let Some(instance) = &rep.failing_instance {
                println!("failing instance ({}):\n{instance}", rep.name);
            }
        }
    }
    if failed > 0 {
        Err(Failure::new(1, format!("{failed} suite(s) failed")))
    } else {
        Ok(())
    }
}
