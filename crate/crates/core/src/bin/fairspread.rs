use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use fairspread::cascade::{estimate_utilities, exact_utilities, sample_sketches, UtilityVector, DEFAULT_SKETCHES};
use fairspread::experiments::{
    relative_connectedness_experiment, relative_size_experiment, run_sweep, verify_fixtures, verify_fixtures_in,
    ExperimentConfig, SweepMetadata, SweepTable,
};
use fairspread::graph::{CommunityPartition, Graph, SeedSet};
use fairspread::io::{graph_to_string, load_graph};
use fairspread::optimize::{
    dc_lower_bounds, exhaustive_opt, run_greedy, saturate_dc_with, saturate_maximin_with, Evaluator,
    ExhaustiveObjective, Objective, Strategy, UtilitySource, DEFAULT_COMBINATION_LIMIT, DEFAULT_TOL,
};
use fairspread::rng::derive_seed;
use fairspread::sbm::{generate_sbm, SbmSpec};
use fairspread::welfare::{dp_satisfied, pof, total_influence, utility_gap, welfare, WelfareParams};
use fairspread::Error;

/// Fair influence maximization under the independent cascade model.
///
/// Exit status: 0 on success, 1 when `verify` finds a failing check, 2 for usage
/// errors, 3 for unreadable or malformed input files, 4 for infeasible parameters.
#[derive(Parser, Debug)]
#[command(name = "fairspread", version)]
struct Cli {
    /// Worker threads; results do not depend on it [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a stochastic block model graph
    GenSbm(GenSbmArgs),
    /// Choose a seed set with one selector
    Select(SelectArgs),
    /// Run a configured sweep over budgets, alphas and baselines
    Sweep(SweepArgs),
    /// Exact utilities of a seed set, or an exhaustive optimum on a small graph
    Exact(ExactArgs),
    /// Check the bundled counterexample fixtures
    Verify(VerifyArgs),
    /// Utilities, welfare and fairness metrics of a given seed set
    Metrics(MetricsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Welfare,
    Utilitarian,
    Maximin,
    Dc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Experiment {
    /// The sweep described by `--config`
    Config,
    /// Third community's within probability from 0 to 0.06
    Connectedness,
    /// Second community grown from 100 to 900 vertices
    Size,
}

#[derive(Args, Debug)]
struct Output {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write results here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the resolved configuration here [default: <out>.meta.json with --out, else embedded or standard error]
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Graph document (JSON with n, directed, p, edges, communities)
    #[arg(long)]
    graph: PathBuf,
    /// Propagation probability overriding the graph's own [default: the graph's p]
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args, Debug)]
struct GenSbmArgs {
    /// SBM spec (JSON with community_sizes, within_prob, between_prob and optional p)
    #[arg(long)]
    spec: PathBuf,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Propagation probability stored in the graph [default: the spec's p, itself 0.25 when absent]
    #[arg(long)]
    p: Option<f64>,
    /// Write the graph here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Seed budget
    #[arg(long)]
    k: usize,
    /// Selector
    #[arg(long, value_enum, default_value_t = Method::Welfare)]
    method: Method,
    /// Inequality aversion for the welfare selector, any value below 1
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Welfare floor [default: 1/(2n)]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of live-edge sketches
    #[arg(long, default_value_t = DEFAULT_SKETCHES)]
    sketches: usize,
    /// Master RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance for the maximin and dc selectors
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Also report whether the result meets demographic parity within this gap
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Which experiment to run with the config's methods, replications and sketches
    #[arg(long, value_enum, default_value_t = Experiment::Config)]
    experiment: Experiment,
    /// Master RNG seed overriding the config [default: the config's master_seed]
    #[arg(long)]
    seed: Option<u64>,
    /// Sketch count overriding the config [default: the config's sketches, itself 1000 when absent]
    #[arg(long)]
    sketches: Option<usize>,
    /// Propagation probability overriding the config [default: the config's p or the source's]
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Seed set to evaluate, comma separated; without it an exhaustive optimum is searched
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<usize>>,
    /// Budget for the exhaustive search
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Objective for the exhaustive search (dc is not supported)
    #[arg(long, value_enum, default_value_t = Method::Utilitarian)]
    method: Method,
    /// Inequality aversion for the welfare objective
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Largest number of seed sets the exhaustive search may visit
    #[arg(long, default_value_t = DEFAULT_COMBINATION_LIMIT)]
    limit: u128,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Directory holding the fixture JSON files [default: the copies built into the binary]
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Seed set, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<usize>,
    /// Welfare is reported for each of these alphas
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    alpha: Vec<f64>,
    /// Demographic parity threshold on the utility gap
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Number of live-edge sketches; 0 computes utilities exactly
    #[arg(long, default_value_t = DEFAULT_SKETCHES)]
    sketches: usize,
    /// Master RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    File(PathBuf, std::io::Error),
    Usage(String),
    Infeasible(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::File(..) => 3,
            CliError::Infeasible(_) => 4,
            CliError::Lib(e) => match e {
                Error::InvalidParameter(_)
                | Error::InvalidProbability(_)
                | Error::BudgetTooLarge { .. }
                | Error::LengthMismatch { .. }
                | Error::EnumerationLimit { .. }
                | Error::CombinatorialLimit { .. } => 4,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::File(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Usage(m) | CliError::Infeasible(m) => write!(f, "{m}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::GenSbm(a) => gen_sbm(a),
        Command::Select(a) => select(a, cli.threads),
        Command::Sweep(a) => sweep(a, cli.threads),
        Command::Exact(a) => exact(a),
        Command::Verify(a) => verify(a),
        Command::Metrics(a) => metrics(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::File(path.to_path_buf(), e))
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::File(path.to_path_buf(), e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Writes the primary output and the metadata record. JSON output embeds the
/// metadata; text output to a terminal prints it as a trailing block.
fn emit(output: &Output, body: String, meta: serde_json::Value) -> CliResult<()> {
    let meta_path = output
        .meta
        .clone()
        .or_else(|| output.out.as_ref().map(|o| PathBuf::from(format!("{}.meta.json", o.display()))));
    match &output.out {
        Some(path) => write_file(path, &body)?,
        None => print!("{body}"),
    }
    match meta_path {
        Some(path) => write_file(&path, &to_json(&meta))?,
        None if output.format == Format::Csv => eprint!("{}", to_json(&meta)),
        None => {}
    }
    Ok(())
}

fn load(args: &GraphArgs) -> CliResult<(Graph, CommunityPartition)> {
    let (g, part) = load_graph(&args.graph)?;
    match args.p {
        Some(p) => Ok((g.with_p(p)?, part)),
        None => Ok((g, part)),
    }
}

fn gen_sbm(a: GenSbmArgs) -> CliResult<ExitCode> {
    let text = read_file(&a.spec)?;
    let mut spec: SbmSpec = serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?;
    if let Some(p) = a.p {
        spec.p = p;
    }
    let (g, part) = generate_sbm(&spec, a.seed)?;
    let mut body = graph_to_string(&g, &part)?;
    body.push('\n');
    match &a.out {
        Some(path) => write_file(path, &body)?,
        None => print!("{body}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Selection {
    seeds: Vec<usize>,
    utilities: Vec<f64>,
    total: f64,
    gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pof: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    welfare: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dp_satisfied: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Vec<f64>>,
}

fn selection(seeds: &SeedSet, u: &UtilityVector) -> Selection {
    Selection {
        seeds: seeds.vertices().to_vec(),
        utilities: u.values().to_vec(),
        total: total_influence(u),
        gap: utility_gap(u),
        pof: None,
        welfare: None,
        dp_satisfied: None,
        feasible: None,
        gamma: None,
        bounds: None,
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn selection_text(s: &Selection) -> String {
    let mut t = String::new();
    writeln!(t, "seeds: {}", join(&s.seeds, " ")).unwrap();
    writeln!(t, "utilities: {}", join(&s.utilities, " ")).unwrap();
    writeln!(t, "total: {}", s.total).unwrap();
    writeln!(t, "gap: {}", s.gap).unwrap();
    if let Some(v) = s.pof {
        writeln!(t, "pof: {v}").unwrap();
    }
    if let Some(v) = s.welfare {
        writeln!(t, "welfare: {v}").unwrap();
    }
    if let Some(v) = s.dp_satisfied {
        writeln!(t, "dp_satisfied: {v}").unwrap();
    }
    if let Some(v) = s.gamma {
        writeln!(t, "gamma: {v}").unwrap();
    }
    if let Some(v) = &s.bounds {
        writeln!(t, "bounds: {}", join(v, " ")).unwrap();
    }
    if let Some(v) = s.feasible {
        writeln!(t, "feasible: {v}").unwrap();
    }
    t
}

fn selection_csv(s: &Selection) -> String {
    let mut t = String::from("seeds,total,gap");
    for c in 0..s.utilities.len() {
        write!(t, ",u_{c}").unwrap();
    }
    write!(t, "\n{},{},{}", join(&s.seeds, " "), s.total, s.gap).unwrap();
    for u in &s.utilities {
        write!(t, ",{u}").unwrap();
    }
    t.push('\n');
    t
}

fn render(format: Format, s: &Selection, meta: &serde_json::Value) -> String {
    match format {
        Format::Text => selection_text(s),
        Format::Csv => selection_csv(s),
        Format::Json => to_json(&json!({ "result": s, "config": meta })),
    }
}

fn select(a: SelectArgs, threads: Option<usize>) -> CliResult<ExitCode> {
    let (g, part) = load(&a.graph)?;
    let n = g.n();
    if a.k > n {
        return Err(CliError::Infeasible(format!("budget {} exceeds vertex count {n}", a.k)));
    }
    let epsilon = a.epsilon.unwrap_or(1.0 / (2.0 * n as f64));
    let params = WelfareParams::new(a.alpha, epsilon)?;
    let sk = sample_sketches(&g, a.sketches, a.seed)?;
    let ev = Evaluator::new(&sk, &part)?;
    let (util_seeds, _) = run_greedy(&ev, &Objective::Total, None, a.k, Strategy::Lazy)?;
    let im_total = total_influence(&ev.utilities(util_seeds.vertices()));
    let mut result = match a.method {
        Method::Utilitarian => selection(&util_seeds, &ev.utilities(util_seeds.vertices())),
        Method::Welfare => {
            let (seeds, _) = run_greedy(&ev, &Objective::Welfare(params), None, a.k, Strategy::Lazy)?;
            let u = ev.utilities(seeds.vertices());
            let mut s = selection(&seeds, &u);
            s.welfare = Some(welfare(&u, &params));
            s
        }
        Method::Maximin => {
            let sel = saturate_maximin_with(&ev, a.k, a.tol)?;
            let mut s = selection(&sel.seeds, &sel.utilities);
            s.gamma = Some(sel.gamma);
            s
        }
        Method::Dc => {
            let bounds = dc_lower_bounds(&g, &part, a.k, a.sketches, derive_seed(a.seed, &[2]))?;
            let sel = saturate_dc_with(&ev, a.k, &bounds, a.tol)?;
            let mut s = selection(&sel.seeds, &sel.utilities);
            s.feasible = Some(sel.feasible);
            s.bounds = Some(bounds.bounds);
            s
        }
    };
    result.pof = Some(if im_total > 0.0 { pof(result.total, im_total)? } else { 0.0 });
    result.dp_satisfied = a.delta.map(|d| {
        let u = UtilityVector::new(result.utilities.clone(), part.sizes().to_vec()).expect("valid utilities");
        dp_satisfied(&u, d)
    });
    let meta = json!({
        "command": "select",
        "graph": a.graph.graph,
        "n": n,
        "p": g.p(),
        "k": a.k,
        "method": a.method,
        "alpha": a.alpha,
        "epsilon": epsilon,
        "sketches": a.sketches,
        "seed": a.seed,
        "tol": a.tol,
        "leftover_policy": "total_influence",
        "delta": a.delta,
        "threads": threads,
        "format": a.output.format,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let body = render(a.output.format, &result, &meta);
    emit(&a.output, body, meta)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep_text(table: &SweepTable) -> String {
    let mut t = String::new();
    for r in table.means() {
        let alpha = r.alpha.map(|a| format!(" alpha={a}")).unwrap_or_default();
        writeln!(
            t,
            "instance {} k={} {}{alpha}: gap={:.4} pof={:.4} total={:.2}",
            r.instance,
            r.k,
            r.method.label(),
            r.gap,
            r.pof,
            r.total
        )
        .unwrap();
    }
    t
}

fn sweep(a: SweepArgs, threads: Option<usize>) -> CliResult<ExitCode> {
    let mut cfg = ExperimentConfig::from_json(&read_file(&a.config)?)?;
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(r) = a.sketches {
        cfg.sketches = r;
    }
    if a.p.is_some() {
        cfg.p = a.p;
    }
    let (table, metadata) = match a.experiment {
        Experiment::Config => {
            cfg.validate()?;
            let table = run_sweep(&cfg)?;
            (table, SweepMetadata::new(vec![cfg], Vec::new()))
        }
        Experiment::Connectedness => {
            let s = relative_connectedness_experiment(&cfg)?;
            let meta = s.metadata();
            (s.table, meta)
        }
        Experiment::Size => {
            let s = relative_size_experiment(&cfg)?;
            let meta = s.metadata();
            (s.table, meta)
        }
    };
    let meta = json!({
        "command": "sweep",
        "experiment": a.experiment,
        "threads": threads,
        "format": a.output.format,
        "sweep": metadata,
    });
    let body = match a.output.format {
        Format::Csv => table.to_csv(),
        Format::Text => sweep_text(&table),
        Format::Json => to_json(&json!({ "rows": table.rows, "config": meta })),
    };
    emit(&a.output, body, meta)?;
    Ok(ExitCode::SUCCESS)
}

fn exact(a: ExactArgs) -> CliResult<ExitCode> {
    let (g, part) = load(&a.graph)?;
    let n = g.n();
    let epsilon = 1.0 / (2.0 * n as f64);
    let (result, mode) = match &a.seeds {
        Some(ids) => {
            let seeds = SeedSet::from_vertices(ids.iter().copied(), n)?;
            let u = exact_utilities(&g, &seeds, &part)?;
            (selection(&seeds, &u), "evaluate")
        }
        None => {
            let objective = match a.method {
                Method::Utilitarian => ExhaustiveObjective::Total,
                Method::Welfare => ExhaustiveObjective::Welfare(WelfareParams::new(a.alpha, epsilon)?),
                Method::Maximin => ExhaustiveObjective::Maximin,
                Method::Dc => return Err(CliError::Usage("exact search does not support --method dc".into())),
            };
            let r = exhaustive_opt(UtilitySource::Exact(&g), &part, a.k, &objective, a.limit)?;
            let mut s = selection(&r.seeds, &r.utilities);
            if let ExhaustiveObjective::Welfare(params) = objective {
                s.welfare = Some(welfare(&r.utilities, &params));
            }
            (s, "exhaustive")
        }
    };
    let meta = json!({
        "command": "exact",
        "mode": mode,
        "graph": a.graph.graph,
        "n": n,
        "p": g.p(),
        "seeds": a.seeds,
        "k": a.k,
        "method": a.method,
        "alpha": a.alpha,
        "epsilon": epsilon,
        "limit": a.limit.to_string(),
        "format": a.output.format,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let body = render(a.output.format, &result, &meta);
    emit(&a.output, body, meta)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> CliResult<ExitCode> {
    let report = match &a.fixtures {
        Some(dir) => verify_fixtures_in(dir)?,
        None => verify_fixtures()?,
    };
    match a.format {
        Format::Json => print!("{}", to_json(&report)),
        Format::Csv => {
            println!("fixture,claim,passed");
            for c in &report.checks {
                println!("{},\"{}\",{}", c.fixture, c.claim.replace('"', "'"), c.passed);
            }
        }
        Format::Text => println!("{report}"),
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct Metrics {
    #[serde(flatten)]
    selection: Selection,
    delta: f64,
    dp_satisfied: bool,
    welfare: Vec<(f64, f64)>,
}

fn metrics(a: MetricsArgs) -> CliResult<ExitCode> {
    let (g, part) = load(&a.graph)?;
    let n = g.n();
    let seeds = SeedSet::from_vertices(a.seeds.iter().copied(), n)?;
    let u = if a.sketches == 0 {
        exact_utilities(&g, &seeds, &part)?
    } else {
        estimate_utilities(&sample_sketches(&g, a.sketches, a.seed)?, &seeds, &part)?
    };
    let epsilon = 1.0 / (2.0 * n as f64);
    let mut welfare_values = Vec::new();
    for &alpha in &a.alpha {
        welfare_values.push((alpha, welfare(&u, &WelfareParams::new(alpha, epsilon)?)));
    }
    let m = Metrics { selection: selection(&seeds, &u), delta: a.delta, dp_satisfied: dp_satisfied(&u, a.delta), welfare: welfare_values };
    let meta = json!({
        "command": "metrics",
        "graph": a.graph.graph,
        "n": n,
        "p": g.p(),
        "seeds": seeds.vertices(),
        "alpha": a.alpha,
        "epsilon": epsilon,
        "delta": a.delta,
        "sketches": a.sketches,
        "seed": a.seed,
        "format": a.output.format,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let body = match a.output.format {
        Format::Json => to_json(&json!({ "result": m, "config": meta })),
        Format::Csv => {
            let mut t = selection_csv(&m.selection);
            t.pop();
            let mut lines: Vec<String> = t.lines().map(String::from).collect();
            lines[0].push_str(",dp_satisfied");
            lines[1].push_str(&format!(",{}", m.dp_satisfied));
            for (alpha, w) in &m.welfare {
                lines[0].push_str(&format!(",welfare_{alpha}"));
                lines[1].push_str(&format!(",{w}"));
            }
            lines.join("\n") + "\n"
        }
        Format::Text => {
            let mut t = selection_text(&m.selection);
            writeln!(t, "dp_satisfied (delta {}): {}", m.delta, m.dp_satisfied).unwrap();
            for (alpha, w) in &m.welfare {
                writeln!(t, "welfare (alpha {alpha}): {w}").unwrap();
            }
            t
        }
    };
    emit(&a.output, body, meta)?;
    Ok(ExitCode::SUCCESS)
}
