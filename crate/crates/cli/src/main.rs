//! `linc` — batch experiment runner for link-local erasure coding.
//!
//! Four subcommands cover the full workflow:
//!
//! * `model` — tabulate the analytic retransmission-rate, offered-load,
//!   and goodput-ratio formulas over an (epsilon, n) grid.
//! * `sim` — run packet-level simulation sweeps, many seeds in parallel,
//!   and export per-seed plus mean/stderr rows.
//! * `compare` — check simulated aggregate rates and retransmission rates
//!   against the analytic table, failing loudly outside tolerance.
//! * `optimize` — search the (k, n) grid for the best goodput ratio.
//!
//! All output is CSV with a fixed column order and nine-significant-digit
//! floats, so identical invocations produce byte-identical files. Exit
//! codes: 0 success, 1 usage error, 2 tolerance violation, 3 file or
//! routing ingestion error.

mod config;
mod experiment;
mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use linc_core::coding::{CodingError, CodingParams};
use linc_core::model::{self, LossModel, ModelError};
use linc_core::sim::{self, SimConfig, SimError, SimResult};
use linc_core::topology::TopologyError;
use rayon::prelude::*;

use config::{Normalize, Scenario, TopologySource};
use experiment::Experiment;
use table::{fmt_float, parse_float, Table};

/// Why a command failed, mapped onto the documented exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Invalid flags, grids, config keys, or malformed input tables (exit 1).
    Usage(String),
    /// A comparison exceeded its tolerance (exit 2).
    Tolerance(String),
    /// Files could not be read, parsed as topology, or routed (exit 3).
    Ingest(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Tolerance(_) => 2,
            Failure::Ingest(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) | Failure::Tolerance(msg) | Failure::Ingest(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl From<TopologyError> for Failure {
    fn from(err: TopologyError) -> Self {
        Failure::Ingest(err.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(err: ModelError) -> Self {
        Failure::Usage(err.to_string())
    }
}

impl From<CodingError> for Failure {
    fn from(err: CodingError) -> Self {
        Failure::Usage(err.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(err: SimError) -> Self {
        match err {
            SimError::NoFlows
            | SimError::InvalidWindow { .. }
            | SimError::InvalidFlowRate(_)
            | SimError::InvalidConfig(_)
            | SimError::PacketTooSmall(_) => Failure::Usage(err.to_string()),
            SimError::BrokenRoute { .. }
            | SimError::RouteMissesLossyLink(_)
            | SimError::Topology(_) => Failure::Ingest(err.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "linc",
    version,
    about = "Experiments for link-local erasure coding: analytic model tables, \
             packet-level simulation sweeps, theory-vs-measurement comparison, \
             and coding-parameter search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the analytic model over an (epsilon, n) grid as CSV.
    Model(ModelCmd),
    /// Run simulation sweeps; export per-seed and mean/stderr rows as CSV.
    Sim(SimCmd),
    /// Check a sim table against a model table; exit 2 outside tolerance.
    Compare(CompareCmd),
    /// Search the (k, n) grid for the best goodput ratio.
    Optimize(OptimizeCmd),
}

/// Flags shared by every command that materializes a scenario.
#[derive(Args, Clone)]
struct ScenarioOpts {
    /// Scenario preset: `scenario1` (six-node chain with one lossy hop)
    /// or `scenario2` (bundled wide-area topology, five flows).
    #[arg(long, default_value = "scenario1", value_name = "NAME")]
    scenario: String,

    /// Config file of `key = value` lines; replaces the preset entirely.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// GraphML topology file. Needs lossy-link endpoints, either from
    /// --lossy-a/--lossy-b or from the scenario being overridden.
    #[arg(long, value_name = "FILE")]
    graphml: Option<PathBuf>,

    /// Label of one endpoint of the lossy link (with --graphml).
    #[arg(long, value_name = "LABEL", requires = "graphml")]
    lossy_a: Option<String>,

    /// Label of the other endpoint of the lossy link (with --graphml).
    #[arg(long, value_name = "LABEL", requires = "graphml")]
    lossy_b: Option<String>,

    /// Loss probabilities: comma list (`0.01,0.05`) or range `lo:hi:count`.
    #[arg(long, value_name = "GRID")]
    epsilon: Option<String>,

    /// Data symbols per coding block.
    #[arg(long, value_name = "K")]
    k: Option<usize>,

    /// Total symbols per block: comma list of integers.
    #[arg(long, value_name = "LIST")]
    n: Option<String>,

    /// Coding rates n/k: comma list or range `lo:hi:count`; each maps to
    /// n = round(k * rate). Default sweep: 40 rates in [1.0, 1.4].
    #[arg(long, value_name = "GRID", conflicts_with = "n")]
    rate: Option<String>,

    /// Target link utilization in (0, 1].
    #[arg(long, value_name = "UTIL")]
    target_load: Option<f64>,

    /// Which utilization hits the target: `mean` or `bottleneck`.
    #[arg(long, value_name = "MODE")]
    normalize: Option<String>,

    /// Seed for drawing the heterogeneous per-flow rates.
    #[arg(long, value_name = "SEED")]
    flow_seed: Option<u64>,

    /// Multiplier compressing link rates so runs finish in seconds while
    /// utilization stays fixed. Applied to model and sim alike so their
    /// packet rates share units.
    #[arg(long, default_value_t = 2e-3, value_name = "FACTOR")]
    rate_scale: f64,
}

#[derive(Args)]
struct ModelCmd {
    #[command(flatten)]
    scenario: ScenarioOpts,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimCmd {
    #[command(flatten)]
    scenario: ScenarioOpts,
    /// Number of independent runs per sweep point, seeded 1..=SEEDS.
    #[arg(long, default_value_t = 10, value_name = "COUNT")]
    seeds: u64,
    /// Seconds of simulated traffic generation per run.
    #[arg(long, default_value_t = 15.0, value_name = "SECONDS")]
    duration: f64,
    /// Seconds excluded from metrics at the start (default: 10% of duration).
    #[arg(long, value_name = "SECONDS")]
    warmup: Option<f64>,
    /// Worker threads for parallel runs (default: all cores).
    #[arg(long, value_name = "COUNT")]
    workers: Option<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareCmd {
    /// Analytic table produced by `linc model`.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Measurement table produced by `linc sim`.
    #[arg(long, value_name = "FILE")]
    sim: PathBuf,
    /// Relative tolerance on aggregate packet rates.
    #[arg(long, default_value_t = 0.05, value_name = "FRACTION")]
    rate_tol: f64,
    /// Absolute floor on retransmission-rate differences, for rates near
    /// zero where a relative check is meaningless.
    #[arg(long, default_value_t = 1e-3, value_name = "ABS")]
    retrans_tol: f64,
}

#[derive(Args)]
struct OptimizeCmd {
    #[command(flatten)]
    scenario: ScenarioOpts,
    /// Largest k in the search grid.
    #[arg(long, default_value_t = 80, value_name = "K")]
    k_max: usize,
    /// Largest n in the search grid.
    #[arg(long, default_value_t = 80, value_name = "N")]
    n_max: usize,
    /// Write the full goodput-ratio surface as CSV here
    /// (appended to stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Model(args) => cmd_model(args),
        Command::Sim(args) => cmd_sim(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Optimize(args) => cmd_optimize(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

/// Directory holding bundled data files (the wide-area GraphML). Honors
/// `LINC_DATA_DIR`, then `./data`, then the source checkout's data dir.
fn data_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("LINC_DATA_DIR") {
        return PathBuf::from(dir);
    }
    let local = PathBuf::from("data");
    if local.is_dir() {
        return local;
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Apply config file and flag overrides on top of the named preset.
fn resolve_scenario(opts: &ScenarioOpts) -> Result<Scenario, Failure> {
    let mut scenario = match &opts.config {
        Some(path) => config::load(path)?,
        None => config::preset(&opts.scenario, &data_dir())?,
    };
    if let Some(path) = &opts.graphml {
        let (lossy_a, lossy_b) = match (&opts.lossy_a, &opts.lossy_b, &scenario.source) {
            (Some(a), Some(b), _) => (a.clone(), b.clone()),
            (
                None,
                None,
                TopologySource::Graphml {
                    lossy_a, lossy_b, ..
                },
            ) => (lossy_a.clone(), lossy_b.clone()),
            _ => {
                return Err(Failure::Usage(
                    "--graphml needs the lossy link's endpoints: pass both \
                     --lossy-a and --lossy-b, or override a scenario that \
                     already names them"
                        .into(),
                ))
            }
        };
        scenario.source = TopologySource::Graphml {
            path: path.clone(),
            lossy_a,
            lossy_b,
        };
    }
    if let Some(target) = opts.target_load {
        if !(target > 0.0 && target <= 1.0) {
            return Err(Failure::Usage(format!(
                "--target-load {target} is outside (0, 1]"
            )));
        }
        scenario.target_utilization = target;
    }
    if let Some(mode) = &opts.normalize {
        scenario.normalize = Normalize::parse(mode)?;
    }
    if let Some(seed) = opts.flow_seed {
        scenario.seed = seed;
    }
    if let Some(k) = opts.k {
        if k == 0 {
            return Err(Failure::Usage("--k must be positive".into()));
        }
        scenario.k = k;
    }
    if !(opts.rate_scale > 0.0 && opts.rate_scale.is_finite()) {
        return Err(Failure::Usage(format!(
            "--rate-scale {} must be positive and finite",
            opts.rate_scale
        )));
    }
    Ok(scenario)
}

/// Parse a float grid: `a,b,c` or an inclusive range `lo:hi:count`.
fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::Usage(format!("--{flag} `{text}`: {why}"));
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("ranges are `lo:hi:count`"));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad("bad range start"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad("bad range end"))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("bad range count"))?;
        match count {
            0 => return Err(bad("range count must be positive")),
            1 => vec![lo],
            _ => (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    } else {
        text.split(',')
            .filter(|part| !part.trim().is_empty())
            .map(|part| part.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad("grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("grid values must be finite"));
    }
    Ok(values)
}

/// The loss probabilities to sweep: --epsilon, else the scenario's value.
fn epsilon_grid(opts: &ScenarioOpts, scenario: &Scenario) -> Result<Vec<f64>, Failure> {
    let grid = match &opts.epsilon {
        Some(text) => parse_grid(text, "epsilon")?,
        None => vec![scenario.epsilon],
    };
    for &eps in &grid {
        if !(0.0..1.0).contains(&eps) {
            return Err(Failure::Usage(format!(
                "loss probability {eps} is outside [0, 1)"
            )));
        }
    }
    Ok(grid)
}

/// The block lengths to sweep. Precedence: --n, --rate, the scenario's own
/// `n`, then the default 40-rate sweep over [1.0, 1.4].
fn n_grid(opts: &ScenarioOpts, scenario: &Scenario) -> Result<Vec<usize>, Failure> {
    let k = scenario.k;
    if let Some(text) = &opts.n {
        let ns: Vec<usize> = text
            .split(',')
            .filter(|part| !part.trim().is_empty())
            .map(|part| {
                part.trim().parse::<usize>().map_err(|_| {
                    Failure::Usage(format!("--n `{text}`: `{part}` is not an integer"))
                })
            })
            .collect::<Result<_, _>>()?;
        if ns.is_empty() {
            return Err(Failure::Usage(format!("--n `{text}`: grid is empty")));
        }
        for &n in &ns {
            CodingParams::new(k, n)?;
        }
        return Ok(ns);
    }
    let rates = match &opts.rate {
        Some(text) => parse_grid(text, "rate")?,
        None => {
            if let Some(n) = scenario.n {
                CodingParams::new(k, n)?;
                return Ok(vec![n]);
            }
            parse_grid("1.0:1.4:40", "rate")?
        }
    };
    let mut ns = Vec::new();
    for &rate in &rates {
        if rate < 1.0 {
            return Err(Failure::Usage(format!(
                "coding rate {rate} is below 1 (n would be smaller than k)"
            )));
        }
        let n = (k as f64 * rate).round() as usize;
        CodingParams::new(k, n)?;
        if !ns.contains(&n) {
            ns.push(n);
        }
    }
    Ok(ns)
}

fn write_table(table: &Table, out: Option<&PathBuf>) -> Result<(), Failure> {
    table
        .write(out.map(PathBuf::as_path))
        .map_err(|err| Failure::Ingest(format!("cannot write output: {err}")))
}

const MODEL_HEADER: [&str; 9] = [
    "epsilon",
    "k",
    "n",
    "retrans_rate_coded",
    "lambda_lossy_coded",
    "lambda_nonlossy_coded",
    "lambda_lossy_uncoded",
    "lambda_nonlossy_uncoded",
    "goodput_ratio",
];

fn cmd_model(args: &ModelCmd) -> Result<(), Failure> {
    let scenario = resolve_scenario(&args.scenario)?;
    let eps_grid = epsilon_grid(&args.scenario, &scenario)?;
    let ns = n_grid(&args.scenario, &scenario)?;
    let packet_size = SimConfig::default().packet_size_bytes;

    let mut table = Table::new(MODEL_HEADER.to_vec());
    for &eps in &eps_grid {
        let exp = experiment::materialize(&scenario, eps, packet_size)?;
        let ensemble = exp.ensemble(args.scenario.rate_scale)?;
        let loss = LossModel::new(eps)?;
        for &n in &ns {
            let params = CodingParams::new(scenario.k, n)?;
            let report = model::goodput_ratio(&ensemble, &params, &loss)?;
            table.push_row(vec![
                fmt_float(eps),
                scenario.k.to_string(),
                n.to_string(),
                fmt_float(report.retrans_rate_coded),
                fmt_float(report.lambda_lossy_coded),
                fmt_float(report.lambda_nonlossy_coded),
                fmt_float(report.lambda_lossy_uncoded),
                fmt_float(report.lambda_nonlossy_uncoded),
                fmt_float(report.delta),
            ]);
        }
    }
    write_table(&table, args.out.as_ref())
}

const SIM_HEADER: [&str; 11] = [
    "scenario",
    "epsilon",
    "k",
    "n",
    "seed",
    "link_id",
    "arrival_rate_pps",
    "retrans_rate",
    "recovered",
    "delivered",
    "mean_delay_s",
];

/// Sample mean and its standard error (0 when fewer than two samples).
fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

fn cmd_sim(args: &SimCmd) -> Result<(), Failure> {
    let scenario = resolve_scenario(&args.scenario)?;
    let eps_grid = epsilon_grid(&args.scenario, &scenario)?;
    let ns = n_grid(&args.scenario, &scenario)?;
    if args.seeds == 0 {
        return Err(Failure::Usage("--seeds must be at least 1".into()));
    }
    let warmup = args.warmup.unwrap_or(args.duration * 0.1);
    let base_cfg = SimConfig {
        duration: args.duration,
        warmup,
        rate_scale: args.scenario.rate_scale,
        ..SimConfig::default()
    };

    let experiments: Vec<Experiment> = eps_grid
        .iter()
        .map(|&eps| experiment::materialize(&scenario, eps, base_cfg.packet_size_bytes))
        .collect::<Result<_, _>>()?;

    let seeds: Vec<u64> = (1..=args.seeds).collect();
    let mut points = Vec::new();
    for ei in 0..eps_grid.len() {
        for ni in 0..ns.len() {
            for &seed in &seeds {
                points.push((ei, ni, seed));
            }
        }
    }

    let run_one = |&(ei, ni, seed): &(usize, usize, u64)| -> Result<SimResult, Failure> {
        let exp = &experiments[ei];
        let cfg = SimConfig {
            coding: Some(CodingParams::new(scenario.k, ns[ni])?),
            seed,
            ..base_cfg.clone()
        };
        let flows: Vec<_> = exp
            .routed
            .iter()
            .cloned()
            .zip(exp.lambdas.iter().map(|&l| l * cfg.rate_scale))
            .collect();
        Ok(sim::run(&exp.topology, &flows, &cfg)?)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0))
        .build()
        .map_err(|err| Failure::Usage(format!("cannot build worker pool: {err}")))?;
    let results: Vec<SimResult> =
        pool.install(|| points.par_iter().map(run_one).collect::<Result<_, _>>())?;

    // `link_id` values: one per topology link, then "all" for the aggregate.
    let link_count = experiments[0].topology.links.len();
    let link_ids: Vec<String> = (0..link_count)
        .map(|l| l.to_string())
        .chain(["all".to_string()])
        .collect();
    let rate_of = |res: &SimResult, link: usize| {
        if link < link_count {
            res.arrival_rate(link)
        } else {
            res.aggregate_rate()
        }
    };

    let mut table = Table::new(SIM_HEADER.to_vec());
    for (ei, &eps) in eps_grid.iter().enumerate() {
        for (ni, &n) in ns.iter().enumerate() {
            let base = (ei * ns.len() + ni) * seeds.len();
            let runs = &results[base..base + seeds.len()];
            let key = |seed: &str, link: &str| {
                vec![
                    scenario.name.clone(),
                    fmt_float(eps),
                    scenario.k.to_string(),
                    n.to_string(),
                    seed.to_string(),
                    link.to_string(),
                ]
            };
            for (res, &seed) in runs.iter().zip(&seeds) {
                for (link, link_id) in link_ids.iter().enumerate() {
                    let mut row = key(&seed.to_string(), link_id);
                    row.extend([
                        fmt_float(rate_of(res, link)),
                        fmt_float(res.retrans_rate()),
                        res.recovered.to_string(),
                        res.delivered_in_window.to_string(),
                        fmt_float(res.mean_delay().unwrap_or(f64::NAN)),
                    ]);
                    table.push_row(row);
                }
            }
            for (link, link_id) in link_ids.iter().enumerate() {
                let columns: Vec<Vec<f64>> = [
                    runs.iter().map(|r| rate_of(r, link)).collect(),
                    runs.iter().map(|r| r.retrans_rate()).collect(),
                    runs.iter().map(|r| r.recovered as f64).collect(),
                    runs.iter().map(|r| r.delivered_in_window as f64).collect(),
                    runs.iter()
                        .map(|r| r.mean_delay().unwrap_or(f64::NAN))
                        .collect(),
                ]
                .into_iter()
                .collect();
                let stats: Vec<(f64, f64)> =
                    columns.iter().map(|series| mean_stderr(series)).collect();
                let mut mean_row = key("mean", link_id);
                mean_row.extend(stats.iter().map(|&(mean, _)| fmt_float(mean)));
                table.push_row(mean_row);
                let mut stderr_row = key("stderr", link_id);
                stderr_row.extend(stats.iter().map(|&(_, se)| fmt_float(se)));
                table.push_row(stderr_row);
            }
        }
    }
    write_table(&table, args.out.as_ref())
}

fn read_table(path: &PathBuf) -> Result<Table, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|err| Failure::Ingest(format!("cannot read {}: {err}", path.display())))?;
    Table::parse(&text)
}

fn cmd_compare(args: &CompareCmd) -> Result<(), Failure> {
    let model_table = read_table(&args.model)?;
    let sim_table = read_table(&args.sim)?;

    let m_eps = model_table.column("epsilon")?;
    let m_k = model_table.column("k")?;
    let m_n = model_table.column("n")?;
    let m_retrans = model_table.column("retrans_rate_coded")?;
    let m_lossy = model_table.column("lambda_lossy_coded")?;
    let m_nonlossy = model_table.column("lambda_nonlossy_coded")?;

    // Theory per (epsilon, k, n): aggregate packet rate and retrans rate.
    let mut theory: BTreeMap<(String, String, String), (f64, f64)> = BTreeMap::new();
    for row in model_table.rows() {
        let rate = parse_float(&row[m_lossy], "model lambda_lossy_coded")?
            + parse_float(&row[m_nonlossy], "model lambda_nonlossy_coded")?;
        let retrans = parse_float(&row[m_retrans], "model retrans_rate_coded")?;
        theory.insert(
            (row[m_eps].clone(), row[m_k].clone(), row[m_n].clone()),
            (rate, retrans),
        );
    }

    let s_eps = sim_table.column("epsilon")?;
    let s_k = sim_table.column("k")?;
    let s_n = sim_table.column("n")?;
    let s_seed = sim_table.column("seed")?;
    let s_link = sim_table.column("link_id")?;
    let s_rate = sim_table.column("arrival_rate_pps")?;
    let s_retrans = sim_table.column("retrans_rate")?;

    let mut checked = 0usize;
    let mut violations = 0usize;
    for row in sim_table.rows() {
        if row[s_seed] != "mean" || row[s_link] != "all" {
            continue;
        }
        let key = (row[s_eps].clone(), row[s_k].clone(), row[s_n].clone());
        let Some(&(theory_rate, theory_retrans)) = theory.get(&key) else {
            return Err(Failure::Usage(format!(
                "sim key epsilon={} k={} n={} has no matching model row",
                key.0, key.1, key.2
            )));
        };
        let measured_rate = parse_float(&row[s_rate], "sim arrival_rate_pps")?;
        let measured_retrans = parse_float(&row[s_retrans], "sim retrans_rate")?;

        let rate_err = (measured_rate - theory_rate).abs() / theory_rate;
        let retrans_diff = (measured_retrans - theory_retrans).abs();
        let retrans_bound = args.retrans_tol.max(args.rate_tol * theory_retrans);
        let ok = rate_err <= args.rate_tol && retrans_diff <= retrans_bound;

        println!(
            "epsilon={} k={} n={}: aggregate rate {:.5e} vs {:.5e} pps \
             (rel err {:.3}%), retrans rate {:.5e} vs {:.5e} (|diff| {:.3e}) [{}]",
            key.0,
            key.1,
            key.2,
            measured_rate,
            theory_rate,
            rate_err * 100.0,
            measured_retrans,
            theory_retrans,
            retrans_diff,
            if ok { "ok" } else { "EXCEEDS TOLERANCE" },
        );
        checked += 1;
        if !ok {
            violations += 1;
        }
    }
    if checked == 0 {
        return Err(Failure::Usage(
            "sim table has no seed=mean, link_id=all rows to compare".into(),
        ));
    }
    if violations > 0 {
        return Err(Failure::Tolerance(format!(
            "{violations} of {checked} keys exceed tolerance"
        )));
    }
    println!("compare: {checked} keys within tolerance");
    Ok(())
}

fn cmd_optimize(args: &OptimizeCmd) -> Result<(), Failure> {
    let scenario = resolve_scenario(&args.scenario)?;
    let eps_grid = epsilon_grid(&args.scenario, &scenario)?;
    let packet_size = SimConfig::default().packet_size_bytes;

    let mut surface = Table::new(vec!["epsilon", "k", "n", "goodput_ratio"]);
    for &eps in &eps_grid {
        let exp = experiment::materialize(&scenario, eps, packet_size)?;
        let ensemble = exp.ensemble(args.scenario.rate_scale)?;
        let loss = LossModel::new(eps)?;
        let (best, delta) = model::optimize_params(&ensemble, &loss, args.k_max, args.n_max)?;
        println!(
            "epsilon={}: best k={} n={} (rate {:.4}) goodput_ratio={}",
            fmt_float(eps),
            best.k(),
            best.n(),
            best.n() as f64 / best.k() as f64,
            fmt_float(delta),
        );
        for k in 1..=args.k_max.min(args.n_max) {
            for n in k..=args.n_max {
                let params = CodingParams::new(k, n)?;
                let report = model::goodput_ratio(&ensemble, &params, &loss)?;
                surface.push_row(vec![
                    fmt_float(eps),
                    k.to_string(),
                    n.to_string(),
                    fmt_float(report.delta),
                ]);
            }
        }
    }
    write_table(&surface, args.out.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse_lists_and_ranges() {
        assert_eq!(parse_grid("0.05", "epsilon").unwrap(), vec![0.05]);
        assert_eq!(parse_grid("0.1, 0.2", "epsilon").unwrap(), vec![0.1, 0.2]);
        let ramp = parse_grid("1.0:1.4:5", "rate").unwrap();
        assert_eq!(ramp.len(), 5);
        for (got, want) in ramp.iter().zip([1.0, 1.1, 1.2, 1.3, 1.4]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(parse_grid("2.0:9.0:1", "rate").unwrap(), vec![2.0]);
        assert!(parse_grid("1.0:1.4", "rate").is_err());
        assert!(parse_grid("a,b", "rate").is_err());
        assert!(parse_grid("1.0:1.4:0", "rate").is_err());
        assert!(parse_grid("", "rate").is_err());
    }

    #[test]
    fn block_length_grids_come_from_n_rate_or_scenario() {
        let mut opts = ScenarioOpts {
            scenario: "scenario1".into(),
            config: None,
            graphml: None,
            lossy_a: None,
            lossy_b: None,
            epsilon: None,
            k: None,
            n: None,
            rate: None,
            target_load: None,
            normalize: None,
            flow_seed: None,
            rate_scale: 2e-3,
        };
        let scenario = config::scenario1();

        let default = n_grid(&opts, &scenario).unwrap();
        assert_eq!(default.first(), Some(&50));
        assert_eq!(default.last(), Some(&70));
        assert!(default.windows(2).all(|w| w[0] < w[1]));

        opts.rate = Some("1.0,1.1,1.2".into());
        assert_eq!(n_grid(&opts, &scenario).unwrap(), vec![50, 55, 60]);

        opts.n = Some("50,53,70".into());
        assert_eq!(n_grid(&opts, &scenario).unwrap(), vec![50, 53, 70]);

        opts.n = Some("49".into());
        assert!(
            n_grid(&opts, &scenario).is_err(),
            "n below k must be rejected"
        );

        opts.n = None;
        opts.rate = Some("0.9".into());
        assert!(
            n_grid(&opts, &scenario).is_err(),
            "rates below 1 must be rejected"
        );
    }

    #[test]
    fn mean_stderr_matches_hand_computation() {
        let (mean, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert!((mean - 2.5).abs() < 1e-12);
        // Sample variance 5/3, standard error sqrt(5/12).
        assert!((se - (5.0_f64 / 12.0).sqrt()).abs() < 1e-12);
        let (single, zero) = mean_stderr(&[7.0]);
        assert_eq!((single, zero), (7.0, 0.0));
    }
}
