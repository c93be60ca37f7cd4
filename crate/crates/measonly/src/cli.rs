//! Command-line interface: strict JSON run configurations in, plot-ready
//! CSV/JSON datasets out, plus a manifest that records the resolved
//! configuration, seed, and wall time of every run.
//!
//! Exit codes: 0 success, 2 configuration error, 3 contract violation,
//! 4 numerical failure, 1 anything else (I/O). Worker count changes wall
//! time only — every emitted number is a pure function of the manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::oracle_audit;
use crate::dynamics::{
    run_ensemble_average, sweep, Observable, RunConfig, SweepColumn, SweepPlan,
};
use crate::ensemble::{
    EnsembleSpec, ProbPath, RangeDist, SiteProbs, DEFAULT_EXPONENTIAL_RATE,
    DEFAULT_POWER_EXPONENT,
};
use crate::error::{Error, ErrorCategory, Result};
use crate::graph::{build_graph_capped, DEFAULT_NODE_CAP};
use crate::index::{
    critical_index_curve, index_closed_form, index_closed_form_factorizable,
    index_closed_form_xyz, index_exact, index_monte_carlo, DEFAULT_INDEX_RING,
};
use crate::pauli::Pauli;
use crate::scaling::{
    collapse, collapsed_coordinates, crossing_point, fit_linear, peak_normalized,
    BoundaryLaw, CollapseOptions, PhaseBoundary, SweepSeries,
};

const DEFAULT_SEED: u64 = 1;

// ---------------------------------------------------------------------------
// configuration schema (strict: unknown keys are rejected everywhere)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbsConfig {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ProbsConfig {
    fn build(&self) -> Result<SiteProbs> {
        SiteProbs::new(self.x, self.y, self.z)
    }

    fn of(p: &SiteProbs) -> Self {
        ProbsConfig { x: p.x(), y: p.y(), z: p.z() }
    }
}

fn default_rate() -> f64 {
    DEFAULT_EXPONENTIAL_RATE
}

fn default_exponent() -> f64 {
    DEFAULT_POWER_EXPONENT
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RangeConfig {
    Fixed { r: usize },
    Uniform { min: usize, max: usize },
    Exponential {
        min: usize,
        max: usize,
        #[serde(default = "default_rate")]
        rate: f64,
    },
    PowerLaw {
        min: usize,
        max: usize,
        #[serde(default = "default_exponent")]
        exponent: f64,
    },
}

impl RangeConfig {
    fn build(&self) -> RangeDist {
        match *self {
            RangeConfig::Fixed { r } => RangeDist::Fixed(r),
            RangeConfig::Uniform { min, max } => RangeDist::Uniform { min, max },
            RangeConfig::Exponential { min, max, rate } => {
                RangeDist::Exponential { rate, min, max }
            }
            RangeConfig::PowerLaw { min, max, exponent } => {
                RangeDist::PowerLaw { exponent, min, max }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathConfig {
    SymmetricLine,
    ZeroZEdge,
    AnchorRay { anchor_x: f64 },
}

impl PathConfig {
    fn build(&self) -> ProbPath {
        match *self {
            PathConfig::SymmetricLine => ProbPath::SymmetricLine,
            PathConfig::ZeroZEdge => ProbPath::ZeroZEdge,
            PathConfig::AnchorRay { anchor_x } => ProbPath::AnchorRay { anchor_x },
        }
    }
}

fn default_path() -> PathConfig {
    PathConfig::SymmetricLine
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleConfig {
    Factorizable { ring: usize, probs: ProbsConfig, range: RangeConfig },
    Xyz { ring: usize, weights: ProbsConfig, range: usize },
    FixedString { ring: usize, letters: String },
}

fn parse_letters(s: &str) -> Result<Vec<Pauli>> {
    s.chars()
        .map(|c| match c {
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("letter '{other}' is not X, Y, or Z"))),
        })
        .collect()
}

impl EnsembleConfig {
    fn build(&self) -> Result<EnsembleSpec> {
        match self {
            EnsembleConfig::Factorizable { ring, probs, range } => {
                EnsembleSpec::factorizable(*ring, probs.build()?, range.build())
            }
            EnsembleConfig::Xyz { ring, weights, range } => {
                EnsembleSpec::xyz(*ring, weights.build()?, *range)
            }
            EnsembleConfig::FixedString { ring, letters } => {
                EnsembleSpec::fixed_string(*ring, parse_letters(letters)?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TemplateConfig {
    Factorizable { range: RangeConfig, path: PathConfig },
    Xyz { range: usize, path: PathConfig },
}

impl TemplateConfig {
    fn build(&self) -> crate::dynamics::EnsembleTemplate {
        use crate::dynamics::EnsembleTemplate;
        match self {
            TemplateConfig::Factorizable { range, path } => {
                EnsembleTemplate::Factorizable { range: range.build(), path: path.build() }
            }
            TemplateConfig::Xyz { range, path } => {
                EnsembleTemplate::Xyz { range: *range, path: path.build() }
            }
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodConfig {
    #[default]
    ClosedForm,
    Exact,
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexConfig {
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub method: MethodConfig,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeFamily {
    Factorizable,
    Xyz,
}

fn default_index_ring() -> usize {
    DEFAULT_INDEX_RING
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum IndexCurveConfig {
    /// Closed-form index at the critical point of a boundary law for each
    /// range, with a linear fit through (range, index).
    Critical {
        law: String,
        #[serde(default = "default_path")]
        path: PathConfig,
        ranges: Vec<usize>,
        #[serde(default = "default_index_ring")]
        ring: usize,
    },
    /// Closed-form index over a (path parameter) x (range) grid.
    Landscape {
        family: LandscapeFamily,
        #[serde(default = "default_path")]
        path: PathConfig,
        params: Vec<f64>,
        ranges: Vec<usize>,
        #[serde(default = "default_index_ring")]
        ring: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub node_cap: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub steps_equilibrate: Option<usize>,
    #[serde(default)]
    pub steps_measure: Option<usize>,
    #[serde(default)]
    pub trajectories: Option<usize>,
    #[serde(default)]
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub i3_divisor: Option<usize>,
    #[serde(default)]
    pub profile_translations: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub template: TemplateConfig,
    pub params: Vec<f64>,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub trajectories: Option<usize>,
    #[serde(default)]
    pub equilibrate_factor: Option<usize>,
    #[serde(default)]
    pub measure_factor: Option<usize>,
    #[serde(default)]
    pub observables: Option<Vec<Observable>>,
    #[serde(default)]
    pub i3_divisor: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_column() -> SweepColumn {
    SweepColumn::MutualInfo
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseConfig {
    /// Sweep CSV to read (as written by the `sweep` subcommand).
    pub input: PathBuf,
    #[serde(default = "default_column")]
    pub column: SweepColumn,
    #[serde(default)]
    pub normalize_peak: bool,
    #[serde(default)]
    pub init: Option<(f64, f64)>,
    #[serde(default)]
    pub nu_starts: Option<Vec<f64>>,
    #[serde(default)]
    pub qc_starts: Option<usize>,
}

fn default_x_column() -> String {
    "x".into()
}

fn default_y_column() -> String {
    "y".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FitConfig {
    /// Least-squares line through two CSV columns.
    Linear {
        input: PathBuf,
        #[serde(default = "default_x_column")]
        x_column: String,
        #[serde(default = "default_y_column")]
        y_column: String,
    },
    /// Crossing parameter of per-size curves in a sweep CSV.
    Crossing {
        input: PathBuf,
        #[serde(default = "default_column")]
        column: SweepColumn,
        /// Scale each size's curve to unit peak first. Required for
        /// observables whose amplitude decays with size, where the raw
        /// curves are strictly ordered and never intersect.
        #[serde(default)]
        normalize_peak: bool,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub path: Option<PathConfig>,
}

fn default_sequences() -> usize {
    200
}

fn default_measurements() -> usize {
    50
}

fn default_sizes() -> Vec<usize> {
    vec![4, 6, 8]
}

fn default_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleCheckConfig {
    pub sequences: usize,
    pub measurements: usize,
    pub sizes: Vec<usize>,
    pub tolerance: f64,
    pub seed: Option<u64>,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        OracleCheckConfig {
            sequences: default_sequences(),
            measurements: default_measurements(),
            sizes: default_sizes(),
            tolerance: default_tolerance(),
            seed: None,
        }
    }
}

fn parse_law(token: &str) -> Result<BoundaryLaw> {
    match token {
        "factorizable" => Ok(BoundaryLaw::factorizable()),
        "xyz-odd" => Ok(BoundaryLaw::xyz_odd()),
        "xyz-even" => Ok(BoundaryLaw::xyz_even()),
        other => Err(Error::Config(format!(
            "unknown boundary family '{other}' (expected factorizable, xyz-odd, or xyz-even)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// argument surface
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "measonly",
    version,
    about = "Measurement-only entanglement dynamics: simulation and analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Run configuration file (strict JSON schema)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed; overrides the config file's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides MEASONLY_WORKERS (default: all cores).
    /// Affects wall time only, never results.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    /// Optional configuration file; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Boundary family: factorizable | xyz-odd | xyz-even
    #[arg(long)]
    family: Option<String>,
    /// String range
    #[arg(long)]
    r: Option<usize>,
    /// Tuning path: symmetric-line | zero-z-edge | anchor-ray
    #[arg(long)]
    path: Option<String>,
    /// Anchor x for the anchor-ray path
    #[arg(long)]
    anchor: Option<f64>,
    /// Worker threads (unused here; accepted for uniformity)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Non-commutativity index of a single ensemble
    Index(RunArgs),
    /// Index along a phase boundary (critical) or over a parameter grid
    /// (landscape)
    IndexCurve(RunArgs),
    /// Frustration-graph classification of an ensemble's support
    Graph(RunArgs),
    /// Ensemble-averaged trajectory observables at one parameter point
    Simulate(RunArgs),
    /// Grid of runs over path parameters and ring sizes
    Sweep(RunArgs),
    /// Finite-size scaling collapse of a sweep CSV
    Collapse(RunArgs),
    /// Linear fit or curve-crossing extraction from CSV data
    Fit(RunArgs),
    /// Critical point of a phase-boundary law at a given range
    Boundary(BoundaryArgs),
    /// Randomized stabilizer-vs-dense equivalence audit
    OracleCheck(RunArgs),
}

// ---------------------------------------------------------------------------
// infrastructure: logging, workers, I/O, manifest
// ---------------------------------------------------------------------------

struct StderrLogger;

static LOGGER: StderrLogger = StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, _: &log::Metadata) -> bool {
        true
    }

    fn log(&self, record: &log::Record) {
        eprintln!("[{}] {}", record.level().to_string().to_lowercase(), record.args());
    }

    fn flush(&self) {}
}

fn init_logging() {
    if log::set_logger(&LOGGER).is_ok() {
        let level = std::env::var("MEASONLY_LOG")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(log::LevelFilter::Warn);
        log::set_max_level(level);
    }
}

fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("MEASONLY_WORKERS") {
            Ok(v) => Some(v.parse().map_err(|_| {
                Error::Config(format!("MEASONLY_WORKERS='{v}' is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    match requested {
        Some(0) => Err(Error::Config("worker count must be at least 1".into())),
        Some(n) => {
            if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
                let current = rayon::current_num_threads();
                if current != n {
                    log::warn!(
                        "worker pool already initialized with {current} threads; \
                         request for {n} ignored (results are unaffected)"
                    );
                }
            }
            Ok(rayon::current_num_threads())
        }
        None => Ok(rayon::current_num_threads()),
    }
}

fn load_config<C: serde::de::DeserializeOwned>(path: &Path) -> Result<C> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Full-precision float cell (Rust's shortest round-trip formatting).
fn cell(v: f64) -> String {
    format!("{v}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

fn write_csv(
    path: &Path,
    comments: &[String],
    header: &str,
    rows: &[Vec<String>],
) -> Result<()> {
    let mut text = String::new();
    for c in comments {
        text.push_str("# ");
        text.push_str(c);
        text.push('\n');
    }
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

impl Csv {
    fn column(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            Error::Parse(format!(
                "no column '{name}' (available: {})",
                self.header.join(", ")
            ))
        })
    }
}

fn read_numeric_csv(path: &Path) -> Result<Csv> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: no header row", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let mut row = Vec::with_capacity(header.len());
        for field in line.split(',') {
            let field = field.trim();
            if field.is_empty() {
                row.push(None);
            } else {
                row.push(Some(field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "{} row {}: '{field}' is not a number",
                        path.display(),
                        k + 2
                    ))
                })?));
            }
        }
        if row.len() != header.len() {
            return Err(Error::Parse(format!(
                "{} row {}: {} fields, header has {}",
                path.display(),
                k + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok(Csv { header, rows })
}

/// Rebuild per-size curves from a sweep CSV written by the sweep command.
fn series_from_sweep_csv(csv: &Csv, column: SweepColumn) -> Result<Vec<SweepSeries>> {
    let pi = csv.column("param")?;
    let si = csv.column("size")?;
    let name = match column {
        SweepColumn::HalfChain => "half_chain_mean",
        SweepColumn::MutualInfo => "mutual_info_mean",
        SweepColumn::Tripartite => "tripartite_mean",
    };
    let ci = csv.column(name)?;
    let mut by_size = std::collections::BTreeMap::<usize, Vec<(f64, f64)>>::new();
    for (k, row) in csv.rows.iter().enumerate() {
        let get = |i: usize, what: &str| {
            row[i].ok_or_else(|| {
                Error::Parse(format!("sweep row {}: empty {what} field", k + 2))
            })
        };
        let size_f = get(si, "size")?;
        let size = size_f.round() as usize;
        if (size_f - size as f64).abs() > 1e-9 || size == 0 {
            return Err(Error::Parse(format!(
                "sweep row {}: size {size_f} is not a positive integer",
                k + 2
            )));
        }
        by_size
            .entry(size)
            .or_default()
            .push((get(pi, "param")?, get(ci, name)?));
    }
    by_size
        .into_iter()
        .map(|(size, points)| SweepSeries::new(size, points))
        .collect()
}

struct Ctx {
    command: &'static str,
    out: PathBuf,
    workers: usize,
    started: Instant,
}

impl Ctx {
    fn new(command: &'static str, out: &Path, workers: Option<usize>) -> Result<Self> {
        let workers = resolve_workers(workers)?;
        std::fs::create_dir_all(out)?;
        Ok(Ctx { command, out: out.to_path_buf(), workers, started: Instant::now() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Write the manifest recording the resolved configuration.
    fn finish<C: Serialize>(
        &self,
        config: &C,
        seed: Option<u64>,
        outputs: Vec<String>,
    ) -> Result<()> {
        let manifest = serde_json::json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "workers": self.workers,
            "wall_time_seconds": self.started.elapsed().as_secs_f64(),
            "config": serde_json::to_value(config)?,
            "outputs": outputs,
        });
        write_json(&self.path("manifest.json"), &manifest)
    }
}

fn config_comment<C: Serialize>(config: &C) -> Result<Vec<String>> {
    Ok(vec![format!("config: {}", serde_json::to_string(config)?)])
}

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

fn cmd_index(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("index", &args.out, args.workers)?;
    let mut cfg: IndexConfig = load_config(&args.config)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    cfg.seed = Some(seed);
    let spec = cfg.ensemble.build()?;
    let result = match cfg.method {
        MethodConfig::ClosedForm => index_closed_form(&spec)?,
        MethodConfig::Exact => index_exact(&spec)?,
        MethodConfig::MonteCarlo { samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            index_monte_carlo(&spec, samples, &mut rng)?
        }
    };
    write_json(&ctx.path("index.json"), &result)?;
    println!(
        "index {} std_error {} (ring {}, {:?})",
        result.value, result.std_error, result.ring, result.method
    );
    ctx.finish(&cfg, Some(seed), vec!["index.json".into()])
}

fn cmd_index_curve(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("index-curve", &args.out, args.workers)?;
    let cfg: IndexCurveConfig = load_config(&args.config)?;
    let outputs = match &cfg {
        IndexCurveConfig::Critical { law, path, ranges, ring } => {
            let boundary = PhaseBoundary::new(parse_law(law)?, path.build())?;
            let curve = critical_index_curve(&boundary, ranges, *ring)?;
            write_json(&ctx.path("index_curve.json"), &curve)?;
            let rows: Vec<Vec<String>> = curve
                .points
                .iter()
                .map(|p| {
                    vec![
                        p.range.to_string(),
                        cell(p.delta_qc),
                        cell(p.param),
                        cell(p.index),
                    ]
                })
                .collect();
            write_csv(
                &ctx.path("index_curve.csv"),
                &config_comment(&cfg)?,
                "range,delta_qc,param,index",
                &rows,
            )?;
            println!(
                "critical index curve: slope {} intercept {} r_squared {}",
                curve.fit.slope, curve.fit.intercept, curve.fit.r_squared
            );
            vec!["index_curve.json".into(), "index_curve.csv".into()]
        }
        IndexCurveConfig::Landscape { family, path, params, ranges, ring } => {
            let path = path.build();
            let mut rows = Vec::with_capacity(params.len() * ranges.len());
            for &t in params {
                let probs = path.probs_at(t)?;
                for &r in ranges {
                    let value = match family {
                        LandscapeFamily::Factorizable => {
                            index_closed_form_factorizable(probs, r, r, *ring)?
                        }
                        LandscapeFamily::Xyz => index_closed_form_xyz(probs, r, *ring)?,
                    };
                    rows.push(vec![cell(t), r.to_string(), cell(value)]);
                }
            }
            write_csv(
                &ctx.path("index_landscape.csv"),
                &config_comment(&cfg)?,
                "param,range,index",
                &rows,
            )?;
            println!("index landscape: {} points", rows.len());
            vec!["index_landscape.csv".into()]
        }
    };
    ctx.finish(&cfg, None, outputs)
}

fn cmd_graph(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("graph", &args.out, args.workers)?;
    let cfg: GraphConfig = load_config(&args.config)?;
    let spec = cfg.ensemble.build()?;
    let graph = build_graph_capped(&spec, cfg.node_cap.unwrap_or(DEFAULT_NODE_CAP))?;
    let report = graph.classify();
    write_json(&ctx.path("graph.json"), &report)?;
    std::fs::write(ctx.path("edges.txt"), graph.to_edge_text())?;
    println!(
        "{} nodes, {} edges, bipartite: {}, triangle: {}, shortest odd cycle: {:?}",
        report.nodes,
        report.edges,
        report.is_bipartite,
        report.has_triangle,
        report.shortest_odd_cycle_length
    );
    ctx.finish(&cfg, None, vec!["graph.json".into(), "edges.txt".into()])
}

fn cmd_simulate(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("simulate", &args.out, args.workers)?;
    let mut cfg: SimulateConfig = load_config(&args.config)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    cfg.seed = Some(seed);

    let mut run = RunConfig::new(cfg.ensemble.build()?, seed);
    if let Some(v) = cfg.steps_equilibrate {
        run.steps_equilibrate = v;
    }
    if let Some(v) = cfg.steps_measure {
        run.steps_measure = v;
    }
    if let Some(v) = cfg.trajectories {
        run.trajectories = v;
    }
    run.observables = cfg.observables.clone();
    if let Some(v) = cfg.i3_divisor {
        run.i3_divisor = v;
    }
    if let Some(v) = cfg.profile_translations {
        run.profile_translations = v;
    }

    let stats = run_ensemble_average(&run)?;
    let comments = config_comment(&cfg)?;
    let mut outputs = vec!["scalars.csv".into()];

    let mut scalar_rows = vec![vec![
        "half_chain".to_string(),
        cell(stats.half_chain.mean),
        cell(stats.half_chain.std_error),
        stats.half_chain.n.to_string(),
    ]];
    if let Some(mi) = &stats.mutual_info {
        scalar_rows.push(vec![
            "mutual_info".into(),
            cell(mi.mean),
            cell(mi.std_error),
            mi.n.to_string(),
        ]);
    }
    if let Some(i3) = &stats.tripartite {
        scalar_rows.push(vec![
            "tripartite".into(),
            cell(i3.mean),
            cell(i3.std_error),
            i3.n.to_string(),
        ]);
    }
    write_csv(
        &ctx.path("scalars.csv"),
        &comments,
        "observable,mean,std_error,n",
        &scalar_rows,
    )?;

    if let Some(series) = &stats.series {
        let rows: Vec<Vec<String>> = series
            .x
            .iter()
            .zip(series.mean.iter().zip(&series.std_error))
            .map(|(&x, (&m, &e))| vec![cell(x), cell(m), cell(e)])
            .collect();
        write_csv(&ctx.path("series.csv"), &comments, "layer,mean,std_error", &rows)?;
        outputs.push("series.csv".into());
    }
    if let Some(profile) = &stats.profile {
        let rows: Vec<Vec<String>> = profile
            .x
            .iter()
            .zip(profile.mean.iter().zip(&profile.std_error))
            .map(|(&x, (&m, &e))| vec![cell(x), cell(m), cell(e)])
            .collect();
        write_csv(&ctx.path("profile.csv"), &comments, "arc_len,mean,std_error", &rows)?;
        outputs.push("profile.csv".into());
    }

    println!(
        "half-chain entropy {} std_error {} over {} trajectories (ring {})",
        stats.half_chain.mean, stats.half_chain.std_error, stats.trajectories, stats.ring
    );
    ctx.finish(&cfg, Some(seed), outputs)
}

fn cmd_sweep(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("sweep", &args.out, args.workers)?;
    let mut cfg: SweepConfig = load_config(&args.config)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    cfg.seed = Some(seed);

    let mut plan =
        SweepPlan::new(cfg.template.build(), cfg.params.clone(), cfg.sizes.clone(), seed);
    if let Some(v) = cfg.trajectories {
        plan.trajectories = v;
    }
    if let Some(v) = cfg.equilibrate_factor {
        plan.equilibrate_factor = v;
    }
    if let Some(v) = cfg.measure_factor {
        plan.measure_factor = v;
    }
    if let Some(v) = &cfg.observables {
        plan.observables = v.clone();
    }
    if let Some(v) = cfg.i3_divisor {
        plan.i3_divisor = v;
    }

    let rows = sweep(&plan)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                cell(r.param),
                r.size.to_string(),
                cell(r.half_chain.mean),
                cell(r.half_chain.std_error),
                opt_cell(r.mutual_info.as_ref().map(|s| s.mean)),
                opt_cell(r.mutual_info.as_ref().map(|s| s.std_error)),
                opt_cell(r.tripartite.as_ref().map(|s| s.mean)),
                opt_cell(r.tripartite.as_ref().map(|s| s.std_error)),
            ]
        })
        .collect();
    write_csv(
        &ctx.path("sweep.csv"),
        &config_comment(&cfg)?,
        "param,size,half_chain_mean,half_chain_stderr,mutual_info_mean,mutual_info_stderr,\
         tripartite_mean,tripartite_stderr",
        &csv_rows,
    )?;
    println!("sweep: {} grid points -> sweep.csv", rows.len());
    ctx.finish(&cfg, Some(seed), vec!["sweep.csv".into()])
}

fn cmd_collapse(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("collapse", &args.out, args.workers)?;
    let cfg: CollapseConfig = load_config(&args.config)?;
    let csv = read_numeric_csv(&cfg.input)?;
    let series = series_from_sweep_csv(&csv, cfg.column)?;
    let mut options = CollapseOptions::default();
    options.normalize_peak = cfg.normalize_peak;
    options.init = cfg.init;
    if let Some(v) = &cfg.nu_starts {
        options.nu_starts = v.clone();
    }
    if let Some(v) = cfg.qc_starts {
        options.qc_starts = v;
    }
    let fit = collapse(&series, &options)?;
    write_json(&ctx.path("collapse.json"), &fit)?;
    let coords = collapsed_coordinates(&series, &fit)?;
    let rows: Vec<Vec<String>> = coords
        .iter()
        .map(|&(size, x, y)| vec![size.to_string(), cell(x), cell(y)])
        .collect();
    write_csv(&ctx.path("collapsed.csv"), &config_comment(&cfg)?, "size,x,y", &rows)?;
    println!(
        "collapse: qc {} nu {} shift {} objective {}",
        fit.qc, fit.nu, fit.shift, fit.objective
    );
    ctx.finish(&cfg, None, vec!["collapse.json".into(), "collapsed.csv".into()])
}

fn cmd_fit(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("fit", &args.out, args.workers)?;
    let cfg: FitConfig = load_config(&args.config)?;
    let outputs = match &cfg {
        FitConfig::Linear { input, x_column, y_column } => {
            let csv = read_numeric_csv(input)?;
            let xi = csv.column(x_column)?;
            let yi = csv.column(y_column)?;
            let pts: Vec<(f64, f64)> = csv
                .rows
                .iter()
                .filter_map(|row| Some((row[xi]?, row[yi]?)))
                .collect();
            let fit = fit_linear(&pts)?;
            write_json(&ctx.path("fit.json"), &fit)?;
            println!(
                "linear fit: slope {} intercept {} r_squared {}",
                fit.slope, fit.intercept, fit.r_squared
            );
            vec!["fit.json".into()]
        }
        FitConfig::Crossing { input, column, normalize_peak } => {
            let csv = read_numeric_csv(input)?;
            let mut series = series_from_sweep_csv(&csv, *column)?;
            if *normalize_peak {
                series = peak_normalized(&series)?;
            }
            let param = crossing_point(&series)?;
            write_json(
                &ctx.path("crossing.json"),
                &serde_json::json!({
                    "param": param,
                    "column": column,
                    "normalize_peak": normalize_peak,
                    "sizes": series.iter().map(|s| s.size).collect::<Vec<_>>(),
                }),
            )?;
            println!("crossing at param {param}");
            vec!["crossing.json".into()]
        }
    };
    ctx.finish(&cfg, None, outputs)
}

fn parse_path_flag(token: &str, anchor: Option<f64>) -> Result<PathConfig> {
    match token {
        "symmetric-line" => Ok(PathConfig::SymmetricLine),
        "zero-z-edge" => Ok(PathConfig::ZeroZEdge),
        "anchor-ray" => {
            let anchor_x = anchor.ok_or_else(|| {
                Error::Config("--path anchor-ray needs --anchor <x>".into())
            })?;
            Ok(PathConfig::AnchorRay { anchor_x })
        }
        other => Err(Error::Config(format!(
            "unknown path '{other}' (expected symmetric-line, zero-z-edge, or anchor-ray)"
        ))),
    }
}

fn cmd_boundary(args: &BoundaryArgs) -> Result<()> {
    let ctx = Ctx::new("boundary", &args.out, args.workers)?;
    let file_cfg: BoundaryConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => BoundaryConfig::default(),
    };
    let family = args.family.clone().or(file_cfg.family).ok_or_else(|| {
        Error::Config("boundary needs a family (--family or config file)".into())
    })?;
    let r = args.r.or(file_cfg.r).ok_or_else(|| {
        Error::Config("boundary needs a range (--r or config file)".into())
    })?;
    let path_cfg = match &args.path {
        Some(token) => parse_path_flag(token, args.anchor),
        None => Ok(file_cfg.path.unwrap_or(PathConfig::SymmetricLine)),
    }?;
    let resolved = BoundaryConfig {
        family: Some(family.clone()),
        r: Some(r),
        path: Some(path_cfg.clone()),
    };

    let boundary = PhaseBoundary::new(parse_law(&family)?, path_cfg.build())?;
    let delta_qc = boundary.critical_delta_q(r)?;
    let param = boundary.critical_param(r)?;
    let probs = boundary.critical_probs(r)?;
    write_json(
        &ctx.path("boundary.json"),
        &serde_json::json!({
            "family": family,
            "range": r,
            "path": path_cfg,
            "delta_qc": delta_qc,
            "param": param,
            "probs": probs.as_ref().map(ProbsConfig::of),
        }),
    )?;
    match (delta_qc, param) {
        (Some(dq), Some(p)) => println!("critical point at param {p} (delta_q {dq})"),
        _ => println!("no transition at range {r} for family {family}"),
    }
    ctx.finish(&resolved, None, vec!["boundary.json".into()])
}

fn cmd_oracle_check(args: &RunArgs) -> Result<()> {
    let ctx = Ctx::new("oracle-check", &args.out, args.workers)?;
    let mut cfg: OracleCheckConfig = load_config(&args.config)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    cfg.seed = Some(seed);
    let report =
        oracle_audit(&cfg.sizes, cfg.sequences, cfg.measurements, cfg.tolerance, seed)?;
    write_json(&ctx.path("oracle_check.json"), &report)?;
    println!(
        "oracle check: {} comparisons, max |difference| {} (tolerance {})",
        report.comparisons, report.max_abs_difference, report.tolerance
    );
    ctx.finish(&cfg, Some(seed), vec!["oracle_check.json".into()])?;
    if !report.passed {
        return Err(Error::Numerical(format!(
            "stabilizer/dense entropy mismatch {} exceeds tolerance {}",
            report.max_abs_difference, report.tolerance
        )));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.command {
        Cmd::Index(a) => cmd_index(a),
        Cmd::IndexCurve(a) => cmd_index_curve(a),
        Cmd::Graph(a) => cmd_graph(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Collapse(a) => cmd_collapse(a),
        Cmd::Fit(a) => cmd_fit(a),
        Cmd::Boundary(a) => cmd_boundary(a),
        Cmd::OracleCheck(a) => cmd_oracle_check(a),
    }
}

fn exit_code(category: ErrorCategory) -> i32 {
    match category {
        ErrorCategory::Config => 2,
        ErrorCategory::Contract => 3,
        ErrorCategory::Numerical => 4,
        ErrorCategory::Other => 1,
    }
}

/// Entry point for the binary: parses arguments from the environment and
/// returns the process exit code.
pub fn run() -> i32 {
    init_logging();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.category())
        }
    }
}
