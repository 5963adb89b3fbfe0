//! The `aklt` command line.
//!
//! Results go to standard output or to files under the output directory
//! (`--out-dir`, else `AKLT_OUTPUT_DIR`, else the working directory).
//! Progress goes to standard error. Exit status is 0 on success, 2 for usage
//! errors and 3 for failures while running.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use aklt_core::graph_rules::{reduce_to_honeycomb, reduce_with_pattern, Reduction};
use aklt_core::lattice::{build_lattice, Boundary, LatticeKind};
use aklt_core::percolation::{CriticalSet, DeletionMode, SpanRule};
use aklt_core::sampler::ChainParams;
use aklt_core::stats::linear_fit;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::campaign::{
    bare_percolation, curves_and_threshold, sample_percolation, sample_stats, BareRequest, BareTarget, CampaignError,
};
use crate::formats::{
    curve_rows, write_curves, ExtrapolationDoc, FormatError, GraphDoc, HoneycombCheckDoc, LatticeDoc, OracleDoc,
    PatternDoc, PercolationDoc, ReduceDoc, SizeStatsDoc, StatsDoc, ThresholdDoc, SCHEMA,
};
use crate::oracle;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "AKLT_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "aklt",
    version,
    about = "POVM Monte Carlo for spin-3/2 AKLT states on trivalent lattices"
)]
pub struct Cli {
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory relative output paths are resolved against.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Suppress progress messages.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Domain-graph statistics of sampled configurations.
    Stats(StatsArgs),
    /// Site or bond deletion on sampled domain graphs.
    Percolation(PercolationArgs),
    /// Bond or site percolation on the bare lattice.
    Bare(BareArgs),
    /// Compare the sampler with exact enumeration on a small graph.
    Oracle(OracleArgs),
    /// Reduce a lattice cluster state to the honeycomb by Pauli measurements.
    Reduce(ReduceArgs),
    /// Write a generated lattice as JSON.
    Lattice(LatticeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Honeycomb,
    SquareOctagon,
    Star,
    Cross,
}

impl From<KindArg> for LatticeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Honeycomb => LatticeKind::Honeycomb,
            KindArg::SquareOctagon => LatticeKind::SquareOctagon,
            KindArg::Star => LatticeKind::Star,
            KindArg::Cross => LatticeKind::Cross,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BareKindArg {
    Honeycomb,
    SquareOctagon,
    Star,
    Cross,
    Kagome,
}

impl From<BareKindArg> for BareTarget {
    fn from(k: BareKindArg) -> Self {
        match k {
            BareKindArg::Honeycomb => BareTarget::Lattice(LatticeKind::Honeycomb),
            BareKindArg::SquareOctagon => BareTarget::Lattice(LatticeKind::SquareOctagon),
            BareKindArg::Star => BareTarget::Lattice(LatticeKind::Star),
            BareKindArg::Cross => BareTarget::Lattice(LatticeKind::Cross),
            BareKindArg::Kagome => BareTarget::Kagome,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcArg {
    Torus,
    Cylinder,
}

impl From<BcArg> for Boundary {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Torus => Boundary::Torus,
            BcArg::Cylinder => Boundary::Cylinder,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Site,
    Bond,
}

impl From<ModeArg> for DeletionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Site => DeletionMode::Site,
            ModeArg::Bond => DeletionMode::Bond,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    /// Left to right boundary column of an open cylinder.
    Cylinder,
    /// A cluster winding around the periodic x direction of a torus.
    WrapX,
}

impl From<RuleArg> for SpanRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Cylinder => SpanRule::Cylinder,
            RuleArg::WrapX => SpanRule::WrapX,
        }
    }
}

impl RuleArg {
    fn boundary(self) -> Boundary {
        match self {
            RuleArg::Cylinder => Boundary::Cylinder,
            RuleArg::WrapX => Boundary::Torus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub chains: u32,
    #[arg(long = "burn-in", default_value_t = 2000)]
    pub burn_in: u64,
    /// Measurement sweeps per chain after burn-in.
    #[arg(long, default_value_t = 20_000)]
    pub sweeps: u64,
    /// Sweeps between measurements.
    #[arg(long, default_value_t = 10)]
    pub interval: u64,
}

impl ChainArgs {
    fn params(&self) -> Result<ChainParams, CliError> {
        let p = ChainParams {
            seed: self.seed,
            burn_in_sweeps: self.burn_in,
            measure_sweeps: self.sweeps,
            measure_interval: self.interval,
            n_chains: self.chains,
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if p.measurements() < 2 {
            return Err(CliError::Usage("need at least two measurements per chain".into()));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long, value_enum)]
    pub lattice: KindArg,
    /// Linear size; repeat or separate with commas for several sizes.
    #[arg(long = "L", value_delimiter = ',', required = true)]
    pub sizes: Vec<u32>,
    #[arg(long, value_enum, default_value = "torus")]
    pub bc: BcArg,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PercolationArgs {
    #[arg(long, value_enum)]
    pub lattice: KindArg,
    #[arg(long = "L", value_delimiter = ',', required = true)]
    pub sizes: Vec<u32>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["site", "bond"])]
    pub mode: Vec<ModeArg>,
    /// Deletion trials per sampled graph.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// The boundary follows from the rule: cylinder or torus.
    #[arg(long = "span-rule", value_enum, default_value = "cylinder")]
    pub span_rule: RuleArg,
    /// Deletion probabilities as `start:stop:step` or a comma list. The
    /// default is a coarse grid refined around each crossing.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// What goes to standard output when `--out` is absent.
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Base path: writes `<out>.json` and `<out>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct BareArgs {
    #[arg(long, value_enum)]
    pub lattice: BareKindArg,
    #[arg(long = "L", value_delimiter = ',', required = true)]
    pub sizes: Vec<u32>,
    #[arg(long, value_enum, default_value = "bond")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long = "span-rule", value_enum, default_value = "cylinder")]
    pub span_rule: RuleArg,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent random streams the trials are split over.
    #[arg(long, default_value_t = 16)]
    pub chunks: u32,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct OracleArgs {
    /// One of k4, prism, cube, petersen.
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    pub lattice: KindArg,
    #[arg(long = "L")]
    pub size: u32,
    /// Measurement pattern JSON replacing the built-in one.
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    /// Also write the reduced graph as JSON.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct LatticeArgs {
    #[arg(long, value_enum)]
    pub lattice: KindArg,
    #[arg(long = "L")]
    pub size: u32,
    #[arg(long, value_enum, default_value = "torus")]
    pub bc: BcArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing
/// results that have no output file to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(stdout, "{e}")?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    let ctx = Context {
        threads: cli.threads,
        out_dir: cli
            .out_dir
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from)),
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Stats(a) => stats(&ctx, &a, stdout),
        Command::Percolation(a) => percolation(&ctx, &a, stdout),
        Command::Bare(a) => bare(&ctx, &a, stdout),
        Command::Oracle(a) => oracle_cmd(&ctx, &a, stdout),
        Command::Reduce(a) => reduce(&ctx, &a, stdout),
        Command::Lattice(a) => lattice(&ctx, &a, stdout),
    }
}

struct Context {
    threads: Option<usize>,
    out_dir: Option<PathBuf>,
    quiet: bool,
}

impl Context {
    fn progress(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    fn create(&self, path: &Path) -> Result<(PathBuf, fs::File), CliError> {
        let path = self.resolve(path);
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let file = fs::File::create(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Ok((path, file))
    }

    /// Writes pretty JSON to `out`, or to `stdout` when there is no file.
    fn emit_json<T: Serialize>(&self, doc: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(doc).map_err(FormatError::from)?;
        match out {
            Some(p) => {
                let (path, mut f) = self.create(p)?;
                writeln!(f, "{text}")?;
                self.progress(&format!("wrote {}", path.display()));
            }
            None => writeln!(stdout, "{text}")?,
        }
        Ok(())
    }
}

fn config_value<T: Serialize>(command: &str, args: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(args).unwrap_or(serde_json::Value::Null);
    if let serde_json::Value::Object(map) = &mut v {
        map.remove("out");
        map.remove("graph_out");
        map.insert("command".into(), command.into());
    }
    v
}

fn check_sizes(kind: LatticeKind, sizes: &[u32], bc: Boundary) -> Result<(), CliError> {
    if sizes.is_empty() {
        return Err(CliError::Usage("no sizes given".into()));
    }
    for &l in sizes {
        build_lattice(kind, l, bc).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

/// Parses `start:stop:step` or `a,b,c`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad grid {spec:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        spec.split(',').map(num).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|p| !(0.0..=1.0).contains(p)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad());
    }
    Ok(grid)
}

fn stats(ctx: &Context, a: &StatsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let kind = LatticeKind::from(a.lattice);
    let bc = Boundary::from(a.bc);
    check_sizes(kind, &a.sizes, bc)?;
    let params = a.chain.params()?;
    let mut sizes = Vec::new();
    for &l in &a.sizes {
        ctx.progress(&format!("stats: {} L={l}", kind.name()));
        let lat = build_lattice(kind, l, bc).map_err(|e| CliError::Runtime(e.to_string()))?;
        let s = sample_stats(&lat, &params, ctx.threads)?;
        sizes.push(SizeStatsDoc {
            size: s.size,
            n_sites: s.n_sites,
            acceptance_rate: s.acceptance_rate,
            max_monochromatic_triangles: s.max_monochromatic_triangles,
            stats: (&s.stats).into(),
        });
    }
    let doc = StatsDoc {
        schema: SCHEMA,
        lattice: kind.name().into(),
        bc: bc.name().into(),
        edge_convention: "after-mod2".into(),
        config: config_value("stats", a),
        extrapolation: extrapolate(&sizes),
        sizes,
    };
    ctx.emit_json(&doc, a.out.as_deref(), stdout)
}

fn extrapolate(sizes: &[SizeStatsDoc]) -> Vec<ExtrapolationDoc> {
    if sizes.len() < 2 {
        return Vec::new();
    }
    let inv: Vec<f64> = sizes.iter().map(|s| 1.0 / f64::from(s.size)).collect();
    type Getter = fn(&SizeStatsDoc) -> f64;
    let quantities: [(&str, Getter); 4] = [
        ("avg_degree", |s| s.stats.avg_degree.mean),
        ("avg_domain_size", |s| s.stats.avg_domain_size.mean),
        ("vertices_per_site", |s| s.stats.vertices_per_site.mean),
        ("edges_per_site", |s| s.stats.edges_per_site.mean),
    ];
    quantities
        .iter()
        .map(|(name, get)| {
            let y: Vec<f64> = sizes.iter().map(get).collect();
            let (a, b) = linear_fit(&inv, &y);
            ExtrapolationDoc {
                quantity: (*name).into(),
                a,
                b,
            }
        })
        .collect()
}

/// Writes the JSON document and the curve CSV: both to files when `out` is
/// set, otherwise the one chosen by `format` to `stdout`.
fn emit_percolation(
    ctx: &Context,
    doc: &PercolationDoc,
    out: Option<&Path>,
    format: FormatArg,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match out {
        Some(base) => {
            let (path, f) = ctx.create(&base.with_extension("csv"))?;
            write_curves(f, &doc.curves)?;
            ctx.progress(&format!("wrote {}", path.display()));
            ctx.emit_json(doc, Some(&base.with_extension("json")), stdout)
        }
        None => match format {
            FormatArg::Json => ctx.emit_json(doc, None, stdout),
            FormatArg::Csv => Ok(write_curves(stdout, &doc.curves)?),
        },
    }
}

fn threshold_docs(
    name: &str,
    modes: &[DeletionMode],
    per_mode: Vec<Vec<CriticalSet>>,
    grid: Option<&[f64]>,
) -> Result<(Vec<ThresholdDoc>, Vec<crate::formats::CurveRow>), CliError> {
    let mut thresholds = Vec::new();
    let mut rows = Vec::new();
    for (&mode, sets) in modes.iter().zip(per_mode) {
        let (curves, threshold) = curves_and_threshold(&sets, grid)?;
        for c in &curves {
            rows.extend(curve_rows(name, c));
        }
        thresholds.push(ThresholdDoc::new(mode, &curves, threshold.map_err(|e| e.to_string())));
    }
    Ok((thresholds, rows))
}

fn percolation(ctx: &Context, a: &PercolationArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let kind = LatticeKind::from(a.lattice);
    let bc = a.span_rule.boundary();
    check_sizes(kind, &a.sizes, bc)?;
    let params = a.chain.params()?;
    let grid = a.grid.as_deref().map(parse_grid).transpose()?;
    let mut modes: Vec<DeletionMode> = Vec::new();
    for &m in &a.mode {
        if !modes.contains(&m.into()) {
            modes.push(m.into());
        }
    }
    let mut per_mode: Vec<Vec<CriticalSet>> = vec![Vec::new(); modes.len()];
    let mut spanning = Vec::new();
    let mut triangle = Vec::new();
    for &l in &a.sizes {
        ctx.progress(&format!("percolation: {} L={l}", kind.name()));
        let lat = build_lattice(kind, l, bc).map_err(|e| CliError::Runtime(e.to_string()))?;
        let run = sample_percolation(&lat, &params, &modes, a.trials, a.span_rule.into(), ctx.threads)?;
        spanning.push((l, run.spanning_fraction()));
        if kind == LatticeKind::Star {
            triangle.push((l, run.triangle_edge_deletion));
        }
        for (acc, set) in per_mode.iter_mut().zip(run.sets) {
            acc.push(set);
        }
    }
    let (thresholds, curves) = if a.trials > 0 {
        threshold_docs(kind.name(), &modes, per_mode, grid.as_deref())?
    } else {
        (Vec::new(), Vec::new())
    };
    let doc = PercolationDoc {
        schema: SCHEMA,
        lattice: kind.name().into(),
        span_rule: SpanRule::from(a.span_rule).name().into(),
        config: config_value("percolation", a),
        thresholds,
        spanning_fraction: spanning,
        triangle_edge_deletion: triangle,
        curves,
    };
    emit_percolation(ctx, &doc, a.out.as_deref(), a.format, stdout)
}

fn bare(ctx: &Context, a: &BareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let target = BareTarget::from(a.lattice);
    check_sizes(target.kind(), &a.sizes, a.span_rule.boundary())?;
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let grid = a.grid.as_deref().map(parse_grid).transpose()?;
    let mut sets = Vec::new();
    for &l in &a.sizes {
        ctx.progress(&format!("bare: {} L={l}", target.name()));
        let req = BareRequest {
            target,
            size: l,
            mode: a.mode.into(),
            rule: a.span_rule.into(),
            trials: a.trials,
            seed: a.seed,
            chunks: a.chunks,
        };
        sets.push(bare_percolation(&req, ctx.threads)?);
    }
    let (thresholds, curves) = threshold_docs(target.name(), &[a.mode.into()], vec![sets], grid.as_deref())?;
    let doc = PercolationDoc {
        schema: SCHEMA,
        lattice: target.name().into(),
        span_rule: SpanRule::from(a.span_rule).name().into(),
        config: config_value("bare", a),
        thresholds,
        spanning_fraction: Vec::new(),
        triangle_edge_deletion: Vec::new(),
        curves,
    };
    emit_percolation(ctx, &doc, a.out.as_deref(), a.format, stdout)
}

fn oracle_cmd(ctx: &Context, a: &OracleArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let graph = oracle::test_graph(&a.graph).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown graph {:?}; expected one of {:?}",
            a.graph,
            oracle::TEST_GRAPHS
        ))
    })?;
    if a.sweeps == 0 {
        return Err(CliError::Usage("--sweeps must be positive".into()));
    }
    let rt = |e: aklt_core::SamplerError| CliError::Runtime(e.to_string());
    ctx.progress(&format!("oracle: {} with {} sweeps", a.graph, a.sweeps));
    let p = oracle::exact_distribution(&graph).map_err(rt)?;
    let counts = oracle::sampled_histogram(&graph, a.sweeps, a.seed).map_err(rt)?;
    let (checked, mismatches) = oracle::check_local_against_global(&graph).map_err(rt)?;
    let doc = OracleDoc {
        schema: SCHEMA,
        graph: a.graph.clone(),
        config: config_value("oracle", a),
        n_sites: graph.n_sites(),
        n_states: p.len(),
        n_samples: a.sweeps,
        tv_distance: oracle::tv_distance(&p, &counts),
        tv_noise_floor: oracle::tv_noise_floor(&p, a.sweeps),
        local_global_checked: checked,
        local_global_mismatches: mismatches,
    };
    ctx.emit_json(&doc, a.out.as_deref(), stdout)
}

fn reduce(ctx: &Context, a: &ReduceArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let kind = LatticeKind::from(a.lattice);
    if kind == LatticeKind::Honeycomb {
        return Err(CliError::Usage("the honeycomb needs no reduction".into()));
    }
    let lattice = build_lattice(kind, a.size, Boundary::Torus).map_err(|e| CliError::Usage(e.to_string()))?;
    let rt = |e: aklt_core::GraphError| CliError::Runtime(e.to_string());
    ctx.progress(&format!("reduce: {} L={}", kind.name(), a.size));
    let red: Reduction = match &a.pattern {
        Some(path) => {
            let bad_file = |e: &dyn std::fmt::Display| CliError::Runtime(format!("{}: {e}", path.display()));
            let text = fs::read_to_string(path).map_err(|e| bad_file(&e))?;
            let doc: PatternDoc = serde_json::from_str(&text).map_err(|e| bad_file(&e))?;
            let pattern = doc.to_pattern().map_err(|e| bad_file(&e))?;
            reduce_with_pattern(&lattice, pattern).map_err(rt)?
        }
        None => reduce_to_honeycomb(kind, a.size).map_err(rt)?,
    };
    if let Some(p) = &a.graph_out {
        ctx.emit_json(&GraphDoc::from_graph(&red.reduced), Some(p), stdout)?;
    }
    let doc = ReduceDoc {
        schema: SCHEMA,
        lattice: kind.name().into(),
        size: a.size,
        config: config_value("reduce", a),
        isomorphic_to_honeycomb: red.isomorphic(),
        n_measurements: red.pattern.len(),
        lattice_sites: lattice.n_sites(),
        measured_vertices: red.measured.n_vertices(),
        measured_edges: red.measured.n_edges(),
        check: HoneycombCheckDoc::from(&red.check),
    };
    ctx.emit_json(&doc, a.out.as_deref(), stdout)
}

fn lattice(ctx: &Context, a: &LatticeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let lat = build_lattice(a.lattice.into(), a.size, a.bc.into()).map_err(|e| CliError::Usage(e.to_string()))?;
    ctx.emit_json(&LatticeDoc::from_lattice(&lat), a.out.as_deref(), stdout)
}
