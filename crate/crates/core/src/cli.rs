//! Command-line front end. Every command reads and writes files only,
//! returns exit code 0 on success, 1 on numerical failure and 2 on usage or
//! validation errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;

use crate::cluster::{
    adjusted_rand_index, cut_tree, hierarchical_cluster, rand_index, stability_curve, Dendrogram,
    StabilityConfig, StabilityCurve,
};
use crate::data::{
    read_dataset, standardize, write_dataset, write_dataset_to, Dataset, Partition, Schema,
};
use crate::error::{Error, Result};
use crate::metrics::{
    classification_metrics, rmse, selection_metrics, ClassificationMetrics, SelectionMetrics,
    SelectionMode, SelectionTruth,
};
use crate::scalar::Scalar;
use crate::screen::{retained_count, screen, ScreenMethod, ScreeningResult};
use crate::sim::{
    generate, run_experiment, write_records_csv, write_summary_csv, ExperimentConfig, SimDesign,
};
use crate::smote::{smote_dataset, synthetic_count, SmoteConfig};
use crate::solver::{
    cross_validate, default_min_ratio, lambda_grid, lambda_max, CvResult, GroupFamily,
    GroupPenaltySpec, LossKind, SolverOptions, DEFAULT_GRID_LEN,
};
use crate::two_stage::{run_two_stage, TwoStageConfig, TwoStageReport};

/// Version tag carried by every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "grpsel", version, about = "Two-stage group variable selection")]
struct Cli {
    /// Worker threads [default: available cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Floating-point precision of all computations
    #[arg(long, global = true, value_enum, default_value_t = Precision::F64)]
    precision: Precision,
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validated group-penalized fit over a given grouping
    Fit(FitArgs),
    /// Screening, variable clustering and a group-penalized fit
    TwoStage(TwoStageArgs),
    /// Hierarchical clustering of the predictors with stability selection
    Cluster(ClusterArgs),
    /// Marginal screening of the predictors
    Screen(ScreenArgs),
    /// Replicated simulation study
    Simulate(SimulateArgs),
    /// Oversample the minority class of a binary response
    Smote(SmoteArgs),
    /// Prediction, selection and partition agreement metrics
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
struct Input {
    /// Data file: CSV with a header row
    #[arg(long)]
    data: PathBuf,
    /// JSON schema naming the response and the kind of every column
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossArg {
    Squared,
    Logistic,
}

impl From<LossArg> for LossKind {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Squared => LossKind::SquaredError,
            LossArg::Logistic => LossKind::Logistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Sis,
    Dcsis,
}

impl From<MethodArg> for ScreenMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Sis => ScreenMethod::Sis,
            MethodArg::Dcsis => ScreenMethod::Dcsis,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: Input,
    /// CSV with columns `variable,group`; unlisted variables are left out
    /// [default: every variable its own group]
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Penalty family: grlasso, grscad, grmcp or sgl
    #[arg(long, default_value = "grlasso")]
    family: GroupFamily,
    /// Concavity for grscad (default 3.7) and grmcp (default 3)
    #[arg(long)]
    gamma: Option<f64>,
    /// Group/lasso mixing for sgl [default: 0.5]
    #[arg(long)]
    alpha: Option<f64>,
    /// Loss [default: squared for continuous, logistic for binary responses]
    #[arg(long, value_enum)]
    loss: Option<LossArg>,
    /// Cross-validation folds
    #[arg(long = "cv", default_value_t = 10)]
    folds: usize,
    /// Number of λ values
    #[arg(long, default_value_t = DEFAULT_GRID_LEN)]
    nlambda: usize,
    /// Smallest λ as a fraction of λ_max [default: 0.001, or 0.05 when p > n]
    #[arg(long)]
    lambda_min_ratio: Option<f64>,
    /// Convergence tolerance on coefficient change [default: 1e-7]
    #[arg(long)]
    tol: Option<f64>,
    /// Sweeps per λ
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Path report (JSON) [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cross-validation summary (CSV)
    #[arg(long)]
    cv_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TwoStageArgs {
    #[command(flatten)]
    input: Input,
    /// JSON pipeline settings; flags given on the command line take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Penalty family [default: grlasso]
    #[arg(long)]
    family: Option<GroupFamily>,
    /// Concavity for grscad (default 3.7) and grmcp (default 3)
    #[arg(long)]
    gamma: Option<f64>,
    /// Group/lasso mixing for sgl [default: 0.5]
    #[arg(long)]
    alpha: Option<f64>,
    /// Loss [default: follows the response kind]
    #[arg(long, value_enum)]
    loss: Option<LossArg>,
    /// Screen when p exceeds this [default: n]
    #[arg(long)]
    screen_threshold: Option<usize>,
    /// Screening method [default: dcsis]
    #[arg(long, value_enum)]
    screen_method: Option<MethodArg>,
    /// Retain ceil(k·n/ln n) variables [default: 2 when p ≥ 1000, else 1]
    #[arg(long)]
    k_factor: Option<f64>,
    /// Bootstrap resamples for the stability curve [default: 50]
    #[arg(long)]
    j_boot: Option<usize>,
    /// Largest candidate cluster count [default: 30]
    #[arg(long)]
    max_clusters: Option<usize>,
    /// Cross-validation folds [default: 10]
    #[arg(long = "cv")]
    folds: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Report (JSON) [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Discovered groups as CSV `variable,group`, usable with `fit --groups`
    #[arg(long)]
    groups_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: Input,
    /// Bootstrap resamples for the stability curve
    #[arg(long, default_value_t = 50)]
    j_boot: usize,
    /// Largest candidate cluster count
    #[arg(long, default_value_t = 30)]
    max_clusters: usize,
    /// Cut the tree into this many clusters instead of the stability choice
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Report (JSON) [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Partition as CSV `variable,group`
    #[arg(long)]
    groups_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScreenArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = MethodArg::Dcsis)]
    method: MethodArg,
    /// Retain ceil(k·n/ln n) variables [default: 2 when p ≥ 1000, else 1]
    #[arg(long)]
    k_factor: Option<f64>,
    /// Report (JSON) [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Simulation design
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    design: u8,
    /// Correlation levels, comma separated [default: the design's grid]
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    replicates: usize,
    /// Penalty families, comma separated [default: all four]
    #[arg(long, value_delimiter = ',')]
    families: Vec<GroupFamily>,
    /// Override the design's sample size
    #[arg(long)]
    n: Option<usize>,
    /// Override the design's dimension (a multiple of the block pattern width)
    #[arg(long)]
    p: Option<usize>,
    /// JSON pipeline settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Summary table (CSV) [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-replicate metrics (CSV)
    #[arg(long)]
    records_out: Option<PathBuf>,
    /// Directory receiving the first instance as data.csv, schema.json and
    /// truth.json
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SmoteArgs {
    #[command(flatten)]
    input: Input,
    /// Nearest minority neighbours
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Minority/majority ratio after oversampling
    #[arg(long, default_value_t = 1.0)]
    target_ratio: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Oversampled data (CSV) [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Schema of the oversampled data
    #[arg(long)]
    schema_out: Option<PathBuf>,
    /// Summary (JSON) with the synthetic-row flags
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// CSV with columns `y,prediction`
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Classification cutoff on the prediction column
    #[arg(long, default_value_t = 0.5)]
    cutoff: f64,
    /// Treat the predictions as class probabilities
    #[arg(long)]
    classification: bool,
    /// Selected variables, 1-based, comma separated
    #[arg(long, value_delimiter = ',')]
    selected: Option<Vec<usize>>,
    /// Truly active variables, 1-based, comma separated
    #[arg(long, value_delimiter = ',')]
    truth: Option<Vec<usize>>,
    /// Total number of variables
    #[arg(long)]
    p: Option<usize>,
    /// Divide both selection counts by p
    #[arg(long)]
    as_printed: bool,
    /// Partition CSV `variable,group`
    #[arg(long)]
    partition_a: Option<PathBuf>,
    /// Partition CSV `variable,group`, compared with the first
    #[arg(long)]
    partition_b: Option<PathBuf>,
    /// Report (JSON) [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, R> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: R,
}

/// Parse `args` (program name first) and run the command.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 2;
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let outcome = pool.install(|| match cli.precision {
        Precision::F64 => dispatch::<f64>(&cli.command),
        Precision::F32 => dispatch::<f32>(&cli.command),
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch<T: Scalar>(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Fit(a) => cmd_fit::<T>(a),
        Command::TwoStage(a) => cmd_two_stage::<T>(a),
        Command::Cluster(a) => cmd_cluster::<T>(a),
        Command::Screen(a) => cmd_screen::<T>(a),
        Command::Simulate(a) => cmd_simulate::<T>(a),
        Command::Smote(a) => cmd_smote::<T>(a),
        Command::Metrics(a) => cmd_metrics(a),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::io(p.display().to_string(), e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<R: Serialize>(path: Option<&Path>, command: &str, body: R) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(
        &mut w,
        &Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            body,
        },
    )?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| output_error(path, e))
}

fn output_error(path: Option<&Path>, e: io::Error) -> Error {
    Error::io(
        path.map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string()),
        e,
    )
}

fn load<T: Scalar>(input: &Input) -> Result<(Dataset<T>, Schema)> {
    let schema = Schema::read(&input.schema)?;
    let (d, report) = read_dataset::<T>(&input.data, &schema)?;
    if report.rows_dropped > 0 {
        warn!(
            "dropped {} of {} rows with missing values",
            report.rows_dropped, report.rows_read
        );
    }
    info!("read {} rows and {} predictors", d.n(), d.p());
    Ok((d, schema))
}

/// Read a `variable,group` CSV against the dataset's variable names.
/// Returns the listed variables in dataset order and their partition.
fn read_groups(path: &Path, names: &[String]) -> Result<(Vec<usize>, Partition)> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    read_groups_from(file, names, &path.display().to_string())
}

fn read_groups_from<R: io::Read>(
    r: R,
    names: &[String],
    what: &str,
) -> Result<(Vec<usize>, Partition)> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut label_of: Vec<Option<String>> = vec![None; names.len()];
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::Invalid(format!("{what}: expected `variable,group` rows")));
        }
        let v = names
            .iter()
            .position(|n| n == &rec[0])
            .ok_or_else(|| Error::Invalid(format!("{what}: unknown variable `{}`", &rec[0])))?;
        if label_of[v].is_some() {
            return Err(Error::Invalid(format!("{what}: variable `{}` listed twice", &rec[0])));
        }
        label_of[v] = Some(rec[1].to_string());
    }
    let kept: Vec<usize> = (0..names.len()).filter(|&v| label_of[v].is_some()).collect();
    if kept.is_empty() {
        return Err(Error::Invalid(format!("{what}: no variables listed")));
    }
    let labels: Vec<&String> = kept.iter().filter_map(|&v| label_of[v].as_ref()).collect();
    Ok((kept, Partition::from_labels(&labels)))
}

/// Groups are written 1-based.
fn write_groups(path: &Path, names: &[String], vars: &[usize], part: &Partition) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["variable", "group"])?;
    for (i, &v) in vars.iter().enumerate() {
        w.write_record([names[v].clone(), (part.group_of(i) + 1).to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

fn penalty_spec<T: Scalar>(
    family: GroupFamily,
    gamma: Option<f64>,
    alpha: Option<f64>,
) -> Result<GroupPenaltySpec<T>> {
    let mut s = GroupPenaltySpec::new(family);
    if let Some(g) = gamma {
        s.gamma = Some(T::lit(g));
    }
    if let Some(a) = alpha {
        s.alpha = Some(T::lit(a));
    }
    s.validate()?;
    Ok(s)
}

#[derive(Serialize)]
struct FitReport<'a, T> {
    family: GroupFamily,
    loss: LossKind,
    variables: Vec<&'a str>,
    /// Group of each fitted variable, 1-based.
    groups: Vec<usize>,
    /// Fitted variable (index into `variables`) owning each model column.
    column_owner: Vec<usize>,
    best_lambda: T,
    selected: Vec<&'a str>,
    cv: CvResult<T>,
}

fn cmd_fit<T: Scalar>(a: &FitArgs) -> Result<()> {
    let spec = penalty_spec::<T>(a.family, a.gamma, a.alpha)?;
    if a.nlambda < 1 {
        return Err(Error::InvalidSpec("nlambda must be at least 1".into()));
    }
    let (d, _) = load::<T>(&a.input)?;
    let (vars, part) = match &a.groups {
        Some(p) => read_groups(p, d.names())?,
        None => ((0..d.p()).collect(), Partition::singletons(d.p())),
    };
    let z = standardize(&d)?.select_variables(&vars);
    let loss: LossKind = match a.loss {
        Some(l) => l.into(),
        None => TwoStageConfig::default().loss_for(d.response_kind()),
    };
    let lmax = lambda_max(&z, d.y(), loss, &part, &spec)?;
    if lmax == T::zero() {
        return Err(Error::DegenerateInput(
            "response is unrelated to every column (lambda_max = 0)".into(),
        ));
    }
    let ratio = match a.lambda_min_ratio {
        Some(r) if r > 0.0 && r < 1.0 => T::lit(r),
        Some(r) => {
            return Err(Error::InvalidSpec(format!(
                "lambda_min_ratio must lie in (0,1), got {r}"
            )))
        }
        None => default_min_ratio(z.n(), z.width()),
    };
    let grid = lambda_grid(lmax, ratio, a.nlambda);
    let mut opts = SolverOptions::<T>::default();
    opts.max_iter = a.max_iter;
    if let Some(t) = a.tol {
        if !(t > 0.0) {
            return Err(Error::InvalidSpec(format!("tol must be > 0, got {t}")));
        }
        opts.tol = T::lit(t);
    }
    let cv = cross_validate(&z, d.y(), loss, &part, &spec, &grid, a.folds, a.seed, &opts)?;
    let names = d.names();
    let selected = cv
        .fit
        .selected_variables(cv.best_index, z.column_map())
        .into_iter()
        .map(|v| names[vars[v]].as_str())
        .collect();
    if let Some(p) = &a.cv_out {
        let file = File::create(p).map_err(|e| Error::io(p.display().to_string(), e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["lambda", "cv_mean", "cv_se", "df", "converged"])?;
        for i in 0..cv.lambdas.len() {
            w.write_record([
                cv.lambdas[i].to_string(),
                cv.cv_mean[i].to_string(),
                cv.cv_se[i].to_string(),
                cv.fit.df_path[i].to_string(),
                cv.fit.converged[i].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(p.display().to_string(), e))?;
    }
    let report = FitReport {
        family: a.family,
        loss,
        variables: vars.iter().map(|&v| names[v].as_str()).collect(),
        groups: part.assignment().iter().map(|g| g + 1).collect(),
        column_owner: z.column_map().owners(),
        best_lambda: cv.best_lambda,
        selected,
        cv,
    };
    write_json(a.out.as_deref(), "fit", report)
}

fn read_config(path: &Path) -> Result<TwoStageConfig> {
    let f = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_reader(f)
        .map_err(|e| Error::Invalid(format!("{}: malformed config: {e}", path.display())))
}

fn two_stage_config(a: &TwoStageArgs) -> Result<TwoStageConfig> {
    let mut c = match &a.config {
        Some(p) => read_config(p)?,
        None => TwoStageConfig {
            seed: DEFAULT_SEED,
            ..TwoStageConfig::default()
        },
    };
    if let Some(f) = a.family {
        if f != c.family {
            c.gamma = None;
            c.alpha = None;
        }
        c.family = f;
    }
    if a.gamma.is_some() {
        c.gamma = a.gamma;
    }
    if a.alpha.is_some() {
        c.alpha = a.alpha;
    }
    if let Some(l) = a.loss {
        c.loss = Some(l.into());
    }
    if a.screen_threshold.is_some() {
        c.screen_threshold = a.screen_threshold;
    }
    if let Some(m) = a.screen_method {
        c.screen_method = m.into();
    }
    if a.k_factor.is_some() {
        c.k_factor = a.k_factor;
    }
    if let Some(j) = a.j_boot {
        c.j_boot = j;
    }
    if let Some(m) = a.max_clusters {
        c.max_clusters = m;
    }
    if let Some(f) = a.folds {
        c.cv_folds = f;
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    c.validate()?;
    Ok(c)
}

#[derive(Serialize)]
struct TwoStageOutput<'a, T> {
    config: &'a TwoStageConfig,
    /// Names of the variables passed to clustering.
    kept_names: Vec<&'a str>,
    #[serde(flatten)]
    report: &'a TwoStageReport<T>,
}

fn cmd_two_stage<T: Scalar>(a: &TwoStageArgs) -> Result<()> {
    let cfg = two_stage_config(a)?;
    let (d, _) = load::<T>(&a.input)?;
    let report = run_two_stage(&d, &cfg)?;
    let names = d.names();
    if let Some(p) = &a.groups_out {
        write_groups(p, names, &report.stage_one.kept, &report.stage_one.partition)?;
    }
    let out = TwoStageOutput {
        config: &cfg,
        kept_names: report.stage_one.kept.iter().map(|&v| names[v].as_str()).collect(),
        report: &report,
    };
    write_json(a.out.as_deref(), "two-stage", out)
}

#[derive(Serialize)]
struct ClusterReport<'a> {
    dendrogram: Dendrogram,
    stability: Option<StabilityCurve>,
    clusters: usize,
    /// Cluster of each variable, 1-based.
    groups: Vec<usize>,
    variables: &'a [String],
}

fn cmd_cluster<T: Scalar>(a: &ClusterArgs) -> Result<()> {
    let (d, _) = load::<T>(&a.input)?;
    let dend = hierarchical_cluster(&d)?;
    let stability = match a.clusters {
        Some(_) => None,
        None => Some(stability_curve(
            &d,
            &dend,
            &StabilityConfig {
                j_boot: a.j_boot,
                seed: a.seed,
                max_clusters: a.max_clusters,
            },
        )?),
    };
    let m = a
        .clusters
        .or(stability.as_ref().map(|s| s.chosen_m))
        .unwrap_or(1);
    let part = cut_tree(&dend, m)?;
    if let Some(p) = &a.groups_out {
        let vars: Vec<usize> = (0..d.p()).collect();
        write_groups(p, d.names(), &vars, &part)?;
    }
    let report = ClusterReport {
        dendrogram: dend,
        stability,
        clusters: m,
        groups: part.assignment().iter().map(|g| g + 1).collect(),
        variables: d.names(),
    };
    write_json(a.out.as_deref(), "cluster", report)
}

#[derive(Serialize)]
struct ScreenReport<'a, T> {
    n: usize,
    p: usize,
    k_factor: f64,
    kept_names: Vec<&'a str>,
    #[serde(flatten)]
    result: ScreeningResult<T>,
}

fn cmd_screen<T: Scalar>(a: &ScreenArgs) -> Result<()> {
    let (d, _) = load::<T>(&a.input)?;
    let (n, p) = (d.n(), d.p());
    if p <= n {
        warn!("p = {p} does not exceed n = {n}; the two-stage pipeline would skip screening");
    }
    let k = a.k_factor.unwrap_or(if p >= 1000 { 2.0 } else { 1.0 });
    let z = standardize(&d)?;
    let result = screen(&z, d.y(), a.method.into(), k)?;
    info!("kept {} of {p} variables", retained_count(n, p, k));
    let names = d.names();
    let report = ScreenReport {
        n,
        p,
        k_factor: k,
        kept_names: result.kept.iter().map(|&v| names[v].as_str()).collect(),
        result,
    };
    write_json(a.out.as_deref(), "screen", report)
}

#[derive(Serialize)]
struct TruthExport<'a> {
    design: u8,
    rho: f64,
    seed: u64,
    /// 1-based indices of variables with a nonzero coefficient.
    active: Vec<usize>,
    /// 1-based block of each variable.
    blocks: Vec<usize>,
    coefficients: &'a [crate::sim::RealizedCoefficient],
    signal_variance: f64,
    noise_sd: Option<f64>,
}

fn cmd_simulate<T: Scalar>(a: &SimulateArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::new(a.design);
    cfg.seed = a.seed;
    cfg.replicates = a.replicates;
    cfg.n = a.n;
    cfg.p = a.p;
    if !a.rho.is_empty() {
        cfg.rhos = a.rho.clone();
    }
    if !a.families.is_empty() {
        cfg.families = a.families.clone();
    }
    if let Some(p) = &a.config {
        cfg.pipeline = read_config(p)?;
    }
    if let Some(dir) = &a.export {
        let design = cfg.design(cfg.rhos[0])?;
        export_instance::<T>(&design, crate::sim::instance_seed(cfg.seed, 0, 0), dir)?;
    }
    let result = run_experiment::<T>(&cfg)?;
    if let Some(p) = &a.records_out {
        let file = File::create(p).map_err(|e| Error::io(p.display().to_string(), e))?;
        write_records_csv(&result.records, file)?;
    }
    let w = sink(a.out.as_deref())?;
    write_summary_csv(&result.summary, w)
}

fn export_instance<T: Scalar>(design: &SimDesign, seed: u64, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let inst = generate::<T>(design, seed)?;
    write_dataset(
        &inst.dataset,
        "y",
        &dir.join("data.csv"),
        &dir.join("schema.json"),
    )?;
    let truth = TruthExport {
        design: design.id,
        rho: design.rho,
        seed,
        active: inst.truth.active().iter().map(|v| v + 1).collect(),
        blocks: inst.true_partition.assignment().iter().map(|b| b + 1).collect(),
        coefficients: &inst.coefficients,
        signal_variance: inst.signal_variance,
        noise_sd: inst.noise_sd,
    };
    write_json(Some(&dir.join("truth.json")), "simulate", truth)
}

#[derive(Serialize)]
struct SmoteReport {
    rows_before: usize,
    rows_after: usize,
    synthetic: usize,
    ones_before: usize,
    ones_after: usize,
    /// Marks appended synthetic rows.
    synthetic_flags: Vec<bool>,
}

fn cmd_smote<T: Scalar>(a: &SmoteArgs) -> Result<()> {
    let cfg = SmoteConfig {
        k_neighbors: a.k,
        target_ratio: a.target_ratio,
        seed: a.seed,
    };
    let (d, schema) = load::<T>(&a.input)?;
    let ones = |ds: &Dataset<T>| ds.y().iter().filter(|&&v| v == T::one()).count();
    let (out, flags) = smote_dataset(&d, &cfg)?;
    let minority = ones(&d).min(d.n() - ones(&d));
    debug_assert_eq!(
        out.n() - d.n(),
        synthetic_count(minority, d.n() - minority, a.target_ratio)
    );
    match &a.schema_out {
        Some(sp) => {
            let target = a.out.as_ref().ok_or_else(|| {
                Error::Invalid("--schema-out requires --out".into())
            })?;
            write_dataset(&out, &schema.response, target, sp)?;
        }
        None => {
            let w = sink(a.out.as_deref())?;
            write_dataset_to(&out, &schema.response, w)?;
        }
    }
    if let Some(p) = &a.report {
        let report = SmoteReport {
            rows_before: d.n(),
            rows_after: out.n(),
            synthetic: out.n() - d.n(),
            ones_before: ones(&d),
            ones_after: ones(&out),
            synthetic_flags: flags,
        };
        write_json(Some(p), "smote", report)?;
    }
    Ok(())
}

#[derive(Serialize, Default)]
struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<ClassificationMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selection: Option<SelectionMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjusted_rand_index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rand_index: Option<f64>,
}

fn read_predictions(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let (mut y, mut pred) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::Invalid(format!("{}: expected numeric `y,prediction` rows", path.display()))
                })
        };
        y.push(parse(0)?);
        pred.push(parse(1)?);
    }
    Ok((y, pred))
}

/// Partition CSV keyed by variable name; both files must list the same
/// variables.
fn read_partition_pair(a: &Path, b: &Path) -> Result<(Partition, Partition)> {
    let names = |path: &Path| -> Result<Vec<String>> {
        let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut rdr = csv::Reader::from_reader(file);
        let mut out = Vec::new();
        for rec in rdr.records() {
            out.push(rec?.get(0).unwrap_or_default().to_string());
        }
        Ok(out)
    };
    let mut all = names(a)?;
    all.sort();
    let (va, pa) = read_groups(a, &all)?;
    let (vb, pb) = read_groups(b, &all)?;
    if va != vb {
        return Err(Error::Invalid("partitions list different variables".into()));
    }
    Ok((pa, pb))
}

fn cmd_metrics(a: &MetricsArgs) -> Result<()> {
    let mut report = MetricsReport::default();
    let mut any = false;
    if let Some(p) = &a.predictions {
        any = true;
        let (y, pred) = read_predictions(p)?;
        if a.classification {
            report.classification = Some(classification_metrics(&y, &pred, a.cutoff)?);
        } else {
            report.rmse = Some(rmse(&y, &pred)?);
        }
    }
    match (&a.selected, &a.truth, a.p) {
        (Some(sel), Some(truth), Some(p)) => {
            any = true;
            let zero_based = |v: &[usize]| -> Result<Vec<usize>> {
                v.iter()
                    .map(|&i| {
                        i.checked_sub(1).ok_or_else(|| {
                            Error::Invalid("variable indices are 1-based".into())
                        })
                    })
                    .collect()
            };
            let truth = SelectionTruth::new(zero_based(truth)?, p)?;
            let mode = if a.as_printed {
                SelectionMode::AsPrinted
            } else {
                SelectionMode::Standard
            };
            report.selection = Some(selection_metrics(&truth, &zero_based(sel)?, mode)?);
        }
        (None, None, None) => {}
        _ => {
            return Err(Error::Invalid(
                "selection metrics need --selected, --truth and --p".into(),
            ))
        }
    }
    match (&a.partition_a, &a.partition_b) {
        (Some(pa), Some(pb)) => {
            any = true;
            let (x, y) = read_partition_pair(pa, pb)?;
            report.adjusted_rand_index = Some(adjusted_rand_index(&x, &y)?);
            report.rand_index = Some(rand_index(&x, &y)?);
        }
        (None, None) => {}
        _ => {
            return Err(Error::Invalid(
                "partition agreement needs --partition-a and --partition-b".into(),
            ))
        }
    }
    if !any {
        return Err(Error::Invalid("no metric requested".into()));
    }
    write_json(a.out.as_deref(), "metrics", report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_file_keeps_dataset_order() {
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let csv = "variable,group\nd,x\nb,y\na,x\n";
        let (vars, part) = read_groups_from(csv.as_bytes(), &names, "t").unwrap();
        assert_eq!(vars, vec![0, 1, 3]);
        assert_eq!(part.assignment(), &[0, 1, 0]);
        assert!(read_groups_from("variable,group\nz,1\n".as_bytes(), &names, "t").is_err());
        assert!(read_groups_from("variable,group\na,1\na,2\n".as_bytes(), &names, "t").is_err());
    }

    #[test]
    fn help_and_usage_exit_codes() {
        assert_eq!(run(["grpsel", "--help"]), 0);
        assert_eq!(run(["grpsel", "fit"]), 2);
        assert_eq!(run(["grpsel", "simulate", "--design", "6"]), 2);
    }

    #[test]
    fn boundary_gamma_is_a_validation_error() {
        let e = penalty_spec::<f64>(GroupFamily::GrMcp, Some(1.0), None).unwrap_err();
        assert!(e.is_validation());
    }
}
