//! The `logagg` command line: `simulate`, `screen`, `fit` and `benchmark`.
//!
//! Every output file starts with `#` comment lines recording the version
//! and the resolved configuration. Exit status is 0 on success, 1 for
//! invalid flags or inputs and 2 for runtime or numerical failures.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::aggregate::{la_fit, LaConfig, PriorMode, Screen};
use crate::bench::{run_benchmark, write_records_csv, write_summary_csv, BenchConfig, Method};
use crate::csvio::{create_with_meta, csv_write_err, fmt_real, load_csv_with, write_csv, CsvOptions};
use crate::data::{default_names, Dataset};
use crate::error::Error;
use crate::glm::{bonferroni_select, retain_by_pvalue, single_locus_pvalues, FitOptions};
use crate::seed::{self, stage};
use crate::simgen::{gen_covariates, gen_response, true_theta, CovarianceModel, ScenarioSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "logagg", version, about = "Sparse logistic regression by aggregation of sub-models")]
pub struct Cli {
    /// Master seed; every stage derives its own stream from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads (benchmark only; the chain itself is sequential).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory receiving the output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write simulated train/test sets and the true coefficients.
    Simulate(SimulateArgs),
    /// Single-feature p-values and the features passing a threshold.
    Screen(ScreenArgs),
    /// Fit the aggregation estimator on a CSV dataset.
    Fit(FitArgs),
    /// Replicated comparison of LA, LR, L1LR and ENET on simulated data.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Indep,
    Ar1,
    Ar2,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub p: usize,
    /// Size of the correlated block (default min(100, p)).
    #[arg(long)]
    pub block: Option<usize>,
    /// First off-diagonal of the AR precision (default 0.4 for ar1, 0.3 for ar2).
    #[arg(long)]
    pub rho1: Option<f64>,
    /// Second off-diagonal of the AR(2) precision (default 0.15).
    #[arg(long)]
    pub rho2: Option<f64>,
    /// Rows of the independent test set.
    #[arg(long, default_value_t = 3000)]
    pub test_n: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Indep)]
    pub model: ModelArg,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the 0/1 label column (a 0-based index with --no-header).
    #[arg(long, default_value = "y")]
    pub label: String,
    /// The file has no header; features are named f0, f1, ...
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Keep features whose p-value does not exceed this.
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    /// Family-wise level for the Bonferroni column.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Also write the dataset restricted to the retained features.
    #[arg(long)]
    pub out_data: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    Global,
    Candidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    /// Burn-in 100, 2000 averaged steps.
    Sim,
    /// Burn-in 500, 1500 averaged steps.
    Real,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.5)]
    pub split_ratio: f64,
    /// Split each class separately.
    #[arg(long)]
    pub stratified: bool,
    /// l1cv, marginal:THRESHOLD or none.
    #[arg(long, default_value = "l1cv")]
    pub screen: String,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, value_enum, default_value_t = PresetArg::Sim)]
    pub preset: PresetArg,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Fit an unpenalized intercept in every model.
    #[arg(long)]
    pub intercept: bool,
    #[arg(long, value_enum, default_value_t = PriorArg::Global)]
    pub prior_p: PriorArg,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Comma-separated covariate models.
    #[arg(long, value_delimiter = ',', default_value = "indep")]
    pub models: Vec<ModelArg>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Comma-separated methods among la, lr, l1lr, enet.
    #[arg(long, value_delimiter = ',', default_value = "la,lr,l1lr,enet")]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Record 0 seconds instead of wall-clock time (byte-reproducible output).
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Run(e) if e.is_validation() => 1,
            CliError::Run(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Parses `args` (program name first), runs the command and maps the
/// outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    if cli.threads == Some(0) {
        return Err(bad("--threads must be at least 1"));
    }
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Screen(a) => cmd_screen(cli, a),
        Command::Fit(a) => cmd_fit(cli, a),
        Command::Benchmark(a) => cmd_benchmark(cli, a),
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| {
        CliError::Run(Error::Io {
            path: dir.to_path_buf(),
            source,
        })
    })
}

fn meta_lines(command: &str, config: &[(String, String)]) -> Vec<String> {
    let mut lines = vec![format!("logagg {VERSION} {command}")];
    lines.extend(config.iter().map(|(k, v)| format!("{k} = {v}")));
    lines
}

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn covariance_model(model: ModelArg, s: &ScenarioArgs) -> CliResult<CovarianceModel> {
    let resolved = match model {
        ModelArg::Indep => {
            if s.rho1.is_some() || s.rho2.is_some() {
                return Err(bad("--rho1/--rho2 only apply to ar1 and ar2"));
            }
            CovarianceModel::Independent
        }
        ModelArg::Ar1 => {
            if s.rho2.is_some() {
                return Err(bad("--rho2 only applies to ar2"));
            }
            CovarianceModel::Ar1 {
                rho1: s.rho1.unwrap_or(0.4),
            }
        }
        ModelArg::Ar2 => CovarianceModel::Ar2 {
            rho1: s.rho1.unwrap_or(0.3),
            rho2: s.rho2.unwrap_or(0.15),
        },
    };
    Ok(resolved)
}

fn scenario_spec(model: ModelArg, s: &ScenarioArgs, seed: u64) -> CliResult<ScenarioSpec> {
    let mut spec = ScenarioSpec::new(covariance_model(model, s)?, s.n, s.p, seed);
    if let Some(b) = s.block {
        spec.block = b;
    }
    spec.validate()?;
    if s.test_n < 2 {
        return Err(bad("--test-n must be at least 2"));
    }
    // surfaces an indefinite band before any file is written
    if !matches!(spec.model, CovarianceModel::Independent) && spec.model.precision(spec.block).cholesky().is_none() {
        return Err(Error::NotPositiveDefinite(format!("{:?} with block {}", spec.model, spec.block)).into());
    }
    Ok(spec)
}

fn scenario_meta(spec: &ScenarioSpec, s: &ScenarioArgs) -> Vec<(String, String)> {
    let mut out = vec![
        kv("model", spec.model.name()),
        kv("n", spec.n),
        kv("p", spec.p),
        kv("block", spec.block),
        kv("test_n", s.test_n),
    ];
    match spec.model {
        CovarianceModel::Independent => {}
        CovarianceModel::Ar1 { rho1 } => out.push(kv("rho1", rho1)),
        CovarianceModel::Ar2 { rho1, rho2 } => {
            out.push(kv("rho1", rho1));
            out.push(kv("rho2", rho2));
        }
    }
    out
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> CliResult<()> {
    let spec = scenario_spec(a.model, &a.scenario, cli.seed)?;
    ensure_dir(&cli.out_dir)?;
    let mut config = vec![kv("seed", cli.seed)];
    config.extend(scenario_meta(&spec, &a.scenario));
    let meta = meta_lines("simulate", &config);

    let truth = true_theta(spec.p)?;
    let draw = |n: usize, xs: u64, ys: u64| -> crate::Result<Dataset> {
        let s = ScenarioSpec {
            n,
            seed: seed::derive(cli.seed, xs, 0),
            ..spec
        };
        let x = gen_covariates(&s)?;
        let y = gen_response(&x, &truth, seed::derive(cli.seed, ys, 0))?;
        Dataset::new(x.values, y, default_names(spec.p))
    };
    let train = draw(spec.n, stage::TRAIN_X, stage::TRAIN_Y)?;
    let test = draw(a.scenario.test_n, stage::TEST_X, stage::TEST_Y)?;
    write_csv(cli.out_dir.join("train.csv"), &train, "y", &meta)?;
    write_csv(cli.out_dir.join("test.csv"), &test, "y", &meta)?;

    let path = cli.out_dir.join("truth.csv");
    let err = csv_write_err(&path);
    let mut w = create_with_meta(&path, &meta)?;
    w.write_record(["feature", "index", "coefficient"]).map_err(&err)?;
    for (j, (name, v)) in train.feature_names().iter().zip(&truth.theta).enumerate() {
        w.write_record([name.clone(), j.to_string(), fmt_real(*v)]).map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.clone(), source })?;
    info!("wrote train/test/truth to {}", cli.out_dir.display());
    Ok(())
}

fn load_input(a: &InputArgs) -> CliResult<Dataset> {
    Ok(load_csv_with(
        &a.input,
        &CsvOptions {
            label_column: a.label.clone(),
            has_header: !a.no_header,
        },
    )?)
}

fn input_meta(a: &InputArgs) -> Vec<(String, String)> {
    vec![
        kv("input", a.input.display()),
        kv("label", &a.label),
        kv("header", !a.no_header),
    ]
}

fn cmd_screen(cli: &Cli, a: &ScreenArgs) -> CliResult<()> {
    if !(0.0..=1.0).contains(&a.threshold) {
        return Err(bad(format!("--threshold {} must lie in [0, 1]", a.threshold)));
    }
    if !(a.level > 0.0 && a.level < 1.0) {
        return Err(bad(format!("--level {} must lie in (0, 1)", a.level)));
    }
    let data = load_input(&a.input)?;
    ensure_dir(&cli.out_dir)?;
    let mut config = input_meta(&a.input);
    config.extend([kv("threshold", a.threshold), kv("level", a.level)]);
    let meta = meta_lines("screen", &config);

    let results = single_locus_pvalues(&data);
    let retained = retain_by_pvalue(&results, a.threshold);
    let hits = bonferroni_select(&results, a.level);
    if retained.is_empty() {
        warn!("no feature has a p-value at or below {}", a.threshold);
    }
    info!("{} of {} features retained, {} pass Bonferroni", retained.len(), data.p(), hits.len());

    let names = data.feature_names();
    let path = cli.out_dir.join("pvalues.csv");
    let err = csv_write_err(&path);
    let mut w = create_with_meta(&path, &meta)?;
    w.write_record(["feature", "index", "coefficient", "std_error", "p_value", "degenerate", "bonferroni"])
        .map_err(&err)?;
    for r in &results {
        w.write_record([
            names[r.feature].clone(),
            r.feature.to_string(),
            fmt_real(r.coefficient),
            fmt_real(r.std_error),
            fmt_real(r.p_value),
            r.degenerate.to_string(),
            hits.contains(&r.feature).to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.clone(), source })?;

    let path = cli.out_dir.join("retained.csv");
    let err = csv_write_err(&path);
    let mut w = create_with_meta(&path, &meta)?;
    w.write_record(["feature", "index"]).map_err(&err)?;
    for &j in &retained {
        w.write_record([names[j].clone(), j.to_string()]).map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.clone(), source })?;

    if let Some(out) = &a.out_data {
        if retained.is_empty() {
            warn!("not writing {}: no feature retained", out.display());
        } else {
            write_csv(out, &data.select_columns(&retained)?, &a.input.label, &meta)?;
        }
    }
    Ok(())
}

fn la_config(cli: &Cli, a: &FitArgs) -> CliResult<LaConfig> {
    let mut screen: Screen = a.screen.parse()?;
    if let Screen::L1Cv { folds, .. } = &mut screen {
        if a.folds < 2 {
            return Err(bad("--folds must be at least 2"));
        }
        *folds = a.folds;
    }
    if !(a.split_ratio > 0.0 && a.split_ratio < 1.0) {
        return Err(bad(format!("--split-ratio {} must lie in (0, 1)", a.split_ratio)));
    }
    let (burnin, iters) = match a.preset {
        PresetArg::Sim => (100, 2000),
        PresetArg::Real => (500, 1500),
    };
    let iterations = a.iters.unwrap_or(iters);
    if iterations == 0 {
        return Err(bad("--iters must be at least 1"));
    }
    if a.max_size == Some(0) {
        return Err(bad("--max-size must be at least 1"));
    }
    Ok(LaConfig {
        split_ratio: a.split_ratio,
        stratified: a.stratified,
        screen,
        prior: match a.prior_p {
            PriorArg::Global => PriorMode::Global,
            PriorArg::Candidates => PriorMode::Candidates,
        },
        burnin: a.burnin.unwrap_or(burnin),
        iterations,
        max_pattern_size: a.max_size,
        fit: FitOptions {
            intercept: a.intercept,
            ..Default::default()
        },
        seed: cli.seed,
    })
}

fn cmd_fit(cli: &Cli, a: &FitArgs) -> CliResult<()> {
    let config = la_config(cli, a)?;
    let data = load_input(&a.input)?;
    ensure_dir(&cli.out_dir)?;
    let mut resolved = input_meta(&a.input);
    resolved.extend([
        kv("seed", config.seed),
        kv("split_ratio", config.split_ratio),
        kv("stratified", config.stratified),
        kv("screen", config.screen),
        kv("folds", a.folds),
        kv("burnin", config.burnin),
        kv("iters", config.iterations),
        kv(
            "max_size",
            config.max_pattern_size.map_or("auto".to_string(), |m| m.to_string()),
        ),
        kv("intercept", config.fit.intercept),
        kv("prior_p", format!("{:?}", config.prior).to_lowercase()),
    ]);
    let meta = meta_lines("fit", &resolved);

    let fit = la_fit(&data, &config)?;
    let est = &fit.estimate;
    let names = data.feature_names();
    info!(
        "{} candidates, {} models fitted, acceptance {:.3}",
        fit.candidates.len(),
        est.models_fitted,
        est.acceptance_rate
    );

    let path = cli.out_dir.join("coefficients.csv");
    let err = csv_write_err(&path);
    let mut w = create_with_meta(&path, &meta)?;
    w.write_record(["feature", "theta"]).map_err(&err)?;
    if config.fit.intercept {
        w.write_record(["(intercept)".to_string(), fmt_real(est.intercept)]).map_err(&err)?;
    }
    for (name, v) in names.iter().zip(&est.theta) {
        w.write_record([name.clone(), fmt_real(*v)]).map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.clone(), source })?;

    let path = cli.out_dir.join("trace.csv");
    let err = csv_write_err(&path);
    let mut w = create_with_meta(&path, &meta)?;
    w.write_record(["iteration", "pattern_size", "accepted", "score"]).map_err(&err)?;
    for s in &est.trace {
        w.write_record([
            s.iteration.to_string(),
            s.pattern_size.to_string(),
            u8::from(s.accepted).to_string(),
            fmt_real(s.score),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.clone(), source })?;

    let selected: Vec<&str> = est.support().iter().map(|&j| names[j].as_str()).collect();
    let candidates: Vec<&str> = fit.candidates.features().iter().map(|&j| names[j].as_str()).collect();
    let path = cli.out_dir.join("run.csv");
    let err = csv_write_err(&path);
    let mut w = create_with_meta(&path, &meta)?;
    w.write_record(["key", "value"]).map_err(&err)?;
    let mut rows = resolved.clone();
    rows.extend([
        kv("n_train", fit.split.first.len()),
        kv("n_validation", fit.split.second.len()),
        kv("candidate_source", fit.candidates.source),
        kv("candidates", candidates.join(";")),
        kv("prior_p_effective", fit.prior.p_effective),
        kv("max_pattern_size", est.max_pattern_size),
        kv("acceptance_rate", fmt_real(est.acceptance_rate)),
        kv("models_fitted", est.models_fitted),
        kv("selected", selected.join(";")),
    ]);
    for (k, v) in rows {
        w.write_record([k, v]).map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.clone(), source })?;
    Ok(())
}

fn cmd_benchmark(cli: &Cli, a: &BenchmarkArgs) -> CliResult<()> {
    let methods = a
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<crate::Result<Vec<_>>>()?;
    if a.reps < 2 {
        return Err(bad("--reps must be at least 2"));
    }
    if a.folds < 2 {
        return Err(bad("--folds must be at least 2"));
    }
    if a.models.is_empty() || methods.is_empty() {
        return Err(bad("need at least one model and one method"));
    }
    let scenarios = a
        .models
        .iter()
        .map(|&m| scenario_spec(m, &a.scenario, cli.seed))
        .collect::<CliResult<Vec<_>>>()?;
    ensure_dir(&cli.out_dir)?;

    let mut la = LaConfig::default();
    if let Screen::L1Cv { folds, .. } = &mut la.screen {
        *folds = a.folds;
    }
    let cfg = BenchConfig {
        scenarios,
        methods: methods.clone(),
        reps: a.reps,
        base_seed: cli.seed,
        test_n: a.scenario.test_n,
        la,
        folds: a.folds,
        threads: cli.threads,
        timing: !a.no_timing,
        ..Default::default()
    };
    let mut resolved = vec![
        kv("seed", cli.seed),
        kv("models", a.models.iter().map(|m| format!("{m:?}").to_lowercase()).collect::<Vec<_>>().join(",")),
        kv("methods", methods.iter().map(Method::name).collect::<Vec<_>>().join(",")),
        kv("reps", a.reps),
        kv("folds", a.folds),
        kv("n", a.scenario.n),
        kv("p", a.scenario.p),
        kv("test_n", a.scenario.test_n),
        kv("timing", if a.no_timing { "off" } else { "wall-clock seconds per fit, cross-validation included" }),
    ];
    for s in &cfg.scenarios {
        if let CovarianceModel::Ar1 { rho1 } = s.model {
            resolved.push(kv("ar1_rho1", rho1));
        }
        if let CovarianceModel::Ar2 { rho1, rho2 } = s.model {
            resolved.push(kv("ar2_rho", format!("{rho1},{rho2}")));
        }
        resolved.push(kv(&format!("{}_block", s.model.name()), s.block));
    }
    let meta = meta_lines("benchmark", &resolved);

    let report = run_benchmark(&cfg)?;
    write_summary_csv(cli.out_dir.join("summary.csv"), &report.summary, &meta)?;
    write_records_csv(cli.out_dir.join("records.csv"), &report.records, &meta)?;
    Ok(())
}
