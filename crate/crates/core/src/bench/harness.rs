//! Replicated comparison of LA against the marginal-test, lasso and
//! elastic-net baselines on simulated data.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;

use super::metrics::{auc, fp_fn};
use crate::aggregate::{la_fit, LaConfig};
use crate::csvio::{create_with_meta, csv_write_err, fmt_real};
use crate::data::{default_names, Dataset, SparsityPattern};
use crate::error::{invalid, Error, Result};
use crate::glm::{
    bonferroni_select, cross_validate, fit_constrained_mle, linear_predictor, pattern_cap,
    single_locus_pvalues, PenalizedOptions, PenalizedSolver,
};
use crate::seed::{self, stage};
use crate::simgen::{gen_covariates, gen_response, true_theta, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Logistic aggregation.
    La,
    /// Single-locus tests, Bonferroni at 0.05, joint refit of the hits.
    Lr,
    /// Cross-validated lasso.
    L1Lr,
    /// Cross-validated elastic net.
    Enet,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::La, Method::Lr, Method::L1Lr, Method::Enet];

    pub fn name(&self) -> &'static str {
        match self {
            Method::La => "LA",
            Method::Lr => "LR",
            Method::L1Lr => "L1LR",
            Method::Enet => "ENET",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "la" => Ok(Method::La),
            "lr" => Ok(Method::Lr),
            "l1lr" | "l1" => Ok(Method::L1Lr),
            "enet" => Ok(Method::Enet),
            _ => invalid(format!("unknown method '{s}' (expected la, lr, l1lr or enet)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Scenario seeds are ignored; every cell derives its own.
    pub scenarios: Vec<ScenarioSpec>,
    pub methods: Vec<Method>,
    pub reps: usize,
    pub base_seed: u64,
    pub test_n: usize,
    /// Template for the LA fits; its seed is replaced per cell.
    pub la: LaConfig,
    pub folds: usize,
    pub n_lambda: usize,
    pub enet_alphas: Vec<f64>,
    pub bonferroni_level: f64,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
    /// When false, `seconds` is recorded as 0 so output is reproducible
    /// byte for byte.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            scenarios: Vec::new(),
            methods: Method::ALL.to_vec(),
            reps: 50,
            base_seed: 0,
            test_n: 3000,
            la: LaConfig::default(),
            folds: 10,
            n_lambda: 30,
            enet_alphas: vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.0],
            bonferroni_level: 0.05,
            threads: None,
            timing: true,
        }
    }
}

/// Coefficients produced by one method on one training set.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodFit {
    pub theta: Vec<f64>,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub method: Method,
    pub scenario_index: usize,
    pub scenario: ScenarioSpec,
    pub replication: usize,
    pub auc: f64,
    pub fp: usize,
    pub fn_count: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation over √reps.
    pub se: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let k = values.len() as f64;
        if values.is_empty() {
            return Self { mean: f64::NAN, se: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / k;
        let se = if values.len() < 2 {
            f64::NAN
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
            var.sqrt() / k.sqrt()
        };
        Self { mean, se }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: String,
    pub n: usize,
    pub p: usize,
    pub method: Method,
    pub auc: Stat,
    pub fp: Stat,
    pub fn_count: Stat,
    pub time: Stat,
    pub succeeded: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub records: Vec<BenchmarkRecord>,
    pub summary: Vec<SummaryRow>,
}

fn cv_penalized(train: &Dataset, alphas: &[f64], cfg: &BenchConfig, seed: u64) -> Result<MethodFit> {
    let opts = PenalizedOptions {
        intercept: cfg.la.fit.intercept,
        ..Default::default()
    };
    let solver = PenalizedSolver::new(train);
    let lowest = alphas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = solver.lambda_max(lowest, opts.intercept);
    let lo = 0.01 * solver.lambda_max(1.0, opts.intercept);
    let len = if alphas.len() > 1 { cfg.n_lambda + 10 } else { cfg.n_lambda };
    let grid = crate::glm::penalized_grid(hi, lo, len);
    let cv = cross_validate(train, &grid, alphas, cfg.folds, seed, &opts)?;
    let fit = solver.fit(&cv.best, &opts, None)?;
    Ok(MethodFit {
        theta: fit.theta,
        intercept: fit.intercept,
    })
}

/// Fits `method` on `train`.
pub fn fit_method(method: Method, train: &Dataset, cfg: &BenchConfig, seed: u64) -> Result<MethodFit> {
    match method {
        Method::La => {
            let la = LaConfig {
                seed,
                ..cfg.la.clone()
            };
            let fit = la_fit(train, &la)?;
            Ok(MethodFit {
                theta: fit.estimate.theta,
                intercept: fit.estimate.intercept,
            })
        }
        Method::Lr => {
            let tests = single_locus_pvalues(train);
            let mut hits = bonferroni_select(&tests, cfg.bonferroni_level);
            let cap = pattern_cap(train.n(), cfg.la.fit.intercept);
            if hits.len() > cap {
                // keep the strongest hits the refit can support
                hits.sort_by(|&a, &b| tests[a].p_value.total_cmp(&tests[b].p_value));
                hits.truncate(cap);
            }
            let pattern = SparsityPattern::from_indices(train.p(), &hits)?;
            let model = fit_constrained_mle(train, &pattern, &cfg.la.fit)?;
            Ok(MethodFit {
                theta: model.theta,
                intercept: model.intercept,
            })
        }
        Method::L1Lr => cv_penalized(train, &[1.0], cfg, seed),
        Method::Enet => cv_penalized(train, &cfg.enet_alphas, cfg, seed),
    }
}

fn run_cell(cfg: &BenchConfig, scenario_index: usize, replication: usize) -> Vec<BenchmarkRecord> {
    let template = cfg.scenarios[scenario_index];
    let cell_seed = seed::derive(cfg.base_seed, 1000 + scenario_index as u64, replication as u64);
    let scenario = ScenarioSpec {
        seed: cell_seed,
        ..template
    };
    let fail_all = |e: Error| -> Vec<BenchmarkRecord> {
        cfg.methods
            .iter()
            .map(|&method| BenchmarkRecord {
                method,
                scenario_index,
                scenario,
                replication,
                auc: f64::NAN,
                fp: 0,
                fn_count: 0,
                seconds: f64::NAN,
                error: Some(e.to_string()),
            })
            .collect()
    };

    let data = (|| -> Result<(Dataset, Dataset, crate::simgen::TrueCoefficients)> {
        let truth = true_theta(scenario.p)?;
        let train_spec = ScenarioSpec {
            seed: seed::derive(cell_seed, stage::TRAIN_X, 0),
            ..scenario
        };
        let test_spec = ScenarioSpec {
            n: cfg.test_n,
            seed: seed::derive(cell_seed, stage::TEST_X, 0),
            ..scenario
        };
        let x = gen_covariates(&train_spec)?;
        let y = gen_response(&x, &truth, seed::derive(cell_seed, stage::TRAIN_Y, 0))?;
        let train = Dataset::new(x.values, y, default_names(scenario.p))?;
        let xt = gen_covariates(&test_spec)?;
        let yt = gen_response(&xt, &truth, seed::derive(cell_seed, stage::TEST_Y, 0))?;
        let test = Dataset::new(xt.values, yt, default_names(scenario.p))?;
        Ok((train, test, truth))
    })();
    let (train, test, truth) = match data {
        Ok(d) => d,
        Err(e) => return fail_all(e),
    };

    cfg.methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let start = Instant::now();
            let fitted = fit_method(method, &train, cfg, seed::derive(cell_seed, stage::METHOD, m as u64));
            let elapsed = start.elapsed().as_secs_f64();
            let seconds = if cfg.timing { elapsed } else { 0.0 };
            let outcome = fitted.and_then(|fit| {
                let scores: Vec<f64> = (0..test.n())
                    .map(|i| linear_predictor(fit.intercept, &fit.theta, test.row(i)))
                    .collect();
                let a = auc(&scores, test.y())?;
                let (fp, fn_count) = fp_fn(&fit.theta, &truth, train.n());
                Ok((a, fp, fn_count))
            });
            match outcome {
                Ok((auc, fp, fn_count)) => BenchmarkRecord {
                    method,
                    scenario_index,
                    scenario,
                    replication,
                    auc,
                    fp,
                    fn_count,
                    seconds,
                    error: None,
                },
                Err(e) => BenchmarkRecord {
                    method,
                    scenario_index,
                    scenario,
                    replication,
                    auc: f64::NAN,
                    fp: 0,
                    fn_count: 0,
                    seconds,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Runs every scenario × replication cell (in parallel) and summarizes.
/// Results do not depend on the thread count.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchmarkReport> {
    if cfg.reps < 2 {
        return invalid(format!("need at least 2 replications for standard errors, got {}", cfg.reps));
    }
    if cfg.scenarios.is_empty() || cfg.methods.is_empty() {
        return invalid("benchmark needs at least one scenario and one method");
    }
    for s in &cfg.scenarios {
        s.validate()?;
    }
    let cells: Vec<(usize, usize)> = (0..cfg.scenarios.len())
        .flat_map(|s| (0..cfg.reps).map(move |r| (s, r)))
        .collect();
    let run = || -> Vec<BenchmarkRecord> {
        cells
            .par_iter()
            .map(|&(s, r)| run_cell(cfg, s, r))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    let records = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start {t} worker threads: {e}")))?
            .install(run),
        None => run(),
    };
    let summary = summarize(&records);
    Ok(BenchmarkReport { records, summary })
}

/// One row per (scenario, method) in first-seen order; failed records are
/// excluded from the means and counted.
pub fn summarize(records: &[BenchmarkRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, Method)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.scenario_index, r.method)) {
            keys.push((r.scenario_index, r.method));
        }
    }
    keys.into_iter()
        .map(|(s, method)| {
            let group: Vec<&BenchmarkRecord> = records
                .iter()
                .filter(|r| r.scenario_index == s && r.method == method)
                .collect();
            let ok: Vec<&&BenchmarkRecord> = group.iter().filter(|r| r.error.is_none()).collect();
            let failed = group.len() - ok.len();
            let scenario = group[0].scenario;
            if failed > 0 {
                warn!(
                    "{} on {} (n={}, p={}): {failed} of {} replications failed",
                    method,
                    scenario.model,
                    scenario.n,
                    scenario.p,
                    group.len()
                );
            }
            let col = |f: &dyn Fn(&BenchmarkRecord) -> f64| Stat::of(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
            SummaryRow {
                model: scenario.model.name().to_string(),
                n: scenario.n,
                p: scenario.p,
                method,
                auc: col(&|r| r.auc),
                fp: col(&|r| r.fp as f64),
                fn_count: col(&|r| r.fn_count as f64),
                time: col(&|r| r.seconds),
                succeeded: ok.len(),
                failed,
            }
        })
        .collect()
}

pub fn write_summary_csv(path: impl AsRef<Path>, rows: &[SummaryRow], meta: &[String]) -> Result<()> {
    let path = path.as_ref();
    let err = csv_write_err(path);
    let mut w = create_with_meta(path, meta)?;
    w.write_record([
        "model", "n", "p", "method", "auc_mean", "auc_se", "fp_mean", "fp_se", "fn_mean", "fn_se", "time_mean",
        "time_se",
    ])
    .map_err(&err)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.n.to_string(),
            r.p.to_string(),
            r.method.to_string(),
            fmt_real(r.auc.mean),
            fmt_real(r.auc.se),
            fmt_real(r.fp.mean),
            fmt_real(r.fp.se),
            fmt_real(r.fn_count.mean),
            fmt_real(r.fn_count.se),
            fmt_real(r.time.mean),
            fmt_real(r.time.se),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_records_csv(path: impl AsRef<Path>, records: &[BenchmarkRecord], meta: &[String]) -> Result<()> {
    let path = path.as_ref();
    let err = csv_write_err(path);
    let mut w = create_with_meta(path, meta)?;
    w.write_record([
        "model", "n", "p", "method", "replication", "seed", "auc", "fp", "fn", "seconds", "error",
    ])
    .map_err(&err)?;
    for r in records {
        w.write_record([
            r.scenario.model.name().to_string(),
            r.scenario.n.to_string(),
            r.scenario.p.to_string(),
            r.method.to_string(),
            r.replication.to_string(),
            r.scenario.seed.to_string(),
            fmt_real(r.auc),
            r.fp.to_string(),
            r.fn_count.to_string(),
            fmt_real(r.seconds),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
