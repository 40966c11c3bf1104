//! JSON experiment configs, batch evaluation and CSV/JSON tables.
//!
//! This is the layer behind the `pcclone` binary. Every numeric output is
//! rounded to 10 significant digits so files stay diffable and CSV and JSON
//! carry identical values.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cloner::ClonerParams;
use crate::counting::{
    balance_detectors, derive_seed, fidelity_from_counts, simulate_counts,
    success_probability_estimate, BalanceMethod, CountingSetup, DetectorBank,
};
use crate::error::Error;
use crate::noise::{evaluate_with_noise, NoiseConfig};
use crate::optimize::{optimize_symmetry, FreeParameter, Objective};
use crate::qubit::Qubit;

/// Failure of a CLI-level operation, split by exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// A list of angles, either explicit or evenly spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleSet {
    Single(f64),
    List(Vec<f64>),
    Range(AngleRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Whether `stop` itself is included.
    #[serde(default = "yes")]
    pub endpoint: bool,
}

fn yes() -> bool {
    true
}

impl AngleSet {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AngleSet::Single(v) => vec![*v],
            AngleSet::List(v) => v.clone(),
            AngleSet::Range(r) => {
                let div = match (r.endpoint, r.count) {
                    (_, 0) => return Vec::new(),
                    (true, 1) => return vec![r.start],
                    (true, n) => (n - 1) as f64,
                    (false, n) => n as f64,
                };
                (0..r.count)
                    .map(|k| r.start + (r.stop - r.start) * k as f64 / div)
                    .collect()
            }
        }
    }
}

/// Grid of inputs: every `theta` combined with every `phi`, theta-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "equator")]
    pub theta: AngleSet,
    #[serde(default = "zero_phase")]
    pub phi: AngleSet,
}

fn equator() -> AngleSet {
    AngleSet::Single(FRAC_PI_2)
}

fn zero_phase() -> AngleSet {
    AngleSet::Single(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingConfig {
    pub n_pairs: u64,
    #[serde(default)]
    pub detectors: DetectorBank,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Detector balancing applied to the estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance: Option<BalanceMethod>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub free: Vec<FreeParameter>,
    pub objective: Objective,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub model: ClonerParams,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Qubit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counting: Option<CountingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(model: ClonerParams, input: Qubit) -> Self {
        Self {
            label: None,
            model,
            noise: NoiseConfig::default(),
            input: Some(input),
            sweep: None,
            counting: None,
            optimize: None,
            output: OutputConfig::default(),
            seed: None,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        self.model.validate()?;
        self.noise.validate()?;
        if self.input.is_some() == self.sweep.is_some() {
            return Err(CliError::Validation(
                "exactly one of `input` and `sweep` must be given".into(),
            ));
        }
        if let Some(c) = &self.counting {
            c.detectors.validate()?;
            if c.n_pairs == 0 {
                return Err(CliError::Validation("`counting.n_pairs` must be at least 1".into()));
            }
        }
        self.inputs()?;
        Ok(())
    }

    /// Inputs in row order.
    pub fn inputs(&self) -> CliResult<Vec<Qubit>> {
        if let Some(q) = self.input {
            return Ok(vec![q]);
        }
        let sweep = self.sweep.as_ref().ok_or_else(|| {
            CliError::Validation("no `input` or `sweep` given".into())
        })?;
        let (thetas, phis) = (sweep.theta.values(), sweep.phi.values());
        if thetas.is_empty() || phis.is_empty() {
            return Err(CliError::Validation("sweep has no points".into()));
        }
        let mut out = Vec::with_capacity(thetas.len() * phis.len());
        for &t in &thetas {
            for &p in &phis {
                out.push(Qubit::new(t, p)?);
            }
        }
        Ok(out)
    }

    /// `override_seed`, else `counting.seed`, else `seed`, else 0.
    pub fn effective_seed(&self, override_seed: Option<u64>) -> u64 {
        override_seed
            .or(self.counting.and_then(|c| c.seed))
            .or(self.seed)
            .unwrap_or(0)
    }
}

/// One evaluated input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
    /// Empty when post-selection never succeeds.
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub p_succ: f64,
    pub c_pp: Option<u64>,
    pub c_pm: Option<u64>,
    pub c_mp: Option<u64>,
    pub c_mm: Option<u64>,
    pub f1_hat: Option<f64>,
    pub f2_hat: Option<f64>,
    pub p_hat: Option<f64>,
}

/// One configuration in a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub label: String,
    pub variant: String,
    pub mean_f1: Option<f64>,
    pub mean_f2: Option<f64>,
    pub p_succ: f64,
    /// Coincidences per simulated pair; empty without a counting section.
    pub rate_proxy: Option<f64>,
}

/// One free parameter of an optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeRow {
    pub knob: String,
    pub start: f64,
    pub value: f64,
    pub objective: Objective,
    pub objective_value: f64,
    pub f1: f64,
    pub f2: f64,
    pub p_succ: f64,
}

/// Rounds to 10 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

fn round_opt(x: Option<f64>) -> Option<f64> {
    x.map(round_sig)
}

fn evaluate_row(
    cfg: &ExperimentConfig,
    index: usize,
    input: &Qubit,
    seed: u64,
    with_counts: bool,
) -> CliResult<ResultRow> {
    let row_seed = derive_seed(seed, index as u64);
    let (f1, f2, p_succ) = match evaluate_with_noise(&cfg.model, &cfg.noise, input, row_seed) {
        Ok(r) => (Some(r.f1), Some(r.f2), r.p_succ),
        Err(Error::NoCoincidence) => (None, None, 0.0),
        Err(e) => return Err(e.into()),
    };
    let mut row = ResultRow {
        index,
        theta: round_sig(input.theta()),
        phi: round_sig(input.phi()),
        f1: round_opt(f1),
        f2: round_opt(f2),
        p_succ: round_sig(p_succ),
        c_pp: None,
        c_pm: None,
        c_mp: None,
        c_mm: None,
        f1_hat: None,
        f2_hat: None,
        p_hat: None,
    };
    if !with_counts {
        return Ok(row);
    }
    let Some(counting) = cfg.counting else {
        return Ok(row);
    };
    if f1.is_none() {
        row.c_pp = Some(0);
        row.c_pm = Some(0);
        row.c_mp = Some(0);
        row.c_mm = Some(0);
        row.p_hat = Some(0.0);
        return Ok(row);
    }
    let (record, estimate) = match counting.balance {
        None => {
            let rec = simulate_counts(
                &cfg.model,
                &cfg.noise,
                input,
                counting.n_pairs,
                &counting.detectors,
                row_seed,
            )?;
            (rec, fidelity_from_counts(&rec))
        }
        Some(method) => {
            let setup = CountingSetup {
                model: cfg.model,
                noise: cfg.noise,
                input: *input,
                n_pairs: counting.n_pairs,
                seed: row_seed,
            };
            match balance_detectors(method, &setup, &counting.detectors) {
                Ok(est) => (est.record, Some((est.f1, est.f2))),
                Err(Error::NoCoincidence) => {
                    (crate::counting::CoincidenceRecord::empty(row_seed), None)
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    row.c_pp = Some(record.c_pp);
    row.c_pm = Some(record.c_pm);
    row.c_mp = Some(record.c_mp);
    row.c_mm = Some(record.c_mm);
    row.f1_hat = round_opt(estimate.map(|e| e.0));
    row.f2_hat = round_opt(estimate.map(|e| e.1));
    row.p_hat = Some(round_sig(success_probability_estimate(&record)));
    Ok(row)
}

fn evaluate_rows(
    cfg: &ExperimentConfig,
    seed_override: Option<u64>,
    with_counts: bool,
) -> CliResult<Vec<ResultRow>> {
    cfg.validate()?;
    let seed = cfg.effective_seed(seed_override);
    let inputs = cfg.inputs()?;
    inputs
        .par_iter()
        .enumerate()
        .map(|(i, q)| evaluate_row(cfg, i, q, seed, with_counts))
        .collect()
}

/// Evaluates the configured input(s); counts are included when the config
/// has a `counting` section.
pub fn run(cfg: &ExperimentConfig, seed_override: Option<u64>) -> CliResult<Vec<ResultRow>> {
    evaluate_rows(cfg, seed_override, true)
}

/// Like [`run`] but requires a `sweep` section.
pub fn sweep(cfg: &ExperimentConfig, seed_override: Option<u64>) -> CliResult<Vec<ResultRow>> {
    if cfg.sweep.is_none() {
        return Err(CliError::Validation("`sweep` section required".into()));
    }
    evaluate_rows(cfg, seed_override, true)
}

/// Counting simulation for every input; requires a `counting` section.
pub fn montecarlo(
    cfg: &ExperimentConfig,
    seed_override: Option<u64>,
) -> CliResult<Vec<ResultRow>> {
    if cfg.counting.is_none() {
        return Err(CliError::Validation("`counting` section required".into()));
    }
    evaluate_rows(cfg, seed_override, true)
}

/// One summary row per labelled config, averaged over each config's inputs.
pub fn compare(
    configs: &[(String, ExperimentConfig)],
    seed_override: Option<u64>,
) -> CliResult<Vec<CompareRow>> {
    if configs.len() < 2 {
        return Err(CliError::Validation("compare needs at least two configs".into()));
    }
    let mut seen = HashSet::new();
    for (label, _) in configs {
        if !seen.insert(label.as_str()) {
            return Err(CliError::Validation(format!("duplicate label `{label}`")));
        }
    }
    configs
        .iter()
        .map(|(label, cfg)| {
            let rows = evaluate_rows(cfg, seed_override, true)?;
            let n = rows.len() as f64;
            let mean = |get: &dyn Fn(&ResultRow) -> Option<f64>| -> Option<f64> {
                let vals: Vec<f64> = rows.iter().filter_map(get).collect();
                (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
            };
            let rate = cfg.counting.map(|_| {
                let c: u64 = rows
                    .iter()
                    .map(|r| {
                        r.c_pp.unwrap_or(0)
                            + r.c_pm.unwrap_or(0)
                            + r.c_mp.unwrap_or(0)
                            + r.c_mm.unwrap_or(0)
                    })
                    .sum();
                let pairs = cfg.counting.map_or(1, |c| c.n_pairs) as f64 * n;
                c as f64 / pairs
            });
            Ok(CompareRow {
                label: label.clone(),
                variant: cfg.model.variant_name().to_string(),
                mean_f1: round_opt(mean(&|r| r.f1)),
                mean_f2: round_opt(mean(&|r| r.f2)),
                p_succ: round_sig(rows.iter().map(|r| r.p_succ).sum::<f64>() / n),
                rate_proxy: round_opt(rate),
            })
        })
        .collect()
}

/// Runs the `optimize` section against the config's first input.
pub fn optimize(cfg: &ExperimentConfig) -> CliResult<Vec<OptimizeRow>> {
    cfg.validate()?;
    let opt = cfg
        .optimize
        .as_ref()
        .ok_or_else(|| CliError::Validation("`optimize` section required".into()))?;
    let input = cfg.inputs()?[0];
    let res = optimize_symmetry(&cfg.model, &opt.free, opt.objective, &input)?;
    opt.free
        .iter()
        .zip(&res.values)
        .map(|(f, &v)| {
            Ok(OptimizeRow {
                knob: f.knob.name().to_string(),
                start: round_sig(cfg.model.knob(f.knob)?),
                value: round_sig(v),
                objective: opt.objective,
                objective_value: round_sig(res.objective_value),
                f1: round_sig(res.report.f1),
                f2: round_sig(res.report.f2),
                p_succ: round_sig(res.report.p_succ),
            })
        })
        .collect()
}

/// Serializes rows as CSV (header + one line per row) or a JSON array.
pub fn render<T: Serialize>(rows: &[T], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
        Format::Json => {
            let mut out =
                serde_json::to_vec_pretty(rows).map_err(|e| CliError::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Inverse of [`render`].
pub fn parse_rows<T: DeserializeOwned>(bytes: &[u8], format: Format) -> CliResult<Vec<T>> {
    match format {
        Format::Csv => csv::Reader::from_reader(bytes)
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CliError::Validation(e.to_string())),
        Format::Json => {
            serde_json::from_slice(bytes).map_err(|e| CliError::Validation(e.to_string()))
        }
    }
}

/// Output format: explicit flag, then config, then file extension, then CSV.
pub fn resolve_format(flag: Option<Format>, cfg: &OutputConfig, path: Option<&Path>) -> Format {
    flag.or(cfg.format)
        .or_else(|| path.and_then(Format::from_path))
        .unwrap_or(Format::Csv)
}

/// Writes `bytes` to `path`, or to stdout when `path` is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
