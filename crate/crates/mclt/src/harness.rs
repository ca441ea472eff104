//! Run orchestration: flat-key configs, verification runs, rate scans, and
//! the stable CSV report format.
//!
//! A run is described by dotted keys (`model.id`, `sim.reps`, `bound.kind`,
//! ...) either parsed from a config file or assembled programmatically.
//! `run_verify` simulates one model at one size, evaluates the requested
//! bound, estimates the actual Wasserstein and Kolmogorov distances on the
//! same deterministic path ensemble, and reports whether the bound covers
//! the estimate. `run_rate_scan` repeats that along a grid of n and fits
//! the empirical convergence rate.
//!
//! Reports are byte-stable: identical inputs produce identical CSV at any
//! worker-thread count (`MCLT_THREADS` caps the pool).

use crate::bounds::{self, BoundKind};
use crate::completion::complete_to_constant_variance;
use crate::distances;
use crate::models::{model_moments, sample_sums, MartingaleModel, PathSim};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::OnceLock;

/// How `bound.a` was requested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothingChoice {
    /// The default `a = s_n/√n`.
    ScaleOverSqrtN,
    Fixed(f64),
    /// Golden-section search over `[0, s_n]`.
    Auto,
}

/// Model selection: an id plus free-form parameters (nested `base.*` keys
/// configure a completion's base model).
#[derive(Clone, Debug, Default)]
pub struct ModelConfig {
    pub id: String,
    pub n: Option<usize>,
    pub params: BTreeMap<String, String>,
}

/// Everything a run needs. `Default` gives the documented defaults.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub reps: usize,
    pub seed: u64,
    pub bound_kind: BoundKind,
    pub bound_a: SmoothingChoice,
    pub n_grid: Vec<usize>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelConfig {
                id: "rademacher".into(),
                n: None,
                params: BTreeMap::new(),
            },
            reps: 100_000,
            seed: 1,
            bound_kind: BoundKind::Thm1,
            bound_a: SmoothingChoice::ScaleOverSqrtN,
            n_grid: vec![16, 64, 256, 1024],
            output: None,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parse the flat `key = value` format. `#` starts a comment, blank lines
/// are skipped, later duplicates win.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let parse_usize = |name: &str| {
            value
                .parse::<usize>()
                .map_err(|_| config_err(format!("{name} must be a non-negative integer, got {value:?}")))
        };
        match key {
            "model.id" => cfg.model.id = value.to_string(),
            "model.n" => cfg.model.n = Some(parse_usize("model.n")?),
            _ if key.starts_with("model.params.") => {
                let name = &key["model.params.".len()..];
                if name.is_empty() {
                    return Err(config_err(format!("line {}: empty parameter name", lineno + 1)));
                }
                cfg.model.params.insert(name.to_string(), value.to_string());
            }
            "sim.reps" => {
                cfg.reps = parse_usize("sim.reps")?;
                if cfg.reps == 0 {
                    return Err(config_err("sim.reps must be >= 1"));
                }
            }
            "sim.seed" => {
                cfg.seed = value
                    .parse::<u64>()
                    .map_err(|_| config_err(format!("sim.seed must be an integer, got {value:?}")))?;
            }
            "bound.kind" => cfg.bound_kind = value.parse()?,
            "bound.a" => cfg.bound_a = parse_smoothing(value)?,
            "n_grid" => {
                let mut grid = Vec::new();
                for piece in value.split(',') {
                    let v = piece.trim().parse::<usize>().map_err(|_| {
                        config_err(format!("n_grid entries must be integers, got {piece:?}"))
                    })?;
                    grid.push(v);
                }
                if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] == 0 {
                    return Err(config_err("n_grid must be strictly increasing positive integers"));
                }
                cfg.n_grid = grid;
            }
            "output.path" => cfg.output = Some(PathBuf::from(value)),
            other => {
                return Err(config_err(format!("unknown configuration key {other:?}")));
            }
        }
    }
    Ok(cfg)
}

/// Parse a `bound.a` value: a number or the literal `auto`.
pub fn parse_smoothing(value: &str) -> Result<SmoothingChoice> {
    if value == "auto" {
        return Ok(SmoothingChoice::Auto);
    }
    match value.parse::<f64>() {
        Ok(a) if a.is_finite() && a >= 0.0 => Ok(SmoothingChoice::Fixed(a)),
        _ => Err(config_err(format!(
            "bound.a must be a non-negative number or \"auto\", got {value:?}"
        ))),
    }
}

fn param_f64(
    model: &str,
    params: &BTreeMap<String, String>,
    name: &str,
    default: f64,
) -> Result<f64> {
    match params.get(name) {
        None => Ok(default),
        Some(raw) => raw.parse::<f64>().map_err(|_| Error::InvalidParam {
            param: format!("{model}.{name}"),
            reason: format!("not a number: {raw:?}"),
        }),
    }
}

fn reject_unknown_params(
    model: &str,
    params: &BTreeMap<String, String>,
    known: &[&str],
) -> Result<()> {
    for key in params.keys() {
        if !known.contains(&key.as_str()) {
            return Err(Error::UnknownParam {
                model: model.into(),
                param: key.clone(),
            });
        }
    }
    Ok(())
}

fn default_n(id: &str) -> usize {
    if id == "twostep" {
        2
    } else {
        64
    }
}

/// Build a zoo model (not a completion) from its config.
pub fn build_martingale(cfg: &ModelConfig) -> Result<MartingaleModel> {
    let id = cfg.id.as_str();
    let n = cfg.n.unwrap_or_else(|| default_n(id));
    match id {
        "rademacher" => {
            reject_unknown_params(id, &cfg.params, &[])?;
            MartingaleModel::rademacher(n)
        }
        "pairswap" => {
            reject_unknown_params(id, &cfg.params, &["u"])?;
            MartingaleModel::pairswap(n, param_f64(id, &cfg.params, "u", 0.5)?)
        }
        "drifting-variance" => {
            reject_unknown_params(id, &cfg.params, &["theta"])?;
            MartingaleModel::drifting_variance(n, param_f64(id, &cfg.params, "theta", 0.5)?)
        }
        "asymmetric-two-point" => {
            reject_unknown_params(id, &cfg.params, &["p"])?;
            MartingaleModel::asymmetric_two_point(n, param_f64(id, &cfg.params, "p", 0.25)?)
        }
        "biased" => {
            reject_unknown_params(id, &cfg.params, &["bias"])?;
            MartingaleModel::biased(n, param_f64(id, &cfg.params, "bias", 0.1)?)
        }
        "twostep" => {
            reject_unknown_params(id, &cfg.params, &["v_hi", "v_lo"])?;
            if n != 2 {
                return Err(Error::InvalidParam {
                    param: "twostep.n".into(),
                    reason: format!("twostep has exactly 2 steps, got n = {n}"),
                });
            }
            MartingaleModel::two_step(
                param_f64(id, &cfg.params, "v_hi", 2.0)?,
                param_f64(id, &cfg.params, "v_lo", 1.0)?,
            )
        }
        other => Err(Error::UnknownModel(other.into())),
    }
}

/// Build any catalog model, including completions, as a path simulator.
pub fn build_model(cfg: &ModelConfig) -> Result<Box<dyn PathSim>> {
    if cfg.id != "completed" {
        return Ok(Box::new(build_martingale(cfg)?));
    }
    let mut base_cfg = ModelConfig::default();
    let mut beta_raw: Option<String> = None;
    for (key, value) in &cfg.params {
        if key == "beta" {
            beta_raw = Some(value.clone());
        } else if key == "base.id" {
            base_cfg.id = value.clone();
        } else if key == "base.n" {
            base_cfg.n = Some(value.parse::<usize>().map_err(|_| Error::InvalidParam {
                param: "completed.base.n".into(),
                reason: format!("not an integer: {value:?}"),
            })?);
        } else if let Some(name) = key.strip_prefix("base.params.") {
            base_cfg.params.insert(name.to_string(), value.clone());
        } else {
            return Err(Error::UnknownParam {
                model: "completed".into(),
                param: key.clone(),
            });
        }
    }
    if base_cfg.id.is_empty() {
        return Err(config_err("completed model needs model.params.base.id"));
    }
    if base_cfg.id == "completed" {
        return Err(config_err("completions do not nest"));
    }
    let base = build_martingale(&base_cfg)?;
    let beta = match beta_raw {
        Some(raw) => raw.parse::<f64>().map_err(|_| Error::InvalidParam {
            param: "completed.beta".into(),
            reason: format!("not a number: {raw:?}"),
        })?,
        None => base
            .certificates()
            .beta
            .ok_or_else(|| Error::MissingCertificate {
                bound: "completion".into(),
                model: base_cfg.id.clone(),
                certificate: "beta",
            })?,
    };
    Ok(Box::new(complete_to_constant_variance(base, beta)?))
}

/// Cap the rayon pool at `MCLT_THREADS` workers. First call wins; later
/// calls (and unset env) leave the default pool.
pub fn ensure_thread_pool() -> Result<()> {
    static INIT: OnceLock<Option<String>> = OnceLock::new();
    let failure = INIT.get_or_init(|| {
        let Ok(raw) = std::env::var("MCLT_THREADS") else {
            return None;
        };
        match raw.parse::<usize>().ok().filter(|&k| k >= 1) {
            Some(threads) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
                None
            }
            None => Some(format!(
                "MCLT_THREADS must be a positive integer, got {raw:?}"
            )),
        }
    });
    match failure {
        None => Ok(()),
        Some(msg) => Err(config_err(msg.clone())),
    }
}

/// One verification outcome; serializes to one CSV row.
#[derive(Clone, Debug)]
pub struct Row {
    pub model: String,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub bound_kind: BoundKind,
    /// Smoothing parameter used; 0 for the closed-form bounds, which have
    /// none.
    pub a: f64,
    pub bound_value: f64,
    pub mc_stderr: f64,
    pub dw_est: f64,
    pub dw_stderr: f64,
    pub dk_est: f64,
    pub cond2_dev: f64,
    pub pass: bool,
}

fn missing_cert(bound: BoundKind, model: &str, certificate: &'static str) -> Error {
    Error::MissingCertificate {
        bound: bound.as_str().into(),
        model: model.into(),
        certificate,
    }
}

/// Simulate, bound, and measure one configuration. The distance estimates
/// and the bound functional are evaluated over the same deterministic path
/// ensemble (same seed, same replicate indexing).
pub fn run_verify(cfg: &RunConfig) -> Result<Row> {
    ensure_thread_pool()?;
    let model = build_model(&cfg.model)?;
    let model = model.as_ref();
    let n = model.steps();
    let certs = model.certificates();
    let kind = cfg.bound_kind;
    if matches!(kind, BoundKind::Thm1 | BoundKind::Cor1 | BoundKind::Cor2)
        && !certs.satisfies_condition2
    {
        return Err(Error::Condition2Violated {
            bound: kind.as_str().into(),
            model: model.id().into(),
        });
    }
    // per-step moments: free closed forms where available, one MC pass
    // otherwise; supplies s², cond2_dev and the thm2/cor3 inputs
    let moments = model_moments(model, cfg.reps, cfg.seed)?;
    let s2 = model.exact_s2().unwrap_or(moments.s2);
    let s_n = s2.sqrt();
    let resolve_a = |choice: SmoothingChoice| match choice {
        SmoothingChoice::ScaleOverSqrtN => s_n / (n as f64).sqrt(),
        SmoothingChoice::Fixed(a) => a,
        SmoothingChoice::Auto => f64::NAN, // handled per bound kind
    };
    let (a_used, bound_value, mc_stderr) = match kind {
        BoundKind::Thm1 => {
            let report = if cfg.bound_a == SmoothingChoice::Auto {
                bounds::thm1_bound_auto(model, cfg.reps, cfg.seed)?
            } else {
                bounds::thm1_bound(model, resolve_a(cfg.bound_a), cfg.reps, cfg.seed)?
            };
            (report.a, report.total, report.mc_stderr)
        }
        BoundKind::Thm2 => {
            let report = if cfg.bound_a == SmoothingChoice::Auto {
                let (a_star, _) = bounds::optimize_smoothing(
                    |a| bounds::thm2_bound(&moments, a).map_or(f64::INFINITY, |r| r.total),
                    s_n,
                )?;
                bounds::thm2_bound(&moments, a_star)?
            } else {
                bounds::thm2_bound(&moments, resolve_a(cfg.bound_a))?
            };
            (report.a, report.total, report.mc_stderr)
        }
        BoundKind::Cor1 => {
            if certs.alpha <= 0.0 {
                return Err(missing_cert(kind, model.id(), "alpha"));
            }
            let gamma = certs
                .gamma
                .ok_or_else(|| missing_cert(kind, model.id(), "gamma"))?;
            (0.0, bounds::cor1_bound(certs.alpha, gamma, n)?, 0.0)
        }
        BoundKind::Cor2 => {
            let beta = certs
                .beta
                .ok_or_else(|| missing_cert(kind, model.id(), "beta"))?;
            let delta = certs
                .delta
                .ok_or_else(|| missing_cert(kind, model.id(), "delta"))?;
            (0.0, bounds::cor2_bound(beta, delta, s2, n)?, 0.0)
        }
        BoundKind::Cor3 => {
            let beta = certs
                .beta
                .ok_or_else(|| missing_cert(kind, model.id(), "beta"))?;
            let delta = certs
                .delta
                .ok_or_else(|| missing_cert(kind, model.id(), "delta"))?;
            (
                0.0,
                bounds::cor3_bound(beta, delta, s2, n, moments.cond2_dev)?,
                0.0,
            )
        }
    };
    let sums = sample_sums(model, cfg.reps, cfg.seed);
    let normalized: Vec<f64> = sums.iter().map(|s| s / s_n).collect();
    let dw = distances::wasserstein_empirical_vs_normal_with_stderr(&normalized, cfg.seed)?;
    let dk = distances::kolmogorov_empirical_vs_normal(&normalized)?;
    Ok(Row {
        model: cfg.model.id.clone(),
        n,
        reps: cfg.reps,
        seed: cfg.seed,
        bound_kind: kind,
        a: a_used,
        bound_value,
        mc_stderr,
        dw_est: dw.value,
        dw_stderr: dw.stderr,
        dk_est: dk.value,
        cond2_dev: moments.cond2_dev,
        pass: dw.value - 3.0 * dw.stderr <= bound_value,
    })
}

/// Rate-scan result: one verification row per grid point plus the fitted
/// log-log slope of the Wasserstein estimate against n.
#[derive(Clone, Debug)]
pub struct RateReport {
    pub rows: Vec<Row>,
    pub slope: f64,
    pub intercept: f64,
}

/// Run the configured verification at every n in the grid and fit
/// `ln dw ≈ intercept + slope·ln n` by least squares.
pub fn run_rate_scan(cfg: &RunConfig) -> Result<RateReport> {
    if cfg.n_grid.len() < 3 {
        return Err(Error::NGridTooShort(cfg.n_grid.len()));
    }
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let mut point = cfg.clone();
        if point.model.id == "completed" {
            point
                .model
                .params
                .insert("base.n".into(), n.to_string());
        } else {
            point.model.n = Some(n);
        }
        rows.push(run_verify(&point)?);
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.dw_est.ln()).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    Ok(RateReport {
        intercept: ybar - slope * xbar,
        slope,
        rows,
    })
}

pub const CSV_HEADER: &str =
    "model,n,reps,seed,bound_kind,a,bound_value,mc_stderr,dw_est,dw_stderr,dk_est,cond2_dev,pass";

fn push_float(out: &mut String, v: f64) {
    out.push_str(&format!("{v:.16e}"));
}

/// Render rows as CSV: integers plain, floats with 17 significant digits,
/// one trailing newline. Identical rows always serialize identically.
pub fn emit_report(rows: &[Row]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.model);
        out.push_str(&format!(",{},{},{},{},", r.n, r.reps, r.seed, r.bound_kind.as_str()));
        push_float(&mut out, r.a);
        out.push(',');
        push_float(&mut out, r.bound_value);
        out.push(',');
        push_float(&mut out, r.mc_stderr);
        out.push(',');
        push_float(&mut out, r.dw_est);
        out.push(',');
        push_float(&mut out, r.dw_stderr);
        out.push(',');
        push_float(&mut out, r.dk_est);
        out.push(',');
        push_float(&mut out, r.cond2_dev);
        out.push(',');
        out.push_str(if r.pass { "true" } else { "false" });
        out.push('\n');
    }
    out
}

/// Write `emit_report` output to a file.
pub fn write_report(path: &std::path::Path, rows: &[Row]) -> Result<()> {
    std::fs::write(path, emit_report(rows))?;
    Ok(())
}
