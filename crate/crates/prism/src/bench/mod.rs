//! Experiment runner behind the `prism-bench` binary: input generation,
//! solver/strategy grids, and machine-readable convergence reports.
//!
//! Reports come in two parts: a CSV with one row per recorded iteration
//! (schema frozen in [`RUN_CSV_HEADER`]) and a JSON sidecar echoing the
//! configuration, library and stream versions, and per-run statuses with
//! every seed needed to reproduce the run bit-identically.

pub mod cli;
pub mod matfile;

use crate::error::{Error, Result};
use crate::genmat::{
    gaussian_matrix, htmp_like_matrix, prescribed_spd_matrix, prescribed_spectrum_matrix,
    wishart_spd,
};
use crate::iterations::{
    chebyshev_inverse_iterate, db_newton_sqrt, inverse_proot_iterate, polar_iterate,
    sign_iterate, sqrt_coupled_iterate, CoefficientStrategy, FixedSchedule, IterationOptions,
    IterationResult, ScheduleEntry, Termination,
};
use crate::matcore::{reference_matrix_function, reference_svd, Mat, MatrixFunctionKind};
use crate::prng::PRNG_VERSION;
use serde_json::json;
use std::path::{Path, PathBuf};

/// Exact header of the per-iteration CSV emitted by `run`.
pub const RUN_CSV_HEADER: &str = "strategy,repeat,iter,residual_fro,residual_spec_est,alpha,wall_ns";
/// Exact header of the per-point CSV emitted by `sweep`.
pub const SWEEP_CSV_HEADER: &str = "sigma_min,strategy,iters,total_wall_ns,speedup";

/// Repeats of a sketched strategy shift the sketch seed by this stride so
/// the per-iteration streams of different repeats never overlap.
pub const REPEAT_SEED_STRIDE: u64 = 10_000;

const ORACLE_MAX_DIM: usize = 2048;

/// Maps an error to the documented process exit code: 2 for usage and format
/// problems, 3 for numerical failures, 1 for I/O.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Format(_)
        | Error::ShapeMismatch { .. }
        | Error::MissingPower { .. } => 2,
        Error::NotSymmetric { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::Singular { .. }
        | Error::DegenerateInput(_)
        | Error::NumericalInstability { .. } => 3,
        Error::Io(_) => 1,
    }
}

/// Target function selector shared by `run` and `oracle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchFunction {
    Sign,
    Sqrt,
    InvSqrt,
    Polar,
    InvPRoot,
    /// Inverse square root via the product-form Newton iteration.
    InverseDb,
    /// Inverse via the accelerated degree-2 iteration.
    InverseCheb,
}

impl BenchFunction {
    pub fn parse(name: &str) -> Result<BenchFunction> {
        Ok(match name {
            "sign" => BenchFunction::Sign,
            "sqrt" => BenchFunction::Sqrt,
            "invsqrt" => BenchFunction::InvSqrt,
            "polar" => BenchFunction::Polar,
            "invproot" => BenchFunction::InvPRoot,
            "inverse-db" => BenchFunction::InverseDb,
            "inverse-cheb" => BenchFunction::InverseCheb,
            other => {
                return Err(Error::Config(format!(
                    "unknown function {other:?}; expected one of sign, sqrt, invsqrt, polar, \
                     invproot, inverse-db, inverse-cheb"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BenchFunction::Sign => "sign",
            BenchFunction::Sqrt => "sqrt",
            BenchFunction::InvSqrt => "invsqrt",
            BenchFunction::Polar => "polar",
            BenchFunction::InvPRoot => "invproot",
            BenchFunction::InverseDb => "inverse-db",
            BenchFunction::InverseCheb => "inverse-cheb",
        }
    }
}

/// Parses one strategy token:
/// `taylor`, `prism-exact`, `prism-sketched[:P[:SEED]]`,
/// `fixed:a1,a2,...`, `fixed-cycle:a1,a2,...`, or
/// `fixed-triples:a|b|c;a|b|c;...`.
pub fn parse_strategy(token: &str) -> Result<CoefficientStrategy> {
    if token == "taylor" {
        return Ok(CoefficientStrategy::Taylor);
    }
    if token == "prism-exact" {
        return Ok(CoefficientStrategy::PrismExact);
    }
    if let Some(rest) = token.strip_prefix("prism-sketched") {
        let mut rows = 8usize;
        let mut seed = 0u64;
        if let Some(args) = rest.strip_prefix(':') {
            let mut parts = args.split(':');
            if let Some(p) = parts.next() {
                rows = p
                    .parse()
                    .map_err(|_| Error::Config(format!("bad sketch row count in {token:?}")))?;
            }
            if let Some(s) = parts.next() {
                seed = s
                    .parse()
                    .map_err(|_| Error::Config(format!("bad sketch seed in {token:?}")))?;
            }
            if parts.next().is_some() {
                return Err(Error::Config(format!("too many fields in {token:?}")));
            }
        } else if !rest.is_empty() {
            return Err(Error::Config(format!("unknown strategy {token:?}")));
        }
        return Ok(CoefficientStrategy::PrismSketched { rows, seed });
    }
    if let Some(args) = token.strip_prefix("fixed-triples:") {
        let mut entries = Vec::new();
        for triple in args.split(';') {
            let parts: Vec<&str> = triple.split('|').collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!(
                    "triple {triple:?} must have three |-separated fields"
                )));
            }
            let vals: Vec<f64> = parts
                .iter()
                .map(|p| {
                    p.parse()
                        .map_err(|_| Error::Config(format!("bad coefficient {p:?}")))
                })
                .collect::<Result<_>>()?;
            entries.push(ScheduleEntry::Triple(vals[0], vals[1], vals[2]));
        }
        if entries.is_empty() {
            return Err(Error::Config("empty triple schedule".into()));
        }
        return Ok(CoefficientStrategy::FixedSchedule(FixedSchedule {
            entries,
            cycle: false,
        }));
    }
    for (prefix, cycle) in [("fixed:", false), ("fixed-cycle:", true)] {
        if let Some(args) = token.strip_prefix(prefix) {
            let alphas: Vec<f64> = args
                .split(',')
                .map(|p| {
                    p.parse()
                        .map_err(|_| Error::Config(format!("bad alpha {p:?}")))
                })
                .collect::<Result<_>>()?;
            if alphas.is_empty() {
                return Err(Error::Config("empty fixed schedule".into()));
            }
            return Ok(CoefficientStrategy::FixedSchedule(FixedSchedule::from_alphas(
                alphas, cycle,
            )));
        }
    }
    Err(Error::Config(format!("unknown strategy {token:?}")))
}

fn shift_sketch_seed(strategy: &CoefficientStrategy, repeat: usize) -> CoefficientStrategy {
    match strategy {
        CoefficientStrategy::PrismSketched { rows, seed } => CoefficientStrategy::PrismSketched {
            rows: *rows,
            seed: seed.wrapping_add(REPEAT_SEED_STRIDE * repeat as u64),
        },
        other => other.clone(),
    }
}

fn sketch_seed_of(strategy: &CoefficientStrategy) -> Option<u64> {
    match strategy {
        CoefficientStrategy::PrismSketched { seed, .. } => Some(*seed),
        _ => None,
    }
}

/// Runs one (function, strategy) cell. For `inverse-db` only `taylor`
/// (classical, alpha = 1/2) and `prism-exact` (adaptive) are meaningful.
pub fn solve(
    function: BenchFunction,
    p: u32,
    a: &Mat,
    strategy: &CoefficientStrategy,
    opts: &IterationOptions,
) -> Result<IterationResult> {
    match function {
        BenchFunction::Sign => sign_iterate(a, strategy, opts),
        BenchFunction::Sqrt => sqrt_coupled_iterate(a, strategy, opts),
        BenchFunction::InvSqrt => {
            let mut res = sqrt_coupled_iterate(a, strategy, opts)?;
            let inv = res
                .secondary
                .take()
                .expect("coupled iteration always returns the inverse factor");
            res.secondary = Some(std::mem::replace(&mut res.primary, inv));
            Ok(res)
        }
        BenchFunction::Polar => polar_iterate(a, strategy, opts),
        BenchFunction::InvPRoot => inverse_proot_iterate(a, p, strategy, opts),
        BenchFunction::InverseDb => {
            let adaptive = match strategy {
                CoefficientStrategy::Taylor => false,
                CoefficientStrategy::PrismExact => true,
                _ => {
                    return Err(Error::Config(
                        "inverse-db supports the strategies taylor (classical) and prism-exact \
                         (adaptive) only"
                            .into(),
                    ))
                }
            };
            let mut res = db_newton_sqrt(a, adaptive, opts)?;
            let inv = res
                .secondary
                .take()
                .expect("product-form Newton always returns the inverse factor");
            res.secondary = Some(std::mem::replace(&mut res.primary, inv));
            Ok(res)
        }
        BenchFunction::InverseCheb => chebyshev_inverse_iterate(a, strategy, opts),
    }
}

/// Input source for `run`: a matrix file, or an ensemble generated per
/// repeat with seed `base_seed + repeat`.
#[derive(Debug, Clone)]
pub enum RunInput {
    File(PathBuf),
    Generated(GenSpec),
}

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub kind: String,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    pub values: Option<Vec<f64>>,
    pub kappa: Option<f64>,
}

impl GenSpec {
    pub fn generate(&self, seed: u64) -> Result<Mat> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("rows and cols must be positive".into()));
        }
        match self.kind.as_str() {
            "gaussian" => Ok(gaussian_matrix(self.rows, self.cols, seed)),
            "wishart" => wishart_spd(self.rows, self.cols, seed),
            "prescribed" => {
                let values = self.values.as_ref().ok_or_else(|| {
                    Error::Config("prescribed kind requires --values".into())
                })?;
                prescribed_spectrum_matrix(values, self.rows, self.cols, seed)
            }
            "prescribed-spd" => {
                let values = self.values.as_ref().ok_or_else(|| {
                    Error::Config("prescribed-spd kind requires --values".into())
                })?;
                if self.rows != self.cols {
                    return Err(Error::Config(
                        "prescribed-spd requires rows == cols".into(),
                    ));
                }
                prescribed_spd_matrix(values, self.rows, seed)
            }
            "htmp" => {
                let kappa = self
                    .kappa
                    .ok_or_else(|| Error::Config("htmp kind requires --kappa".into()))?;
                htmp_like_matrix(self.rows, self.cols, kappa, seed)
            }
            other => Err(Error::Config(format!(
                "unknown kind {other:?}; expected gaussian, wishart, prescribed, prescribed-spd, or htmp"
            ))),
        }
    }

    fn describe(&self) -> serde_json::Value {
        json!({
            "kind": self.kind,
            "rows": self.rows,
            "cols": self.cols,
            "seed": self.seed,
            "values": self.values,
            "kappa": self.kappa,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub function: BenchFunction,
    pub p: u32,
    pub strategies: Vec<String>,
    pub opts: IterationOptions,
    pub repeats: usize,
    pub input: RunInput,
    pub out_csv: PathBuf,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn json_sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn options_json(opts: &IterationOptions) -> serde_json::Value {
    json!({
        "max_iters": opts.max_iters,
        "tol_fro": opts.tol_fro,
        "degree": opts.degree,
        "normalize_input": opts.normalize_input,
        "interval": opts.interval.map(|iv| vec![iv.lower, iv.upper]),
    })
}

/// Executes a run plan; writes the CSV and JSON reports and returns whether
/// every run converged.
pub fn execute_run(plan: &RunPlan) -> Result<bool> {
    if plan.strategies.is_empty() {
        return Err(Error::Config("at least one strategy is required".into()));
    }
    if plan.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let parsed: Vec<CoefficientStrategy> = plan
        .strategies
        .iter()
        .map(|t| parse_strategy(t))
        .collect::<Result<_>>()?;

    let mut csv = String::from(RUN_CSV_HEADER);
    csv.push('\n');
    let mut runs_json = Vec::new();
    let mut all_converged = true;

    for (token, strategy) in plan.strategies.iter().zip(&parsed) {
        for repeat in 0..plan.repeats {
            let (matrix, input_seed) = match &plan.input {
                RunInput::File(path) => (matfile::read_matrix(path)?, None),
                RunInput::Generated(spec) => {
                    let seed = spec.seed.wrapping_add(repeat as u64);
                    (spec.generate(seed)?, Some(seed))
                }
            };
            let effective = shift_sketch_seed(strategy, repeat);
            let result = solve(plan.function, plan.p, &matrix, &effective, &plan.opts)?;
            for rec in &result.report.records {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    token,
                    repeat,
                    rec.iter,
                    rec.residual_fro,
                    fmt_opt(rec.residual_spec_est),
                    fmt_opt(rec.alpha),
                    rec.wall_ns
                ));
            }
            if result.report.termination != Termination::Converged {
                all_converged = false;
            }
            runs_json.push(json!({
                "strategy": token,
                "repeat": repeat,
                "status": result.report.termination.to_string(),
                "iterations": result.report.iterations(),
                "final_residual": result.report.final_residual(),
                "input_seed": input_seed,
                "sketch_seed": sketch_seed_of(&effective),
            }));
        }
    }

    std::fs::write(&plan.out_csv, csv)?;
    let input_desc = match &plan.input {
        RunInput::File(path) => json!({ "path": path.display().to_string() }),
        RunInput::Generated(spec) => spec.describe(),
    };
    let report = json!({
        "config": {
            "function": plan.function.name(),
            "p": plan.p,
            "strategies": plan.strategies,
            "options": options_json(&plan.opts),
            "repeats": plan.repeats,
            "input": input_desc,
        },
        "versions": {
            "library": env!("CARGO_PKG_VERSION"),
            "prng": PRNG_VERSION,
        },
        "runs": runs_json,
    });
    std::fs::write(
        json_sidecar_path(&plan.out_csv),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(all_converged)
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub function: BenchFunction,
    pub sigma_mins: Vec<f64>,
    pub n: usize,
    pub strategies: Vec<String>,
    pub opts: IterationOptions,
    pub seed: u64,
    pub out_csv: PathBuf,
}

fn log_spaced_down_to(sigma_min: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(sigma_min.log10() * i as f64 / (n - 1).max(1) as f64))
        .collect()
}

/// Sweeps the smallest singular value of a prescribed log-spaced spectrum
/// (sigma_max stays 1) and reports iterations-to-tolerance, total wall time,
/// and the wall-clock speedup relative to the first listed strategy.
pub fn execute_sweep(plan: &SweepPlan) -> Result<bool> {
    if plan.sigma_mins.is_empty() {
        return Err(Error::Config("at least one sigma-min value is required".into()));
    }
    if plan.strategies.is_empty() {
        return Err(Error::Config("at least one strategy is required".into()));
    }
    for s in &plan.sigma_mins {
        if !(*s > 0.0 && *s <= 1.0) {
            return Err(Error::Config(format!(
                "sigma-min values must lie in (0, 1], got {s}"
            )));
        }
    }
    if !matches!(plan.function, BenchFunction::Polar | BenchFunction::Sqrt) {
        return Err(Error::Config(
            "sweep supports the functions polar and sqrt".into(),
        ));
    }
    let parsed: Vec<CoefficientStrategy> = plan
        .strategies
        .iter()
        .map(|t| parse_strategy(t))
        .collect::<Result<_>>()?;

    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    let mut all_converged = true;
    for (idx, sigma_min) in plan.sigma_mins.iter().enumerate() {
        let values = log_spaced_down_to(*sigma_min, plan.n);
        let seed = plan.seed.wrapping_add(idx as u64);
        let matrix = match plan.function {
            BenchFunction::Polar => prescribed_spectrum_matrix(&values, plan.n, plan.n, seed)?,
            BenchFunction::Sqrt => prescribed_spd_matrix(&values, plan.n, seed)?,
            _ => unreachable!(),
        };
        let mut first_wall: Option<u64> = None;
        for (token, strategy) in plan.strategies.iter().zip(&parsed) {
            let result = solve(plan.function, 2, &matrix, strategy, &plan.opts)?;
            if result.report.termination != Termination::Converged {
                all_converged = false;
            }
            let wall: u64 = result.report.records.iter().map(|r| r.wall_ns).sum();
            let baseline = *first_wall.get_or_insert(wall);
            let speedup = baseline.max(1) as f64 / wall.max(1) as f64;
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                sigma_min,
                token,
                result.report.iterations(),
                wall,
                speedup
            ));
        }
    }
    std::fs::write(&plan.out_csv, csv)?;
    Ok(all_converged)
}

/// Computes the reference result for a function via the eigendecomposition
/// and SVD oracles; `tol` is the relative singularity threshold.
pub fn oracle_result(function: BenchFunction, p: u32, a: &Mat, tol: f64) -> Result<Mat> {
    if a.rows().min(a.cols()) > ORACLE_MAX_DIM {
        return Err(Error::Config("oracle scale exceeded".into()));
    }
    match function {
        BenchFunction::Sign => reference_matrix_function(a, MatrixFunctionKind::Sign, tol),
        BenchFunction::Sqrt => reference_matrix_function(a, MatrixFunctionKind::Sqrt, tol),
        BenchFunction::InvSqrt | BenchFunction::InverseDb => {
            reference_matrix_function(a, MatrixFunctionKind::InvSqrt, tol)
        }
        BenchFunction::InvPRoot => {
            reference_matrix_function(a, MatrixFunctionKind::InvPRoot(p), tol)
        }
        BenchFunction::InverseCheb => {
            reference_matrix_function(a, MatrixFunctionKind::Inverse, tol)
        }
        BenchFunction::Polar => {
            let (u, _, v) = reference_svd(a, tol)?;
            u.matmul(&v.transpose())
        }
    }
}
