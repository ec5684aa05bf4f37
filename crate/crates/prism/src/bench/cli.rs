//! Command-line interface of `prism-bench`.
//!
//! Exit codes: 0 on success (every run converged), 2 for usage or file
//! format problems, 3 for numerical failures, 1 for I/O errors.

use super::matfile;
use super::{
    execute_run, execute_sweep, exit_code_for, oracle_result, BenchFunction, GenSpec, RunInput,
    RunPlan, SweepPlan,
};
use crate::error::{Error, Result};
use crate::iterations::{IterationOptions, SpectralEstimate};
use crate::matcore::reference_svd;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "prism-bench",
    version,
    about = "Convergence experiments for adaptive polynomial matrix-function iterations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test matrix and write it as an MTXB file.
    Gen(GenArgs),
    /// Run a solver/strategy grid and emit CSV + JSON convergence reports.
    Run(RunArgs),
    /// Sweep the smallest singular value of a prescribed spectrum.
    Sweep(SweepArgs),
    /// Compute a reference solution and optionally check a candidate file.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FunctionArg {
    Sign,
    Sqrt,
    #[value(name = "invsqrt")]
    InvSqrt,
    Polar,
    #[value(name = "invproot")]
    InvPRoot,
    #[value(name = "inverse-db")]
    InverseDb,
    #[value(name = "inverse-cheb")]
    InverseCheb,
}

impl From<FunctionArg> for BenchFunction {
    fn from(f: FunctionArg) -> BenchFunction {
        match f {
            FunctionArg::Sign => BenchFunction::Sign,
            FunctionArg::Sqrt => BenchFunction::Sqrt,
            FunctionArg::InvSqrt => BenchFunction::InvSqrt,
            FunctionArg::Polar => BenchFunction::Polar,
            FunctionArg::InvPRoot => BenchFunction::InvPRoot,
            FunctionArg::InverseDb => BenchFunction::InverseDb,
            FunctionArg::InverseCheb => BenchFunction::InverseCheb,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectralArg {
    Off,
    Power,
    Jacobi,
}

#[derive(Args)]
struct GenFlags {
    /// Input ensemble: gaussian | wishart | prescribed | prescribed-spd | htmp.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, default_value_t = 0)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated descending singular values (prescribed kinds).
    #[arg(long)]
    values: Option<String>,
    /// Tail-weight parameter for the htmp kind; smaller is heavier.
    #[arg(long)]
    kappa: Option<f64>,
}

impl GenFlags {
    fn to_spec(&self) -> Result<GenSpec> {
        let kind = self
            .kind
            .clone()
            .ok_or_else(|| Error::Config("--kind is required".into()))?;
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("--rows and --cols must be positive".into()));
        }
        let values = match &self.values {
            None => None,
            Some(s) => Some(
                s.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad value {t:?}")))
                    })
                    .collect::<Result<Vec<f64>>>()?,
            ),
        };
        Ok(GenSpec {
            kind,
            rows: self.rows,
            cols: self.cols,
            seed: self.seed,
            values,
            kappa: self.kappa,
        })
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    function: FunctionArg,
    /// Matrix file to solve (MTXB or whitespace text); mutually exclusive
    /// with the generation flags.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    gen: GenFlags,
    /// Comma-separated strategy tokens: taylor, prism-exact,
    /// prism-sketched[:P[:SEED]], fixed:a1,a2,..., fixed-cycle:...,
    /// fixed-triples:a|b|c;...
    #[arg(long, default_value = "prism-sketched")]
    strategies: String,
    /// Surrogate degree (1 or 2).
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Root order for invproot.
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Skip the 1/||A||_F input normalization.
    #[arg(long)]
    no_normalize: bool,
    /// Per-iteration spectral-norm telemetry for the residual.
    #[arg(long, value_enum, default_value_t = SpectralArg::Off)]
    spectral: SpectralArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Swept quantity; only sigma-min is supported.
    #[arg(long, default_value = "sigma-min")]
    vary: String,
    /// Comma-separated smallest singular values, each in (0, 1].
    #[arg(long)]
    values: String,
    #[arg(long, value_enum, default_value_t = FunctionArg::Polar)]
    function: FunctionArg,
    /// Problem dimension (the spectrum is log-spaced from 1 down to
    /// sigma-min).
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value = "taylor,prism-exact")]
    strategies: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweep inputs have sigma_max = 1 by construction, so normalization is
    /// off unless requested.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    function: FunctionArg,
    #[arg(long = "in")]
    input: PathBuf,
    /// Root order for invproot.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Relative eigenvalue threshold below which inverse-type functions
    /// report a singularity.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output MTXB path for the reference result.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Candidate file to compare against the reference.
    #[arg(long)]
    check: Option<PathBuf>,
}

fn split_strategies(s: &str) -> Vec<String> {
    s.split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn spectral_of(arg: SpectralArg) -> SpectralEstimate {
    match arg {
        SpectralArg::Off => SpectralEstimate::Off,
        SpectralArg::Power => SpectralEstimate::Power { iters: 100, seed: 0 },
        SpectralArg::Jacobi => SpectralEstimate::Jacobi,
    }
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let spec = args.gen.to_spec()?;
    let matrix = spec.generate(spec.seed)?;
    matfile::write_matrix(&args.out, &matrix)?;
    println!(
        "wrote rows={} cols={} path={}",
        matrix.rows(),
        matrix.cols(),
        args.out.display()
    );
    if matrix.rows().min(matrix.cols()) <= 2048 {
        let tall = if matrix.rows() >= matrix.cols() {
            matrix.clone()
        } else {
            matrix.transpose()
        };
        let (_, s, _) = reference_svd(&tall, 1e-12)?;
        let smax = s.values.first().copied().unwrap_or(0.0);
        let smin = s.values.last().copied().unwrap_or(0.0);
        println!("sigma_max={smax} sigma_min={smin}");
    } else {
        println!("sigma summary skipped (oracle scale exceeded)");
    }
    Ok(0)
}

fn cmd_run(args: &RunArgs) -> Result<u8> {
    let input = match (&args.input, &args.gen.kind) {
        (Some(path), None) => RunInput::File(path.clone()),
        (None, Some(_)) => RunInput::Generated(args.gen.to_spec()?),
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "--in and --kind are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(
                "either --in or generation flags (--kind ...) are required".into(),
            ))
        }
    };
    let plan = RunPlan {
        function: args.function.into(),
        p: args.p,
        strategies: split_strategies(&args.strategies),
        opts: IterationOptions {
            max_iters: args.max_iters,
            tol_fro: args.tol,
            degree: args.d,
            interval: None,
            normalize_input: !args.no_normalize,
            record_walltime: true,
            spectral_estimate: spectral_of(args.spectral),
        },
        repeats: args.repeats,
        input,
        out_csv: args.out.clone(),
    };
    let all_converged = execute_run(&plan)?;
    println!(
        "wrote {} and {}",
        plan.out_csv.display(),
        plan.out_csv.with_extension("json").display()
    );
    Ok(if all_converged { 0 } else { 3 })
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8> {
    if args.vary != "sigma-min" {
        return Err(Error::Config(format!(
            "unsupported sweep axis {:?}; only sigma-min is available",
            args.vary
        )));
    }
    let sigma_mins: Vec<f64> = args
        .values
        .split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad sigma-min {t:?}")))
        })
        .collect::<Result<_>>()?;
    let plan = SweepPlan {
        function: args.function.into(),
        sigma_mins,
        n: args.n,
        strategies: split_strategies(&args.strategies),
        opts: IterationOptions {
            max_iters: args.max_iters,
            tol_fro: args.tol,
            degree: args.d,
            interval: None,
            normalize_input: args.normalize,
            record_walltime: true,
            spectral_estimate: SpectralEstimate::Off,
        },
        seed: args.seed,
        out_csv: args.out.clone(),
    };
    let all_converged = execute_sweep(&plan)?;
    println!("wrote {}", plan.out_csv.display());
    Ok(if all_converged { 0 } else { 3 })
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8> {
    if args.out.is_none() && args.check.is_none() {
        return Err(Error::Config(
            "at least one of --out and --check is required".into(),
        ));
    }
    let input = matfile::read_matrix(&args.input)?;
    let reference = oracle_result(args.function.into(), args.p, &input, args.tol)?;
    if let Some(out) = &args.out {
        matfile::write_matrix(out, &reference)?;
        println!("wrote {}", out.display());
    }
    if let Some(check) = &args.check {
        let candidate = matfile::read_matrix(check)?;
        if candidate.rows() != reference.rows() || candidate.cols() != reference.cols() {
            return Err(Error::Format(format!(
                "candidate is {}x{}, reference is {}x{}",
                candidate.rows(),
                candidate.cols(),
                reference.rows(),
                reference.cols()
            )));
        }
        let diff = candidate.sub(&reference)?.frob_norm();
        let rel = diff / reference.frob_norm().max(f64::MIN_POSITIVE);
        println!("check_fro={diff} check_rel={rel}");
    }
    Ok(0)
}

/// Entry point used by the `prism-bench` binary.
pub fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("PRISM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
