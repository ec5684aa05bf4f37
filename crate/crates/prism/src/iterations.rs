//! The iterative solvers: sign, coupled square root, polar factor, inverse
//! p-th root, product-form Newton square root, and the accelerated inverse
//! iteration. Each is parameterized by a coefficient strategy (classical
//! Taylor, exact per-iteration fitting, sketched fitting, or a fixed
//! schedule) and records full per-iteration telemetry.

use crate::error::{Error, Result};
use crate::matcore::{
    cholesky_spd_inverse, jacobi_eigendecomposition, spectral_norm_estimate, Mat,
    SYMMETRY_REL_TOL,
};
use crate::polyfit::{
    chebyshev_alpha_on, eval_surrogate_matrix, inverse_newton_default_interval,
    inverse_newton_loss_coeffs, minimize_poly_on_interval, minimize_quartic_on_interval,
    ns_default_interval, ns_loss_coeffs, taylor_surrogate, AlphaInterval, SurrogateFamily,
    SurrogatePolynomial, CHEBYSHEV_INTERVAL,
};
use crate::sketch::{exact_power_traces, gaussian_sketch, sketched_power_traces, TraceTable};
use std::time::Instant;

/// One entry of a fixed coefficient schedule: either the free top coefficient
/// of the surrogate, or a full (a, b, c) triple applied as X (aI + bR + cR^2)
/// so that externally published schedules can be imported verbatim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleEntry {
    Alpha(f64),
    Triple(f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedSchedule {
    pub entries: Vec<ScheduleEntry>,
    /// When true the schedule wraps around; when false the last entry
    /// repeats once the iteration count exceeds the list.
    pub cycle: bool,
}

impl FixedSchedule {
    pub fn from_alphas(alphas: Vec<f64>, cycle: bool) -> FixedSchedule {
        FixedSchedule {
            entries: alphas.into_iter().map(ScheduleEntry::Alpha).collect(),
            cycle,
        }
    }

    fn entry(&self, k: usize) -> ScheduleEntry {
        if self.cycle {
            self.entries[k % self.entries.len()]
        } else {
            self.entries[k.min(self.entries.len() - 1)]
        }
    }
}

/// How the per-iteration update coefficient is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientStrategy {
    /// Classical update: the top coefficient stays at its Taylor value.
    Taylor,
    /// Per-iteration least-squares fit from exact residual power traces.
    PrismExact,
    /// Per-iteration fit from sketched traces; a fresh sketch with seed
    /// `seed + k` is drawn at iteration k.
    PrismSketched { rows: usize, seed: u64 },
    FixedSchedule(FixedSchedule),
}

impl CoefficientStrategy {
    fn validate(&self) -> Result<()> {
        if let CoefficientStrategy::FixedSchedule(s) = self {
            if s.entries.is_empty() {
                return Err(Error::Config("fixed schedule must be non-empty".into()));
            }
        }
        Ok(())
    }
}

/// Optional per-iteration spectral-norm telemetry for the residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralEstimate {
    Off,
    /// Power iteration on R^T R; cheap, deterministic per seed.
    Power { iters: usize, seed: u64 },
    /// Exact via the Jacobi oracle; intended for desk-scale analysis runs.
    Jacobi,
}

#[derive(Debug, Clone)]
pub struct IterationOptions {
    pub max_iters: usize,
    /// Stop once ||R_k||_F <= tol_fro * sqrt(n).
    pub tol_fro: f64,
    /// Surrogate degree; 1 or 2.
    pub degree: usize,
    /// Override of the fitting interval; defaults per degree when absent.
    pub interval: Option<AlphaInterval>,
    /// Scale the input by 1/||A||_F before iterating (outputs are rescaled
    /// where the target function requires it).
    pub normalize_input: bool,
    pub record_walltime: bool,
    pub spectral_estimate: SpectralEstimate,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            max_iters: 100,
            tol_fro: 1e-8,
            degree: 1,
            interval: None,
            normalize_input: true,
            record_walltime: true,
            spectral_estimate: SpectralEstimate::Off,
        }
    }
}

impl IterationOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.tol_fro > 0.0) {
            return Err(Error::Config("tol_fro must be positive".into()));
        }
        Ok(())
    }

    fn ns_degree(&self) -> Result<usize> {
        match self.degree {
            1 | 2 => Ok(self.degree),
            d => Err(Error::Config(format!(
                "surrogate degree must be 1 or 2, got {d}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual_fro: f64,
    pub residual_spec_est: Option<f64>,
    /// Coefficient used to advance from this iterate; `None` on the final
    /// record where no step was taken.
    pub alpha: Option<f64>,
    pub wall_ns: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    Diverged,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Converged => write!(f, "converged"),
            Termination::MaxIters => write!(f, "max-iters"),
            Termination::Diverged => write!(f, "diverged"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
}

impl ConvergenceReport {
    /// Number of update steps taken.
    pub fn iterations(&self) -> usize {
        self.records.iter().filter(|r| r.alpha.is_some()).count()
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map(|r| r.residual_fro).unwrap_or(0.0)
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.alpha).collect()
    }
}

#[derive(Debug, Clone)]
pub struct IterationResult {
    pub primary: Mat,
    pub secondary: Option<Mat>,
    pub report: ConvergenceReport,
}

// ---------------------------------------------------------------------------
// Shared solve-loop machinery.

struct SolveLoop<'a> {
    opts: &'a IterationOptions,
    thresh: f64,
    records: Vec<IterationRecord>,
    prev_resid: Option<f64>,
    increases: usize,
    pending: Option<(usize, f64, Option<f64>)>,
}

impl<'a> SolveLoop<'a> {
    fn new(opts: &'a IterationOptions, n: usize) -> SolveLoop<'a> {
        SolveLoop {
            opts,
            thresh: opts.tol_fro * (n as f64).sqrt(),
            records: Vec::new(),
            prev_resid: None,
            increases: 0,
            pending: None,
        }
    }

    fn spectral(&self, r: &Mat) -> Option<f64> {
        match self.opts.spectral_estimate {
            SpectralEstimate::Off => None,
            SpectralEstimate::Power { iters, seed } => {
                Some(spectral_norm_estimate(r, iters, seed))
            }
            SpectralEstimate::Jacobi => {
                let eig = jacobi_eigendecomposition(r, 1e-11).ok()?;
                Some(eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            }
        }
    }

    /// Inspects the residual at the top of iteration k. Returns the
    /// termination reason if the loop should stop without stepping.
    fn observe(&mut self, k: usize, r: &Mat) -> Option<Termination> {
        let rfro = r.frob_norm();
        let est = self.spectral(r);
        if let Some(prev) = self.prev_resid {
            // NaN residuals count as growth so blowups terminate.
            if !(rfro <= prev) {
                self.increases += 1;
            } else {
                self.increases = 0;
            }
        }
        self.prev_resid = Some(rfro);
        let verdict = if rfro <= self.thresh {
            Some(Termination::Converged)
        } else if self.increases >= 5 {
            Some(Termination::Diverged)
        } else if k >= self.opts.max_iters {
            Some(Termination::MaxIters)
        } else {
            None
        };
        if verdict.is_some() {
            self.records.push(IterationRecord {
                iter: k,
                residual_fro: rfro,
                residual_spec_est: est,
                alpha: None,
                wall_ns: 0,
            });
        } else {
            self.pending = Some((k, rfro, est));
        }
        verdict
    }

    /// Records the step just taken from the last observed iterate.
    fn commit(&mut self, alpha: f64, wall_ns: u64) {
        let (iter, residual_fro, residual_spec_est) =
            self.pending.take().expect("commit without observe");
        self.records.push(IterationRecord {
            iter,
            residual_fro,
            residual_spec_est,
            alpha: Some(alpha),
            wall_ns: if self.opts.record_walltime { wall_ns } else { 0 },
        });
    }

    fn finish(self, termination: Termination) -> ConvergenceReport {
        ConvergenceReport {
            records: self.records,
            termination,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum LossFamily {
    NewtonSchulz { degree: usize },
    InverseNewton { p: u32 },
    Chebyshev,
}

/// Update polynomial applied on the right of the iterate.
#[derive(Debug, Clone, Copy)]
enum UpdateCoeffs {
    Surrogate(f64),
    Triple(f64, f64, f64),
}

impl UpdateCoeffs {
    /// The recorded coefficient: the surrogate's free alpha, or the top
    /// coefficient of an imported triple.
    fn recorded_alpha(&self) -> f64 {
        match self {
            UpdateCoeffs::Surrogate(a) => *a,
            UpdateCoeffs::Triple(_, _, c) => *c,
        }
    }
}

struct AlphaEngine<'a> {
    strategy: &'a CoefficientStrategy,
    family: LossFamily,
    interval: AlphaInterval,
    taylor_alpha: f64,
}

impl AlphaEngine<'_> {
    fn needed_power(&self) -> usize {
        match self.family {
            LossFamily::NewtonSchulz { degree } => 4 * degree + 2,
            LossFamily::InverseNewton { p } => 2 * p as usize + 2,
            LossFamily::Chebyshev => 6,
        }
    }

    fn choose(&self, r: &Mat, k: usize) -> Result<UpdateCoeffs> {
        match self.strategy {
            CoefficientStrategy::Taylor => Ok(UpdateCoeffs::Surrogate(self.taylor_alpha)),
            CoefficientStrategy::FixedSchedule(s) => Ok(match s.entry(k) {
                ScheduleEntry::Alpha(a) => UpdateCoeffs::Surrogate(a),
                ScheduleEntry::Triple(a, b, c) => UpdateCoeffs::Triple(a, b, c),
            }),
            CoefficientStrategy::PrismExact => {
                let traces = exact_power_traces(r, self.needed_power())?;
                Ok(UpdateCoeffs::Surrogate(self.minimize(&traces)?))
            }
            CoefficientStrategy::PrismSketched { rows, seed } => {
                let sketch = gaussian_sketch(*rows, r.rows(), seed.wrapping_add(k as u64))?;
                let traces = sketched_power_traces(r, &sketch, self.needed_power())?;
                Ok(UpdateCoeffs::Surrogate(self.minimize(&traces)?))
            }
        }
    }

    fn minimize(&self, traces: &TraceTable) -> Result<f64> {
        match self.family {
            LossFamily::NewtonSchulz { degree } => {
                let mut loss = ns_loss_coeffs(traces, degree)?;
                loss.interval = self.interval;
                Ok(minimize_quartic_on_interval(&loss))
            }
            LossFamily::InverseNewton { p } => {
                let loss = inverse_newton_loss_coeffs(traces, p)?;
                let scale = loss.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                if scale == 0.0
                    || loss.coeffs[1..].iter().all(|c| c.abs() <= 1e-14 * scale)
                {
                    return Ok(self.interval.clamp(loss.fallback_alpha));
                }
                Ok(minimize_poly_on_interval(&loss.coeffs, self.interval))
            }
            LossFamily::Chebyshev => chebyshev_alpha_on(traces, self.interval),
        }
    }
}

fn apply_triple(r: &Mat, a: f64, b: f64, c: f64) -> Result<Mat> {
    // a I + b R + c R^2 = a I + R (b I + c R)
    let inner = r.scale(c).add_scaled_identity(b);
    Ok(r.matmul(&inner)?.add_scaled_identity(a))
}

fn update_polynomial(
    surrogate: &SurrogatePolynomial,
    coeffs: UpdateCoeffs,
    r: &Mat,
) -> Result<Mat> {
    match coeffs {
        UpdateCoeffs::Surrogate(alpha) => eval_surrogate_matrix(surrogate, alpha, r),
        UpdateCoeffs::Triple(a, b, c) => apply_triple(r, a, b, c),
    }
}

fn require_symmetric(m: &Mat, op: &'static str) -> Result<()> {
    if !m.is_symmetric_to(SYMMETRY_REL_TOL) {
        return Err(Error::NotSymmetric { op });
    }
    Ok(())
}

/// SPD necessary condition that is cheap enough to run unconditionally.
fn require_positive_diagonal(m: &Mat) -> Result<()> {
    for i in 0..m.rows() {
        if m.get(i, i) <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: i });
        }
    }
    Ok(())
}

fn frob_normalized(a: &Mat, enabled: bool) -> Result<(Mat, f64)> {
    if !enabled {
        return Ok((a.clone(), 1.0));
    }
    let norm = a.frob_norm();
    if norm == 0.0 {
        return Err(Error::DegenerateInput("cannot normalize a zero matrix"));
    }
    Ok((a.scale(1.0 / norm), norm))
}

fn ns_setup(opts: &IterationOptions) -> Result<(SurrogatePolynomial, AlphaInterval)> {
    let d = opts.ns_degree()?;
    let surrogate = taylor_surrogate(SurrogateFamily::InvSqrtResidual, d)?;
    let interval = match opts.interval {
        Some(iv) => iv,
        None => ns_default_interval(d).expect("degree validated"),
    };
    Ok((surrogate, interval))
}

// ---------------------------------------------------------------------------
// Solvers.

/// Matrix sign via the accelerated polynomial iteration. Requires a square
/// input whose square is symmetric; the residual is R_k = I - X_k^2.
pub fn sign_iterate(
    a: &Mat,
    strategy: &CoefficientStrategy,
    opts: &IterationOptions,
) -> Result<IterationResult> {
    opts.validate()?;
    strategy.validate()?;
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            op: "sign_iterate",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.rows(),
            right_cols: a.rows(),
        });
    }
    let (surrogate, interval) = ns_setup(opts)?;
    let (mut x, _) = frob_normalized(a, opts.normalize_input)?;
    let n = x.rows();

    let x2 = x.matmul(&x)?;
    require_symmetric(&x2, "sign_iterate (square of input)")?;
    let mut r = x2.identity_minus().symmetrized();

    let engine = AlphaEngine {
        strategy,
        family: LossFamily::NewtonSchulz {
            degree: surrogate.degree,
        },
        interval,
        taylor_alpha: surrogate.taylor_alpha(),
    };
    let mut state = SolveLoop::new(opts, n);
    let termination = loop {
        let k = state.records.len();
        if let Some(term) = state.observe(k, &r) {
            break term;
        }
        let started = Instant::now();
        let coeffs = engine.choose(&r, k)?;
        let g = update_polynomial(&surrogate, coeffs, &r)?;
        x = x.matmul(&g)?;
        let x2 = x.matmul(&x)?;
        r = x2.identity_minus().symmetrized();
        state.commit(coeffs.recorded_alpha(), started.elapsed().as_nanos() as u64);
    };
    Ok(IterationResult {
        primary: x,
        secondary: None,
        report: state.finish(termination),
    })
}

/// Coupled square-root iteration: X_k converges to A^{1/2} and Y_k to
/// A^{-1/2}, with shared update polynomial applied on opposite sides and
/// residual R_k = I - X_k Y_k. The loss coefficients are identical to the
/// sign path.
pub fn sqrt_coupled_iterate(
    a: &Mat,
    strategy: &CoefficientStrategy,
    opts: &IterationOptions,
) -> Result<IterationResult> {
    opts.validate()?;
    strategy.validate()?;
    require_symmetric(a, "sqrt_coupled_iterate")?;
    let (surrogate, interval) = ns_setup(opts)?;
    let (a_hat, scale) = frob_normalized(&a.symmetrized(), opts.normalize_input)?;
    require_positive_diagonal(&a_hat)?;
    #[cfg(debug_assertions)]
    {
        if a_hat.rows() <= 256 {
            let eig = jacobi_eigendecomposition(&a_hat, 1e-10)?;
            if let Some((i, _)) = eig
                .values
                .iter()
                .enumerate()
                .find(|(_, v)| **v <= 0.0)
            {
                return Err(Error::NotPositiveDefinite { index: i });
            }
        }
    }
    let n = a_hat.rows();
    let mut x = a_hat.clone();
    let mut y = Mat::identity(n);
    let mut r = x.matmul(&y)?.identity_minus().symmetrized();

    let engine = AlphaEngine {
        strategy,
        family: LossFamily::NewtonSchulz {
            degree: surrogate.degree,
        },
        interval,
        taylor_alpha: surrogate.taylor_alpha(),
    };
    let mut state = SolveLoop::new(opts, n);
    let termination = loop {
        let k = state.records.len();
        if let Some(term) = state.observe(k, &r) {
            break term;
        }
        let started = Instant::now();
        let coeffs = engine.choose(&r, k)?;
        let g = update_polynomial(&surrogate, coeffs, &r)?;
        x = x.matmul(&g)?;
        y = g.matmul(&y)?;
        r = x.matmul(&y)?.identity_minus().symmetrized();
        state.commit(coeffs.recorded_alpha(), started.elapsed().as_nanos() as u64);
    };
    let root_scale = scale.sqrt();
    Ok(IterationResult {
        primary: x.scale(root_scale),
        secondary: Some(y.scale(1.0 / root_scale)),
        report: state.finish(termination),
    })
}

/// Polar factor of a full-column-rank matrix with rows >= cols; residual
/// R_k = I - X_k^T X_k. The result is scale-invariant, so no rescaling is
/// applied after normalization.
pub fn polar_iterate(
    a: &Mat,
    strategy: &CoefficientStrategy,
    opts: &IterationOptions,
) -> Result<IterationResult> {
    opts.validate()?;
    strategy.validate()?;
    if a.rows() < a.cols() {
        return Err(Error::ShapeMismatch {
            op: "polar_iterate",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.cols(),
            right_cols: a.cols(),
        });
    }
    let (surrogate, interval) = ns_setup(opts)?;
    let (mut x, _) = frob_normalized(a, opts.normalize_input)?;
    let n = x.cols();
    let mut r = x.transpose().matmul(&x)?.identity_minus().symmetrized();

    let engine = AlphaEngine {
        strategy,
        family: LossFamily::NewtonSchulz {
            degree: surrogate.degree,
        },
        interval,
        taylor_alpha: surrogate.taylor_alpha(),
    };
    let mut state = SolveLoop::new(opts, n);
    let termination = loop {
        let k = state.records.len();
        if let Some(term) = state.observe(k, &r) {
            break term;
        }
        let started = Instant::now();
        let coeffs = engine.choose(&r, k)?;
        let g = update_polynomial(&surrogate, coeffs, &r)?;
        x = x.matmul(&g)?;
        r = x.transpose().matmul(&x)?.identity_minus().symmetrized();
        state.commit(coeffs.recorded_alpha(), started.elapsed().as_nanos() as u64);
    };
    Ok(IterationResult {
        primary: x,
        secondary: None,
        report: state.finish(termination),
    })
}

/// Coupled inverse-Newton iteration for A^{-1/p} of an SPD matrix. The
/// initialization constant c = (2 ||A||_F / (p+1))^{1/p} replaces input
/// normalization; the iterate converges to A^{-1/p} directly. The auxiliary
/// M_k = X_k^p A is returned as the secondary output.
pub fn inverse_proot_iterate(
    a: &Mat,
    p: u32,
    strategy: &CoefficientStrategy,
    opts: &IterationOptions,
) -> Result<IterationResult> {
    opts.validate()?;
    strategy.validate()?;
    if p == 0 {
        return Err(Error::Config("inverse p-th root requires p >= 1".into()));
    }
    require_symmetric(a, "inverse_proot_iterate")?;
    let sym = a.symmetrized();
    require_positive_diagonal(&sym)?;
    let norm = sym.frob_norm();
    if norm == 0.0 {
        return Err(Error::DegenerateInput("cannot take roots of a zero matrix"));
    }
    let n = sym.rows();
    let c = (2.0 * norm / (p as f64 + 1.0)).powf(1.0 / p as f64);
    let mut x = Mat::identity(n).scale(1.0 / c);
    let mut m = sym.scale(1.0 / c.powi(p as i32));
    let mut r = m.identity_minus().symmetrized();

    let interval = opts
        .interval
        .unwrap_or_else(|| inverse_newton_default_interval(p));
    let engine = AlphaEngine {
        strategy,
        family: LossFamily::InverseNewton { p },
        interval,
        taylor_alpha: 1.0 / p as f64,
    };
    let mut state = SolveLoop::new(opts, n);
    let termination = loop {
        let k = state.records.len();
        if let Some(term) = state.observe(k, &r) {
            break term;
        }
        let started = Instant::now();
        let coeffs = engine.choose(&r, k)?;
        // X <- X G and M <- G^p M with G = I + alpha R (or an imported triple).
        let g = match coeffs {
            UpdateCoeffs::Surrogate(alpha) => r.scale(alpha).add_scaled_identity(1.0),
            UpdateCoeffs::Triple(ca, cb, cc) => apply_triple(&r, ca, cb, cc)?,
        };
        x = x.matmul(&g)?;
        for _ in 0..p {
            m = g.matmul(&m)?;
        }
        m = m.symmetrized();
        r = m.identity_minus();
        state.commit(coeffs.recorded_alpha(), started.elapsed().as_nanos() as u64);
    };
    Ok(IterationResult {
        primary: x,
        secondary: Some(m),
        report: state.finish(termination),
    })
}

/// Product-form Newton iteration for the square root and inverse square root
/// of an SPD matrix, tracking (M_k, X_k, Y_k) with one SPD inversion per
/// step. With `adaptive` the blending coefficient is fit each iteration from
/// the closed-form quartic loss (unconstrained); otherwise it stays at the
/// classical 1/2.
pub fn db_newton_sqrt(a: &Mat, adaptive: bool, opts: &IterationOptions) -> Result<IterationResult> {
    opts.validate()?;
    require_symmetric(a, "db_newton_sqrt")?;
    let (a_hat, scale) = frob_normalized(&a.symmetrized(), opts.normalize_input)?;
    require_positive_diagonal(&a_hat)?;
    let n = a_hat.rows();
    let mut m = a_hat.clone();
    let mut x = a_hat.clone();
    let mut y = Mat::identity(n);
    let mut r = m.identity_minus();

    let mut state = SolveLoop::new(opts, n);
    let termination = loop {
        let k = state.records.len();
        if let Some(term) = state.observe(k, &r) {
            break term;
        }
        let started = Instant::now();
        let m_inv = cholesky_spd_inverse(&m).map_err(|err| {
            if k == 0 {
                err
            } else {
                Error::NumericalInstability { iteration: k }
            }
        })?;
        let alpha = if adaptive {
            let loss = crate::polyfit::db_loss_coeffs(&m, &m_inv);
            minimize_quartic_on_interval(&loss)
        } else {
            0.5
        };
        let one = 1.0 - alpha;
        m = Mat::identity(n)
            .scale(2.0 * alpha * one)
            .add(&m.scale(one * one))?
            .add(&m_inv.scale(alpha * alpha))?
            .symmetrized();
        x = x.scale(one).add(&x.matmul(&m_inv)?.scale(alpha))?;
        y = y.scale(one).add(&y.matmul(&m_inv)?.scale(alpha))?;
        r = m.identity_minus();
        state.commit(alpha, started.elapsed().as_nanos() as u64);
    };
    let root_scale = scale.sqrt();
    Ok(IterationResult {
        primary: x.scale(root_scale),
        secondary: Some(y.scale(1.0 / root_scale)),
        report: state.finish(termination),
    })
}

/// Accelerated inverse iteration X_{k+1} = X_k (I + R_k + alpha R_k^2) with
/// R_k = I - A X_k and X_0 = A^T after normalization. The classical variant
/// fixes alpha = 1.
pub fn chebyshev_inverse_iterate(
    a: &Mat,
    strategy: &CoefficientStrategy,
    opts: &IterationOptions,
) -> Result<IterationResult> {
    opts.validate()?;
    strategy.validate()?;
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            op: "chebyshev_inverse_iterate",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.rows(),
            right_cols: a.rows(),
        });
    }
    let (a_hat, scale) = frob_normalized(a, opts.normalize_input)?;
    let n = a_hat.rows();
    let mut x = a_hat.transpose();
    let mut r = a_hat.matmul(&x)?.identity_minus().symmetrized();

    let interval = opts.interval.unwrap_or(CHEBYSHEV_INTERVAL);
    let engine = AlphaEngine {
        strategy,
        family: LossFamily::Chebyshev,
        interval,
        taylor_alpha: 1.0,
    };
    let mut state = SolveLoop::new(opts, n);
    let termination = loop {
        let k = state.records.len();
        if let Some(term) = state.observe(k, &r) {
            break term;
        }
        let started = Instant::now();
        let coeffs = engine.choose(&r, k)?;
        let g = match coeffs {
            UpdateCoeffs::Surrogate(alpha) => apply_triple(&r, 1.0, 1.0, alpha)?,
            UpdateCoeffs::Triple(ca, cb, cc) => apply_triple(&r, ca, cb, cc)?,
        };
        x = x.matmul(&g)?;
        r = a_hat.matmul(&x)?.identity_minus().symmetrized();
        state.commit(coeffs.recorded_alpha(), started.elapsed().as_nanos() as u64);
    };
    Ok(IterationResult {
        primary: x.scale(1.0 / scale),
        secondary: None,
        report: state.finish(termination),
    })
}
