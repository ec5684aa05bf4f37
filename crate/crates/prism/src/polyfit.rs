//! Surrogate polynomials, residual-norm losses as polynomials in the free
//! top coefficient, and constrained scalar minimizers.
//!
//! Every Newton-Schulz-family update keeps the Taylor polynomial of its
//! target function except for the top coefficient, which is refit each
//! iteration by minimizing the squared Frobenius norm of the next residual.
//! That loss is a low-degree polynomial in the free coefficient whose
//! coefficients are linear in power traces of the current residual, so the
//! fit reduces to closed-form scalar minimization on an interval.

use crate::error::{Error, Result};
use crate::matcore::Mat;
use crate::sketch::TraceTable;

/// Which residual map the surrogate approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateFamily {
    /// f(x) = (1 - x)^{-1/2}: sign, square-root, and polar updates.
    InvSqrtResidual,
    /// f(x) = (1 - x)^{-1/p}: inverse p-th root updates.
    InvPRootResidual(u32),
    /// f(x) = (1 - x)^{-1}: inverse updates.
    InverseResidual,
}

/// Degree-d update polynomial g(x; alpha) = f_{d-1}(x) + alpha x^d, where
/// f_{d-1} is the order-(d-1) Taylor polynomial of the family's target.
#[derive(Debug, Clone)]
pub struct SurrogatePolynomial {
    pub family: SurrogateFamily,
    pub degree: usize,
    /// Taylor coefficients a_0..a_{d-1}; a_0 is always 1.
    pub base_coeffs: Vec<f64>,
}

fn taylor_coefficients(family: SurrogateFamily, count: usize) -> Result<Vec<f64>> {
    let exponent = match family {
        SurrogateFamily::InvSqrtResidual => 0.5,
        SurrogateFamily::InvPRootResidual(p) => {
            if p == 0 {
                return Err(Error::Config(
                    "inverse p-th root family requires p >= 1".into(),
                ));
            }
            1.0 / p as f64
        }
        SurrogateFamily::InverseResidual => 1.0,
    };
    // (1 - x)^{-s} = sum_j binom(s + j - 1, j) x^j.
    let mut coeffs = Vec::with_capacity(count);
    let mut a = 1.0;
    for j in 0..count {
        if j > 0 {
            a *= (exponent + (j as f64 - 1.0)) / j as f64;
        }
        coeffs.push(a);
    }
    Ok(coeffs)
}

/// Builds the degree-d surrogate for a family: base coefficients hold the
/// order-(d-1) Taylor polynomial, and [`SurrogatePolynomial::taylor_alpha`]
/// recovers the full Taylor update.
pub fn taylor_surrogate(family: SurrogateFamily, degree: usize) -> Result<SurrogatePolynomial> {
    if degree == 0 {
        return Err(Error::Config("surrogate degree must be at least 1".into()));
    }
    let all = taylor_coefficients(family, degree + 1)?;
    Ok(SurrogatePolynomial {
        family,
        degree,
        base_coeffs: all[..degree].to_vec(),
    })
}

impl SurrogatePolynomial {
    /// The d-th Taylor coefficient of the target; substituting it for alpha
    /// recovers the classical update.
    pub fn taylor_alpha(&self) -> f64 {
        taylor_coefficients(self.family, self.degree + 1)
            .expect("family validated at construction")[self.degree]
    }

    pub fn eval_scalar(&self, alpha: f64, x: f64) -> f64 {
        let mut acc = alpha;
        for a in self.base_coeffs.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }
}

/// Evaluates g(R; alpha) by Horner's rule: a_0 I + a_1 R + ... + alpha R^d,
/// at a cost of d matrix products (the top step is a scalar multiply).
pub fn eval_surrogate_matrix(g: &SurrogatePolynomial, alpha: f64, r: &Mat) -> Result<Mat> {
    if !r.is_square() {
        return Err(Error::ShapeMismatch {
            op: "eval_surrogate_matrix",
            left_rows: r.rows(),
            left_cols: r.cols(),
            right_rows: r.cols(),
            right_cols: r.cols(),
        });
    }
    let d = g.degree;
    // Horner from the top: P <- P R + a_j I, starting at P = alpha R.
    let mut acc = r.scale(alpha);
    for j in (1..d).rev() {
        acc = acc.add_scaled_identity(g.base_coeffs[j]);
        acc = acc.matmul(r)?;
    }
    Ok(acc.add_scaled_identity(g.base_coeffs[0]))
}

/// Scalar residual recurrence of the degree-1 accelerated sign update:
/// h(x, alpha) = 1 - (1 - x)(1 + alpha x)^2.
pub fn eval_residual_map(x: f64, alpha: f64) -> f64 {
    1.0 - (1.0 - x) * (1.0 + alpha * x) * (1.0 + alpha * x)
}

/// Feasible range for the fitted coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaInterval {
    pub lower: f64,
    pub upper: f64,
}

impl AlphaInterval {
    pub fn new(lower: f64, upper: f64) -> Result<AlphaInterval> {
        if !(lower <= upper) {
            return Err(Error::Config(format!(
                "interval lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        Ok(AlphaInterval { lower, upper })
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lower).min(self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// Interval certified for the degree-1 Newton-Schulz surrogate.
pub fn ns_default_interval(degree: usize) -> Option<AlphaInterval> {
    match degree {
        1 => Some(AlphaInterval {
            lower: 0.5,
            upper: 1.0,
        }),
        2 => Some(AlphaInterval {
            lower: 3.0 / 8.0,
            upper: 29.0 / 20.0,
        }),
        _ => None,
    }
}

/// Default bracket for the inverse-Newton coefficient: a factor-2 band
/// around the classical value 1/p.
pub fn inverse_newton_default_interval(p: u32) -> AlphaInterval {
    AlphaInterval {
        lower: 1.0 / (2.0 * p as f64),
        upper: 2.0 / p as f64,
    }
}

/// Interval used by the accelerated inverse iteration.
pub const CHEBYSHEV_INTERVAL: AlphaInterval = AlphaInterval {
    lower: 0.5,
    upper: 2.0,
};

/// Residual-norm loss m(alpha) = c_0 + c_1 alpha + ... as a polynomial,
/// together with its feasible interval and the fallback coefficient used
/// when the loss degenerates to a constant.
#[derive(Debug, Clone)]
pub struct QuarticLoss {
    /// c_0..c_k, lowest degree first. Degree 4 for the Newton-Schulz and
    /// product-form Newton losses, 2p for the inverse-Newton loss.
    pub coeffs: Vec<f64>,
    pub interval: AlphaInterval,
    /// Returned (clamped) when all non-constant coefficients vanish.
    pub fallback_alpha: f64,
}

impl QuarticLoss {
    pub fn eval(&self, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * alpha + c;
        }
        acc
    }
}

/// Loss coefficients for the degree-d Newton-Schulz update, shared verbatim
/// by the sign, square-root, and polar iterations; only the residual fed into
/// the trace table differs. Requires traces up to power 4d + 2.
pub fn ns_loss_coeffs(r_traces: &TraceTable, d: usize) -> Result<QuarticLoss> {
    let t = |i: usize| r_traces.power(i);
    let coeffs = match d {
        1 => {
            let (t2, t3, t4, t5, t6) = (t(2)?, t(3)?, t(4)?, t(5)?, t(6)?);
            vec![
                t2,
                4.0 * t3 - 4.0 * t2,
                6.0 * t4 - 10.0 * t3 + 4.0 * t2,
                4.0 * t5 - 8.0 * t4 + 4.0 * t3,
                t6 - 2.0 * t5 + t4,
            ]
        }
        2 => {
            let (t4, t5, t6, t7) = (t(4)?, t(5)?, t(6)?, t(7)?);
            let (t8, t9, t10) = (t(8)?, t(9)?, t(10)?);
            vec![
                9.0 / 16.0 * t4 + 3.0 / 8.0 * t5 + 1.0 / 16.0 * t6,
                0.5 * t7 + 2.0 * t6 + 0.5 * t5 - 3.0 * t4,
                1.5 * t8 + 3.0 * t7 - 4.5 * t6 - 4.0 * t5 + 4.0 * t4,
                2.0 * t9 - 6.0 * t7 + 4.0 * t6,
                t10 - 2.0 * t9 + t8,
            ]
        }
        _ => {
            return Err(Error::Config(format!(
                "no closed-form loss coefficients for Newton-Schulz degree {d}"
            )))
        }
    };
    let interval = ns_default_interval(d).expect("d is 1 or 2 here");
    let fallback = taylor_coefficients(SurrogateFamily::InvSqrtResidual, d + 1)?[d];
    Ok(QuarticLoss {
        coeffs,
        interval,
        fallback_alpha: fallback,
    })
}

/// Degree-2p loss coefficients for the coupled inverse-Newton update, from
/// traces of the residual up to power 2p + 2.
pub fn inverse_newton_loss_coeffs(r_traces: &TraceTable, p: u32) -> Result<QuarticLoss> {
    if p == 0 {
        return Err(Error::Config("inverse Newton requires p >= 1".into()));
    }
    let p_us = p as usize;
    // Next residual = R + sum_i binom(p, i) alpha^i (R^{i+1} - R^i); square it
    // and read traces. Represent the alpha^i coefficient as a sparse
    // polynomial in R: Q_0 = R, Q_i = binom(p,i) (R^{i+1} - R^i).
    let mut binom = vec![1.0f64; p_us + 1];
    for i in 1..=p_us {
        binom[i] = binom[i - 1] * (p_us - i + 1) as f64 / i as f64;
    }
    let term = |i: usize| -> Vec<(usize, f64)> {
        if i == 0 {
            vec![(1, 1.0)]
        } else {
            vec![(i + 1, binom[i]), (i, -binom[i])]
        }
    };
    let mut coeffs = vec![0.0; 2 * p_us + 1];
    for i in 0..=p_us {
        let qi = term(i);
        for j in 0..=p_us {
            let qj = term(j);
            let mut acc = 0.0;
            for &(pow_a, ca) in &qi {
                for &(pow_b, cb) in &qj {
                    acc += ca * cb * r_traces.power(pow_a + pow_b)?;
                }
            }
            coeffs[i + j] += acc;
        }
    }
    Ok(QuarticLoss {
        coeffs,
        interval: inverse_newton_default_interval(p),
        fallback_alpha: 1.0 / p as f64,
    })
}

/// Quartic loss of the adaptive product-form Newton step for square roots,
/// computed from M and M^{-1} alone. The squared traces use the symmetric
/// identity tr(A^2) = sum of squared entries, so no matrix product is formed.
/// The coefficient is left unconstrained (a wide interval stands in for the
/// whole real line).
pub fn db_loss_coeffs(m_mat: &Mat, m_inv: &Mat) -> QuarticLoss {
    // Next residual: I - M' = (1 - 2a)(I - M) - a^2 (M + M^{-1} - 2I), so with
    // P = I - M and Q = M + M^{-1} - 2I the loss expands to
    //   ||P||^2 (1 - 2a)^2 - 2 a^2 (1 - 2a) <P, Q> + a^4 ||Q||^2.
    // Accumulating ||P||^2, <P, Q>, and ||Q||^2 entrywise keeps every
    // coefficient on the scale of the residual; the equivalent expansion in
    // tr(M), tr(M^2), tr(M^{-1}), tr(M^{-2}) cancels O(n) terms and loses all
    // digits once M nears the identity.
    let n = m_mat.rows();
    let mut p_sq = 0.0;
    let mut pq = 0.0;
    let mut q_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let eye = if i == j { 1.0 } else { 0.0 };
            let p = eye - m_mat.get(i, j);
            let q = m_mat.get(i, j) + m_inv.get(i, j) - 2.0 * eye;
            p_sq += p * p;
            pq += p * q;
            q_sq += q * q;
        }
    }
    let coeffs = vec![
        p_sq,
        -4.0 * p_sq,
        4.0 * p_sq - 2.0 * pq,
        4.0 * pq,
        q_sq,
    ];
    QuarticLoss {
        coeffs,
        interval: AlphaInterval {
            lower: -1e6,
            upper: 1e6,
        },
        fallback_alpha: 0.5,
    }
}

/// Quadratic loss of the accelerated inverse iteration, from residual traces
/// of powers 4, 5, 6.
pub fn chebyshev_loss_coeffs(r_traces: &TraceTable) -> Result<QuarticLoss> {
    let (t4, t5, t6) = (
        r_traces.power(4)?,
        r_traces.power(5)?,
        r_traces.power(6)?,
    );
    Ok(QuarticLoss {
        coeffs: vec![t4, 2.0 * t5 - 2.0 * t4, t4 - 2.0 * t5 + t6],
        interval: CHEBYSHEV_INTERVAL,
        fallback_alpha: 1.0,
    })
}

/// Closed-form coefficient for the accelerated inverse iteration, clamped to
/// [1/2, 2]; falls back to the classical value 1 when the quadratic term
/// vanishes.
pub fn chebyshev_alpha(r_traces: &TraceTable) -> Result<f64> {
    chebyshev_alpha_on(r_traces, CHEBYSHEV_INTERVAL)
}

pub fn chebyshev_alpha_on(r_traces: &TraceTable, interval: AlphaInterval) -> Result<f64> {
    let loss = chebyshev_loss_coeffs(r_traces)?;
    let (c1, c2) = (loss.coeffs[1], loss.coeffs[2]);
    let scale = loss.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if c2 <= 1e-14 * scale {
        return Ok(interval.clamp(loss.fallback_alpha));
    }
    Ok(interval.clamp(-c1 / (2.0 * c2)))
}

/// Real roots of a x^3 + b x^2 + c x + d, via the trigonometric branch when
/// three real roots exist and Cardano otherwise. Degenerate leading
/// coefficients fall through to the quadratic and linear cases.
fn real_cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return real_quadratic_roots(b, c, d);
    }
    let (b, c, d) = (b / a, c / a, d / a);
    // Depressed form t^3 + p t + q with x = t - b/3.
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let disc_scale = (4.0 * p.abs().powi(3)).max(27.0 * q * q).max(1e-300);
    let mut roots = Vec::with_capacity(3);
    if disc > 1e-12 * disc_scale {
        // Three distinct real roots.
        let m = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * m * m * m)).clamp(-1.0, 1.0);
        let theta = arg.acos();
        for k in 0..3 {
            roots.push(2.0 * m * ((theta + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos());
        }
    } else if disc < -1e-12 * disc_scale {
        // One real root via Cardano.
        let s = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        roots.push((-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt());
    } else {
        // Repeated roots.
        if p.abs() <= 1e-14 * (1.0 + q.abs()) {
            roots.push(0.0); // triple root of the depressed cubic
        } else {
            roots.push(3.0 * q / p);
            roots.push(-3.0 * q / (2.0 * p));
        }
    }
    roots.iter().map(|t| t + shift).collect()
}

fn real_quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        if b.abs() <= 1e-14 * scale {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Citardauq form for the cancellation-prone root.
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Minimizes a quartic loss on its interval analytically: solve the cubic
/// derivative in closed form, evaluate the loss at the feasible roots and the
/// endpoints, and return the smallest minimizer (ties break toward smaller
/// alpha). A constant loss returns the clamped fallback coefficient.
pub fn minimize_quartic_on_interval(loss: &QuarticLoss) -> f64 {
    debug_assert_eq!(loss.coeffs.len(), 5);
    let (lo, hi) = (loss.interval.lower, loss.interval.upper);
    if lo == hi {
        return lo;
    }
    let c = &loss.coeffs;
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || c[1..].iter().all(|v| v.abs() <= 1e-14 * scale) {
        return loss.interval.clamp(loss.fallback_alpha);
    }
    let mut candidates = vec![lo, hi];
    for root in real_cubic_roots(4.0 * c[4], 3.0 * c[3], 2.0 * c[2], c[1]) {
        if loss.interval.contains(root) {
            candidates.push(root);
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = candidates[0];
    let mut best_val = loss.eval(best);
    for &x in &candidates[1..] {
        let v = loss.eval(x);
        if v < best_val {
            best = x;
            best_val = v;
        }
    }
    best
}

/// Minimizes a polynomial of arbitrary even degree on an interval. Degree 4
/// delegates to the analytic quartic path; other degrees use a 129-point
/// coarse scan of the derivative followed by bisection in each sign-change
/// bracket, then compare candidates with the endpoints.
pub fn minimize_poly_on_interval(coeffs: &[f64], interval: AlphaInterval) -> f64 {
    let (lo, hi) = (interval.lower, interval.upper);
    if lo == hi {
        return lo;
    }
    if coeffs.len() == 5 {
        return minimize_quartic_on_interval(&QuarticLoss {
            coeffs: coeffs.to_vec(),
            interval,
            fallback_alpha: lo,
        });
    }
    let eval = |x: f64| -> f64 {
        let mut acc = 0.0;
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect();
    let eval_d = |x: f64| -> f64 {
        let mut acc = 0.0;
        for c in deriv.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };

    const SCAN: usize = 129;
    let step = (hi - lo) / (SCAN - 1) as f64;
    let grid: Vec<f64> = (0..SCAN).map(|i| lo + step * i as f64).collect();
    let dvals: Vec<f64> = grid.iter().map(|&x| eval_d(x)).collect();
    let d_scale = dvals.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut candidates = vec![lo, hi];
    for w in 0..SCAN - 1 {
        let (mut a, mut b) = (grid[w], grid[w + 1]);
        let (mut fa, fb) = (dvals[w], dvals[w + 1]);
        if fa == 0.0 {
            candidates.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = eval_d(mid);
            if fm.abs() <= 1e-12 * d_scale || (b - a) <= 1e-15 * (hi - lo) {
                break;
            }
            if fa * fm <= 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        candidates.push(0.5 * (a + b));
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = candidates[0];
    let mut best_val = eval(best);
    for &x in &candidates[1..] {
        let v = eval(x);
        if v < best_val {
            best = x;
            best_val = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::jacobi_eigendecomposition;
    use crate::prng::{ScalarStream, STREAM_GENMAT};
    use crate::sketch::{exact_power_traces, gaussian_sketch, sketched_power_traces, TraceMode};

    fn random_symmetric(n: usize, seed: u64) -> Mat {
        let mut s = ScalarStream::new(seed, STREAM_GENMAT);
        Mat::from_fn(n, n, |_, _| s.normal()).symmetrized()
    }

    #[test]
    fn taylor_surrogates_match_known_series() {
        let d1 = taylor_surrogate(SurrogateFamily::InvSqrtResidual, 1).unwrap();
        assert_eq!(d1.base_coeffs, vec![1.0]);
        assert_eq!(d1.taylor_alpha(), 0.5);

        let d2 = taylor_surrogate(SurrogateFamily::InvSqrtResidual, 2).unwrap();
        assert_eq!(d2.base_coeffs, vec![1.0, 0.5]);
        assert_eq!(d2.taylor_alpha(), 0.375);

        let inv = taylor_surrogate(SurrogateFamily::InverseResidual, 2).unwrap();
        assert_eq!(inv.base_coeffs, vec![1.0, 1.0]);
        assert_eq!(inv.taylor_alpha(), 1.0);

        let proot = taylor_surrogate(SurrogateFamily::InvPRootResidual(2), 1).unwrap();
        assert_eq!(proot.base_coeffs, vec![1.0]);
        assert_eq!(proot.taylor_alpha(), 0.5);
    }

    #[test]
    fn taylor_surrogate_rejects_bad_config() {
        assert!(taylor_surrogate(SurrogateFamily::InvSqrtResidual, 0).is_err());
        assert!(taylor_surrogate(SurrogateFamily::InvPRootResidual(0), 1).is_err());
    }

    #[test]
    fn surrogate_matrix_eval_cases() {
        let g = taylor_surrogate(SurrogateFamily::InvSqrtResidual, 2).unwrap();
        let zero = Mat::zeros(4, 4);
        let at_zero = eval_surrogate_matrix(&g, 0.7, &zero).unwrap();
        assert!(at_zero.sub(&Mat::identity(4)).unwrap().frob_norm() <= 1e-15);

        let g1 = taylor_surrogate(SurrogateFamily::InvSqrtResidual, 1).unwrap();
        let r = random_symmetric(5, 3);
        let got = eval_surrogate_matrix(&g1, 1.0, &r).unwrap();
        let want = r.add_scaled_identity(1.0);
        assert!(got.sub(&want).unwrap().frob_norm() <= 1e-14);

        // Scalar substitution: R = 0.1 I, d=2, alpha=3/8.
        let r01 = Mat::identity(4).scale(0.1);
        let got2 = eval_surrogate_matrix(&g, 0.375, &r01).unwrap();
        let want2 = Mat::identity(4).scale(1.05375);
        assert!(got2.sub(&want2).unwrap().frob_norm() <= 1e-14);
    }

    #[test]
    fn residual_map_fixed_points() {
        for alpha in [0.5, 0.75, 1.0] {
            assert_eq!(eval_residual_map(0.0, alpha), 0.0);
            assert_eq!(eval_residual_map(1.0, alpha), 1.0);
        }
        assert!((eval_residual_map(0.5, 1.0) + 0.125).abs() <= 1e-15);
    }

    #[test]
    fn ns_loss_zero_residual_vanishes() {
        let traces = exact_power_traces(&Mat::zeros(6, 6), 6).unwrap();
        let loss = ns_loss_coeffs(&traces, 1).unwrap();
        for c in &loss.coeffs[1..] {
            assert_eq!(*c, 0.0);
        }
    }

    #[test]
    fn ns_loss_scalar_formulas() {
        let r = 0.3;
        let traces = TraceTable::from_eigenvalues(&[r], 6);
        let loss = ns_loss_coeffs(&traces, 1).unwrap();
        let r2 = r * r;
        let r3 = r2 * r;
        let r4 = r3 * r;
        let r5 = r4 * r;
        let r6 = r5 * r;
        assert!((loss.coeffs[1] - (4.0 * r3 - 4.0 * r2)).abs() <= 1e-15);
        assert!((loss.coeffs[2] - (6.0 * r4 - 10.0 * r3 + 4.0 * r2)).abs() <= 1e-15);
        assert!((loss.coeffs[3] - (4.0 * r5 - 8.0 * r4 + 4.0 * r3)).abs() <= 1e-15);
        assert!((loss.coeffs[4] - (r6 - 2.0 * r5 + r4)).abs() <= 1e-15);
    }

    fn direct_ns_loss(r: &Mat, s: Option<&Mat>, d: usize, alpha: f64) -> f64 {
        let g = taylor_surrogate(SurrogateFamily::InvSqrtResidual, d).unwrap();
        let gm = eval_surrogate_matrix(&g, alpha, r).unwrap();
        let g2 = gm.matmul(&gm).unwrap();
        let next = r
            .identity_minus()
            .matmul(&g2)
            .unwrap()
            .identity_minus();
        match s {
            None => next.sum_squares(),
            Some(sk) => sk.matmul(&next).unwrap().sum_squares(),
        }
    }

    #[test]
    fn ns_loss_matches_direct_evaluation_sketched() {
        for d in [1usize, 2] {
            let r = random_symmetric(32, 40 + d as u64).scale(0.2);
            let s = gaussian_sketch(8, 32, 7).unwrap();
            let traces = sketched_power_traces(&r, &s, 4 * d + 2).unwrap();
            let loss = ns_loss_coeffs(&traces, d).unwrap();
            for alpha in [0.5, 0.75, 1.0] {
                let direct = direct_ns_loss(&r, Some(&s.mat), d, alpha);
                let poly = loss.eval(alpha);
                let rel = (direct - poly).abs() / direct.abs().max(1e-300);
                assert!(rel <= 1e-9, "d={d} alpha={alpha}: rel {rel}");
            }
        }
    }

    #[test]
    fn ns_loss_matches_eigenvalue_form() {
        let r = random_symmetric(24, 50).scale(0.25);
        let traces = exact_power_traces(&r, 10).unwrap();
        let eig = jacobi_eigendecomposition(&r, 1e-13).unwrap();
        for d in [1usize, 2] {
            let loss = ns_loss_coeffs(&traces, d).unwrap();
            let g = taylor_surrogate(SurrogateFamily::InvSqrtResidual, d).unwrap();
            for alpha in [0.4, 0.8, 1.2] {
                let eig_form: f64 = eig
                    .values
                    .iter()
                    .map(|&lam| {
                        let gg = g.eval_scalar(alpha, lam);
                        let resid = 1.0 - (1.0 - lam) * gg * gg;
                        resid * resid
                    })
                    .sum();
                let poly = loss.eval(alpha);
                let rel = (eig_form - poly).abs() / eig_form.abs().max(1e-300);
                assert!(rel <= 1e-9, "d={d} alpha={alpha}: rel {rel}");
            }
        }
    }

    #[test]
    fn ns_loss_missing_power_error() {
        let traces = exact_power_traces(&Mat::identity(3), 4).unwrap();
        assert!(matches!(
            ns_loss_coeffs(&traces, 1),
            Err(Error::MissingPower { .. })
        ));
    }

    #[test]
    fn db_loss_identity_vanishes() {
        let loss = db_loss_coeffs(&Mat::identity(5), &Mat::identity(5));
        for c in &loss.coeffs {
            assert!(c.abs() <= 1e-12);
        }
    }

    #[test]
    fn db_loss_scalar_substitution() {
        let m = Mat::diag(&[2.0]);
        let minv = Mat::diag(&[0.5]);
        let loss = db_loss_coeffs(&m, &minv);
        assert!((loss.coeffs[1] + 4.0).abs() <= 1e-12);
        assert!((loss.coeffs[2] - 5.0).abs() <= 1e-12);
        assert!((loss.coeffs[3] + 2.0).abs() <= 1e-12);
        assert!((loss.coeffs[4] - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn db_loss_matches_direct_evaluation() {
        let g = {
            let mut s = ScalarStream::new(61, STREAM_GENMAT);
            Mat::from_fn(48, 48, |_, _| s.normal())
        };
        let m = g
            .transpose()
            .matmul(&g)
            .unwrap()
            .scale(0.02)
            .add(&Mat::identity(48))
            .unwrap();
        let minv = crate::matcore::cholesky_spd_inverse(&m).unwrap();
        let loss = db_loss_coeffs(&m, &minv);
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let mnext = Mat::identity(48)
                .scale(2.0 * alpha * (1.0 - alpha))
                .add(&m.scale((1.0 - alpha) * (1.0 - alpha)))
                .unwrap()
                .add(&minv.scale(alpha * alpha))
                .unwrap();
            let direct = mnext.identity_minus().sum_squares();
            let poly = loss.eval(alpha);
            let rel = (direct - poly).abs() / direct.abs().max(1e-300);
            assert!(rel <= 1e-9, "alpha {alpha}: rel {rel}");
        }
    }

    #[test]
    fn chebyshev_alpha_scalar_and_fallback() {
        let traces = TraceTable::from_eigenvalues(&[0.5], 6);
        let alpha = chebyshev_alpha(&traces).unwrap();
        assert!((alpha - 2.0).abs() <= 1e-9, "alpha {alpha}");

        let zero = exact_power_traces(&Mat::zeros(4, 4), 6).unwrap();
        assert_eq!(chebyshev_alpha(&zero).unwrap(), 1.0);
    }

    #[test]
    fn chebyshev_alpha_matches_grid_search() {
        let r = random_symmetric(32, 71).scale(0.2);
        let s = gaussian_sketch(8, 32, 72).unwrap();
        let traces = sketched_power_traces(&r, &s, 6).unwrap();
        let loss = chebyshev_loss_coeffs(&traces).unwrap();
        let alpha = chebyshev_alpha(&traces).unwrap();
        let grid = 4097;
        let step = (2.0 - 0.5) / (grid - 1) as f64;
        let best = (0..grid)
            .map(|i| 0.5 + step * i as f64)
            .min_by(|a, b| loss.eval(*a).partial_cmp(&loss.eval(*b)).unwrap())
            .unwrap();
        assert!((alpha - best).abs() <= step, "alpha {alpha} grid {best}");
    }

    #[test]
    fn inverse_newton_loss_matches_ns_for_p2() {
        // The p = 2 loss has the same trace formulas as the degree-1
        // Newton-Schulz loss.
        let r = random_symmetric(16, 80).scale(0.3);
        let traces = exact_power_traces(&r, 6).unwrap();
        let ns = ns_loss_coeffs(&traces, 1).unwrap();
        let inv = inverse_newton_loss_coeffs(&traces, 2).unwrap();
        for i in 1..=4 {
            assert!(
                (ns.coeffs[i] - inv.coeffs[i]).abs() <= 1e-12 * ns.coeffs[i].abs().max(1.0),
                "coefficient {i}"
            );
        }
    }

    #[test]
    fn inverse_newton_loss_matches_direct_evaluation() {
        for p in [1u32, 2, 3] {
            let r = random_symmetric(20, 90 + p as u64).scale(0.2);
            let traces = exact_power_traces(&r, 2 * p as usize + 2).unwrap();
            let loss = inverse_newton_loss_coeffs(&traces, p).unwrap();
            let mut binom = vec![1.0f64; p as usize + 1];
            for i in 1..=p as usize {
                binom[i] = binom[i - 1] * (p as usize - i + 1) as f64 / i as f64;
            }
            for alpha in [0.2f64, 0.5, 0.9] {
                // Direct: || R + sum_i binom(p,i) alpha^i (R^{i+1} - R^i) ||_F^2
                let mut next = r.clone();
                let mut rpow = r.clone();
                for i in 1..=p as usize {
                    let rnext = rpow.matmul(&r).unwrap();
                    let diff = rnext.sub(&rpow).unwrap();
                    next = next
                        .add(&diff.scale(binom[i] * alpha.powi(i as i32)))
                        .unwrap();
                    rpow = rnext;
                }
                let direct = next.sum_squares();
                let poly = loss.eval(alpha);
                let rel = (direct - poly).abs() / direct.abs().max(1e-300);
                assert!(rel <= 1e-9, "p={p} alpha={alpha}: rel {rel}");
            }
        }
    }

    #[test]
    fn quartic_minimizer_analytic_cases() {
        // (alpha - 0.7)^2 on [0.5, 1] has its minimum inside.
        let loss = QuarticLoss {
            coeffs: vec![0.49, -1.4, 1.0, 0.0, 0.0],
            interval: AlphaInterval::new(0.5, 1.0).unwrap(),
            fallback_alpha: 0.5,
        };
        assert!((minimize_quartic_on_interval(&loss) - 0.7).abs() <= 1e-12);

        // (alpha - 2)^2 on [0.5, 1] clamps to the boundary.
        let clamped = QuarticLoss {
            coeffs: vec![4.0, -4.0, 1.0, 0.0, 0.0],
            interval: AlphaInterval::new(0.5, 1.0).unwrap(),
            fallback_alpha: 0.5,
        };
        assert_eq!(minimize_quartic_on_interval(&clamped), 1.0);

        // Constant loss returns the clamped fallback.
        let constant = QuarticLoss {
            coeffs: vec![3.0, 0.0, 0.0, 0.0, 0.0],
            interval: AlphaInterval::new(0.5, 1.0).unwrap(),
            fallback_alpha: 0.375,
        };
        assert_eq!(minimize_quartic_on_interval(&constant), 0.5);
    }

    #[test]
    fn quartic_minimizer_matches_grid_search() {
        let mut stream = ScalarStream::new(1234, STREAM_GENMAT);
        let interval = AlphaInterval::new(0.5, 1.0).unwrap();
        let grid_n = 4097;
        let step = (interval.upper - interval.lower) / (grid_n - 1) as f64;
        for _case in 0..200 {
            let coeffs = vec![
                stream.normal(),
                stream.normal(),
                stream.normal(),
                stream.normal(),
                stream.normal().abs() + 0.1,
            ];
            let loss = QuarticLoss {
                coeffs,
                interval,
                fallback_alpha: 0.5,
            };
            let analytic = minimize_quartic_on_interval(&loss);
            assert!(interval.contains(analytic));
            let grid_best = (0..grid_n)
                .map(|i| interval.lower + step * i as f64)
                .min_by(|a, b| loss.eval(*a).partial_cmp(&loss.eval(*b)).unwrap())
                .unwrap();
            assert!(
                (analytic - grid_best).abs() <= step,
                "analytic {analytic} vs grid {grid_best}"
            );
            let m_scale = loss.eval(grid_best).abs().max(1.0);
            assert!(loss.eval(analytic) <= loss.eval(grid_best) + 1e-12 * m_scale);
            assert!(loss.eval(analytic) <= loss.eval(interval.lower));
            assert!(loss.eval(analytic) <= loss.eval(interval.upper));
        }
    }

    #[test]
    fn poly_minimizer_cases() {
        let interval = AlphaInterval::new(0.0, 2.0).unwrap();
        let got = minimize_poly_on_interval(&[1.0, -2.0, 1.0], interval);
        assert!((got - 1.0).abs() <= 1e-9);

        let degenerate = AlphaInterval::new(0.75, 0.75).unwrap();
        assert_eq!(
            minimize_poly_on_interval(&[5.0, 1.0, 3.0], degenerate),
            0.75
        );
    }

    #[test]
    fn poly_minimizer_matches_grid_on_degree_eight() {
        let mut stream = ScalarStream::new(555, STREAM_GENMAT);
        let interval = AlphaInterval::new(0.25, 1.0).unwrap();
        let grid_n = 65537;
        let step = (interval.upper - interval.lower) / (grid_n - 1) as f64;
        for _case in 0..50 {
            let mut coeffs: Vec<f64> = (0..9).map(|_| stream.normal()).collect();
            coeffs[8] = coeffs[8].abs() + 0.1;
            let got = minimize_poly_on_interval(&coeffs, interval);
            let eval = |x: f64| {
                let mut acc = 0.0;
                for c in coeffs.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            };
            let grid_best = (0..grid_n)
                .map(|i| interval.lower + step * i as f64)
                .min_by(|a, b| eval(*a).partial_cmp(&eval(*b)).unwrap())
                .unwrap();
            assert!(
                (got - grid_best).abs() <= step,
                "got {got} vs grid {grid_best}"
            );
        }
    }

    #[test]
    fn residual_map_envelope_on_large_arguments() {
        // h(x, alpha) stays in [-1/5, x^2] for x in [1/2, 1], alpha in [1/2, 1].
        let n = 1001;
        for i in 0..n {
            let x = 0.5 + 0.5 * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let alpha = 0.5 + 0.5 * j as f64 / (n - 1) as f64;
                let h = eval_residual_map(x, alpha);
                assert!(h >= -0.2 - 1e-12, "x={x} alpha={alpha} h={h}");
                assert!(h <= x * x + 1e-12, "x={x} alpha={alpha} h={h}");
            }
        }
    }

    #[test]
    fn residual_map_envelope_on_small_arguments() {
        // h(x, alpha) stays in [-1/5, 1/4] for x in [-1/5, 1/2], alpha in [1/2, 1].
        let n = 1001;
        for i in 0..n {
            let x = -0.2 + 0.7 * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let alpha = 0.5 + 0.5 * j as f64 / (n - 1) as f64;
                let h = eval_residual_map(x, alpha);
                assert!(h >= -0.2 - 1e-12, "x={x} alpha={alpha} h={h}");
                assert!(h <= 0.25 + 1e-12, "x={x} alpha={alpha} h={h}");
            }
        }
    }

    #[test]
    fn fitted_contraction_factor_on_small_spectra() {
        // With the fitted coefficient, the residual map contracts small
        // spectra at least as fast as 1.71 x^2.
        let mut stream = ScalarStream::new(777, STREAM_GENMAT);
        for _case in 0..1000 {
            let n = 1 + (stream.uniform_open() * 32.0) as usize;
            let xs: Vec<f64> = (0..n)
                .map(|_| 0.5 * (stream.uniform_open() - 0.5))
                .collect();
            let max_x2 = xs.iter().fold(0.0f64, |m, x| m.max(x * x));
            if max_x2 == 0.0 {
                continue;
            }
            let traces = TraceTable::from_eigenvalues(&xs, 6);
            let loss = ns_loss_coeffs(&traces, 1).unwrap();
            let alpha = minimize_quartic_on_interval(&loss);
            let worst = xs
                .iter()
                .map(|&x| eval_residual_map(x, alpha).abs())
                .fold(0.0f64, f64::max);
            assert!(
                worst <= 1.71 * max_x2,
                "worst {worst} vs bound {}",
                1.71 * max_x2
            );
        }
    }

    #[test]
    fn trace_table_modes_survive_loss_path() {
        let r = random_symmetric(12, 99).scale(0.3);
        let exact = exact_power_traces(&r, 6).unwrap();
        assert_eq!(exact.mode, TraceMode::Exact);
        // Even powers of a symmetric matrix have non-negative trace.
        assert!(exact.power(2).unwrap() >= 0.0);
        assert!(exact.power(4).unwrap() >= 0.0);
        assert!(exact.power(6).unwrap() >= 0.0);
    }
}
