//! Gaussian oblivious subspace embeddings and the power-trace tables that
//! feed the loss-coefficient formulas.
//!
//! The sketched path computes t_i = tr(S R^i S^T) by repeatedly applying R to
//! the n x p block S^T, so its cost is O(n^2 p) per power and it never forms
//! an n x n product.

use crate::error::{Error, Result};
use crate::matcore::Mat;
use crate::prng::{ScalarStream, STREAM_SKETCH};

/// A p x n Gaussian sketch, regenerable bit-exactly from `(p, n, seed)`.
#[derive(Debug, Clone)]
pub struct SketchMatrix {
    pub mat: Mat,
    pub rows: usize,
    pub seed: u64,
}

/// Draws a p x n sketch with i.i.d. N(0, 1/p) entries from the versioned
/// counter-based stream.
pub fn gaussian_sketch(p: usize, n: usize, seed: u64) -> Result<SketchMatrix> {
    gaussian_sketch_with_mean(p, n, seed, 0.0)
}

/// Diagnostic variant with a shiftable entry mean. Mean zero is the embedding
/// used everywhere in the library; a non-zero mean destroys the norm
/// preservation and exists only so tests can demonstrate that.
#[doc(hidden)]
pub fn gaussian_sketch_with_mean(p: usize, n: usize, seed: u64, mean: f64) -> Result<SketchMatrix> {
    if p == 0 || p > n {
        return Err(Error::Config(format!(
            "sketch rows must satisfy 1 <= p <= n, got p={p}, n={n}"
        )));
    }
    let scale = 1.0 / (p as f64).sqrt();
    let mut stream = ScalarStream::new(seed, STREAM_SKETCH);
    let mat = Mat::from_fn(p, n, |_, _| mean + scale * stream.normal());
    Ok(SketchMatrix { mat, rows: p, seed })
}

/// Whether a trace table holds exact traces tr(R^i) or sketched estimates
/// tr(S R^i S^T).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Sketched,
    Exact,
}

/// Table of power traces t_1..t_max, 1-indexed through [`TraceTable::power`].
#[derive(Debug, Clone)]
pub struct TraceTable {
    values: Vec<f64>,
    pub mode: TraceMode,
}

impl TraceTable {
    pub fn new(values: Vec<f64>, mode: TraceMode) -> TraceTable {
        TraceTable { values, mode }
    }

    pub fn max_power(&self) -> usize {
        self.values.len()
    }

    /// t_i for 1 <= i <= max_power.
    pub fn power(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.values.len() {
            return Err(Error::MissingPower {
                needed: i,
                available: self.values.len(),
            });
        }
        Ok(self.values[i - 1])
    }

    /// Exact table built from a list of eigenvalues: t_i = sum(lambda^i).
    pub fn from_eigenvalues(eigenvalues: &[f64], max_power: usize) -> TraceTable {
        let mut values = Vec::with_capacity(max_power);
        let mut powers: Vec<f64> = vec![1.0; eigenvalues.len()];
        for _ in 0..max_power {
            for (pw, lam) in powers.iter_mut().zip(eigenvalues) {
                *pw *= lam;
            }
            values.push(powers.iter().sum());
        }
        TraceTable::new(values, TraceMode::Exact)
    }
}

/// Sketched power traces t_i = tr(S R^i S^T) for i = 1..max_power, computed
/// as V_0 = S^T, V_i = R V_{i-1}, t_i = <S^T, V_i>. Exactly `max_power`
/// products of an n x n by an n x p matrix.
pub fn sketched_power_traces(r: &Mat, s: &SketchMatrix, max_power: usize) -> Result<TraceTable> {
    if !r.is_square() {
        return Err(Error::ShapeMismatch {
            op: "sketched_power_traces",
            left_rows: r.rows(),
            left_cols: r.cols(),
            right_rows: r.cols(),
            right_cols: r.cols(),
        });
    }
    if s.mat.cols() != r.rows() {
        return Err(Error::ShapeMismatch {
            op: "sketched_power_traces",
            left_rows: r.rows(),
            left_cols: r.cols(),
            right_rows: s.mat.rows(),
            right_cols: s.mat.cols(),
        });
    }
    assert!(max_power >= 1, "max_power must be at least 1");
    let st = s.mat.transpose();
    let mut block = st.clone();
    let mut values = Vec::with_capacity(max_power);
    for _ in 0..max_power {
        block = r.matmul(&block)?;
        let t: f64 = st
            .data()
            .iter()
            .zip(block.data())
            .map(|(a, b)| a * b)
            .sum();
        values.push(t);
    }
    Ok(TraceTable::new(values, TraceMode::Sketched))
}

/// Exact power traces t_i = tr(R^i) by repeated multiplication. Intended for
/// tests and small problems.
pub fn exact_power_traces(r: &Mat, max_power: usize) -> Result<TraceTable> {
    if !r.is_square() {
        return Err(Error::ShapeMismatch {
            op: "exact_power_traces",
            left_rows: r.rows(),
            left_cols: r.cols(),
            right_rows: r.cols(),
            right_cols: r.cols(),
        });
    }
    assert!(max_power >= 1, "max_power must be at least 1");
    let mut values = Vec::with_capacity(max_power);
    let mut power = r.clone();
    values.push(power.trace());
    for _ in 1..max_power {
        power = power.matmul(r)?;
        values.push(power.trace());
    }
    Ok(TraceTable::new(values, TraceMode::Exact))
}

/// Sketch sizes: the distortion-bound row count and the small practical
/// default that suffices empirically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchRows {
    /// ceil(48 (ln n + ln(1/delta) + ln k + 27.6)).
    pub distortion_bound: usize,
    /// Small fixed row count that works in practice (8; even 5 suffices).
    pub practical: usize,
}

/// Row-count recommendation for a sketch used across `k_max` iterations on an
/// n-dimensional problem with failure probability `delta`.
pub fn recommended_sketch_rows(n: usize, k_max: usize, delta: f64) -> SketchRows {
    assert!(n >= 1 && k_max >= 1, "n and k_max must be positive");
    assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    let bound =
        48.0 * ((n as f64).ln() + (1.0 / delta).ln() + (k_max as f64).ln() + 27.6);
    SketchRows {
        distortion_bound: bound.ceil() as usize,
        practical: 8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::gemm_probe;
    use crate::prng::{ScalarStream, STREAM_GENMAT};

    fn random_symmetric(n: usize, seed: u64) -> Mat {
        let mut s = ScalarStream::new(seed, STREAM_GENMAT);
        Mat::from_fn(n, n, |_, _| s.normal()).symmetrized()
    }

    #[test]
    fn sketch_is_deterministic_per_seed() {
        let a = gaussian_sketch(5, 100, 42).unwrap();
        let b = gaussian_sketch(5, 100, 42).unwrap();
        assert_eq!(a.mat, b.mat);
        let c = gaussian_sketch(5, 100, 43).unwrap();
        assert_ne!(a.mat, c.mat);
    }

    #[test]
    fn sketch_rejects_bad_row_count() {
        assert!(gaussian_sketch(0, 4, 1).is_err());
        assert!(gaussian_sketch(5, 4, 1).is_err());
    }

    #[test]
    fn sketch_entry_mean_within_clt_band() {
        let s = gaussian_sketch(64, 4096, 7).unwrap();
        let mean: f64 = s.mat.data().iter().sum::<f64>() / (64.0 * 4096.0);
        // Entries are N(0, 1/64); the mean of 262144 of them has sigma
        // sqrt(1/64 / 262144) ~ 2.4e-4. The 0.002 band is a wide >3-sigma test.
        assert!(mean.abs() <= 0.002, "mean {mean}");
    }

    #[test]
    fn sketch_preserves_vector_norm_on_average() {
        let n = 256;
        let p = 64;
        let mut stream = ScalarStream::new(11, STREAM_GENMAT);
        let mut x: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in x.iter_mut() {
            *v /= norm;
        }
        let mut acc = 0.0;
        for seed in 0..200 {
            let s = gaussian_sketch(p, n, seed).unwrap();
            let sx = s.mat.matvec(&x);
            acc += sx.iter().map(|v| v * v).sum::<f64>();
        }
        let avg = acc / 200.0;
        assert!((0.95..=1.05).contains(&avg), "avg {avg}");
    }

    #[test]
    fn mean_one_sketch_breaks_norm_preservation() {
        // The centered ensemble is what makes the embedding work; shifting
        // the mean to 1 inflates sketched norms far beyond the JL band.
        let n = 256;
        let p = 8;
        let x = vec![1.0 / (n as f64).sqrt(); n];
        let mut acc = 0.0;
        for seed in 0..50 {
            let s = gaussian_sketch_with_mean(p, n, seed, 1.0).unwrap();
            let sx = s.mat.matvec(&x);
            acc += sx.iter().map(|v| v * v).sum::<f64>();
        }
        let avg = acc / 50.0;
        assert!(avg > 10.0, "mean-1 ensemble should distort norms, avg {avg}");
    }

    #[test]
    fn sketched_traces_on_identity_and_zero() {
        let s = gaussian_sketch(4, 16, 3).unwrap();
        let table = sketched_power_traces(&Mat::identity(16), &s, 5).unwrap();
        let sst = s
            .mat
            .data()
            .iter()
            .map(|v| v * v)
            .sum::<f64>();
        for i in 1..=5 {
            assert!((table.power(i).unwrap() - sst).abs() <= 1e-12 * sst);
        }

        let z = Mat::zeros(16, 16);
        let table0 = sketched_power_traces(&z, &s, 4).unwrap();
        for i in 1..=4 {
            assert_eq!(table0.power(i).unwrap(), 0.0);
        }
    }

    #[test]
    fn sketched_traces_match_dense_powering() {
        let r = random_symmetric(32, 5);
        let s = gaussian_sketch(8, 32, 9).unwrap();
        let table = sketched_power_traces(&r, &s, 10).unwrap();
        let mut power = Mat::identity(32);
        for i in 1..=10 {
            power = power.matmul(&r).unwrap();
            let dense = s
                .mat
                .matmul(&power)
                .unwrap()
                .matmul(&s.mat.transpose())
                .unwrap()
                .trace();
            let got = table.power(i).unwrap();
            let rel = (got - dense).abs() / dense.abs().max(1e-300);
            assert!(rel <= 1e-10, "power {i}: rel {rel}");
        }
    }

    #[test]
    fn sketched_traces_use_no_square_products() {
        let r = random_symmetric(64, 15);
        let s = gaussian_sketch(8, 64, 16).unwrap();
        gemm_probe::reset();
        let _ = sketched_power_traces(&r, &s, 10).unwrap();
        assert_eq!(gemm_probe::square_products(), 0);
    }

    #[test]
    fn exact_traces_small_cases() {
        let table = exact_power_traces(&Mat::diag(&[0.5, 0.25]), 3).unwrap();
        assert!((table.power(2).unwrap() - 0.3125).abs() <= 1e-15);
        let seven = exact_power_traces(&Mat::identity(7), 5).unwrap();
        for i in 1..=5 {
            assert_eq!(seven.power(i).unwrap(), 7.0);
        }
        assert_eq!(seven.mode, TraceMode::Exact);
    }

    #[test]
    fn exact_traces_match_eigenvalue_oracle() {
        let r = random_symmetric(24, 6);
        let table = exact_power_traces(&r, 6).unwrap();
        let eig = crate::matcore::jacobi_eigendecomposition(&r, 1e-13).unwrap();
        let oracle = TraceTable::from_eigenvalues(&eig.values, 6);
        for i in 1..=6 {
            let got = table.power(i).unwrap();
            let want = oracle.power(i).unwrap();
            let rel = (got - want).abs() / want.abs().max(1e-12);
            assert!(rel <= 1e-9, "power {i}: {got} vs {want}");
        }
    }

    #[test]
    fn missing_power_is_reported() {
        let table = exact_power_traces(&Mat::identity(3), 2).unwrap();
        assert!(matches!(
            table.power(3),
            Err(crate::error::Error::MissingPower {
                needed: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn sketched_traces_are_unbiased_for_exact() {
        // Spectrum kept in a narrow positive band so the relative error of
        // the 100-seed average stays well inside 5% for powers up to 6.
        let n = 32;
        let values: Vec<f64> = (0..n).map(|i| 0.95 - 0.35 * i as f64 / (n - 1) as f64).collect();
        let q_src = {
            let mut s = ScalarStream::new(33, STREAM_GENMAT);
            Mat::from_fn(n, n, |_, _| s.normal())
        };
        let (q, _) = crate::matcore::householder_qr(&q_src).unwrap();
        let r = q
            .matmul(&Mat::diag(&values))
            .unwrap()
            .matmul(&q.transpose())
            .unwrap()
            .symmetrized();
        let exact = exact_power_traces(&r, 6).unwrap();
        let seeds = 100;
        let mut sums = vec![0.0; 6];
        for seed in 0..seeds {
            let s = gaussian_sketch(8, n, 1000 + seed).unwrap();
            let t = sketched_power_traces(&r, &s, 6).unwrap();
            for i in 1..=6 {
                sums[i - 1] += t.power(i).unwrap();
            }
        }
        for i in 1..=6 {
            let avg = sums[i - 1] / seeds as f64;
            let want = exact.power(i).unwrap();
            let rel = (avg - want).abs() / want.abs();
            assert!(rel <= 0.05, "power {i}: avg {avg} vs exact {want} (rel {rel})");
        }
    }

    #[test]
    fn sketched_loss_stays_within_constant_factor_of_exact() {
        // For a fixed 64x64 symmetric residual and p = 8, the sketched loss
        // polynomial should sandwich the exact one within a constant factor
        // across the fitting interval for nearly every seed.
        use crate::polyfit::ns_loss_coeffs;
        let r = {
            let mut s = ScalarStream::new(211, STREAM_GENMAT);
            let g = Mat::from_fn(64, 64, |_, _| s.normal()).symmetrized();
            let top = crate::matcore::spectral_norm_estimate(&g, 300, 4);
            g.scale(0.45 / top)
        };
        let exact_loss = ns_loss_coeffs(&exact_power_traces(&r, 6).unwrap(), 1).unwrap();
        let alphas: Vec<f64> = (0..9).map(|i| 0.5 + 0.0625 * i as f64).collect();
        let mut good = 0;
        for seed in 0..100 {
            let s = gaussian_sketch(8, 64, 40_000 + seed).unwrap();
            let loss = ns_loss_coeffs(&sketched_power_traces(&r, &s, 6).unwrap(), 1).unwrap();
            let sandwiched = alphas.iter().all(|&a| {
                let ratio = loss.eval(a) / exact_loss.eval(a);
                (0.3..=3.0).contains(&ratio)
            });
            if sandwiched {
                good += 1;
            }
        }
        assert!(good >= 95, "loss sandwiched in only {good}/100 seeds");
    }

    #[test]
    fn recommended_rows_matches_plugin_arithmetic() {
        let rows = recommended_sketch_rows(4096, 20, 0.01);
        // 48 (ln 4096 + ln 100 + ln 20 + 27.6) = 2088.9
        assert_eq!(rows.distortion_bound, 2089);
        assert_eq!(rows.practical, 8);

        let loose = recommended_sketch_rows(2, 1, 0.5);
        assert!(loose.distortion_bound > 1324);
    }
}
