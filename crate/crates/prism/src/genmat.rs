//! Seeded random test-matrix ensembles: Gaussian, Wishart, prescribed
//! spectra, and a heavy-tailed variance-mixture model. All generators are
//! bit-reproducible from their seed.

use crate::error::{Error, Result};
use crate::matcore::{householder_qr, Mat};
use crate::prng::{ScalarStream, STREAM_GENMAT, STREAM_HEAVY_TAIL};

/// Ensemble selector for generated inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixEnsemble {
    GaussianIid,
    /// Symmetric PSD G^T G built from a rows x cols Gaussian G; the output is
    /// cols x cols.
    Wishart,
    /// Exact singular values, descending and non-negative.
    Prescribed(Vec<f64>),
    /// Heavy-tailed spectrum with tail weight growing as kappa shrinks.
    HeavyTail(f64),
}

/// A fully-specified generated input.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub kind: MatrixEnsemble,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl SpectrumSpec {
    pub fn generate(&self) -> Result<Mat> {
        match &self.kind {
            MatrixEnsemble::GaussianIid => Ok(gaussian_matrix(self.rows, self.cols, self.seed)),
            MatrixEnsemble::Wishart => wishart_spd(self.rows, self.cols, self.seed),
            MatrixEnsemble::Prescribed(values) => {
                prescribed_spectrum_matrix(values, self.rows, self.cols, self.seed)
            }
            MatrixEnsemble::HeavyTail(kappa) => {
                htmp_like_matrix(self.rows, self.cols, *kappa, self.seed)
            }
        }
    }
}

/// Standard normal entries from the versioned stream.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Mat {
    let mut stream = ScalarStream::new(seed, STREAM_GENMAT);
    Mat::from_fn(rows, cols, |_, _| stream.normal())
}

/// G^T G for an n x m Gaussian G (n >= m). Symmetric PSD by construction;
/// symmetrized to kill roundoff.
pub fn wishart_spd(n: usize, m: usize, seed: u64) -> Result<Mat> {
    if m == 0 || n < m {
        return Err(Error::Config(format!(
            "wishart requires n >= m >= 1, got n={n}, m={m}"
        )));
    }
    let g = gaussian_matrix(n, m, seed);
    Ok(g.transpose().matmul(&g)?.symmetrized())
}

fn validate_prescribed(values: &[f64], rows: usize, cols: usize) -> Result<()> {
    let k = rows.min(cols);
    if values.len() != k {
        return Err(Error::Config(format!(
            "prescribed spectrum needs {k} values for a {rows}x{cols} matrix, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Config(
            "prescribed singular values must be finite and non-negative".into(),
        ));
    }
    if values.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Config(
            "prescribed singular values must be descending".into(),
        ));
    }
    Ok(())
}

/// U diag(values) V^T with U and V drawn as Q-factors of independent seeded
/// Gaussian matrices.
pub fn prescribed_spectrum_matrix(
    values: &[f64],
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<Mat> {
    validate_prescribed(values, rows, cols)?;
    let k = rows.min(cols);
    let (u, _) = householder_qr(&gaussian_matrix(rows, k, seed))?;
    let (v, _) = householder_qr(&gaussian_matrix(cols, k, seed.wrapping_add(0x9E37)))?;
    let scaled = Mat::from_fn(rows, k, |i, j| u.get(i, j) * values[j]);
    scaled.matmul(&v.transpose())
}

/// Symmetric positive semi-definite Q diag(values) Q^T with prescribed
/// eigenvalues; the symmetric counterpart of [`prescribed_spectrum_matrix`].
pub fn prescribed_spd_matrix(values: &[f64], n: usize, seed: u64) -> Result<Mat> {
    validate_prescribed(values, n, n)?;
    let (q, _) = householder_qr(&gaussian_matrix(n, n, seed))?;
    let scaled = Mat::from_fn(n, n, |i, j| q.get(i, j) * values[j]);
    Ok(scaled.matmul(&q.transpose())?.symmetrized())
}

const MP_TABLE_POINTS: usize = 10_000;

/// Draws `count` samples from the Marchenko-Pastur eigenvalue density with
/// aspect ratio `gamma` in (0, 1], via inverse-CDF interpolation on a
/// tabulated grid.
pub fn marchenko_pastur_samples(count: usize, gamma: f64, seed: u64) -> Vec<f64> {
    assert!(gamma > 0.0 && gamma <= 1.0, "aspect ratio must be in (0, 1]");
    let lo = (1.0 - gamma.sqrt()).powi(2);
    let hi = (1.0 + gamma.sqrt()).powi(2);
    let step = (hi - lo) / (MP_TABLE_POINTS - 1) as f64;
    let density = |lam: f64| -> f64 {
        let inner = (hi - lam) * (lam - lo);
        if inner <= 0.0 || lam <= 0.0 {
            0.0
        } else {
            inner.sqrt() / (2.0 * std::f64::consts::PI * gamma * lam)
        }
    };
    // Trapezoid CDF over the table.
    let mut cdf = Vec::with_capacity(MP_TABLE_POINTS);
    let mut acc = 0.0;
    let mut prev = density(lo);
    cdf.push(0.0);
    for i in 1..MP_TABLE_POINTS {
        let lam = lo + step * i as f64;
        let cur = density(lam);
        acc += 0.5 * (prev + cur) * step;
        cdf.push(acc);
        prev = cur;
    }
    let total = *cdf.last().unwrap();
    for c in cdf.iter_mut() {
        *c /= total;
    }

    let mut stream = ScalarStream::new(seed, STREAM_HEAVY_TAIL);
    (0..count)
        .map(|_| {
            let u = stream.uniform_open();
            let idx = cdf.partition_point(|c| *c < u);
            if idx == 0 {
                lo
            } else if idx >= MP_TABLE_POINTS {
                hi
            } else {
                let (c0, c1) = (cdf[idx - 1], cdf[idx]);
                let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
                lo + step * ((idx - 1) as f64 + frac)
            }
        })
        .collect()
}

/// Singular values for the heavy-tailed ensemble: bulk eigenvalues from the
/// Marchenko-Pastur density, multiplied by inverse-gamma weights with mean 1
/// whose tail grows heavier as kappa shrinks. Sorted descending and
/// normalized so the largest value is 1.
pub fn htmp_singular_values(count: usize, gamma: f64, kappa: f64, seed: u64) -> Vec<f64> {
    assert!(kappa > 0.0, "kappa must be positive");
    let bulk = marchenko_pastur_samples(count, gamma, seed);
    let mut stream = ScalarStream::new(seed.wrapping_add(0x7A11), STREAM_HEAVY_TAIL);
    let mut values: Vec<f64> = bulk
        .iter()
        .map(|lam| {
            // Inverse-gamma(shape kappa + 1, scale kappa) has mean 1.
            let weight = kappa / stream.gamma(kappa + 1.0);
            (lam * weight).sqrt()
        })
        .collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let max = values[0];
    if max > 0.0 {
        for v in values.iter_mut() {
            *v /= max;
        }
    }
    values
}

/// Heavy-tailed rows x cols matrix: prescribed-spectrum construction over
/// [`htmp_singular_values`].
pub fn htmp_like_matrix(rows: usize, cols: usize, kappa: f64, seed: u64) -> Result<Mat> {
    if kappa <= 0.0 {
        return Err(Error::Config("kappa must be positive".into()));
    }
    let k = rows.min(cols);
    let gamma = k as f64 / rows.max(cols) as f64;
    let values = htmp_singular_values(k, gamma, kappa, seed);
    prescribed_spectrum_matrix(&values, rows, cols, seed.wrapping_add(0x11))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{jacobi_eigendecomposition, reference_svd};

    #[test]
    fn gaussian_is_deterministic_per_seed() {
        assert_eq!(gaussian_matrix(16, 8, 3), gaussian_matrix(16, 8, 3));
        assert_ne!(gaussian_matrix(16, 8, 3), gaussian_matrix(16, 8, 4));
    }

    #[test]
    fn gaussian_moments() {
        let big = gaussian_matrix(1000, 1000, 5);
        let n = (1000 * 1000) as f64;
        let mean: f64 = big.data().iter().sum::<f64>() / n;
        assert!(mean.abs() <= 3.0 / 1000.0, "mean {mean}");
        let var: f64 = big.data().iter().map(|v| v * v).sum::<f64>() / n - mean * mean;
        assert!((0.99..=1.01).contains(&var), "var {var}");
    }

    #[test]
    fn wishart_basics() {
        let w1 = wishart_spd(5, 1, 9).unwrap();
        assert_eq!((w1.rows(), w1.cols()), (1, 1));
        assert!(w1.get(0, 0) >= 0.0);

        let w = wishart_spd(40, 24, 10).unwrap();
        assert!(w.symmetry_defect() <= 1e-12 * w.frob_norm());
        assert!(wishart_spd(3, 5, 1).is_err());
    }

    #[test]
    fn wishart_spectrum_near_mp_edges() {
        let (n, m) = (800, 200);
        let w = wishart_spd(n, m, 12).unwrap().scale(1.0 / n as f64);
        let eig = jacobi_eigendecomposition(&w, 1e-10).unwrap();
        let gamma = m as f64 / n as f64;
        let lo_edge = (1.0 - gamma.sqrt()).powi(2);
        let hi_edge = (1.0 + gamma.sqrt()).powi(2);
        let max = eig.values[0];
        let min = *eig.values.last().unwrap();
        assert!(min > 0.0);
        assert!(max <= 3.0 * hi_edge && max >= hi_edge / 3.0, "max {max}");
        assert!(min <= 3.0 * lo_edge && min >= lo_edge / 3.0, "min {min}");
    }

    #[test]
    fn prescribed_all_ones_is_orthogonal() {
        let a = prescribed_spectrum_matrix(&[1.0; 16], 16, 16, 7).unwrap();
        let gram = a.transpose().matmul(&a).unwrap();
        let defect = gram.sub(&Mat::identity(16)).unwrap().frob_norm();
        assert!(defect <= 1e-10, "defect {defect}");
    }

    #[test]
    fn prescribed_round_trips_tiny_values() {
        let a = prescribed_spectrum_matrix(&[1.0, 1e-8], 2, 2, 8).unwrap();
        let (_, s, _) = reference_svd(&a, 1e-14).unwrap();
        assert!((s.values[0] - 1.0).abs() <= 1e-6);
        assert!((s.values[1] - 1e-8).abs() <= 1e-6 * 1e-8 + 1e-14);
    }

    #[test]
    fn prescribed_round_trips_log_spaced_values() {
        let k = 256;
        let values: Vec<f64> = (0..k)
            .map(|i| 10f64.powf(-4.0 * (k - 1 - i) as f64 / (k - 1) as f64))
            .rev()
            .collect();
        let a = prescribed_spectrum_matrix(&values, k, k, 13).unwrap();
        let (_, s, _) = reference_svd(&a, 1e-14).unwrap();
        let mut worst = 0.0f64;
        for (got, want) in s.values.iter().zip(&values) {
            worst = worst.max((got - want).abs() / want.max(1e-10));
        }
        assert!(worst <= 1e-8, "worst rel err {worst}");
    }

    #[test]
    fn prescribed_validation() {
        assert!(prescribed_spectrum_matrix(&[0.5, 1.0], 2, 2, 1).is_err());
        assert!(prescribed_spectrum_matrix(&[1.0], 2, 2, 1).is_err());
        assert!(prescribed_spectrum_matrix(&[1.0, -0.1], 2, 2, 1).is_err());
    }

    #[test]
    fn prescribed_spd_has_prescribed_eigenvalues() {
        let values = vec![2.0, 1.0, 0.25];
        let a = prescribed_spd_matrix(&values, 3, 21).unwrap();
        let eig = jacobi_eigendecomposition(&a, 1e-13).unwrap();
        for (got, want) in eig.values.iter().zip(&values) {
            assert!((got - want).abs() <= 1e-10);
        }
    }

    #[test]
    fn mp_samples_stay_on_support() {
        let gamma = 0.25;
        let samples = marchenko_pastur_samples(5000, gamma, 17);
        let lo = (1.0 - gamma.sqrt()).powi(2);
        let hi = (1.0 + gamma.sqrt()).powi(2);
        assert!(samples.iter().all(|l| *l >= lo - 1e-12 && *l <= hi + 1e-12));
        let mean: f64 = samples.iter().sum::<f64>() / samples.len() as f64;
        // The MP density has mean 1.
        assert!((mean - 1.0).abs() <= 0.05, "mean {mean}");
    }

    #[test]
    fn htmp_nearly_matches_pure_mp_for_large_kappa() {
        // Same bulk seed with and without the variance mixture: for large
        // kappa the weights concentrate at 1, so the two samples should be
        // close in Kolmogorov-Smirnov distance. Samples are aligned at the
        // median before comparison; aligning at the max would fold the
        // extreme-value noise of the largest weight into the whole sample.
        let k = 4000;
        let gamma = 0.25;
        let heavy = htmp_singular_values(k, gamma, 100.0, 23);
        let mut pure: Vec<f64> = marchenko_pastur_samples(k, gamma, 23)
            .iter()
            .map(|l| l.sqrt())
            .collect();
        pure.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let max = pure[0];
        for v in pure.iter_mut() {
            *v /= max;
        }
        let align = |v: &[f64]| -> Vec<f64> {
            let mut s = v.to_vec();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = s[s.len() / 2];
            v.iter().map(|x| x / med).collect()
        };
        let ks = two_sample_ks(&align(&heavy), &align(&pure));
        assert!(ks <= 0.05, "ks {ks}");
    }

    #[test]
    fn smaller_kappa_means_heavier_tail() {
        let k = 2000;
        let heavy = htmp_singular_values(k, 0.5, 0.1, 29);
        let light = htmp_singular_values(k, 0.5, 100.0, 29);
        // sigma_max / sigma_median, with sigma_max normalized to 1.
        let heavy_ratio = 1.0 / heavy[k / 2];
        let light_ratio = 1.0 / light[k / 2];
        assert!(
            heavy_ratio > light_ratio,
            "heavy {heavy_ratio} vs light {light_ratio}"
        );
    }

    #[test]
    fn htmp_matrix_is_deterministic() {
        let a = htmp_like_matrix(24, 12, 0.5, 31).unwrap();
        let b = htmp_like_matrix(24, 12, 0.5, 31).unwrap();
        assert_eq!(a, b);
        assert!(htmp_like_matrix(4, 4, 0.0, 1).is_err());
    }

    fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
        let mut xs: Vec<f64> = a.iter().chain(b).copied().collect();
        xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut asorted = a.to_vec();
        asorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut bsorted = b.to_vec();
        bsorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut worst = 0.0f64;
        for x in xs {
            let fa = asorted.partition_point(|v| *v <= x) as f64 / a.len() as f64;
            let fb = bsorted.partition_point(|v| *v <= x) as f64 / b.len() as f64;
            worst = worst.max((fa - fb).abs());
        }
        worst
    }
}
