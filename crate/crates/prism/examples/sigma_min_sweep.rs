//! Iteration counts across the smallest singular value of a prescribed
//! log-spaced spectrum (sigma_max = 1): the fitted update keeps its edge
//! across the whole range, while a schedule tuned for one sigma_min
//! degrades away from it.
//!
//! Run with: cargo run --release -p prism --example sigma_min_sweep

use prism::genmat::prescribed_spectrum_matrix;
use prism::iterations::{
    polar_iterate, CoefficientStrategy, FixedSchedule, IterationOptions,
};

fn log_spaced(sigma_min: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(sigma_min.log10() * i as f64 / (n - 1) as f64))
        .collect()
}

fn main() {
    let n = 192;
    let opts = IterationOptions {
        tol_fro: 1e-6,
        degree: 2,
        max_iters: 300,
        normalize_input: false, // inputs are built with sigma_max = 1
        ..IterationOptions::default()
    };
    let iters = |a: &prism::matcore::Mat, strategy: &CoefficientStrategy| {
        polar_iterate(a, strategy, &opts).unwrap().report.iterations()
    };

    // A fixed schedule recorded from an adaptive run at sigma_min = 1e-3.
    let tuning = prescribed_spectrum_matrix(&log_spaced(1e-3, n), n, n, 53).unwrap();
    let recorded = polar_iterate(&tuning, &CoefficientStrategy::PrismExact, &opts)
        .unwrap()
        .report
        .alphas();
    let tuned = CoefficientStrategy::FixedSchedule(FixedSchedule::from_alphas(recorded, false));

    println!(
        "{:>10} {:>8} {:>12} {:>22}",
        "sigma_min", "taylor", "prism-exact", "schedule tuned @1e-3"
    );
    for (idx, sigma_min) in [1e-8f64, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1].into_iter().enumerate() {
        let a = prescribed_spectrum_matrix(&log_spaced(sigma_min, n), n, n, 60 + idx as u64)
            .unwrap();
        println!(
            "{:>10.0e} {:>8} {:>12} {:>22}",
            sigma_min,
            iters(&a, &CoefficientStrategy::Taylor),
            iters(&a, &CoefficientStrategy::PrismExact),
            iters(&a, &tuned)
        );
    }
}
