//! Heavy-tailed test ensembles: how the tail-weight dial changes the
//! spectrum, and how the fitted coefficient trajectory adapts to it during
//! orthogonalization.
//!
//! Run with: cargo run --release -p prism --example heavy_tail_spectra

use prism::genmat::{htmp_like_matrix, htmp_singular_values};
use prism::iterations::{polar_iterate, CoefficientStrategy, IterationOptions};

fn main() {
    println!("{:>8} {:>12} {:>16}", "kappa", "sigma_med", "sigma_max/sigma_med");
    for kappa in [0.1, 0.5, 100.0] {
        let values = htmp_singular_values(2000, 0.5, kappa, 37);
        let median = values[values.len() / 2];
        println!("{kappa:>8} {median:>12.4e} {:>16.1}", 1.0 / median);
    }

    println!("\ncoefficient trajectories while orthogonalizing 256x128 heavy-tail inputs");
    let opts = IterationOptions {
        tol_fro: 1e-8,
        degree: 2,
        ..IterationOptions::default()
    };
    for kappa in [0.1, 0.5, 100.0] {
        let a = htmp_like_matrix(256, 128, kappa, 41).unwrap();
        let res = polar_iterate(
            &a,
            &CoefficientStrategy::PrismSketched { rows: 8, seed: 43 },
            &opts,
        )
        .unwrap();
        let alphas: Vec<String> = res
            .report
            .alphas()
            .iter()
            .map(|a| format!("{a:.3}"))
            .collect();
        println!(
            "kappa={kappa:<6} iterations={:<3} alpha_k = [{}]",
            res.report.iterations(),
            alphas.join(", ")
        );
    }
}
