//! Polar factor (orthogonalization) of Gaussian matrices across aspect
//! ratios, comparing iteration counts of the classical and fitted updates.
//!
//! Run with: cargo run --release -p prism --example polar

use prism::genmat::gaussian_matrix;
use prism::iterations::{polar_iterate, CoefficientStrategy, IterationOptions};
use prism::matcore::Mat;

fn main() {
    let opts = IterationOptions {
        tol_fro: 1e-9,
        degree: 2,
        ..IterationOptions::default()
    };
    println!(
        "{:>6} {:>10} {:>8} {:>14} {:>16}",
        "gamma", "shape", "strategy", "iterations", "||X'X - I||_F"
    );
    for (rows, cols) in [(128usize, 128usize), (256, 64), (300, 6)] {
        for (name, strategy) in [
            ("taylor", CoefficientStrategy::Taylor),
            ("prism", CoefficientStrategy::PrismSketched { rows: 8, seed: 5 }),
        ] {
            let a = gaussian_matrix(rows, cols, 11);
            let res = polar_iterate(&a, &strategy, &opts).unwrap();
            let gram_err = res
                .primary
                .transpose()
                .matmul(&res.primary)
                .unwrap()
                .sub(&Mat::identity(cols))
                .unwrap()
                .frob_norm();
            println!(
                "{:>6} {:>10} {:>8} {:>14} {:>16.3e}",
                rows / cols,
                format!("{rows}x{cols}"),
                name,
                res.report.iterations(),
                gram_err
            );
        }
    }
}
