//! Matrix sign of a symmetric matrix, comparing the classical update with
//! per-iteration coefficient fitting.
//!
//! Run with: cargo run --release -p prism --example sign

use prism::genmat::gaussian_matrix;
use prism::iterations::{sign_iterate, CoefficientStrategy, IterationOptions};
use prism::matcore::{reference_matrix_function, MatrixFunctionKind};

fn main() {
    let a = gaussian_matrix(64, 64, 42).symmetrized();
    let opts = IterationOptions {
        tol_fro: 1e-11,
        degree: 1,
        ..IterationOptions::default()
    };

    println!("sign of a random symmetric 64x64 matrix");
    println!("{:<16} {:>6} {:>14}", "strategy", "iters", "final ||R||_F");
    let mut results = Vec::new();
    for (name, strategy) in [
        ("taylor", CoefficientStrategy::Taylor),
        ("prism-exact", CoefficientStrategy::PrismExact),
        (
            "prism-sketched",
            CoefficientStrategy::PrismSketched { rows: 8, seed: 1 },
        ),
    ] {
        let res = sign_iterate(&a, &strategy, &opts).unwrap();
        println!(
            "{:<16} {:>6} {:>14.3e}",
            name,
            res.report.iterations(),
            res.report.final_residual()
        );
        results.push((name, res));
    }

    let oracle = reference_matrix_function(&a, MatrixFunctionKind::Sign, 1e-12).unwrap();
    for (name, res) in &results {
        let err = res.primary.sub(&oracle).unwrap().frob_norm();
        println!("{name:<16} distance to eigendecomposition oracle: {err:.3e}");
    }
}
