//! Inverse of a well-conditioned square matrix by the degree-2 polynomial
//! iteration, with and without the fitted top coefficient.
//!
//! Run with: cargo run --release -p prism --example chebyshev_inverse

use prism::genmat::gaussian_matrix;
use prism::iterations::{chebyshev_inverse_iterate, CoefficientStrategy, IterationOptions};
use prism::matcore::Mat;

fn main() {
    let n = 96;
    let a = gaussian_matrix(n, n, 19)
        .scale(0.08)
        .add(&Mat::identity(n))
        .unwrap();
    let opts = IterationOptions {
        tol_fro: 1e-11,
        ..IterationOptions::default()
    };
    for (name, strategy) in [
        ("taylor (alpha = 1)", CoefficientStrategy::Taylor),
        ("prism-exact", CoefficientStrategy::PrismExact),
        ("prism-sketched", CoefficientStrategy::PrismSketched { rows: 8, seed: 23 }),
    ] {
        let res = chebyshev_inverse_iterate(&a, &strategy, &opts).unwrap();
        let resid = a
            .matmul(&res.primary)
            .unwrap()
            .sub(&Mat::identity(n))
            .unwrap()
            .frob_norm();
        println!(
            "{name:<20} iterations={:<4} ||A X - I||_F = {resid:.3e}",
            res.report.iterations()
        );
    }
}
