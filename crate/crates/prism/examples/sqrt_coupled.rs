//! Coupled iteration for the square root and inverse square root of an SPD
//! matrix, with the per-iteration residual trace.
//!
//! Run with: cargo run --release -p prism --example sqrt_coupled

use prism::genmat::wishart_spd;
use prism::iterations::{sqrt_coupled_iterate, CoefficientStrategy, IterationOptions};
use prism::matcore::Mat;

fn main() {
    let a = wishart_spd(192, 96, 7).unwrap();
    let opts = IterationOptions {
        tol_fro: 1e-10,
        degree: 2,
        ..IterationOptions::default()
    };

    for (name, strategy) in [
        ("taylor", CoefficientStrategy::Taylor),
        ("prism-sketched", CoefficientStrategy::PrismSketched { rows: 8, seed: 3 }),
    ] {
        let res = sqrt_coupled_iterate(&a, &strategy, &opts).unwrap();
        println!("{name}: {} iterations", res.report.iterations());
        for rec in &res.report.records {
            match rec.alpha {
                Some(alpha) => println!("  k={:<3} ||R||_F={:.3e}  alpha={alpha:.4}", rec.iter, rec.residual_fro),
                None => println!("  k={:<3} ||R||_F={:.3e}  (done)", rec.iter, rec.residual_fro),
            }
        }
        let x = &res.primary;
        let y = res.secondary.as_ref().unwrap();
        let sqrt_resid = x.matmul(x).unwrap().sub(&a).unwrap().frob_norm() / a.frob_norm();
        let pair_resid = x
            .matmul(y)
            .unwrap()
            .sub(&Mat::identity(a.rows()))
            .unwrap()
            .frob_norm();
        println!("  ||X^2 - A||/||A|| = {sqrt_resid:.3e}, ||XY - I|| = {pair_resid:.3e}\n");
    }
}
