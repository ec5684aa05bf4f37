//! Product-form Newton iteration for the matrix square root: classical
//! blending (alpha = 1/2) versus the adaptively fitted coefficient.
//!
//! Run with: cargo run --release -p prism --example db_newton

use prism::genmat::wishart_spd;
use prism::iterations::{db_newton_sqrt, IterationOptions};

fn main() {
    let a = wishart_spd(128, 96, 17).unwrap();
    let opts = IterationOptions {
        tol_fro: 1e-10,
        ..IterationOptions::default()
    };
    for (name, adaptive) in [("classical (alpha = 1/2)", false), ("adaptive", true)] {
        let res = db_newton_sqrt(&a, adaptive, &opts).unwrap();
        println!("{name}: {} iterations", res.report.iterations());
        for rec in &res.report.records {
            match rec.alpha {
                Some(alpha) => {
                    println!("  k={:<3} ||I - M||_F={:.3e}  alpha={alpha:.4}", rec.iter, rec.residual_fro)
                }
                None => println!("  k={:<3} ||I - M||_F={:.3e}", rec.iter, rec.residual_fro),
            }
        }
        let sqrt_resid =
            res.primary.matmul(&res.primary).unwrap().sub(&a).unwrap().frob_norm() / a.frob_norm();
        println!("  ||X^2 - A||/||A|| = {sqrt_resid:.3e}\n");
    }
}
