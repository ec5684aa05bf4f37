//! Inverse p-th roots of an SPD matrix by the coupled inverse-Newton
//! iteration; p = 2 is the preconditioner-style inverse square root.
//!
//! Run with: cargo run --release -p prism --example inverse_proot

use prism::genmat::wishart_spd;
use prism::iterations::{inverse_proot_iterate, CoefficientStrategy, IterationOptions};
use prism::matcore::Mat;

fn main() {
    let a = wishart_spd(128, 64, 13).unwrap();
    let opts = IterationOptions {
        tol_fro: 1e-10,
        ..IterationOptions::default()
    };
    for p in [1u32, 2, 4] {
        for (name, strategy) in [
            ("taylor", CoefficientStrategy::Taylor),
            ("prism-exact", CoefficientStrategy::PrismExact),
        ] {
            let res = inverse_proot_iterate(&a, p, &strategy, &opts).unwrap();
            // Verify X^p A = I.
            let mut acc = a.clone();
            for _ in 0..p {
                acc = res.primary.matmul(&acc).unwrap();
            }
            let resid = acc.sub(&Mat::identity(64)).unwrap().frob_norm();
            println!(
                "p={p} {name:<12} iterations={:<4} ||X^p A - I||_F = {resid:.3e}",
                res.report.iterations()
            );
        }
    }
}
