//! What sketching does to the coefficient fit: power-trace accuracy from an
//! 8-row sketch, and the fitted-coefficient trajectory of a polar solve with
//! exact versus sketched fitting at every iteration.
//!
//! Run with: cargo run --release -p prism --example sketched_fitting

use prism::genmat::gaussian_matrix;
use prism::matcore::Mat;
use prism::polyfit::{
    eval_surrogate_matrix, minimize_quartic_on_interval, ns_loss_coeffs, taylor_surrogate,
    SurrogateFamily,
};
use prism::sketch::{
    exact_power_traces, gaussian_sketch, recommended_sketch_rows, sketched_power_traces,
};

fn residual(x: &Mat) -> Mat {
    x.transpose()
        .matmul(x)
        .unwrap()
        .identity_minus()
        .symmetrized()
}

fn main() {
    let n = 256;
    let rows = recommended_sketch_rows(n, 20, 0.01);
    println!(
        "sketch rows for n={n}: distortion bound {} vs practical {}",
        rows.distortion_bound, rows.practical
    );

    let mut x = {
        let g = gaussian_matrix(2 * n, n, 29);
        g.scale(1.0 / g.frob_norm())
    };

    // Trace accuracy on the first residual.
    let r0 = residual(&x);
    let exact = exact_power_traces(&r0, 6).unwrap();
    let s = gaussian_sketch(8, n, 31).unwrap();
    let sketched = sketched_power_traces(&r0, &s, 6).unwrap();
    println!("\n{:>5} {:>14} {:>14} {:>9}", "power", "exact trace", "sketched", "rel err");
    for i in 1..=6 {
        let e = exact.power(i).unwrap();
        let sk = sketched.power(i).unwrap();
        println!("{:>5} {:>14.6} {:>14.6} {:>9.2e}", i, e, sk, (sk - e).abs() / e.abs());
    }

    // Fitted-coefficient trajectory: exact minimizer vs a fresh 8-row sketch
    // at every iteration of a degree-1 polar solve.
    let surrogate = taylor_surrogate(SurrogateFamily::InvSqrtResidual, 1).unwrap();
    println!("\n{:>4} {:>12} {:>12} {:>12} {:>12}", "k", "||R||_F", "alpha exact", "sketched", "gap");
    for k in 0..30u64 {
        let r = residual(&x);
        let rfro = r.frob_norm();
        if rfro <= 1e-8 * (n as f64).sqrt() {
            println!("{k:>4} {rfro:>12.3e} converged");
            break;
        }
        let alpha_exact = minimize_quartic_on_interval(
            &ns_loss_coeffs(&exact_power_traces(&r, 6).unwrap(), 1).unwrap(),
        );
        let sk = gaussian_sketch(8, n, 1000 + k).unwrap();
        let alpha_sketched = minimize_quartic_on_interval(
            &ns_loss_coeffs(&sketched_power_traces(&r, &sk, 6).unwrap(), 1).unwrap(),
        );
        println!(
            "{k:>4} {rfro:>12.3e} {alpha_exact:>12.6} {alpha_sketched:>12.6} {:>12.2e}",
            (alpha_exact - alpha_sketched).abs()
        );
        let g = eval_surrogate_matrix(&surrogate, alpha_sketched, &r).unwrap();
        x = x.matmul(&g).unwrap();
    }
}
