//! L_kappa norm behavior of the solution kernels: ||B_t||_{L_1} is exactly
//! independent of t, and the F1 = B_t * phi and F2 norm ratios stay bounded
//! over the t-grid.  No thresholds here — the estimates come without
//! constants, so the numbers are reported as-is.
//!
//! Run with: cargo run --example norms

use ultrawave::local_field::{CosetGrid, FieldParams};
use ultrawave::schwartz::TestFunction;
use ultrawave::waves::{norm_report, CauchyKernels};

fn main() {
    for p in [2u64, 3] {
        let params = FieldParams::new(p).unwrap();
        let n = 2;
        let kernels = CauchyKernels::new(params, n);
        println!(
            "p = {p}, n = {n}: ||B_t||_1 = {} (t-independent)",
            kernels.b_t_l1()
        );
        let phi = TestFunction::random(params, 13 + p, n, 1, 1, true, false).unwrap();
        let t_grid = CosetGrid::new(params, 1, 2, 1).unwrap();
        // kappa in (1, n/(n-1)) admits the F2 bound with
        // lambda = n kappa / (n - kappa (n-1))
        let report = norm_report(&phi, &t_grid, &[1.5]).unwrap();
        println!(
            "{:<12} {:<7} {:<8} {:<12} {:<12}",
            "t", "kappa", "lambda", "F1 ratio", "F2 ratio"
        );
        for row in &report.rows {
            println!(
                "{:<12} {:<7} {:<8.3} {:<12.6} {:<12.6}",
                row.t_repr,
                row.kappa,
                row.lambda.unwrap(),
                row.f1_ratio,
                row.f2_ratio.unwrap()
            );
        }
        println!();
    }
}
