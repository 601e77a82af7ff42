//! The Cauchy problem for the wave equation solved four independent ways —
//! Radon slices, the radial direct formula, the spectral multiplier, and the
//! A * B_t * phi convolution factorization — with pairwise agreement and
//! verification of both initial conditions.
//!
//! Run with: cargo run --example cauchy_routes

use num_bigint::BigInt;
use ultrawave::local_field::{CosetGrid, FieldParams, PAdicRational, Point};
use ultrawave::schwartz::TestFunction;
use ultrawave::waves::{
    cauchy_convolution, cauchy_direct, cauchy_radon, cauchy_spectral,
    initial_condition_residual, modified_initial_condition_residual, CauchyVariant,
};

fn main() {
    for p in [2u64, 3] {
        let params = FieldParams::new(p).unwrap();
        let n = 2;
        // zero-mean datum so all four routes are admissible
        let phi = TestFunction::random(params, 8 + p, n, 1, 1, true, false).unwrap();
        let t_grid = CosetGrid::new(params, 1, 3, 1).unwrap();
        let targets = vec![
            Point::zero(params, n),
            Point::new(vec![
                PAdicRational::from_parts(params, BigInt::from(1), -1),
                PAdicRational::one(params),
            ]),
            Point::new(vec![
                PAdicRational::one(params),
                PAdicRational::from_parts(params, BigInt::from(1), 1),
            ]),
        ];
        let fields = [
            cauchy_radon(&phi, CauchyVariant::F2, &t_grid, &targets).unwrap(),
            cauchy_direct(&phi, &t_grid, &targets).unwrap(),
            cauchy_spectral(&phi, &t_grid, &targets).unwrap(),
            cauchy_convolution(&phi, &t_grid, &targets).unwrap(),
        ];
        println!("p = {p}, n = {n}: F2 along four routes");
        for i in 0..fields.len() {
            for j in (i + 1)..fields.len() {
                println!(
                    "  {:<12} vs {:<12} delta {:.3e}",
                    fields[i].route(),
                    fields[j].route(),
                    fields[i].max_diff(&fields[j]).unwrap()
                );
            }
        }
        let f1 = cauchy_radon(&phi, CauchyVariant::F1, &t_grid, &targets).unwrap();
        println!(
            "  F1(0,.) = phi residual          {:.3e}",
            initial_condition_residual(&f1, &phi)
        );
        println!(
            "  (D_t^(n-1) F2)(0,.) = phi residual {:.3e}",
            modified_initial_condition_residual(&fields[0], &phi).unwrap()
        );
        println!(
            "  radial-in-t spread              {:.3e}\n",
            fields[0].radial_in_t_error()
        );
    }
}
