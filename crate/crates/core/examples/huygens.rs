//! Huygens-type behavior of the solution F2: a sharp trailing edge (the field
//! vanishes identically for |t| > q^{N+1} when phi is supported in B_N), local
//! constancy in t at the resolution of the datum, and a finite domain of
//! dependence.
//!
//! Run with: cargo run --example huygens

use num_bigint::BigInt;
use ultrawave::local_field::{CosetGrid, FieldParams, PAdicRational, Point};
use ultrawave::schwartz::TestFunction;
use ultrawave::waves::{cauchy_direct, huygens_check};

fn main() {
    for p in [2u64, 3] {
        let params = FieldParams::new(p).unwrap();
        // phi supported in the unit ball (N = 0), constancy exponent nu = 1
        let phi = TestFunction::random(params, 70 + p, 2, 0, 1, true, false).unwrap();
        let t_grid = CosetGrid::new(params, 1, 3, 1).unwrap();
        let targets = vec![
            Point::zero(params, 2),
            Point::new(vec![
                PAdicRational::one(params),
                PAdicRational::from_parts(params, BigInt::from(1), 1),
            ]),
            // outside the support of phi
            Point::new(vec![
                PAdicRational::from_parts(params, BigInt::from(1), -2),
                PAdicRational::one(params),
            ]),
        ];
        let f2 = cauchy_direct(&phi, &t_grid, &targets).unwrap();
        let report = huygens_check(&phi, &f2);
        println!("p = {p}: datum supported in B_0, nu = 1, t swept over |t| <= q^3");
        println!(
            "  trailing edge max |F2| for |t| > q^(N+1) : {:.3e}",
            report.edge_max
        );
        println!(
            "  verified t-constancy radius              : q^{}",
            report.constancy_radius_exp
        );
        println!(
            "  leak outside the domain of dependence    : {:.3e}\n",
            report.dependence_leak
        );
    }
}
