//! Locally constant eigenfunctions of the Vladimirov operator D^alpha:
//! the plateau-plus-ring profile at level N satisfies D^alpha u = q^{alpha N} u,
//! and the truncated radial operator has a one-dimensional null space there.
//!
//! Run with: cargo run --example eigenfunctions

use ultrawave::local_field::FieldParams;
use ultrawave::vladimirov::{eigen_residual, radial_nullspace_check, EigenProfile};

fn main() {
    for p in [2u64, 3, 5] {
        let params = FieldParams::new(p).unwrap();
        for level in -1..=1i64 {
            for alpha in [0.5f64, 1.0, 2.0] {
                let profile = EigenProfile::normalized(params, level);
                let lambda = profile.eigenvalue(params, alpha);
                let window: Vec<i64> = (level - 3..=level + 3).collect();
                let residual = eigen_residual(params, level, alpha, &window).unwrap();
                println!(
                    "p = {p}, N = {level:>2}, alpha = {alpha}: lambda = q^(alpha N) = {lambda:.6}, residual {residual:.3e}"
                );
            }
        }
        let ns = radial_nullspace_check(params, 1.0, 0, 3, 3).unwrap();
        println!(
            "p = {p}: truncated null space at lambda = 1 has dimension {} (profile angle {:.3e})\n",
            ns.dimension, ns.profile_angle
        );
    }
}
