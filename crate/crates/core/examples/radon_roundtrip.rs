//! Radon transform over unit directions and its inversion: a test function is
//! recovered exactly (to machine precision) from its slices, and the transform
//! satisfies homogeneity of degree -1 and slice-mass invariance.
//!
//! Run with: cargo run --example radon_roundtrip

use num_bigint::BigInt;
use ultrawave::local_field::{FieldParams, PAdicRational, Point};
use ultrawave::radon::{radon_forward, radon_inverse, radon_point, radon_vanishing_check};
use ultrawave::schwartz::TestFunction;

fn main() {
    for (p, n) in [(2u64, 1usize), (2, 2), (3, 2)] {
        let params = FieldParams::new(p).unwrap();
        let phi = TestFunction::random(params, 21, n, 1, 1, false, false).unwrap();
        let m = 3;
        let table = radon_forward(&phi, m).unwrap();
        println!(
            "p = {p}, n = {n}: {} directions at sphere resolution q^-{m}",
            table.etas().len()
        );

        let targets: Vec<Point> = vec![
            Point::zero(params, n),
            Point::new(
                (0..n)
                    .map(|j| PAdicRational::from_parts(params, BigInt::from(1 + j as i64), -1))
                    .collect(),
            ),
        ];
        let recon = radon_inverse(&table, &targets).unwrap();
        let err = targets
            .iter()
            .zip(&recon.values)
            .map(|(x, v)| (phi.evaluate(x) - v).norm())
            .fold(0.0f64, f64::max);
        println!("  roundtrip error          {err:.3e}");

        // homogeneity: R[phi](p eta, p s) = q R[phi](eta, s)
        let p_elem = PAdicRational::from_parts(params, BigInt::from(1), 1);
        let eta = table.etas()[0].clone();
        let s = PAdicRational::from_parts(params, BigInt::from(1), -1);
        let lhs = radon_point(&phi, &eta.scale(&p_elem), &(&s * &p_elem));
        let rhs = radon_point(&phi, &eta, &s) * params.qf();
        println!("  homogeneity deviation    {:.3e}", (lhs - rhs).norm());

        // every slice carries the full mass of phi
        let mass = phi.integrate();
        let spread = table
            .slices()
            .iter()
            .map(|s| (s.integrate() - mass).norm())
            .fold(0.0f64, f64::max);
        println!("  slice-mass spread        {spread:.3e}");
        println!(
            "  vanishing beyond support {:.3e}\n",
            radon_vanishing_check(&phi, &table)
        );
    }
}
