//! Plane waves F(t, x) = f(t + omega . x) with ||omega|| = 1 solve the
//! non-Archimedean wave equation D_t^alpha F = D_x^{alpha,n} F; the residual
//! is measured with an independent n-dimensional evaluation of the right side.
//!
//! Run with: cargo run --example plane_wave

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use ultrawave::local_field::{FieldParams, PAdicRational, Point};
use ultrawave::schwartz::TestFunction;
use ultrawave::waves::{wave_residual, PlaneWaveSpec};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for (p, n, alpha) in [(2u64, 1usize, 1.0f64), (2, 2, 1.0), (3, 2, 0.5), (3, 3, 2.0)] {
        let params = FieldParams::new(p).unwrap();
        let f = TestFunction::random(params, 9 + p + n as u64, 1, 1, 1, false, false).unwrap();
        // unit direction: first coordinate a p-adic unit, the rest integral
        let mut coords = vec![PAdicRational::one(params)];
        for j in 1..n {
            coords.push(PAdicRational::from_integer(params, 1 + j as i64));
        }
        let spec = PlaneWaveSpec::new(f, Point::new(coords)).unwrap();
        let points: Vec<(PAdicRational, Point)> = (0..10)
            .map(|_| {
                let t = PAdicRational::from_parts(
                    params,
                    BigInt::from(rng.gen_range(-9i64..=9)),
                    rng.gen_range(-2i64..=2),
                );
                let x = Point::new(
                    (0..n)
                        .map(|_| {
                            PAdicRational::from_parts(
                                params,
                                BigInt::from(rng.gen_range(-9i64..=9)),
                                rng.gen_range(-2i64..=2),
                            )
                        })
                        .collect(),
                );
                (t, x)
            })
            .collect();
        let residual = wave_residual(&spec, alpha, &points).unwrap();
        println!(
            "p = {p}, n = {n}, alpha = {alpha}: |D_t^a F - D_x^(a,n) F| <= {residual:.3e} over {} points",
            points.len()
        );
    }
}
