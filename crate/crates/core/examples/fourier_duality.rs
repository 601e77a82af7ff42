//! Fourier transform on Q_p^n: roundtrip, Plancherel, support/constancy
//! duality, and agreement of the fast radix-p path with the direct sum.
//!
//! Run with: cargo run --example fourier_duality

use num_bigint::BigInt;
use ultrawave::fourier::{fourier, fourier_direct, inverse_fourier, transform_value_at};
use ultrawave::local_field::{FieldParams, PAdicRational, Point};
use ultrawave::schwartz::TestFunction;

fn main() {
    for (p, n) in [(2u64, 1usize), (3, 2), (5, 2)] {
        let params = FieldParams::new(p).unwrap();
        let f = TestFunction::random(params, 42, n, 1, 2, false, false).unwrap();
        let g = fourier(&f);
        let back = inverse_fourier(&g);
        println!("p = {p}, n = {n}: grid {} cells", f.grid().cells());
        println!("  roundtrip error      {:.3e}", back.max_diff(&f));
        println!(
            "  plancherel |L2 - L2|  {:.3e}",
            (f.lkappa_norm(2.0).unwrap() - g.lkappa_norm(2.0).unwrap()).abs()
        );
        println!(
            "  fast vs direct        {:.3e}",
            g.max_diff(&fourier_direct(&f))
        );
        // duality: f lives in D_1^2, so f~ must vanish for ||xi|| > q^2;
        // check by the exact character sum at a point off the dual grid
        let mut coords = vec![PAdicRational::from_parts(params, BigInt::from(1), -3)];
        coords.resize(n, PAdicRational::one(params));
        let xi = Point::new(coords);
        println!(
            "  leak at ||xi|| = q^3  {:.3e}",
            transform_value_at(&f, &xi, false).norm()
        );
    }
}
