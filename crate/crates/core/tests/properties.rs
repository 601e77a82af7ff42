//! Randomized property tests for the algebraic invariants the rest of the
//! library leans on: the ultrametric, norm multiplicativity, the additive
//! character, coset partitioning, Plancherel, and refinement invariance.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use ultrawave::fourier::fourier;
use ultrawave::local_field::{enumerate_cosets, CosetGrid, FieldParams, PAdicRational, Point};
use ultrawave::schwartz::TestFunction;

fn qp(p: u64) -> FieldParams {
    FieldParams::new(p).unwrap()
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ultrametric_inequality(p in prime(), seed in any::<(i64, i64, i64, i64)>()) {
        let (a, b, c, d) = seed;
        let x = PAdicRational::from_rational(
            qp(p),
            BigRational::new(BigInt::from(a), BigInt::from(b.unsigned_abs().max(1))),
        );
        let y = PAdicRational::from_rational(
            qp(p),
            BigRational::new(BigInt::from(c), BigInt::from(d.unsigned_abs().max(1))),
        );
        let s = &x + &y;
        prop_assert!(s.norm_f64() <= x.norm_f64().max(y.norm_f64()) * (1.0 + 1e-15));
        // with equality when the norms differ
        if x.norm_exponent() != y.norm_exponent() && !x.is_zero() && !y.is_zero() {
            prop_assert_eq!(
                s.norm_exponent(),
                x.norm_exponent().max(y.norm_exponent())
            );
        }
    }

    #[test]
    fn norm_is_multiplicative(p in prime(), a in -50i64..=50, b in 1i64..=50,
                              c in -50i64..=50, d in 1i64..=50) {
        let x = PAdicRational::from_rational(qp(p), BigRational::new(a.into(), b.into()));
        let y = PAdicRational::from_rational(qp(p), BigRational::new(c.into(), d.into()));
        let xy = &x * &y;
        match (x.norm_exponent(), y.norm_exponent()) {
            (Some(ex), Some(ey)) => prop_assert_eq!(xy.norm_exponent(), Some(ex + ey)),
            _ => prop_assert!(xy.is_zero()),
        }
        // division closes the field
        if !y.is_zero() {
            let back = &xy / &y;
            prop_assert_eq!(back.value_rational(), x.value_rational());
        }
    }

    #[test]
    fn character_is_additive(p in prime(), a in -50i64..=50, b in 1i64..=50,
                             c in -50i64..=50, d in 1i64..=50) {
        let x = PAdicRational::from_rational(qp(p), BigRational::new(a.into(), b.into()));
        let y = PAdicRational::from_rational(qp(p), BigRational::new(c.into(), d.into()));
        let lhs = (&x + &y).character();
        let rhs = x.character() * y.character();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
        // trivial on the integers
        let z = PAdicRational::from_integer(qp(p), a);
        prop_assert!((z.character() - num_complex::Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn parse_display_roundtrip(p in prime(), a in -50i64..=50, b in 1i64..=50) {
        let x = PAdicRational::from_rational(qp(p), BigRational::new(a.into(), b.into()));
        let text = x.to_string();
        let back = PAdicRational::parse(qp(p), &text).unwrap();
        prop_assert_eq!(back.value_rational(), x.value_rational());
    }

    #[test]
    fn cosets_partition_the_ball(p in prop::sample::select(vec![2u64, 3]),
                                 n in 1usize..=2,
                                 x_num in -100i64..=100, x_shift in -2i64..=2) {
        let params = qp(p);
        let grid = CosetGrid::new(params, n, 1, 1).unwrap();
        let reps = enumerate_cosets(params, n, 1, 1).unwrap();
        prop_assert_eq!(reps.len(), grid.cells());
        // a point inside the ball lands in exactly one coset
        let coords: Vec<PAdicRational> = (0..n)
            .map(|j| {
                PAdicRational::from_parts(params, BigInt::from(x_num + j as i64), -x_shift)
            })
            .collect();
        let x = Point::new(coords);
        if x.sup_norm_exponent().map_or(true, |e| e <= 1) {
            let idx = grid.index_of(&x).unwrap();
            let rep = grid.representative(idx);
            // difference lies in the constancy ball
            let diff = x.sub(&rep);
            prop_assert!(diff.sup_norm_exponent().map_or(true, |e| e <= -1));
        } else {
            prop_assert!(grid.index_of(&x).is_none());
        }
    }

    #[test]
    fn plancherel_and_linearity(p in prop::sample::select(vec![2u64, 3, 5]),
                                seed in any::<u64>()) {
        let f = TestFunction::random(qp(p), seed, 1, 1, 1, false, false).unwrap();
        let g = TestFunction::random(qp(p), seed ^ 1, 1, 1, 1, false, false).unwrap();
        let fh = fourier(&f);
        prop_assert!((f.lkappa_norm(2.0).unwrap() - fh.lkappa_norm(2.0).unwrap()).abs() <= 1e-12);
        let sum_hat = fourier(&f.add(&g).unwrap());
        let hat_sum = fh.add(&fourier(&g)).unwrap();
        prop_assert!(sum_hat.max_diff(&hat_sum) <= 1e-12);
    }

    #[test]
    fn refine_preserves_integral_and_values(p in prop::sample::select(vec![2u64, 3]),
                                            seed in any::<u64>()) {
        let f = TestFunction::random(qp(p), seed, 2, 1, 1, false, false).unwrap();
        let fine = f.refine(2, 2).unwrap();
        prop_assert!((f.integrate() - fine.integrate()).norm() <= 1e-13);
        for idx in 0..fine.grid().cells().min(64) {
            let x = fine.grid().representative(idx);
            prop_assert!((fine.evaluate(&x) - f.evaluate(&x)).norm() <= 1e-15);
        }
        // the transform refines compatibly: fourier of the refinement agrees
        // with the refinement of the fourier transform on the common grid
        let a = fourier(&fine);
        let b = fourier(&f).refine(2, 2).unwrap();
        prop_assert!(a.max_diff(&b) <= 1e-12);
    }
}
