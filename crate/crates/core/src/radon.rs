//! The Radon transform on Q_p^n through its Fourier-slice identity.
//!
//! The hyperplane measure omega_{xi,s} is never constructed; the transform is
//! defined and computed through
//!     phi-check(xi, r) = int chi(-s r) phi~(s xi) ds,
//! which is a one-dimensional inverse Fourier transform of the restriction of
//! phi~ to the line K xi.  The inversion formula applies D_s^{n-1} to the
//! shifted slice s -> phi-check(eta, s + eta.x) at s = 0 and integrates over
//! the unit sphere of directions; for n = 1 it degenerates to an average of
//! slice values.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{fourier, inverse_fourier, transform_value_at};
use crate::local_field::{enumerate_sphere, CosetGrid, FieldParams, PAdicRational, Point};
use crate::schwartz::{CompensatedSum, TestFunction};
use crate::vladimirov::{apply_d_alpha, SampledField};

/// Slices of the Radon transform over unit-sphere direction cosets.
#[derive(Clone, Debug)]
pub struct RadonTable {
    params: FieldParams,
    n: usize,
    /// Constancy exponent of the eta-cosets on the unit sphere.
    sphere_resolution: i64,
    /// Ball exponent of the source function phi.
    source_ball_exp: i64,
    /// Constancy exponent of the source function phi.
    source_constancy_exp: i64,
    etas: Vec<Point>,
    /// One 1-D function of s per eta, on the grid (N_phi, l_phi).
    slices: Vec<TestFunction>,
}

impl RadonTable {
    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sphere_resolution(&self) -> i64 {
        self.sphere_resolution
    }

    pub fn source_ball_exp(&self) -> i64 {
        self.source_ball_exp
    }

    pub fn source_constancy_exp(&self) -> i64 {
        self.source_constancy_exp
    }

    pub fn etas(&self) -> &[Point] {
        &self.etas
    }

    pub fn slices(&self) -> &[TestFunction] {
        &self.slices
    }

    /// Haar volume of one eta-coset on the sphere.
    pub fn eta_cell_volume(&self) -> f64 {
        self.params
            .q_pow(-(self.n as i64) * self.sphere_resolution)
    }

    pub fn add(&self, other: &RadonTable) -> Result<RadonTable> {
        if self.n != other.n
            || self.sphere_resolution != other.sphere_resolution
            || self.source_ball_exp != other.source_ball_exp
            || self.source_constancy_exp != other.source_constancy_exp
        {
            return Err(Error::DimensionMismatch {
                expected: self.slices.len(),
                got: other.slices.len(),
            });
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadonTable {
            slices,
            etas: self.etas.clone(),
            ..*self
        })
    }

    /// CSV columns: eta_repr, s_repr, re, im.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "eta_repr,s_repr,re,im")?;
        for (eta, slice) in self.etas.iter().zip(&self.slices) {
            for idx in 0..slice.grid().cells() {
                let s = slice.grid().representative(idx);
                let v = slice.value_at_index(idx);
                writeln!(w, "{},{},{:e},{:e}", eta.repr(), s.repr(), v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// JSON header describing the table layout.
    pub fn header_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "p": self.params.p(),
            "m": self.sphere_resolution,
            "N_s": self.source_ball_exp,
            "l_s": self.source_constancy_exp,
        })
    }
}

/// phi-check(eta, .) for every unit-sphere coset at resolution m.
pub fn radon_forward(phi: &TestFunction, sphere_resolution: i64) -> Result<RadonTable> {
    let params = phi.params();
    let n = phi.dim();
    let n_phi = phi.ball_exp();
    let l_phi = phi.constancy_exp();
    // phi~ lives in D_{l_phi}^{N_phi}; eta must be resolved beyond the joint
    // constancy of s eta across the slice
    let required = n_phi + l_phi;
    if sphere_resolution < required {
        return Err(Error::InsufficientSphereResolution {
            m: sphere_resolution,
            required,
        });
    }
    let phi_hat = fourier(phi);
    let etas = enumerate_sphere(params, n, 0, sphere_resolution)?;
    // restriction grid: |s| <= q^{l_phi}, constant on cosets of p^{N_phi} O
    let line_grid = CosetGrid::new(params, 1, l_phi, n_phi)?;
    let slices: Vec<TestFunction> = etas
        .par_iter()
        .map(|eta| {
            let w = TestFunction::from_fn(line_grid, |s| phi_hat.evaluate(&eta.scale(&s.coords()[0])));
            inverse_fourier(&w)
        })
        .collect();
    Ok(RadonTable {
        params,
        n,
        sphere_resolution,
        source_ball_exp: n_phi,
        source_constancy_exp: l_phi,
        etas,
        slices,
    })
}

/// phi-check(xi, r) at an arbitrary nonzero direction xi (not necessarily of
/// unit norm) and arbitrary r, straight from the slice identity.
pub fn radon_point(phi: &TestFunction, xi: &Point, r: &PAdicRational) -> Complex64 {
    let h = xi
        .sup_norm_exponent()
        .expect("radon direction must be nonzero");
    let phi_hat = fourier(phi);
    // phi~(s xi) is supported in |s| <= q^{l_phi - h}, constant at N_phi + h
    let line_grid = CosetGrid::new(
        phi.params(),
        1,
        phi.constancy_exp() - h,
        phi.ball_exp() + h,
    )
    .expect("span N_phi + l_phi is nonnegative");
    let w = TestFunction::from_fn(line_grid, |s| phi_hat.evaluate(&xi.scale(&s.coords()[0])));
    transform_value_at(&w, &Point::scalar(r.clone()), true)
}

/// Inversion at explicit targets via the fractional derivative of the
/// eta-shifted slices.
pub fn radon_inverse(table: &RadonTable, targets: &[Point]) -> Result<SampledField> {
    let params = table.params;
    let n = table.n;
    let q = params.qf();
    let values = targets
        .par_iter()
        .map(|x| {
            if x.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: x.dim(),
                });
            }
            let e_x = x.sup_norm_exponent().unwrap_or(table.source_ball_exp);
            // eta-constancy of the integrand: shifting eta by p^m O^n moves
            // eta.x by at most q^{e_x - m}, which must stay below the slice
            // constancy q^{-l_phi}; the forward bound N_phi + l_phi also holds
            let required =
                (table.source_ball_exp + table.source_constancy_exp)
                    .max(table.source_constancy_exp + e_x);
            if table.sphere_resolution < required {
                return Err(Error::InsufficientSphereResolution {
                    m: table.sphere_resolution,
                    required,
                });
            }
            let mut acc = CompensatedSum::new();
            for (eta, slice) in table.etas.iter().zip(&table.slices) {
                let c = eta.dot(x);
                let contribution = if n == 1 {
                    slice.evaluate_scalar(&c)
                } else {
                    // shifted slice h(s) = phi-check(eta, s + eta.x)
                    let n_h = table
                        .source_ball_exp
                        .max(c.norm_exponent().unwrap_or(table.source_ball_exp));
                    let grid = CosetGrid::new(params, 1, n_h, table.source_constancy_exp)?;
                    let h = TestFunction::from_fn(grid, |s| {
                        slice.evaluate_scalar(&(&s.coords()[0] + &c))
                    });
                    let d = apply_d_alpha(&h, (n - 1) as f64, &[PAdicRational::zero(params)])?;
                    d.values[0]
                };
                acc.add(contribution);
            }
            Ok(acc.value() * table.eta_cell_volume() / (1.0 - 1.0 / q))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledField {
        points: targets.to_vec(),
        values,
        operator: "radon_inverse".into(),
        alpha: (n.max(2) - 1) as f64,
    })
}

/// Max |phi-check(eta, s)| sampled beyond the predicted support |s| <= q^{N_phi},
/// evaluated from the slice identity rather than read off the (zero) table.
pub fn radon_vanishing_check(phi: &TestFunction, table: &RadonTable) -> f64 {
    let params = table.params;
    let mut worst = 0.0f64;
    for eta in table.etas.iter().take(4) {
        for extra in 1..=2i64 {
            let e = table.source_ball_exp + extra;
            for a in 1..params.p().min(3) {
                let s = PAdicRational::from_parts(params, a.into(), -e);
                worst = worst.max(radon_point(phi, eta, &s).norm());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qp(p: u64) -> FieldParams {
        FieldParams::new(p).unwrap()
    }

    fn pad(p: u64, num: i64, den: i64) -> PAdicRational {
        PAdicRational::from_rational(
            qp(p),
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    /// Random exact points with ||x|| <= q^e.
    fn random_targets(p: u64, n: usize, e: i64, count: usize, seed: u64) -> Vec<Point> {
        let params = qp(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                Point::new(
                    (0..n)
                        .map(|_| {
                            let a: i64 = rng.gen_range(-20..=20);
                            let k: i64 = rng.gen_range(-2..=e);
                            PAdicRational::from_parts(params, a.into(), -k)
                        })
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn indicator_slice_is_indicator() {
        // phi = 1_{O^2}: every slice is 1_O in s
        let phi = TestFunction::indicator_ball(qp(2), 2, 0, 0).unwrap();
        let table = radon_forward(&phi, 1).unwrap();
        assert!(!table.etas().is_empty());
        for slice in table.slices() {
            assert_eq!(slice.ball_exp(), 0);
            let expected = TestFunction::indicator_ball(qp(2), 1, 0, 0).unwrap();
            assert!(slice.max_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn rejects_insufficient_sphere_resolution() {
        let phi = TestFunction::random(qp(2), 1, 2, 1, 1, false, false).unwrap();
        assert!(matches!(
            radon_forward(&phi, 1),
            Err(Error::InsufficientSphereResolution { required: 2, .. })
        ));
    }

    #[test]
    fn homogeneity_degree_minus_one() {
        // phi-check(p eta, p s) = q phi-check(eta, s)
        let phi = TestFunction::random(qp(3), 5, 2, 1, 1, false, false).unwrap();
        let table = radon_forward(&phi, 2).unwrap();
        let q = 3.0;
        for (eta, slice) in table.etas().iter().zip(table.slices()).take(6) {
            let p_elem = PAdicRational::from_parts(qp(3), 1.into(), 1);
            for idx in 0..slice.grid().cells() {
                let s = slice.grid().representative(idx).coords()[0].clone();
                let scaled_eta = eta.scale(&p_elem);
                let scaled_s = &s * &p_elem;
                let lhs = radon_point(&phi, &scaled_eta, &scaled_s);
                let rhs = slice.value_at_index(idx) * q;
                assert!((lhs - rhs).norm() < 1e-11, "eta {eta} s {s}");
            }
        }
    }

    #[test]
    fn slice_mass_independent_of_direction() {
        let phi = TestFunction::random(qp(2), 9, 2, 1, 1, false, false).unwrap();
        let table = radon_forward(&phi, 2).unwrap();
        let masses: Vec<Complex64> = table.slices().iter().map(|s| s.integrate()).collect();
        // all equal the total integral of phi
        let total = phi.integrate();
        for m in &masses {
            assert!((m - total).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_slice_consistency() {
        // phi~(s eta) = int chi(s r) phi-check(eta, r) dr
        let phi = TestFunction::random(qp(3), 2, 2, 1, 1, false, false).unwrap();
        let phi_hat = fourier(&phi);
        let table = radon_forward(&phi, 2).unwrap();
        for (eta, slice) in table.etas().iter().zip(table.slices()).take(5) {
            for s in [pad(3, 0, 1), pad(3, 1, 1), pad(3, 1, 3), pad(3, 2, 3)] {
                let lhs = phi_hat.evaluate(&eta.scale(&s));
                let rhs = transform_value_at(slice, &Point::scalar(s.clone()), false);
                assert!((lhs - rhs).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn joint_local_constancy_in_eta() {
        // perturbing eta inside its coset leaves the slice unchanged
        let phi = TestFunction::random(qp(2), 7, 2, 1, 1, false, false).unwrap();
        let m = 2;
        let table = radon_forward(&phi, m).unwrap();
        let eta = &table.etas()[1];
        let bump = PAdicRational::from_parts(qp(2), 1.into(), m + 1);
        let eta2 = Point::new(vec![
            &eta.coords()[0] + &bump,
            eta.coords()[1].clone(),
        ]);
        let slice = &table.slices()[1];
        for idx in 0..slice.grid().cells() {
            let s = slice.grid().representative(idx).coords()[0].clone();
            let v = radon_point(&phi, &eta2, &s);
            assert!((v - slice.value_at_index(idx)).norm() < 1e-12);
        }
    }

    #[test]
    fn vanishing_beyond_support() {
        let phi = TestFunction::indicator_ball(qp(2), 2, 0, 0).unwrap();
        let table = radon_forward(&phi, 1).unwrap();
        assert!(radon_vanishing_check(&phi, &table) < 1e-12);

        let phi = TestFunction::random(qp(3), 4, 2, 1, 1, false, false).unwrap();
        let table = radon_forward(&phi, 2).unwrap();
        assert!(radon_vanishing_check(&phi, &table) < 1e-12);
    }

    #[test]
    fn vanishing_bound_shifts_with_scaling() {
        // phi(x) and psi(x) = phi(p x): support of psi-check slices shrinks a level
        let phi = TestFunction::random(qp(2), 6, 2, 1, 0, false, false).unwrap();
        let grid = CosetGrid::new(qp(2), 2, 0, 1).unwrap();
        let psi = TestFunction::from_fn(grid, |x| {
            phi.evaluate(&x.scale(&PAdicRational::from_parts(qp(2), 1.into(), 1)))
        });
        let table = radon_forward(&psi, 1).unwrap();
        // beyond |s| = q^{N_psi} = 1 everything vanishes
        assert!(radon_vanishing_check(&psi, &table) < 1e-12);
        // and psi-check is not identically zero on its support
        let live = table.slices().iter().map(|s| s.max_abs()).fold(0.0, f64::max);
        assert!(live > 1e-6);
    }

    #[test]
    fn roundtrip_indicator_membership() {
        let phi = TestFunction::indicator_ball(qp(2), 2, 0, 0).unwrap();
        let table = radon_forward(&phi, 1).unwrap();
        let x0 = Point::zero(qp(2), 2);
        let far = Point::new(vec![pad(2, 1, 2), pad(2, 0, 1)]);
        // ||far|| = q needs m >= 0 + max(0, 1) = 1
        let field = radon_inverse(&table, &[x0, far]).unwrap();
        assert!((field.values[0] - Complex64::new(1.0, 0.0)).norm() < 1e-11);
        assert!(field.values[1].norm() < 1e-11);
    }

    #[test]
    fn roundtrip_random_targets() {
        for (p, n) in [(2u64, 1usize), (3, 1), (2, 2), (3, 2)] {
            let phi = TestFunction::random(qp(p), 40 + n as u64, n, 1, 1, false, false).unwrap();
            let table = radon_forward(&phi, 3).unwrap();
            let targets = random_targets(p, n, 1, 12, 99);
            let field = radon_inverse(&table, &targets).unwrap();
            for (x, v) in field.points.iter().zip(&field.values) {
                assert!(
                    (v - phi.evaluate(x)).norm() < 1e-9,
                    "p={p} n={n} x={x}: {v} vs {}",
                    phi.evaluate(x)
                );
            }
        }
    }

    #[test]
    fn inverse_is_linear() {
        let a = TestFunction::random(qp(2), 11, 2, 1, 1, false, false).unwrap();
        let b = TestFunction::random(qp(2), 12, 2, 1, 1, false, false).unwrap();
        let ta = radon_forward(&a, 2).unwrap();
        let tb = radon_forward(&b, 2).unwrap();
        let tsum = ta.add(&tb).unwrap();
        let targets = random_targets(2, 2, 1, 6, 5);
        let fa = radon_inverse(&ta, &targets).unwrap();
        let fb = radon_inverse(&tb, &targets).unwrap();
        let fs = radon_inverse(&tsum, &targets).unwrap();
        for i in 0..targets.len() {
            assert!((fs.values[i] - fa.values[i] - fb.values[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn inverse_reports_insufficient_resolution() {
        let phi = TestFunction::random(qp(2), 3, 2, 1, 1, false, false).unwrap();
        let table = radon_forward(&phi, 2).unwrap();
        // target of norm q^2 needs m >= 1 + 2 = 3 > 2
        let far = Point::new(vec![pad(2, 1, 4), pad(2, 0, 1)]);
        assert!(matches!(
            radon_inverse(&table, &[far]),
            Err(Error::InsufficientSphereResolution { required: 3, .. })
        ));
    }
}
