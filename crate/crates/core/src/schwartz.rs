//! Finite representation of Bruhat-Schwartz test functions on Q_p^n.
//!
//! A `TestFunction` is a dense complex table over the deterministic coset
//! order of its `CosetGrid`: support inside B_N^n, constant on cosets of
//! p^l O^n, identically zero outside the ball.  Integration uses exact cell
//! volumes with compensated summation.

use std::io::Write;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_field::{CosetGrid, FieldParams, PAdicRational, Point};

/// Kahan-compensated complex accumulator with deterministic order.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Membership tags for the Lizorkin subspaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LizorkinTag {
    /// Zero mean: integral vanishes.
    pub in_phi: bool,
    /// Vanishes on the coset of 0 (the ball B_{-l}).
    pub in_psi: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    grid: CosetGrid,
    values: Vec<Complex64>,
}

impl TestFunction {
    pub fn new(grid: CosetGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::DimensionMismatch {
                expected: grid.cells(),
                got: values.len(),
            });
        }
        Ok(TestFunction { grid, values })
    }

    pub fn from_fn(grid: CosetGrid, f: impl Fn(&Point) -> Complex64) -> Self {
        let values = (0..grid.cells()).map(|i| f(&grid.representative(i))).collect();
        TestFunction { grid, values }
    }

    pub fn zero(grid: CosetGrid) -> Self {
        TestFunction {
            values: vec![Complex64::zero(); grid.cells()],
            grid,
        }
    }

    /// Indicator of the ball B_N^n held on the grid (N, l), l >= -N.
    pub fn indicator_ball(
        params: FieldParams,
        n: usize,
        ball_exp: i64,
        constancy_exp: i64,
    ) -> Result<Self> {
        let grid = CosetGrid::new(params, n, ball_exp, constancy_exp)?;
        Ok(TestFunction {
            values: vec![Complex64::new(1.0, 0.0); grid.cells()],
            grid,
        })
    }

    pub fn grid(&self) -> &CosetGrid {
        &self.grid
    }

    pub fn params(&self) -> FieldParams {
        self.grid.params()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn ball_exp(&self) -> i64 {
        self.grid.ball_exp()
    }

    pub fn constancy_exp(&self) -> i64 {
        self.grid.constancy_exp()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value_at_index(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Value at any exact point; 0 outside B_N^n.
    pub fn evaluate(&self, x: &Point) -> Complex64 {
        match self.grid.index_of(x) {
            Some(idx) => self.values[idx],
            None => Complex64::zero(),
        }
    }

    /// One-dimensional convenience wrapper.
    pub fn evaluate_scalar(&self, x: &PAdicRational) -> Complex64 {
        debug_assert_eq!(self.dim(), 1);
        self.evaluate(&Point::scalar(x.clone()))
    }

    /// Integral over Q_p^n: sum of cell values times q^{-nl}.
    pub fn integrate(&self) -> Complex64 {
        let mut acc = CompensatedSum::new();
        for &v in &self.values {
            acc.add(v);
        }
        acc.value() * self.grid.cell_volume()
    }

    /// Integral over the ball {||x - center|| <= q^k}.
    pub fn ball_integral_centered(&self, center: &Point, radius_exp: i64) -> Complex64 {
        let l = self.constancy_exp();
        if radius_exp < -l {
            // below grid resolution: the ball sits inside one coset
            return self.evaluate(center)
                * self.params().q_pow(radius_exp * self.dim() as i64);
        }
        let mut acc = CompensatedSum::new();
        for idx in 0..self.grid.cells() {
            let v = self.values[idx];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let rep = self.grid.representative(idx);
            let d = rep.sub(center).sup_norm_exponent();
            if d.map_or(true, |k| k <= radius_exp) {
                acc.add(v);
            }
        }
        acc.value() * self.grid.cell_volume()
    }

    /// Same function on a finer grid (N' >= N, l' >= l).
    pub fn refine(&self, ball_exp: i64, constancy_exp: i64) -> Result<TestFunction> {
        if ball_exp < self.ball_exp() || constancy_exp < self.constancy_exp() {
            return Err(Error::ShrinkingRefine {
                from_n: self.ball_exp(),
                from_l: self.constancy_exp(),
                to_n: ball_exp,
                to_l: constancy_exp,
            });
        }
        let grid = CosetGrid::new(self.params(), self.dim(), ball_exp, constancy_exp)?;
        Ok(TestFunction::from_fn(grid, |x| self.evaluate(x)))
    }

    /// L_kappa norm (sum q^{-nl} |v|^kappa)^{1/kappa}, kappa >= 1.
    pub fn lkappa_norm(&self, kappa: f64) -> Result<f64> {
        if kappa < 1.0 {
            return Err(Error::InvalidKappa(kappa, "kappa >= 1".into()));
        }
        let mut acc = 0.0f64;
        let mut carry = 0.0f64;
        for &v in &self.values {
            let term = v.norm().powf(kappa);
            let y = term - carry;
            let t = acc + y;
            carry = (t - acc) - y;
            acc = t;
        }
        Ok((acc * self.grid.cell_volume()).powf(1.0 / kappa))
    }

    pub fn lizorkin_tag(&self) -> LizorkinTag {
        let scale = self
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        LizorkinTag {
            in_phi: self.integrate().norm() <= 1e-12 * scale,
            in_psi: self.values[0].norm() <= 1e-13 * scale,
        }
    }

    pub fn add(&self, other: &TestFunction) -> Result<TestFunction> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TestFunction) -> Result<TestFunction> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(
        &self,
        other: &TestFunction,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<TestFunction> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.cells(),
                got: other.grid.cells(),
            });
        }
        Ok(TestFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> TestFunction {
        TestFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn map_indexed(&self, f: impl Fn(usize, Complex64) -> Complex64) -> TestFunction {
        TestFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| f(i, v))
                .collect(),
        }
    }

    /// Max |f - g| over the shared table.
    pub fn max_diff(&self, other: &TestFunction) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Deterministic pseudo-random table; optional exact projections onto the
    /// Lizorkin subspaces (Phi: zero mean, Psi: zero near the origin).
    pub fn random(
        params: FieldParams,
        seed: u64,
        n: usize,
        ball_exp: i64,
        constancy_exp: i64,
        project_phi: bool,
        project_psi: bool,
    ) -> Result<TestFunction> {
        let grid = CosetGrid::new(params, n, ball_exp, constancy_exp)?;
        let cells = grid.cells();
        if (project_phi || project_psi) && cells < 2 {
            return Err(Error::ImpossibleProjection(cells));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // integer-valued draws so the Phi projection is a rational-mean subtraction
        let mut re: Vec<i64> = (0..cells).map(|_| rng.gen_range(-8..=8)).collect();
        let mut im: Vec<i64> = (0..cells).map(|_| rng.gen_range(-8..=8)).collect();
        let start = if project_psi {
            re[0] = 0;
            im[0] = 0;
            1
        } else {
            0
        };
        let mut values: Vec<Complex64>;
        if project_phi {
            let count = BigInt::from((cells - start) as u64);
            let mean_re = BigRational::new(re[start..].iter().sum::<i64>().into(), count.clone());
            let mean_im = BigRational::new(im[start..].iter().sum::<i64>().into(), count);
            values = (0..cells)
                .map(|i| {
                    if i < start {
                        Complex64::zero()
                    } else {
                        let r = BigRational::from_integer(re[i].into()) - &mean_re;
                        let m = BigRational::from_integer(im[i].into()) - &mean_im;
                        Complex64::new(r.to_f64().unwrap(), m.to_f64().unwrap())
                    }
                })
                .collect();
            // second compensated sweep to push the floating-point mean to ~ulp
            let mut acc = CompensatedSum::new();
            for &v in &values[start..] {
                acc.add(v);
            }
            let residual = acc.value() / (cells - start) as f64;
            for v in &mut values[start..] {
                *v -= residual;
            }
        } else {
            values = re
                .iter()
                .zip(&im)
                .map(|(&r, &m)| Complex64::new(r as f64, m as f64))
                .collect();
        }
        TestFunction::new(grid, values)
    }

    pub fn to_json(&self) -> TestFunctionJson {
        TestFunctionJson {
            n: self.dim(),
            ball_exp: self.ball_exp(),
            constancy_exp: self.constancy_exp(),
            p: self.params().p(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn from_json(json: &TestFunctionJson) -> Result<TestFunction> {
        let params = FieldParams::new(json.p)?;
        let grid = CosetGrid::new(params, json.n, json.ball_exp, json.constancy_exp)?;
        TestFunction::new(
            grid,
            json.values.iter().map(|v| Complex64::new(v[0], v[1])).collect(),
        )
    }

    /// CSV with columns coset_repr, re, im in deterministic coset order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "coset_repr,re,im")?;
        for idx in 0..self.grid.cells() {
            let rep = self.grid.representative(idx);
            let v = self.values[idx];
            writeln!(w, "{},{:e},{:e}", rep.repr(), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Wire form: {n, N, l, p, values: [[re, im], ...]} in coset order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestFunctionJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub ball_exp: i64,
    #[serde(rename = "l")]
    pub constancy_exp: i64,
    pub p: u64,
    pub values: Vec<[f64; 2]>,
}
