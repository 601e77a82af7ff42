//! Plane waves, the wave equation D_t^alpha F = D_x^{alpha,n} F, the four
//! solution routes for the Cauchy problem, Huygens-type checks, the symbol
//! degeneracy measurement, and L_kappa norm reports.
//!
//! The verification strategy is deliberately redundant: every claim is
//! computed along at least two independent code paths (hypersingular sums vs
//! pushforward tails for the plane-wave identity; Radon, direct, spectral and convolution
//! routes for the Cauchy problem) and the agreement is what the tests assert.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{fourier, inverse_fourier};
use crate::local_field::{CosetGrid, FieldParams, PAdicRational, Point};
use crate::radon::radon_forward;
use crate::schwartz::{CompensatedSum, TestFunction};
use crate::vladimirov::{apply_d_alpha, kernel_sphere_integral, SampledField};

// ---------------------------------------------------------------------------
// plane waves
// ---------------------------------------------------------------------------

/// F(t, x) = f(t + omega . x) with ||omega|| = 1.
#[derive(Clone, Debug)]
pub struct PlaneWaveSpec {
    profile: TestFunction,
    omega: Point,
}

impl PlaneWaveSpec {
    pub fn new(profile: TestFunction, omega: Point) -> Result<Self> {
        if profile.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: profile.dim(),
            });
        }
        if omega.sup_norm_exponent() != Some(0) {
            return Err(Error::Config(format!(
                "plane wave direction must have unit norm, got ||omega|| = q^{:?}",
                omega.sup_norm_exponent()
            )));
        }
        Ok(PlaneWaveSpec { profile, omega })
    }

    pub fn profile(&self) -> &TestFunction {
        &self.profile
    }

    pub fn omega(&self) -> &Point {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn eval(&self, t: &PAdicRational, x: &Point) -> Complex64 {
        self.profile.evaluate_scalar(&(t + &self.omega.dot(x)))
    }
}

/// Exact evaluation of the plane wave at explicit (t, x) pairs.
pub fn plane_wave_eval(
    spec: &PlaneWaveSpec,
    points: &[(PAdicRational, Point)],
) -> SampledField {
    let mut pts = Vec::with_capacity(points.len());
    let mut values = Vec::with_capacity(points.len());
    for (t, x) in points {
        let mut coords = vec![t.clone()];
        coords.extend(x.coords().iter().cloned());
        pts.push(Point::new(coords));
        values.push(spec.eval(t, x));
    }
    SampledField {
        points: pts,
        values,
        operator: "plane_wave".into(),
        alpha: 0.0,
    }
}

/// int_{||y|| = q^k} g(omega . y) d^n y for a unit linear form: the pushforward
/// of Haar measure under y -> omega.y turns the sphere integral into
/// q^{(n-1)k} int_{|r| <= q^k} g - q^{(n-1)(k-1)} int_{|r| <= q^{k-1}} g.
pub fn sphere_pushforward_integral(
    g: &TestFunction,
    omega: &Point,
    radius_exp: i64,
) -> Result<Complex64> {
    if omega.sup_norm_exponent() != Some(0) {
        return Err(Error::Config("pushforward direction must be unit".into()));
    }
    let n = omega.dim() as i64;
    let q = g.params().qf();
    let zero = Point::zero(g.params(), 1);
    let outer = g.ball_integral_centered(&zero, radius_exp);
    let inner = g.ball_integral_centered(&zero, radius_exp - 1);
    Ok(outer * q.powi(((n - 1) * radius_exp) as i32)
        - inner * q.powi(((n - 1) * (radius_exp - 1)) as i32))
}

/// max over points of |D_t^alpha F - D_x^{alpha,n} F| for the plane wave.
/// The t-side uses the 1-D hypersingular sum on the profile; the x-side is an
/// independent n-D evaluation: brute coset sum in the near field, exact
/// pushforward sphere integrals in the middle, closed geometric tails beyond.
pub fn wave_residual(
    spec: &PlaneWaveSpec,
    alpha: f64,
    points: &[(PAdicRational, Point)],
) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let f = &spec.profile;
    let params = f.params();
    let q = params.qf();
    let n = spec.dim();
    let centers: Vec<PAdicRational> = points
        .iter()
        .map(|(t, x)| t + &spec.omega.dot(x))
        .collect();
    let lhs = apply_d_alpha(f, alpha, &centers)?;
    let prefactor = (1.0 - q.powf(alpha)) / (1.0 - q.powf(-alpha - n as f64));
    let n_f = f.ball_exp();
    let l_f = f.constancy_exp();
    let y_grid = CosetGrid::new(params, n, n_f, l_f)?;
    let i_f = f.integrate();
    let rhs: Vec<Complex64> = centers
        .par_iter()
        .map(|c| {
            let fc = f.evaluate_scalar(c);
            let mut acc = CompensatedSum::new();
            // near field ||y|| <= q^{N_f}: genuine n-D coset enumeration;
            // the 0-coset drops out by local constancy of f
            for idx in 1..y_grid.cells() {
                let k = y_grid
                    .norm_exponent_of_index(idx)
                    .expect("nonzero coset");
                let y = y_grid.representative(idx);
                let v = f.evaluate_scalar(&(c - &spec.omega.dot(&y))) - fc;
                if v.norm_sqr() != 0.0 {
                    acc.add(v * q.powf(-(k as f64) * (alpha + n as f64)));
                }
            }
            let mut total = acc.value() * y_grid.cell_volume();
            // middle spheres up to M0 = max(N_f, |c| exponent)
            let m0 = n_f.max(c.norm_exponent().unwrap_or(n_f));
            let c_pt = Point::scalar(c.clone());
            for k in (n_f + 1)..=m0 {
                // int_{||y||=q^k} f(c - omega.y) dy via the pushforward
                let outer = f.ball_integral_centered(&c_pt, k);
                let inner = f.ball_integral_centered(&c_pt, k - 1);
                let sk = outer * q.powi(((n as i64 - 1) * k) as i32)
                    - inner * q.powi(((n as i64 - 1) * (k - 1)) as i32);
                let sphere = kernel_sphere_integral(params, k, alpha, n);
                total += sk * q.powf(-(k as f64) * (alpha + n as f64)) - fc * sphere;
            }
            // closed tails for k >= M0 + 1, where the centered balls cover
            // the whole support of f
            let nn = n as f64;
            total += i_f * (1.0 - q.powf(1.0 - nn)) * q.powf(-((m0 + 1) as f64) * (alpha + 1.0))
                / (1.0 - q.powf(-(alpha + 1.0)));
            total -= fc * (1.0 - q.powf(-nn)) * q.powf(-((m0 + 1) as f64) * alpha)
                / (1.0 - q.powf(-alpha));
            total * prefactor
        })
        .collect();
    Ok(lhs
        .values
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// kernels of the representation formulas
// ---------------------------------------------------------------------------

/// The piecewise kernels b, b-tilde, A, B_t of the spectral and convolution
/// representations of the solution.
#[derive(Clone, Copy, Debug)]
pub struct CauchyKernels {
    params: FieldParams,
    n: usize,
}

impl CauchyKernels {
    pub fn new(params: FieldParams, n: usize) -> Self {
        CauchyKernels { params, n }
    }

    /// b(z): 1 on ||z|| <= 1, -1/(q-1) on ||z|| = q, 0 beyond.
    pub fn b(&self, norm_exp: Option<i64>) -> f64 {
        let q = self.params.qf();
        match norm_exp {
            None => 1.0,
            Some(k) if k <= 0 => 1.0,
            Some(1) => -1.0 / (q - 1.0),
            _ => 0.0,
        }
    }

    /// b~(zeta): (q-q^n)/(q-1) on ||zeta|| <= 1/q, q/(q-1) on ||zeta|| = 1,
    /// 0 beyond.
    pub fn b_tilde(&self, norm_exp: Option<i64>) -> f64 {
        let q = self.params.qf();
        let qn = q.powi(self.n as i32);
        match norm_exp {
            None => (q - qn) / (q - 1.0),
            Some(k) if k <= -1 => (q - qn) / (q - 1.0),
            Some(0) => q / (q - 1.0),
            _ => 0.0,
        }
    }

    /// The radial coefficient of A(x) = a_coeff * ||x||^{-1}.
    pub fn a_coeff(&self) -> f64 {
        let q = self.params.qf();
        (1.0 - q.powi(1 - self.n as i32)) / (1.0 - 1.0 / q)
    }

    /// ||B_t||_{L_1}, independent of t by substitution invariance.
    pub fn b_t_l1(&self) -> f64 {
        let q = self.params.qf();
        let qn = q.powi(self.n as i32);
        (qn - q) / (q - 1.0) / qn + q / (q - 1.0) * (1.0 - 1.0 / qn)
    }

    /// b as an exact n-D table on the grid (N = 1, l = 0).
    pub fn b_table(&self) -> TestFunction {
        let grid = CosetGrid::new(self.params, self.n, 1, 0).expect("span 1");
        TestFunction::from_fn(grid, |z| {
            Complex64::new(self.b(z.sup_norm_exponent()), 0.0)
        })
    }

    /// b~ as an exact n-D table on the dual grid (N = 0, l = 1).
    pub fn b_tilde_table(&self) -> TestFunction {
        let grid = CosetGrid::new(self.params, self.n, 0, 1).expect("span 1");
        TestFunction::from_fn(grid, |z| {
            Complex64::new(self.b_tilde(z.sup_norm_exponent()), 0.0)
        })
    }
}

// ---------------------------------------------------------------------------
// space-time fields
// ---------------------------------------------------------------------------

/// Values of a Cauchy solution on a 1-D t-grid times explicit x-targets.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    t_grid: CosetGrid,
    x_targets: Vec<Point>,
    /// t-major: values[ti * x_targets.len() + xi].
    values: Vec<Complex64>,
    route: String,
}

impl SpaceTimeField {
    pub fn new(
        t_grid: CosetGrid,
        x_targets: Vec<Point>,
        values: Vec<Complex64>,
        route: &str,
    ) -> Result<Self> {
        if t_grid.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: t_grid.dim(),
            });
        }
        if values.len() != t_grid.cells() * x_targets.len() {
            return Err(Error::DimensionMismatch {
                expected: t_grid.cells() * x_targets.len(),
                got: values.len(),
            });
        }
        Ok(SpaceTimeField {
            t_grid,
            x_targets,
            values,
            route: route.into(),
        })
    }

    pub fn t_grid(&self) -> &CosetGrid {
        &self.t_grid
    }

    pub fn x_targets(&self) -> &[Point] {
        &self.x_targets
    }

    pub fn route(&self) -> &str {
        &self.route
    }

    pub fn value(&self, t_idx: usize, x_idx: usize) -> Complex64 {
        self.values[t_idx * self.x_targets.len() + x_idx]
    }

    /// The t-section at one target as a 1-D TestFunction on the t-grid.
    pub fn t_profile(&self, x_idx: usize) -> TestFunction {
        let values = (0..self.t_grid.cells())
            .map(|ti| self.value(ti, x_idx))
            .collect();
        TestFunction::new(self.t_grid, values).expect("sized by construction")
    }

    /// Max spread of values across t-cells sharing |t|; zero iff radial in t.
    pub fn radial_in_t_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for xi in 0..self.x_targets.len() {
            for i in 0..self.t_grid.cells() {
                for j in (i + 1)..self.t_grid.cells() {
                    if self.t_grid.norm_exponent_of_index(i)
                        == self.t_grid.norm_exponent_of_index(j)
                    {
                        worst = worst.max((self.value(i, xi) - self.value(j, xi)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Max pointwise difference against another field on the same layout.
    pub fn max_diff(&self, other: &SpaceTimeField) -> Result<f64> {
        if self.t_grid != other.t_grid || self.x_targets != other.x_targets {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// CSV columns: t_repr, x_repr, re, im, route.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t_repr,x_repr,re,im,route")?;
        for ti in 0..self.t_grid.cells() {
            let t = self.t_grid.representative(ti);
            for (xi, x) in self.x_targets.iter().enumerate() {
                let v = self.value(ti, xi);
                writeln!(
                    w,
                    "{},{},{:e},{:e},{}",
                    t.repr(),
                    x.repr(),
                    v.re,
                    v.im,
                    self.route
                )?;
            }
        }
        Ok(())
    }
}

/// |F(0, x) - phi(x)| maximized over targets (the F1 initial condition).
pub fn initial_condition_residual(field: &SpaceTimeField, phi: &TestFunction) -> f64 {
    // cell 0 of the t-grid has representative t = 0 exactly
    field
        .x_targets
        .iter()
        .enumerate()
        .map(|(xi, x)| (field.value(0, xi) - phi.evaluate(x)).norm())
        .fold(0.0, f64::max)
}

/// |(D_t^{n-1} F)(0, x) - phi(x)| maximized over targets (the modified
/// initial condition satisfied by F2).  Requires the t-grid to cover the support of F in t.
pub fn modified_initial_condition_residual(
    field: &SpaceTimeField,
    phi: &TestFunction,
) -> Result<f64> {
    let n = phi.dim();
    if n == 1 {
        return Ok(initial_condition_residual(field, phi));
    }
    let zero = PAdicRational::zero(phi.params());
    let mut worst = 0.0f64;
    for (xi, x) in field.x_targets.iter().enumerate() {
        let profile = field.t_profile(xi);
        let d = apply_d_alpha(&profile, (n - 1) as f64, std::slice::from_ref(&zero))?;
        worst = worst.max((d.values[0] - phi.evaluate(x)).norm());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// the four Cauchy routes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CauchyVariant {
    F1,
    F2,
}

fn check_t_grid(t_grid: &CosetGrid) -> Result<()> {
    if t_grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: t_grid.dim(),
        });
    }
    Ok(())
}

/// Radon-slice route: F2(t,x) = (1-q^{-1})^{-1} int_{||u||=1} phi-check(u, t+u.x),
/// F1 with D_t^{n-1} applied to the slice first.
pub fn cauchy_radon(
    phi: &TestFunction,
    variant: CauchyVariant,
    t_grid: &CosetGrid,
    x_targets: &[Point],
) -> Result<SpaceTimeField> {
    check_t_grid(t_grid)?;
    let params = phi.params();
    let n = phi.dim();
    let q = params.qf();
    let e_max = x_targets
        .iter()
        .filter_map(|x| x.sup_norm_exponent())
        .max()
        .unwrap_or(phi.ball_exp());
    let m = (phi.ball_exp() + phi.constancy_exp()).max(phi.constancy_exp() + e_max);
    let table = radon_forward(phi, m)?;
    let t_reps: Vec<PAdicRational> = (0..t_grid.cells())
        .map(|i| t_grid.representative(i).coords()[0].clone())
        .collect();
    let cells = t_reps.len() * x_targets.len();
    // one contribution vector per eta, then a deterministic in-order reduction
    let contributions: Vec<Vec<Complex64>> = table
        .etas()
        .par_iter()
        .zip(table.slices().par_iter())
        .map(|(eta, slice)| -> Result<Vec<Complex64>> {
            let mut cs = Vec::with_capacity(cells);
            if n == 1 || variant == CauchyVariant::F2 {
                for t in &t_reps {
                    for x in x_targets {
                        cs.push(slice.evaluate_scalar(&(t + &eta.dot(x))));
                    }
                }
            } else {
                // (D_t^{n-1} Gamma)(t, x, eta) = (D^{n-1} slice)(t + eta.x)
                // by translation invariance of D^{n-1}
                let mut pts = Vec::with_capacity(cells);
                for t in &t_reps {
                    for x in x_targets {
                        pts.push(t + &eta.dot(x));
                    }
                }
                let d = apply_d_alpha(slice, (n - 1) as f64, &pts)?;
                cs = d.values;
            }
            Ok(cs)
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = table.eta_cell_volume() / (1.0 - 1.0 / q);
    let mut values = vec![Complex64::zero(); cells];
    for (i, v) in values.iter_mut().enumerate() {
        let mut acc = CompensatedSum::new();
        for c in &contributions {
            acc.add(c[i]);
        }
        *v = acc.value() * scale;
    }
    let route = match variant {
        CauchyVariant::F1 => "radon_f1",
        CauchyVariant::F2 => "radon_f2",
    };
    SpaceTimeField::new(*t_grid, x_targets.to_vec(), values, route)
}

/// int_{|s|=q^j} chi(-s t) ds: q^j (1 - 1/q) if |t| <= q^{-j},
/// -q^{j-1} if |t| = q^{-j+1}, 0 otherwise.
fn sphere_character_weight(params: FieldParams, j: i64, t_norm_exp: Option<i64>) -> f64 {
    let q = params.qf();
    match t_norm_exp {
        None => params.q_pow(j) * (1.0 - 1.0 / q),
        Some(k) if k <= -j => params.q_pow(j) * (1.0 - 1.0 / q),
        Some(k) if k == -j + 1 => -params.q_pow(j - 1),
        _ => 0.0,
    }
}

/// Direct route: F2 via the radial function R(s, x) built from ball and
/// sphere partial integrals of phi; exact at every t including t = 0.
pub fn cauchy_direct(
    phi: &TestFunction,
    t_grid: &CosetGrid,
    x_targets: &[Point],
) -> Result<SpaceTimeField> {
    check_t_grid(t_grid)?;
    let params = phi.params();
    let n = phi.dim();
    let q = params.qf();
    let i_phi = phi.integrate();
    let l_phi = phi.constancy_exp();
    let t_exps: Vec<Option<i64>> = (0..t_grid.cells())
        .map(|i| t_grid.norm_exponent_of_index(i))
        .collect();
    let nx = x_targets.len();
    let mut values = vec![Complex64::zero(); t_grid.cells() * nx];
    let per_target: Vec<Vec<Complex64>> = x_targets
        .par_iter()
        .map(|x| {
            let j_star = phi.ball_exp().max(x.sup_norm_exponent().unwrap_or(phi.ball_exp()));
            // R on the sphere |s| = q^j; identically zero above j = l_phi
            let r_j: Vec<Complex64> = ((1 - j_star)..=l_phi)
                .map(|j| {
                    phi.ball_integral_centered(x, -j)
                        - phi.ball_integral_centered(x, 1 - j) * q.powi(-(n as i32))
                })
                .collect();
            let mut col = Vec::with_capacity(t_exps.len());
            for t_exp in &t_exps {
                let mut acc = CompensatedSum::new();
                // closure over the ball |s| <= q^{-J*}, where R is constant
                if t_exp.map_or(true, |k| k <= j_star) {
                    acc.add(
                        i_phi
                            * (1.0 - q.powi(-(n as i32)))
                            * params.q_pow(-j_star),
                    );
                }
                for (idx, j) in ((1 - j_star)..=l_phi).enumerate() {
                    let w = sphere_character_weight(params, j, *t_exp);
                    if w != 0.0 {
                        acc.add(r_j[idx] * w);
                    }
                }
                col.push(acc.value() / (1.0 - 1.0 / q));
            }
            col
        })
        .collect();
    for (xi, col) in per_target.iter().enumerate() {
        for (ti, v) in col.iter().enumerate() {
            values[ti * nx + xi] = *v;
        }
    }
    SpaceTimeField::new(*t_grid, x_targets.to_vec(), values, "direct")
}

/// The full spatial tables of the spectral route, one per t-cell:
/// F2~(t, xi) = ||xi||^{1-n} b(t xi) phi~(xi), inverse-transformed per t.
pub fn cauchy_spectral_tables(
    phi: &TestFunction,
    t_grid: &CosetGrid,
) -> Result<Vec<TestFunction>> {
    check_t_grid(t_grid)?;
    let mean = phi.integrate().norm();
    if mean > 1e-10 {
        return Err(Error::NotLizorkinPhi(mean));
    }
    let n = phi.dim();
    let params = phi.params();
    let q = params.qf();
    let kernels = CauchyKernels::new(params, n);
    let phi_hat = fourier(phi);
    let dual = *phi_hat.grid();
    (0..t_grid.cells())
        .into_par_iter()
        .map(|ti| {
            let k_t = t_grid.norm_exponent_of_index(ti);
            let g_t = phi_hat.map_indexed(|idx, v| match dual.norm_exponent_of_index(idx) {
                // phi in Phi: the 0 cell of phi~ vanishes, and so must F2~
                None => Complex64::zero(),
                Some(k_xi) => {
                    let b = kernels.b(k_t.map(|k| k + k_xi));
                    v * q.powf((1.0 - n as f64) * k_xi as f64) * b
                }
            });
            Ok(inverse_fourier(&g_t))
        })
        .collect()
}

/// Spectral-multiplier route sampled at explicit targets.
pub fn cauchy_spectral(
    phi: &TestFunction,
    t_grid: &CosetGrid,
    x_targets: &[Point],
) -> Result<SpaceTimeField> {
    let tables = cauchy_spectral_tables(phi, t_grid)?;
    let nx = x_targets.len();
    let mut values = vec![Complex64::zero(); tables.len() * nx];
    for (ti, table) in tables.iter().enumerate() {
        for (xi, x) in x_targets.iter().enumerate() {
            values[ti * nx + xi] = table.evaluate(x);
        }
    }
    SpaceTimeField::new(*t_grid, x_targets.to_vec(), values, "spectral")
}

/// B_t * phi for t != 0, as an exact finite convolution.  The output picks up
/// the smoothing of B_t: constancy exponent min(l_phi, 1 - k_t).
pub fn b_t_convolve(phi: &TestFunction, t: &PAdicRational) -> Result<TestFunction> {
    let params = phi.params();
    let n = phi.dim();
    let kernels = CauchyKernels::new(params, n);
    let k_t = t
        .norm_exponent()
        .ok_or_else(|| Error::Config("B_t is undefined at t = 0".into()))?;
    let n_h = phi.ball_exp().max(k_t);
    let l_h = phi.constancy_exp().min(1 - k_t);
    let out_grid = CosetGrid::new(params, n, n_h, l_h)?;
    // integration grid over ||y|| <= |t| at the joint resolution
    let l_y = phi.constancy_exp().max(1 - k_t);
    let y_grid = CosetGrid::new(params, n, k_t, l_y)?;
    let bt_scale = params.q_pow(-(n as i64) * k_t);
    // B_t(y) per ||y||: branch of b~ at ||y|| / |t|
    let weights: Vec<(Point, f64)> = (0..y_grid.cells())
        .map(|idx| {
            let e_y = y_grid.norm_exponent_of_index(idx);
            let w = kernels.b_tilde(e_y.map(|e| e - k_t)) * bt_scale;
            (y_grid.representative(idx), w)
        })
        .filter(|(_, w)| *w != 0.0)
        .collect();
    let vol = y_grid.cell_volume();
    let values: Vec<Complex64> = (0..out_grid.cells())
        .into_par_iter()
        .map(|idx| {
            let x = out_grid.representative(idx);
            let mut acc = CompensatedSum::new();
            for (y, w) in &weights {
                let v = phi.evaluate(&x.sub(y));
                if v.norm_sqr() != 0.0 {
                    acc.add(v * *w);
                }
            }
            acc.value() * vol
        })
        .collect();
    TestFunction::new(out_grid, values)
}

/// (A * h)(x) for compactly supported h: finite coset sum over the nonzero
/// norms plus the exact closed form of the integrable singularity at 0.
fn a_convolve_at(h: &TestFunction, kernels: &CauchyKernels, x: &Point) -> Complex64 {
    let params = h.params();
    let n = h.dim();
    let q = params.qf();
    let l_h = h.constancy_exp();
    let m = h.ball_exp().max(x.sup_norm_exponent().unwrap_or(h.ball_exp()));
    let grid = CosetGrid::new(params, n, m, l_h).expect("convolution grid");
    let mut acc = CompensatedSum::new();
    for idx in 1..grid.cells() {
        let e_y = grid.norm_exponent_of_index(idx).expect("nonzero coset");
        let y = grid.representative(idx);
        let v = h.evaluate(&x.sub(&y));
        if v.norm_sqr() != 0.0 {
            acc.add(v * params.q_pow(-e_y));
        }
    }
    let mut total = acc.value() * grid.cell_volume();
    // 0-coset: int_{||y|| <= q^{-l}} ||y||^{-1} dy, exact geometric series
    let nn = n as i32;
    total += h.evaluate(x) * (1.0 - q.powi(-nn)) * q.powi(-(l_h as i32) * (nn - 1))
        / (1.0 - q.powi(1 - nn));
    total * kernels.a_coeff()
}

/// Convolution route: F2 = A * (B_t * phi).  The t = 0 cell is filled from
/// the smallest admissible |t| (F2 is locally constant in t there).
pub fn cauchy_convolution(
    phi: &TestFunction,
    t_grid: &CosetGrid,
    x_targets: &[Point],
) -> Result<SpaceTimeField> {
    check_t_grid(t_grid)?;
    let n = phi.dim();
    if n < 2 {
        return Err(Error::Unsupported(
            "the A * B_t * phi factorization needs n >= 2".into(),
        ));
    }
    let mean = phi.integrate().norm();
    if mean > 1e-10 {
        return Err(Error::NotLizorkinPhi(mean));
    }
    let params = phi.params();
    let kernels = CauchyKernels::new(params, n);
    let nx = x_targets.len();
    let per_t: Vec<Vec<Complex64>> = (0..t_grid.cells())
        .into_par_iter()
        .map(|ti| -> Result<Vec<Complex64>> {
            let t = t_grid.representative(ti).coords()[0].clone();
            let t_eff = if t.is_zero() {
                // any |t| <= q^{-l_phi} yields the same field values
                PAdicRational::from_parts(
                    params,
                    BigInt::one(),
                    t_grid.constancy_exp().max(phi.constancy_exp()),
                )
            } else {
                t
            };
            let h = b_t_convolve(phi, &t_eff)?;
            Ok(x_targets
                .iter()
                .map(|x| a_convolve_at(&h, &kernels, x))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![Complex64::zero(); t_grid.cells() * nx];
    for (ti, row) in per_t.iter().enumerate() {
        values[ti * nx..(ti + 1) * nx].copy_from_slice(row);
    }
    SpaceTimeField::new(*t_grid, x_targets.to_vec(), values, "convolution")
}

// ---------------------------------------------------------------------------
// Huygens, degeneracy, norms
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct HuygensReport {
    /// max |F2| over |t| > q^{N+1}, ||x|| <= q^N.
    pub edge_max: f64,
    /// Exponent r of the verified t-constancy radius q^r.
    pub constancy_radius_exp: i64,
    /// max |F2| near t = 0 at targets outside the support of phi.
    pub dependence_leak: f64,
}

/// Sharp-edge and t-constancy checks on a field produced by any F2 route.
pub fn huygens_check(phi: &TestFunction, field: &SpaceTimeField) -> HuygensReport {
    let n_phi = phi.ball_exp();
    let nu = phi.constancy_exp();
    let t_grid = field.t_grid();
    let mut edge_max = 0.0f64;
    let mut dependence_leak = 0.0f64;
    for (xi, x) in field.x_targets().iter().enumerate() {
        let e_x = x.sup_norm_exponent();
        let inside = e_x.map_or(true, |e| e <= n_phi);
        for ti in 0..t_grid.cells() {
            let k_t = t_grid.norm_exponent_of_index(ti);
            if inside && k_t.map_or(false, |k| k > n_phi + 1) {
                edge_max = edge_max.max(field.value(ti, xi).norm());
            }
            // finite-domain-of-dependence counterpart: zero outside supp phi
            // for |t| <= q^{-nu}
            if !inside && k_t.map_or(true, |k| k <= -nu) {
                dependence_leak = dependence_leak.max(field.value(ti, xi).norm());
            }
        }
    }
    // smallest resolution at which grouping t by coset leaves values constant
    let mut constancy_radius_exp = -t_grid.constancy_exp();
    for nu_try in (-t_grid.ball_exp()..=t_grid.constancy_exp()).rev() {
        let mut ok = true;
        'outer: for xi in 0..field.x_targets().len() {
            for i in 0..t_grid.cells() {
                for j in (i + 1)..t_grid.cells() {
                    let a = t_grid.representative(i).coords()[0]
                        .residue_index(t_grid.ball_exp(), nu_try);
                    let b = t_grid.representative(j).coords()[0]
                        .residue_index(t_grid.ball_exp(), nu_try);
                    if a == b && (field.value(i, xi) - field.value(j, xi)).norm() > 1e-10 {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            constancy_radius_exp = -nu_try;
        } else {
            break;
        }
    }
    HuygensReport {
        edge_max,
        constancy_radius_exp,
        dependence_leak,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyReport {
    /// Haar fraction of B_N x B_N^n where |tau| = ||xi||, exact.
    pub fraction: String,
    pub fraction_f64: f64,
    /// (1 - q^{-1})(1 - q^{-n}) / (1 - q^{-n-1}), the closed form.
    pub closed_form: String,
    pub exact_match: bool,
}

/// Exact measure of the set where the symbol |tau|^alpha - ||xi||^alpha
/// vanishes; alpha > 0 does not change the set, so the count is purely
/// combinatorial.  The (0, 0) cell is resolved by exact self-similarity.
pub fn symbol_degeneracy(
    params: FieldParams,
    n: usize,
    ball_exp: i64,
    constancy_exp: i64,
) -> Result<DegeneracyReport> {
    let span = ball_exp + constancy_exp;
    if span < 1 {
        return Err(Error::InvalidGrid(span));
    }
    let q = BigRational::from_integer(BigInt::from(params.p()));
    let qi = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(BigInt::from(params.p()).pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(params.p()).pow((-k) as u32))
        }
    };
    let one = BigRational::one();
    // matched measure over norms q^e, e from N down to 1-l, as a fraction of
    // the total measure of B_N^{1+n}
    let mut matched = BigRational::zero();
    for e in (1 - constancy_exp)..=ball_exp {
        let t_e = (&one - qi(-1)) * qi(e - ball_exp); // 1-D cells at |tau| = q^e
        let s_e = (&one - qi(-(n as i64))) * qi((n as i64) * (e - ball_exp));
        matched += t_e * s_e;
    }
    let f0 = qi(-(1 + n as i64) * span);
    let fraction = matched / (&one - &f0);
    let closed = (&one - qi(-1)) * (&one - qi(-(n as i64)))
        / (&one - qi(-(n as i64) - 1));
    let _ = q;
    Ok(DegeneracyReport {
        fraction: fraction.to_string(),
        fraction_f64: fraction.to_f64().unwrap_or(f64::NAN),
        closed_form: closed.to_string(),
        exact_match: fraction == closed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NormRow {
    pub t_repr: String,
    pub kappa: f64,
    pub lambda: Option<f64>,
    /// ||F1(t,.)||_kappa / ||phi||_kappa.
    pub f1_ratio: f64,
    /// ||F2(t,.)||_lambda / ||phi||_kappa (n >= 2 only).
    pub f2_ratio: Option<f64>,
    pub b_t_l1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub rows: Vec<NormRow>,
}

/// Per-t norm ratios of the kernel mapping estimates.  The constants are not
/// specified by theory; ratios are reported, never thresholded here.
pub fn norm_report(
    phi: &TestFunction,
    t_grid: &CosetGrid,
    kappas: &[f64],
) -> Result<NormReport> {
    check_t_grid(t_grid)?;
    let n = phi.dim();
    let kernels = CauchyKernels::new(phi.params(), n);
    let f2_admissible = |kappa: f64| -> Result<Option<f64>> {
        if n == 1 {
            return Ok(None); // kappa = lambda degenerate case: F1 row only
        }
        let upper = n as f64 / (n as f64 - 1.0);
        if kappa <= 1.0 || kappa >= upper {
            return Err(Error::InvalidKappa(
                kappa,
                format!("(1, {upper}) for the F2 row at n = {n}"),
            ));
        }
        Ok(Some(n as f64 * kappa / (n as f64 - kappa * (n as f64 - 1.0))))
    };
    let spectral = if n >= 2 {
        Some(cauchy_spectral_tables(phi, t_grid)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for &kappa in kappas {
        let lambda = f2_admissible(kappa)?;
        let phi_norm = phi.lkappa_norm(kappa)?;
        for ti in 0..t_grid.cells() {
            let t = t_grid.representative(ti).coords()[0].clone();
            if t.is_zero() {
                continue; // B_t is defined for t != 0
            }
            let f1 = b_t_convolve(phi, &t)?;
            let f1_ratio = f1.lkappa_norm(kappa)? / phi_norm;
            let f2_ratio = match (&spectral, lambda) {
                (Some(tables), Some(lam)) => Some(tables[ti].lkappa_norm(lam)? / phi_norm),
                _ => None,
            };
            rows.push(NormRow {
                t_repr: t.to_string(),
                kappa,
                lambda,
                f1_ratio,
                f2_ratio,
                b_t_l1: kernels.b_t_l1(),
            });
        }
    }
    Ok(NormReport { rows })
}

/// int_{||u||=1} chi(s (u . z)) d^n u: 1 - q^{-n} if |s| ||z|| <= 1,
/// -q^{-n} if |s| ||z|| = q, 0 beyond.
pub fn sphere_character_sum(
    params: FieldParams,
    n: usize,
    s: &PAdicRational,
    z: &Point,
) -> f64 {
    let qn = params.q_pow(-(n as i64));
    let prod = match (s.norm_exponent(), z.sup_norm_exponent()) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    match prod {
        None => 1.0 - qn,
        Some(k) if k <= 0 => 1.0 - qn,
        Some(1) => -qn,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::enumerate_sphere;
    use crate::vladimirov::apply_d_alpha_n;

    fn qp(p: u64) -> FieldParams {
        FieldParams::new(p).unwrap()
    }

    fn pad(p: u64, num: i64, den: i64) -> PAdicRational {
        PAdicRational::from_rational(
            qp(p),
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    fn unit_omega(p: u64, n: usize) -> Point {
        // (1, 1/p * p, ...) variants: first coordinate a unit, rest inside O
        let params = qp(p);
        let mut coords = vec![PAdicRational::one(params)];
        for j in 1..n {
            coords.push(PAdicRational::from_integer(params, j as i64));
        }
        Point::new(coords)
    }

    fn spacetime_points(p: u64, n: usize, count: usize, seed: u64) -> Vec<(PAdicRational, Point)> {
        use rand::Rng;
        use rand::SeedableRng;
        let params = qp(p);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..count)
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
            .collect()
    }

    #[test]
    fn plane_wave_examples() {
        // f = 1_O, n=1, omega=1, (t,x) = (1/2, 1/2), p=2 -> f(1) = 1
        let f = TestFunction::indicator_ball(qp(2), 1, 0, 0).unwrap();
        let spec = PlaneWaveSpec::new(f.clone(), Point::scalar(PAdicRational::one(qp(2)))).unwrap();
        let v = spec.eval(&pad(2, 1, 2), &Point::scalar(pad(2, 1, 2)));
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // n=2, omega=(1,1), (t,x) = (0,(1/2,1/2)) -> f(1) = 1
        let omega = Point::new(vec![PAdicRational::one(qp(2)), PAdicRational::one(qp(2))]);
        let spec = PlaneWaveSpec::new(f, omega).unwrap();
        let v = spec.eval(
            &PAdicRational::zero(qp(2)),
            &Point::new(vec![pad(2, 1, 2), pad(2, 1, 2)]),
        );
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // rejects non-unit direction
        let bad = Point::new(vec![pad(2, 1, 2), PAdicRational::one(qp(2))]);
        let f2 = TestFunction::indicator_ball(qp(2), 1, 0, 0).unwrap();
        assert!(PlaneWaveSpec::new(f2, bad).is_err());
    }

    #[test]
    fn plane_wave_constancy() {
        let f = TestFunction::random(qp(3), 3, 1, 1, 1, false, false).unwrap();
        let spec = PlaneWaveSpec::new(f, unit_omega(3, 2)).unwrap();
        // shifting x inside the constancy coset of the argument
        let x = Point::new(vec![pad(3, 1, 3), pad(3, 2, 1)]);
        let x2 = Point::new(vec![&x.coords()[0] + &pad(3, 9, 1), x.coords()[1].clone()]);
        let t = pad(3, 1, 3);
        assert_eq!(spec.eval(&t, &x), spec.eval(&t, &x2));
    }

    #[test]
    fn pushforward_examples() {
        // constant profile -> sphere measure q^{nk} (1 - q^{-n})
        let g = TestFunction::indicator_ball(qp(3), 1, 2, 0).unwrap();
        let omega = unit_omega(3, 2);
        let v = sphere_pushforward_integral(&g, &omega, 1).unwrap();
        let expect = 3f64.powi(2) * (1.0 - 3f64.powi(-2));
        assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12);

        // g = 1_O, k=1, n=2, p=2 -> 2*1 - 1*1 = 1
        let g = TestFunction::indicator_ball(qp(2), 1, 0, 0).unwrap();
        let v = sphere_pushforward_integral(&g, &unit_omega(2, 2), 1).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pushforward_matches_brute_sum() {
        let g = TestFunction::random(qp(2), 8, 1, 1, 1, false, false).unwrap();
        let omega = Point::new(vec![PAdicRational::one(qp(2)), pad(2, 1, 1).clone()]);
        for k in -1..=2 {
            let fast = sphere_pushforward_integral(&g, &omega, k).unwrap();
            // brute: enumerate the 2-D sphere at high resolution
            let l = (g.constancy_exp() - 0).max(1 - k) + 1;
            let reps = enumerate_sphere(qp(2), 2, k, l).unwrap();
            let mut acc = CompensatedSum::new();
            for y in &reps {
                acc.add(g.evaluate_scalar(&omega.dot(y)));
            }
            let brute = acc.value() * qp(2).q_pow(-2 * l);
            assert!((fast - brute).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn pushforward_linear_in_g() {
        let a = TestFunction::random(qp(3), 1, 1, 1, 1, false, false).unwrap();
        let b = TestFunction::random(qp(3), 2, 1, 1, 1, false, false).unwrap();
        let omega = unit_omega(3, 3);
        let va = sphere_pushforward_integral(&a, &omega, 2).unwrap();
        let vb = sphere_pushforward_integral(&b, &omega, 2).unwrap();
        let vs = sphere_pushforward_integral(&a.add(&b).unwrap(), &omega, 2).unwrap();
        assert!((vs - va - vb).norm() < 1e-12);
    }

    #[test]
    fn wave_equation_symmetric_case() {
        // n=1, omega=1: t and x play symmetric roles
        let f = TestFunction::indicator_ball(qp(2), 1, 0, 0).unwrap();
        let spec = PlaneWaveSpec::new(f, Point::scalar(PAdicRational::one(qp(2)))).unwrap();
        let pts = spacetime_points(2, 1, 10, 1);
        assert!(wave_residual(&spec, 1.0, &pts).unwrap() < 1e-12);
    }

    #[test]
    fn wave_equation_n2() {
        let f = TestFunction::random(qp(2), 14, 1, 1, 1, false, false).unwrap();
        let omega = Point::new(vec![PAdicRational::one(qp(2)), PAdicRational::one(qp(2))]);
        let spec = PlaneWaveSpec::new(f, omega).unwrap();
        let pts = spacetime_points(2, 2, 30, 2);
        assert!(wave_residual(&spec, 1.0, &pts).unwrap() < 1e-9);
    }

    #[test]
    fn wave_equation_n3_fractional() {
        let f = TestFunction::random(qp(3), 15, 1, 1, 1, false, false).unwrap();
        // |omega_2| < 1, |omega_3| < 1
        let omega = Point::new(vec![
            PAdicRational::one(qp(3)),
            PAdicRational::from_parts(qp(3), BigInt::from(1), 1),
            PAdicRational::from_parts(qp(3), BigInt::from(2), 1),
        ]);
        let spec = PlaneWaveSpec::new(f, omega).unwrap();
        let pts = spacetime_points(3, 3, 12, 3);
        assert!(wave_residual(&spec, 0.5, &pts).unwrap() < 1e-9);
    }

    #[test]
    fn wave_equation_rejects_bad_alpha() {
        let f = TestFunction::indicator_ball(qp(2), 1, 0, 0).unwrap();
        let spec = PlaneWaveSpec::new(f, Point::scalar(PAdicRational::one(qp(2)))).unwrap();
        assert!(wave_residual(&spec, -1.0, &[]).is_err());
    }

    #[test]
    fn wave_equation_integer_order() {
        // alpha = 2 exercises the n = alpha coincidence in the prefactor
        let f = TestFunction::random(qp(3), 22, 1, 1, 1, false, false).unwrap();
        let spec = PlaneWaveSpec::new(f, unit_omega(3, 2)).unwrap();
        let pts = spacetime_points(3, 2, 12, 5);
        assert!(wave_residual(&spec, 2.0, &pts).unwrap() < 1e-9);
    }

    #[test]
    fn hypersingular_translation_invariance() {
        // the route used inside cauchy_radon for F1: (D^a h)(0) with
        // h(s) = g(s + c) equals (D^a g)(c)
        let g = TestFunction::random(qp(2), 22, 1, 1, 2, false, false).unwrap();
        // |c| <= q^{N_g} keeps the translate inside the same grid
        let c = pad(2, 1, 2);
        let grid = *g.grid();
        let shifted = TestFunction::from_fn(grid, |s| {
            g.evaluate_scalar(&(&s.coords()[0] + &c))
        });
        let zero = Point::zero(qp(2), 1);
        let at_zero = apply_d_alpha_n(&shifted, 1.0, std::slice::from_ref(&zero)).unwrap();
        let direct = apply_d_alpha(&g, 1.0, &[c]).unwrap();
        assert!((at_zero.values[0] - direct.values[0]).norm() < 1e-11);
    }

    #[test]
    fn kernel_values_and_duality() {
        // b on ||z|| = q at p=3 -> -1/2
        let k3 = CauchyKernels::new(qp(3), 2);
        assert!((k3.b(Some(1)) + 0.5).abs() < 1e-15);
        // b~ at q=3, n=2, ||zeta|| = 1 -> 3/2
        assert!((k3.b_tilde(Some(0)) - 1.5).abs() < 1e-15);
        // A coefficient is 1 at n=2, q=2
        let k2 = CauchyKernels::new(qp(2), 2);
        assert!((k2.a_coeff() - 1.0).abs() < 1e-15);
        // b and b~ are an exact Fourier pair
        for (p, n) in [(2u64, 2usize), (3, 2), (2, 3)] {
            let k = CauchyKernels::new(qp(p), n);
            let hat = fourier(&k.b_table());
            assert!(hat.max_diff(&k.b_tilde_table()) < 1e-11, "p={p} n={n}");
        }
        // ||B_t||_1 equals the integral of |b~|
        let k = CauchyKernels::new(qp(3), 2);
        let brute: f64 = k
            .b_tilde_table()
            .lkappa_norm(1.0)
            .unwrap();
        assert!((k.b_t_l1() - brute).abs() < 1e-12);
    }

    #[test]
    fn sphere_character_sum_formula() {
        // brute check over unit-sphere cosets
        let params = qp(3);
        let n = 2;
        for (s, z, expect_kind) in [
            (pad(3, 1, 1), Point::new(vec![pad(3, 2, 1), pad(3, 3, 1)]), 0),
            (pad(3, 1, 3), Point::new(vec![pad(3, 1, 1), pad(3, 1, 1)]), 1),
            (pad(3, 1, 9), Point::new(vec![pad(3, 1, 1), pad(3, 0, 1)]), 2),
        ] {
            let closed = sphere_character_sum(params, n, &s, &z);
            match expect_kind {
                0 => assert!((closed - (1.0 - 1.0 / 9.0)).abs() < 1e-15),
                1 => assert!((closed + 1.0 / 9.0).abs() < 1e-15),
                _ => assert_eq!(closed, 0.0),
            }
            // brute: resolve u finely enough for chi(s (u.z)) constancy
            let l = (s.norm_exponent().unwrap() + z.sup_norm_exponent().unwrap()).max(1);
            let us = enumerate_sphere(params, n, 0, l).unwrap();
            let mut acc = CompensatedSum::new();
            for u in &us {
                acc.add((&s * &u.dot(&z)).character());
            }
            let brute = acc.value() * params.q_pow(-(n as i64) * l);
            assert!((brute - Complex64::new(closed, 0.0)).norm() < 1e-12);
        }
        // p=2, n=2, |s| ||z|| = 2 -> -1/4
        let v = sphere_character_sum(qp(2), 2, &pad(2, 1, 2), &unit_omega(2, 2));
        assert!((v + 0.25).abs() < 1e-15);
    }

    fn phi_targets(p: u64, n: usize) -> Vec<Point> {
        let params = qp(p);
        let mut targets = vec![Point::zero(params, n)];
        for e in [-1i64, 0, 1] {
            let mut coords = vec![PAdicRational::from_parts(params, BigInt::one(), -e)];
            coords.resize(n, PAdicRational::from_integer(params, 1));
            targets.push(Point::new(coords));
        }
        targets
    }

    #[test]
    fn routes_agree_and_satisfy_conditions() {
        for p in [2u64, 3] {
            let params = qp(p);
            let phi = TestFunction::random(params, 70 + p, 2, 1, 1, true, false).unwrap();
            let t_grid = CosetGrid::new(params, 1, 3, 1).unwrap();
            let targets = phi_targets(p, 2);
            let f2_radon = cauchy_radon(&phi, CauchyVariant::F2, &t_grid, &targets).unwrap();
            let f2_direct = cauchy_direct(&phi, &t_grid, &targets).unwrap();
            let f2_spectral = cauchy_spectral(&phi, &t_grid, &targets).unwrap();
            let f2_conv = cauchy_convolution(&phi, &t_grid, &targets).unwrap();
            assert!(f2_radon.max_diff(&f2_direct).unwrap() < 1e-8, "p={p} direct");
            assert!(f2_radon.max_diff(&f2_spectral).unwrap() < 1e-8, "p={p} spectral");
            assert!(f2_radon.max_diff(&f2_conv).unwrap() < 1e-8, "p={p} conv");

            // initial conditions
            let f1 = cauchy_radon(&phi, CauchyVariant::F1, &t_grid, &targets).unwrap();
            assert!(initial_condition_residual(&f1, &phi) < 1e-9, "p={p} IC");
            assert!(
                modified_initial_condition_residual(&f2_radon, &phi).unwrap() < 1e-9,
                "p={p} modified IC"
            );

            // radial in t
            for f in [&f2_radon, &f2_direct, &f2_spectral, &f2_conv, &f1] {
                assert!(f.radial_in_t_error() < 1e-10, "p={p} route {}", f.route());
            }
        }
    }

    #[test]
    fn radon_and_direct_agree_without_phi_projection() {
        // these two routes do not require zero mean
        let phi = TestFunction::random(qp(2), 33, 2, 1, 1, false, false).unwrap();
        let t_grid = CosetGrid::new(qp(2), 1, 2, 1).unwrap();
        let targets = phi_targets(2, 2);
        let a = cauchy_radon(&phi, CauchyVariant::F2, &t_grid, &targets).unwrap();
        let b = cauchy_direct(&phi, &t_grid, &targets).unwrap();
        assert!(a.max_diff(&b).unwrap() < 1e-8);
    }

    #[test]
    fn variants_coincide_for_n1() {
        let phi = TestFunction::random(qp(3), 44, 1, 1, 1, false, false).unwrap();
        let t_grid = CosetGrid::new(qp(3), 1, 2, 1).unwrap();
        let targets = phi_targets(3, 1);
        let f1 = cauchy_radon(&phi, CauchyVariant::F1, &t_grid, &targets).unwrap();
        let f2 = cauchy_radon(&phi, CauchyVariant::F2, &t_grid, &targets).unwrap();
        assert!(f1.max_diff(&f2).unwrap() < 1e-14);
        assert!(initial_condition_residual(&f1, &phi) < 1e-9);
    }

    #[test]
    fn spectral_rejects_outside_phi_and_convolution_rejects_n1() {
        let phi = TestFunction::indicator_ball(qp(2), 2, 0, 1).unwrap();
        let t_grid = CosetGrid::new(qp(2), 1, 1, 1).unwrap();
        assert!(matches!(
            cauchy_spectral_tables(&phi, &t_grid),
            Err(Error::NotLizorkinPhi(_))
        ));
        let phi1 = TestFunction::random(qp(2), 1, 1, 1, 1, true, false).unwrap();
        assert!(cauchy_convolution(&phi1, &t_grid, &phi_targets(2, 1)).is_err());
    }

    #[test]
    fn spectral_tables_have_zero_mean() {
        // F2~(t, 0-cell) = 0, so every spatial table of F2 lies in Phi
        let phi = TestFunction::random(qp(3), 77, 2, 1, 1, true, false).unwrap();
        let t_grid = CosetGrid::new(qp(3), 1, 2, 1).unwrap();
        for table in cauchy_spectral_tables(&phi, &t_grid).unwrap() {
            assert!(table.integrate().norm() < 1e-12);
        }
    }

    #[test]
    fn huygens_report() {
        // p=2, n=2, phi a zero-mean perturbation supported in O^2 (N=0, nu=1)
        let params = qp(2);
        let phi = TestFunction::random(params, 50, 2, 0, 1, true, false).unwrap();
        let t_grid = CosetGrid::new(params, 1, 3, 1).unwrap();
        let mut targets = phi_targets(2, 2);
        targets.push(Point::new(vec![pad(2, 1, 4), pad(2, 0, 1)])); // outside supp
        let f2 = cauchy_direct(&phi, &t_grid, &targets).unwrap();
        let report = huygens_check(&phi, &f2);
        assert!(report.edge_max < 1e-10, "edge {}", report.edge_max);
        // guaranteed constancy radius q^{-nu} with nu = 1
        assert!(report.constancy_radius_exp >= -1);
        assert!(report.dependence_leak < 1e-10);
    }

    #[test]
    fn degeneracy_closed_form() {
        // p=2, n=1 -> 1/3 exactly
        let r = symbol_degeneracy(qp(2), 1, 0, 3).unwrap();
        assert_eq!(r.fraction, "1/3");
        assert!(r.exact_match);
        // strictly positive for various p, n, and independent of the window
        for (p, n, big_n, l) in [(2u64, 1usize, 0i64, 2i64), (3, 2, 1, 3), (5, 3, 0, 2)] {
            let r = symbol_degeneracy(qp(p), n, big_n, l).unwrap();
            assert!(r.fraction_f64 > 0.0);
            assert!(r.exact_match, "p={p} n={n}");
        }
    }

    #[test]
    fn degeneracy_matches_brute_count() {
        // p=3, n=2: count matched cells over B_0^3 at l=3 and add the exact
        // self-similar correction
        let params = qp(3);
        let (big_n, l) = (0i64, 3i64);
        let tau_grid = CosetGrid::new(params, 1, big_n, l).unwrap();
        let xi_grid = CosetGrid::new(params, 2, big_n, l).unwrap();
        let mut matched = 0u64;
        for i in 0..tau_grid.cells() {
            for j in 0..xi_grid.cells() {
                if let (Some(a), Some(b)) = (
                    tau_grid.norm_exponent_of_index(i),
                    xi_grid.norm_exponent_of_index(j),
                ) {
                    if a == b {
                        matched += 1;
                    }
                }
            }
        }
        let total = (tau_grid.cells() * xi_grid.cells()) as f64;
        let f0 = 1.0 / total;
        let brute = matched as f64 / total / (1.0 - f0);
        let r = symbol_degeneracy(params, 2, big_n, l).unwrap();
        assert!((brute - r.fraction_f64).abs() < 1e-12);
    }

    #[test]
    fn norm_report_bounded_and_stable() {
        let params = qp(2);
        let t_grid = CosetGrid::new(params, 1, 2, 1).unwrap();
        for seed in 0..5u64 {
            let phi = TestFunction::random(params, 60 + seed, 2, 1, 1, true, false).unwrap();
            let report = norm_report(&phi, &t_grid, &[1.5]).unwrap();
            assert!(!report.rows.is_empty());
            for row in &report.rows {
                // Young: ||B_t * phi||_kappa <= ||B_t||_1 ||phi||_kappa
                assert!(row.f1_ratio.is_finite());
                assert!(row.f1_ratio <= row.b_t_l1 + 1e-10, "{}", row.f1_ratio);
                assert!(row.f2_ratio.unwrap().is_finite());
                let k_t = PAdicRational::parse(params, &row.t_repr)
                    .unwrap()
                    .norm_exponent()
                    .unwrap();
                if k_t <= -phi.constancy_exp() {
                    // B_t is an exact approximate identity at this scale
                    assert!((row.f1_ratio - 1.0).abs() < 1e-10);
                }
                if k_t > phi.ball_exp() {
                    // b(t xi) kills all of supp phi~: F1 vanishes
                    assert!(row.f1_ratio < 1e-12);
                }
            }

            // refinement leaves the exact convolution unchanged
            let fine = phi.refine(1, 2).unwrap();
            let fine_report = norm_report(&fine, &t_grid, &[1.5]).unwrap();
            for (a, b) in report.rows.iter().zip(&fine_report.rows) {
                assert!((a.f1_ratio - b.f1_ratio).abs() < 1e-9);
            }
        }

        // kappa outside the admissible range for n = 2
        let phi = TestFunction::random(params, 3, 2, 1, 1, true, false).unwrap();
        assert!(matches!(
            norm_report(&phi, &t_grid, &[2.5]),
            Err(Error::InvalidKappa(_, _))
        ));

        // n = 1: F2 column absent, any kappa > 1 allowed
        let phi1 = TestFunction::random(params, 4, 1, 1, 1, false, false).unwrap();
        let r1 = norm_report(&phi1, &t_grid, &[2.5]).unwrap();
        assert!(r1.rows.iter().all(|r| r.f2_ratio.is_none()));
    }
}
