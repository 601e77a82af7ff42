//! The fractional operators D^alpha (one variable) and D^{alpha,n} (sup-norm,
//! n variables) as exact hypersingular sums.
//!
//! For a test function u and a target x the integral
//!   (D^{alpha,n} u)(x) = (1-q^alpha)/(1-q^{-alpha-n})
//!                        int ||y||^{-alpha-n} [u(x-y) - u(x)] d^n y
//! is evaluated as a finite coset sum over ||y|| <= q^M (M large enough that
//! u(x-y) vanishes beyond) plus a closed-form geometric tail; the coset of
//! y = 0 contributes nothing because u is locally constant there, so the
//! singularity is never touched.  A spectral route through the Fourier
//! transform cross-checks the hypersingular sums on Lizorkin functions, and
//! the radial eigenfunctions of D^alpha are materialized exactly.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{fourier, inverse_fourier};
use crate::local_field::{CosetGrid, FieldParams, PAdicRational, Point};
use crate::schwartz::{CompensatedSum, TestFunction};

/// Complex values attached to an explicit list of exact evaluation points.
#[derive(Clone, Debug)]
pub struct SampledField {
    pub points: Vec<Point>,
    pub values: Vec<Complex64>,
    pub operator: String,
    pub alpha: f64,
}

impl SampledField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &SampledField) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// CSV columns: point, re, im, operator, alpha.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "point,re,im,operator,alpha")?;
        for (pt, v) in self.points.iter().zip(&self.values) {
            writeln!(
                w,
                "{},{:e},{:e},{},{}",
                pt.repr(),
                v.re,
                v.im,
                self.operator,
                self.alpha
            )?;
        }
        Ok(())
    }
}

/// int_{||y|| = q^k} ||y||^{-alpha-n} d^n y = q^{-k alpha} (1 - q^{-n}).
pub fn kernel_sphere_integral(params: FieldParams, radius_exp: i64, alpha: f64, n: usize) -> f64 {
    let q = params.qf();
    q.powf(-(radius_exp as f64) * alpha) * (1.0 - q.powi(-(n as i64) as i32))
}

/// Closed-form tail sum_{k >= start} q^{-k alpha} (1 - q^{-n}).
fn kernel_tail(params: FieldParams, start: i64, alpha: f64, n: usize) -> f64 {
    let q = params.qf();
    (1.0 - q.powi(-(n as i32))) * q.powf(-(start as f64) * alpha) / (1.0 - q.powf(-alpha))
}

/// D^alpha on Q_p via the hypersingular sum, evaluated at scalar targets.
pub fn apply_d_alpha(
    u: &TestFunction,
    alpha: f64,
    targets: &[PAdicRational],
) -> Result<SampledField> {
    let pts: Vec<Point> = targets.iter().map(|t| Point::scalar(t.clone())).collect();
    let mut field = apply_d_alpha_n(u, alpha, &pts)?;
    field.operator = "D^alpha".into();
    Ok(field)
}

/// D^{alpha,n} on Q_p^n via the hypersingular sum.
pub fn apply_d_alpha_n(u: &TestFunction, alpha: f64, targets: &[Point]) -> Result<SampledField> {
    if alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let values = targets
        .par_iter()
        .map(|x| hypersingular_at(u, alpha, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledField {
        points: targets.to_vec(),
        values,
        operator: "D^{alpha,n}".into(),
        alpha,
    })
}

/// One target of the hypersingular sum, on integer coset residues throughout.
fn hypersingular_at(u: &TestFunction, alpha: f64, x: &Point) -> Result<Complex64> {
    let params = u.params();
    let p = params.p();
    let q = params.qf();
    let n = u.dim();
    let l = u.constancy_exp();
    let nu = u.ball_exp();
    let ux = u.evaluate(x);
    let m_exp = nu.max(x.sup_norm_exponent().unwrap_or(nu));
    let fine = CosetGrid::new(params, n, m_exp, l)?;
    let big_m = fine.coord_cells();
    let coarse_cells = u.grid().coord_cells();
    // p^{M - N_u}: coordinates with a smaller valuation lie outside B_{N_u}
    let down_shift = {
        let mut s = 1u64;
        for _ in 0..(m_exp - nu) {
            s *= p;
        }
        s
    };
    let xres = fine
        .coord_residues(x)
        .expect("target inside B_M by construction of M");
    let mut digits = vec![0u64; n];
    let mut coarse = vec![0u64; n];
    let mut acc = CompensatedSum::new();
    let cells = fine.cells();
    for _ in 1..cells {
        // mixed-radix increment, last coordinate fastest
        for j in (0..n).rev() {
            digits[j] += 1;
            if digits[j] == big_m {
                digits[j] = 0;
            } else {
                break;
            }
        }
        // sup-norm exponent of y from the least p-valuation of its residues
        let mut min_val = i64::MAX;
        for &d in &digits {
            if d == 0 {
                continue;
            }
            let mut v = 0i64;
            let mut r = d;
            while r % p == 0 {
                r /= p;
                v += 1;
            }
            min_val = min_val.min(v);
        }
        debug_assert!(min_val < i64::MAX);
        let y_norm_exp = m_exp - min_val;
        // residue of x - y and the value u(x - y)
        let mut inside = true;
        for j in 0..n {
            let r = (xres[j] + big_m - digits[j]) % big_m;
            if r % down_shift != 0 {
                inside = false; // coordinate norm exceeds q^{N_u}
                break;
            }
            let c = r / down_shift;
            debug_assert!(c < coarse_cells);
            coarse[j] = c;
        }
        let uxy = if inside {
            u.value_at_index(u.grid().flatten(&coarse))
        } else {
            Complex64::zero()
        };
        let diff = uxy - ux;
        if diff.norm_sqr() == 0.0 {
            continue;
        }
        let kernel = q.powf(-(y_norm_exp as f64) * (alpha + n as f64));
        acc.add(diff * kernel);
    }
    let near = acc.value() * fine.cell_volume();
    // ||y|| > q^M: u(x - y) = 0 there, closed geometric tail
    let tail = -ux * kernel_tail(params, m_exp + 1, alpha, n);
    let prefactor = (1.0 - q.powf(alpha)) / (1.0 - q.powf(-alpha - n as f64));
    Ok((near + tail) * prefactor)
}

/// Spectral route F^{-1}[ ||xi||^alpha F(u) ] on the Lizorkin space Phi.
pub fn apply_spectral(u: &TestFunction, alpha: f64) -> Result<TestFunction> {
    if alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let mean = u.integrate().norm();
    if mean > 1e-10 {
        return Err(Error::NotLizorkinPhi(mean));
    }
    let hat = fourier(u);
    let grid = *hat.grid();
    let q = u.params().qf();
    let multiplied = hat.map_indexed(|idx, v| match grid.norm_exponent_of_index(idx) {
        Some(k) => v * q.powf(alpha * k as f64),
        None => Complex64::zero(), // the 0 cell carries no mass for Phi inputs
    });
    Ok(inverse_fourier(&multiplied))
}

/// The three-level radial eigenfunction of D^alpha: eigenvalue q^{alpha N},
/// value c q^N (1 - 1/q) on |x| <= q^{-N}, -c q^{N-1} on |x| = q^{-N+1},
/// zero beyond.
#[derive(Clone, Debug)]
pub struct EigenProfile {
    pub level: i64,
    pub amplitude: Complex64,
}

impl EigenProfile {
    /// The unique radial eigenfunction with u(0) = 1.
    pub fn normalized(params: FieldParams, level: i64) -> Self {
        let q = params.qf();
        let c = q.powi(-level as i32) / (1.0 - 1.0 / q);
        EigenProfile {
            level,
            amplitude: Complex64::new(c, 0.0),
        }
    }

    pub fn eigenvalue(&self, params: FieldParams, alpha: f64) -> f64 {
        params.qf().powf(alpha * self.level as f64)
    }

    /// Exact table on the grid (N_f = 1 - N, l_f = N).
    pub fn materialize(&self, params: FieldParams) -> TestFunction {
        let grid = CosetGrid::new(params, 1, 1 - self.level, self.level)
            .expect("span is always 1");
        let q = params.qf();
        let plateau = self.amplitude * q.powi(self.level as i32) * (1.0 - 1.0 / q);
        let ring = -self.amplitude * q.powi(self.level as i32 - 1);
        let values = (0..grid.cells())
            .map(|i| if i == 0 { plateau } else { ring })
            .collect();
        TestFunction::new(grid, values).unwrap()
    }
}

/// Max |D^alpha u - q^{alpha N} u| for the normalized profile, sampled at 0
/// and at |x| = q^j for each j in `window_exps`.
pub fn eigen_residual(
    params: FieldParams,
    level: i64,
    alpha: f64,
    window_exps: &[i64],
) -> Result<f64> {
    let profile = EigenProfile::normalized(params, level);
    let u = profile.materialize(params);
    let lambda = profile.eigenvalue(params, alpha);
    let mut targets = vec![PAdicRational::zero(params)];
    for &j in window_exps {
        targets.push(PAdicRational::from_parts(params, 1.into(), -j));
    }
    let field = apply_d_alpha(&u, alpha, &targets)?;
    Ok(field
        .points
        .iter()
        .zip(&field.values)
        .map(|(pt, &v)| (v - u.evaluate(pt) * lambda).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct NullspaceReport {
    pub dimension: usize,
    /// sin of the angle between the computed null vector and the exact profile.
    pub profile_angle: f64,
    pub window_m: i64,
    pub window_l: i64,
}

/// Desk-scale analog of the radial uniqueness statement: the sampled operator
/// on sphere-indicator radial functions has a one-dimensional null space at
/// the eigenvalue q^{alpha N}, matching the exact profile.
pub fn radial_nullspace_check(
    params: FieldParams,
    alpha: f64,
    level: i64,
    window_m: i64,
    window_l: i64,
) -> Result<NullspaceReport> {
    if alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    // profile occupies |x| <= q^{1-N}, needs headroom inside the window
    if 1 - level > window_m - 2 || level > window_l {
        return Err(Error::WindowTooSmall(format!(
            "profile for level {level} leaks outside window (M={window_m}, l={window_l})"
        )));
    }
    let dim = (window_m + window_l + 1) as usize;
    // basis: indicator of B_{-window_l}, then sphere indicators |x| = q^j
    let exps: Vec<Option<i64>> = std::iter::once(None)
        .chain((1 - window_l..=window_m).map(Some))
        .collect();
    debug_assert_eq!(exps.len(), dim);
    let grid = CosetGrid::new(params, 1, window_m, window_l)?;
    let mut sample_points = vec![PAdicRational::zero(params)];
    for &e in &exps[1..] {
        sample_points.push(PAdicRational::from_parts(params, 1.into(), -e.unwrap()));
    }
    let mut t = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for (col, &e) in exps.iter().enumerate() {
        let basis = TestFunction::from_fn(grid, |x| {
            let ok = match (e, x.sup_norm_exponent()) {
                (None, None) => true,
                (None, Some(k)) => k <= -window_l,
                (Some(j), Some(k)) => k == j,
                (Some(_), None) => false,
            };
            if ok {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            }
        });
        let field = apply_d_alpha(&basis, alpha, &sample_points)?;
        for (row, v) in field.values.iter().enumerate() {
            t[(row, col)] = v.re;
            debug_assert!(v.im.abs() < 1e-12);
        }
    }
    let lambda = params.qf().powf(alpha * level as f64);
    // restrict to basis functions supported well inside the window
    let keep: Vec<usize> = exps
        .iter()
        .enumerate()
        .filter(|(_, e)| e.map_or(true, |j| j <= window_m - 2))
        .map(|(i, _)| i)
        .collect();
    let mut a = nalgebra::DMatrix::<f64>::zeros(dim, keep.len());
    for (c, &col) in keep.iter().enumerate() {
        for row in 0..dim {
            let shifted = if row == col { lambda } else { 0.0 };
            a[(row, c)] = t[(row, col)] - shifted;
        }
    }
    let svd = nalgebra::SVD::new(a, false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-8 * smax.max(1.0);
    let dimension = svd.singular_values.iter().filter(|&&s| s < tol).count();
    // null vector = right singular vector of the smallest singular value
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let mut min_idx = 0usize;
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < svd.singular_values[min_idx] {
            min_idx = i;
        }
    }
    let null_vec: Vec<f64> = (0..keep.len()).map(|c| vt[(min_idx, c)]).collect();
    // exact profile coefficients in the restricted basis
    let q = params.qf();
    let c_amp = q.powi(-level as i32) / (1.0 - 1.0 / q);
    let plateau = c_amp * q.powi(level as i32) * (1.0 - 1.0 / q);
    let ring = -c_amp * q.powi(level as i32 - 1);
    let profile: Vec<f64> = keep
        .iter()
        .map(|&i| match exps[i] {
            None => plateau,
            Some(j) if j <= -level => plateau,
            Some(j) if j == 1 - level => ring,
            _ => 0.0,
        })
        .collect();
    let dot: f64 = null_vec.iter().zip(&profile).map(|(a, b)| a * b).sum();
    let na: f64 = null_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = profile.iter().map(|v| v * v).sum::<f64>().sqrt();
    // sin of the angle via the orthogonal component; sqrt(1 - cos^2) would
    // floor the result at sqrt(machine epsilon) for near-parallel vectors
    let sin = {
        let scale = dot / (nb * nb);
        let ortho: f64 = null_vec
            .iter()
            .zip(&profile)
            .map(|(a, b)| {
                let r = a - scale * b;
                r * r
            })
            .sum::<f64>()
            .sqrt();
        ortho / na
    };
    Ok(NullspaceReport {
        dimension,
        profile_angle: sin,
        window_m,
        window_l,
    })
}
