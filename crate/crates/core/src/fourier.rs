//! Fourier transform on Q_p^n as an exact finite character sum.
//!
//! For f in D_N^l the integrand of f~(xi) = int chi(x xi) f(x) dx is constant
//! per coset once ||xi|| <= q^l, so the finite sum over the grid equals the
//! integral exactly and the output lives in D_l^N (support/constancy duality).
//! Writing x = X p^{-N} and xi = Xi p^{-l} with integer residues, the phase is
//! (X . Xi mod M) / M with M = p^{N+l}: the transform is a multidimensional
//! DFT over (Z/M)^n.  The baseline path accumulates those exact integer
//! phases directly; the fast path is a radix-p Cooley-Tukey factorization of
//! the same sum, applied axis by axis.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::local_field::{CosetGrid, Point};
use crate::schwartz::{CompensatedSum, TestFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Forward,
    Inverse,
}

impl Sign {
    fn as_f64(self) -> f64 {
        match self {
            Sign::Forward => 1.0,
            Sign::Inverse => -1.0,
        }
    }
}

/// f~(xi) = int chi(x xi) f(x) dx, exact on the dual grid D_l^N.
pub fn fourier(f: &TestFunction) -> TestFunction {
    transform(f, Sign::Forward)
}

/// f(x) = int chi(-x xi) f~(xi) dxi.
pub fn inverse_fourier(g: &TestFunction) -> TestFunction {
    transform(g, Sign::Inverse)
}

/// O(G^2) reference path with exact integer phase arithmetic; the oracle the
/// fast path is checked against.
pub fn fourier_direct(f: &TestFunction) -> TestFunction {
    transform_direct(f, Sign::Forward)
}

pub fn inverse_fourier_direct(g: &TestFunction) -> TestFunction {
    transform_direct(g, Sign::Inverse)
}

fn dual_grid(f: &TestFunction) -> CosetGrid {
    // D_N^l maps onto D_l^N; grid validity is preserved since N + l is shared
    CosetGrid::new(
        f.params(),
        f.dim(),
        f.constancy_exp(),
        f.ball_exp(),
    )
    .expect("dual grid has the same span")
}

fn root_table(m: usize, sign: Sign) -> Vec<Complex64> {
    (0..m)
        .map(|t| {
            Complex64::from_polar(
                1.0,
                sign.as_f64() * std::f64::consts::TAU * (t as f64) / (m as f64),
            )
        })
        .collect()
}

fn transform_direct(f: &TestFunction, sign: Sign) -> TestFunction {
    let out_grid = dual_grid(f);
    let m = f.grid().coord_cells();
    let n = f.dim();
    let roots = root_table(m as usize, sign);
    let scale = f.grid().cell_volume();
    let in_grid = *f.grid();
    let values: Vec<Complex64> = (0..out_grid.cells())
        .into_par_iter()
        .map(|out_idx| {
            let xi = out_grid.split_index(out_idx);
            let mut acc = CompensatedSum::new();
            for in_idx in 0..in_grid.cells() {
                let x = in_grid.split_index(in_idx);
                let mut phase = 0u128;
                for j in 0..n {
                    phase += x[j] as u128 * xi[j] as u128;
                }
                let phase = (phase % m as u128) as usize;
                acc.add(roots[phase] * f.value_at_index(in_idx));
            }
            acc.value() * scale
        })
        .collect();
    TestFunction::new(out_grid, values).expect("table sized by construction")
}

/// Radix-p decimation-in-time over one axis line of length m = p^k.
/// `roots` is the table for the top-level length; `top` its size.
fn fft_line(v: &[Complex64], p: usize, roots: &[Complex64], top: usize) -> Vec<Complex64> {
    let m = v.len();
    if m == 1 {
        return v.to_vec();
    }
    let k = m / p;
    let subs: Vec<Vec<Complex64>> = (0..p)
        .map(|r| {
            let sub: Vec<Complex64> = v[r..].iter().step_by(p).copied().collect();
            fft_line(&sub, p, roots, top)
        })
        .collect();
    let stride = top / m;
    let mut out = vec![Complex64::zero(); m];
    for (t, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::zero();
        for (r, sub) in subs.iter().enumerate() {
            acc += roots[(r * t) % m * stride] * sub[t % k];
        }
        *slot = acc;
    }
    out
}

fn transform(f: &TestFunction, sign: Sign) -> TestFunction {
    let out_grid = dual_grid(f);
    let n = f.dim();
    let m = f.grid().coord_cells() as usize;
    let p = f.params().p() as usize;
    let scale = f.grid().cell_volume();
    if m == 1 {
        let values = f.values().iter().map(|&v| v * scale).collect();
        return TestFunction::new(out_grid, values).unwrap();
    }
    let roots = root_table(m, sign);
    let mut data: Vec<Complex64> = f.values().to_vec();
    let cells = data.len();
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        let block = m * stride;
        // gather every line along this axis, transform, scatter back
        let line_ids: Vec<(usize, usize)> = (0..cells / block)
            .flat_map(|b| (0..stride).map(move |s| (b, s)))
            .collect();
        let transformed: Vec<Vec<Complex64>> = line_ids
            .par_iter()
            .map(|&(b, s)| {
                let base = b * block + s;
                let line: Vec<Complex64> =
                    (0..m).map(|j| data[base + j * stride]).collect();
                fft_line(&line, p, &roots, m)
            })
            .collect();
        for (&(b, s), line) in line_ids.iter().zip(&transformed) {
            let base = b * block + s;
            for (j, &v) in line.iter().enumerate() {
                data[base + j * stride] = v;
            }
        }
    }
    for v in &mut data {
        *v *= scale;
    }
    TestFunction::new(out_grid, data).expect("table sized by construction")
}

/// Exact character sum int chi(+-(x . xi)) f(x) dx at an arbitrary point xi,
/// not restricted to the dual grid.  Used to verify (rather than assume) that
/// the transform vanishes for ||xi|| > q^l.
pub fn transform_value_at(f: &TestFunction, xi: &Point, inverse: bool) -> Complex64 {
    // chi(x xi) is constant on cosets of p^l O^n only while ||xi|| <= q^l;
    // refine until that holds so the rep sum equals the integral exactly
    let k = xi.sup_norm_exponent().unwrap_or(f.constancy_exp());
    let refined;
    let f = if k > f.constancy_exp() {
        refined = f
            .refine(f.ball_exp(), k)
            .expect("growing l is always valid");
        &refined
    } else {
        f
    };
    let grid = f.grid();
    let mut acc = CompensatedSum::new();
    for idx in 0..grid.cells() {
        let v = f.value_at_index(idx);
        if v.norm_sqr() == 0.0 {
            continue;
        }
        let x = grid.representative(idx);
        let mut dot = x.dot(xi);
        if inverse {
            dot = -dot;
        }
        acc.add(dot.character() * v);
    }
    acc.value() * grid.cell_volume()
}
