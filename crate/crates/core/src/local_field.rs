//! Exact arithmetic in Q_p.
//!
//! Scalars are pairs (u, e) representing u * p^e where the unit part u is a
//! rational number whose numerator and denominator are both coprime to p.
//! This set is closed under +, -, * and division by nonzero elements, and the
//! normalized absolute value |u * p^e| = q^{-e} is computed exactly.  On top
//! of the scalars the module provides the canonical additive character, the
//! sup-norm on Q_p^n, and deterministic coset / sphere enumeration used by
//! every grid in the engine.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest total cell count a single grid is allowed to materialize.
const MAX_GRID_CELLS: u128 = 1 << 23;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The field Q_p; the residue cardinality q equals p here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldParams {
    p: u64,
}

impl FieldParams {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldParams { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue field cardinality; equal to p for Q_p.
    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn qf(&self) -> f64 {
        self.p as f64
    }

    /// q^k at machine precision.
    pub fn q_pow(&self, k: i64) -> f64 {
        (self.p as f64).powi(k as i32)
    }

    /// q^k as an exact rational.
    pub fn q_pow_exact(&self, k: i64) -> BigRational {
        let base = BigInt::from(self.p);
        if k >= 0 {
            BigRational::from_integer(base.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), base.pow((-k) as u32))
        }
    }
}

/// Splits a nonzero integer into (p-adic valuation, p-free cofactor).
fn split_p(mut v: BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut val = 0i64;
    loop {
        let (quot, rem) = v.div_rem(&pb);
        if rem.is_zero() {
            v = quot;
            val += 1;
        } else {
            return (val, v);
        }
    }
}

/// Modular inverse of `a` modulo `m` for gcd(a, m) = 1.
fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// An exact element u * p^e of Q_p with p-free unit part u.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicRational {
    params: FieldParams,
    unit: BigRational,
    exponent: i64,
}

impl PAdicRational {
    pub fn zero(params: FieldParams) -> Self {
        PAdicRational {
            params,
            unit: BigRational::zero(),
            exponent: 0,
        }
    }

    pub fn one(params: FieldParams) -> Self {
        PAdicRational {
            params,
            unit: BigRational::one(),
            exponent: 0,
        }
    }

    /// Builds mantissa * p^exponent; the mantissa need not be coprime to p.
    pub fn from_parts(params: FieldParams, mantissa: BigInt, exponent: i64) -> Self {
        Self::from_rational_scaled(params, BigRational::from_integer(mantissa), exponent)
    }

    pub fn from_integer(params: FieldParams, v: i64) -> Self {
        Self::from_parts(params, BigInt::from(v), 0)
    }

    pub fn from_rational(params: FieldParams, r: BigRational) -> Self {
        Self::from_rational_scaled(params, r, 0)
    }

    fn from_rational_scaled(params: FieldParams, r: BigRational, exponent: i64) -> Self {
        if r.is_zero() {
            return Self::zero(params);
        }
        let (vn, num) = split_p(r.numer().clone(), params.p);
        let (vd, den) = split_p(r.denom().clone(), params.p);
        PAdicRational {
            params,
            unit: BigRational::new_raw(num, den),
            exponent: exponent + vn - vd,
        }
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// The p-free unit part.
    pub fn unit(&self) -> &BigRational {
        &self.unit
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Exponent k with |x| = q^k; `None` for x = 0.
    pub fn norm_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(-self.exponent)
        }
    }

    pub fn norm_f64(&self) -> f64 {
        match self.norm_exponent() {
            Some(k) => self.params.q_pow(k),
            None => 0.0,
        }
    }

    pub fn norm_exact(&self) -> BigRational {
        match self.norm_exponent() {
            Some(k) => self.params.q_pow_exact(k),
            None => BigRational::zero(),
        }
    }

    /// The value as an ordinary rational number.
    pub fn value_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        &self.unit * self.params.q_pow_exact(self.exponent)
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(
            self.params.p, other.params.p,
            "mixed p in p-adic arithmetic"
        );
    }

    /// Fractional part {x}_p as an exact rational in [0, 1).
    pub fn fractional_part(&self) -> BigRational {
        if self.is_zero() || self.exponent >= 0 {
            return BigRational::zero();
        }
        let m = (-self.exponent) as u32;
        let modulus = BigInt::from(self.params.p).pow(m);
        let inv = mod_inverse(self.unit.denom(), &modulus);
        let a = (self.unit.numer() * inv).mod_floor(&modulus);
        BigRational::new(a, modulus)
    }

    /// Canonical additive character chi(x) = exp(2 pi i {x}_p).
    pub fn character(&self) -> Complex64 {
        let phase = self.fractional_part().to_f64().unwrap_or(0.0);
        Complex64::from_polar(1.0, std::f64::consts::TAU * phase)
    }

    /// Coset residue of x on the grid (ball exponent N, constancy exponent l):
    /// the integer r in [0, p^{N+l}) with x = r * p^{-N} (mod p^l O).
    /// `None` when |x| > q^N.
    pub fn residue_index(&self, ball_exp: i64, constancy_exp: i64) -> Option<u64> {
        let span = ball_exp + constancy_exp;
        debug_assert!(span >= 0);
        if self.is_zero() {
            return Some(0);
        }
        let shift = self.exponent + ball_exp;
        if shift < 0 {
            return None; // |x| > q^N
        }
        if shift >= span {
            return Some(0); // x lies in the coset of 0
        }
        let modulus = BigInt::from(self.params.p).pow(span as u32);
        let inv = mod_inverse(self.unit.denom(), &modulus);
        let scale = BigInt::from(self.params.p).pow(shift as u32);
        let r = (self.unit.numer() * inv * scale).mod_floor(&modulus);
        r.to_u64()
    }
}

impl Neg for PAdicRational {
    type Output = PAdicRational;
    fn neg(self) -> PAdicRational {
        let exponent = if self.unit.is_zero() { 0 } else { self.exponent };
        PAdicRational {
            params: self.params,
            unit: -self.unit,
            exponent,
        }
    }
}

impl Add for &PAdicRational {
    type Output = PAdicRational;
    fn add(self, other: &PAdicRational) -> PAdicRational {
        self.check_same_field(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.unit * self.params.q_pow_exact(self.exponent - e);
        let b = &other.unit * self.params.q_pow_exact(other.exponent - e);
        PAdicRational::from_rational_scaled(self.params, a + b, e)
    }
}

impl Sub for &PAdicRational {
    type Output = PAdicRational;
    fn sub(self, other: &PAdicRational) -> PAdicRational {
        self + &(-other.clone())
    }
}

impl Mul for &PAdicRational {
    type Output = PAdicRational;
    fn mul(self, other: &PAdicRational) -> PAdicRational {
        self.check_same_field(other);
        if self.is_zero() || other.is_zero() {
            return PAdicRational::zero(self.params);
        }
        // products of p-free rationals stay p-free
        PAdicRational {
            params: self.params,
            unit: &self.unit * &other.unit,
            exponent: self.exponent + other.exponent,
        }
    }
}

impl Div for &PAdicRational {
    type Output = PAdicRational;
    fn div(self, other: &PAdicRational) -> PAdicRational {
        self.check_same_field(other);
        assert!(!other.is_zero(), "division by zero in Q_p");
        if self.is_zero() {
            return PAdicRational::zero(self.params);
        }
        PAdicRational {
            params: self.params,
            unit: &self.unit / &other.unit,
            exponent: self.exponent - other.exponent,
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for PAdicRational {
            type Output = PAdicRational;
            fn $method(self, other: PAdicRational) -> PAdicRational {
                $trait::$method(&self, &other)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl fmt::Display for PAdicRational {
    /// Textual form "a*p^e" (or "a/b*p^e" for a non-integer unit part).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0*{}^0", self.params.p);
        }
        if self.unit.denom().is_one() {
            write!(f, "{}*{}^{}", self.unit.numer(), self.params.p, self.exponent)
        } else {
            write!(
                f,
                "{}/{}*{}^{}",
                self.unit.numer(),
                self.unit.denom(),
                self.params.p,
                self.exponent
            )
        }
    }
}

impl PAdicRational {
    /// Parses the textual form emitted by `Display`; the base must match `params`.
    pub fn parse(params: FieldParams, s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid p-adic literal {s:?}"));
        let (mant, pow) = s.split_once('*').ok_or_else(bad)?;
        let (base, exp) = pow.split_once('^').ok_or_else(bad)?;
        let base: u64 = base.parse().map_err(|_| bad())?;
        if base != params.p {
            return Err(Error::Parse(format!(
                "literal {s:?} has base {base}, expected {}",
                params.p
            )));
        }
        let exponent: i64 = exp.parse().map_err(|_| bad())?;
        let mantissa = if let Some((num, den)) = mant.split_once('/') {
            BigRational::new(
                BigInt::from_str(num).map_err(|_| bad())?,
                BigInt::from_str(den).map_err(|_| bad())?,
            )
        } else {
            BigRational::from_integer(BigInt::from_str(mant).map_err(|_| bad())?)
        };
        Ok(Self::from_rational_scaled(params, mantissa, exponent))
    }
}

/// A point of Q_p^n with the exact sup-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<PAdicRational>,
}

impl Point {
    pub fn new(coords: Vec<PAdicRational>) -> Self {
        assert!(!coords.is_empty(), "points need at least one coordinate");
        Point { coords }
    }

    pub fn zero(params: FieldParams, n: usize) -> Self {
        Point::new(vec![PAdicRational::zero(params); n])
    }

    pub fn scalar(value: PAdicRational) -> Self {
        Point::new(vec![value])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[PAdicRational] {
        &self.coords
    }

    pub fn params(&self) -> FieldParams {
        self.coords[0].params()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Exponent k with ||x|| = q^k; `None` for the zero point.
    pub fn sup_norm_exponent(&self) -> Option<i64> {
        self.coords.iter().filter_map(|c| c.norm_exponent()).max()
    }

    pub fn sup_norm_f64(&self) -> f64 {
        match self.sup_norm_exponent() {
            Some(k) => self.params().q_pow(k),
            None => 0.0,
        }
    }

    pub fn add(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: &PAdicRational) -> Point {
        Point::new(self.coords.iter().map(|c| c * s).collect())
    }

    pub fn dot(&self, other: &Point) -> PAdicRational {
        assert_eq!(self.dim(), other.dim());
        let mut acc = PAdicRational::zero(self.params());
        for (a, b) in self.coords.iter().zip(&other.coords) {
            acc = &acc + &(a * b);
        }
        acc
    }

    /// Semicolon-joined coordinate literals, e.g. "1*3^0;2*3^-1".
    pub fn repr(&self) -> String {
        self.coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(params: FieldParams, s: &str) -> Result<Self> {
        let coords = s
            .split(';')
            .map(|c| PAdicRational::parse(params, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Point::new(coords))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr())
    }
}

/// The partition of the ball B_N^n into cosets of p^l O^n, with canonical
/// representatives sum_{i=-N}^{l-1} d_i p^i per coordinate and deterministic
/// lexicographic-in-digits order (digit at p^{-N} least significant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CosetGrid {
    params: FieldParams,
    n: usize,
    ball_exp: i64,
    constancy_exp: i64,
    coord_cells: u64,
}

impl CosetGrid {
    pub fn new(params: FieldParams, n: usize, ball_exp: i64, constancy_exp: i64) -> Result<Self> {
        let span = ball_exp + constancy_exp;
        if span < 0 {
            return Err(Error::InvalidGrid(span));
        }
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let coord_cells: u128 = (params.p as u128)
            .checked_pow(span as u32)
            .ok_or(Error::GridTooLarge(u128::MAX))?;
        let total = coord_cells.checked_pow(n as u32).ok_or(Error::GridTooLarge(u128::MAX))?;
        if total > MAX_GRID_CELLS {
            return Err(Error::GridTooLarge(total));
        }
        Ok(CosetGrid {
            params,
            n,
            ball_exp,
            constancy_exp,
            coord_cells: coord_cells as u64,
        })
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Support exponent N: the grid covers B_N^n.
    pub fn ball_exp(&self) -> i64 {
        self.ball_exp
    }

    /// Constancy exponent l: cells are cosets of p^l O^n.
    pub fn constancy_exp(&self) -> i64 {
        self.constancy_exp
    }

    /// Cells per coordinate, p^{N+l}.
    pub fn coord_cells(&self) -> u64 {
        self.coord_cells
    }

    /// Total cell count p^{n(N+l)}.
    pub fn cells(&self) -> usize {
        (self.coord_cells as u128).pow(self.n as u32) as usize
    }

    /// Haar volume q^{-nl} of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.params.q_pow(-(self.n as i64) * self.constancy_exp)
    }

    pub fn cell_volume_exact(&self) -> BigRational {
        self.params.q_pow_exact(-(self.n as i64) * self.constancy_exp)
    }

    /// Per-coordinate residues of a flat cell index (coordinate 0 most significant).
    pub fn split_index(&self, idx: usize) -> Vec<u64> {
        let m = self.coord_cells;
        let mut rest = idx as u64;
        let mut out = vec![0u64; self.n];
        for j in (0..self.n).rev() {
            out[j] = rest % m;
            rest /= m;
        }
        out
    }

    pub fn flatten(&self, residues: &[u64]) -> usize {
        let m = self.coord_cells;
        let mut idx = 0u64;
        for &r in residues {
            idx = idx * m + r;
        }
        idx as usize
    }

    /// Canonical representative of a cell.
    pub fn representative(&self, idx: usize) -> Point {
        let residues = self.split_index(idx);
        Point::new(
            residues
                .into_iter()
                .map(|r| PAdicRational::from_parts(self.params, BigInt::from(r), -self.ball_exp))
                .collect(),
        )
    }

    /// Per-coordinate residues of an arbitrary point; `None` outside B_N^n.
    pub fn coord_residues(&self, x: &Point) -> Option<Vec<u64>> {
        if x.dim() != self.n {
            return None;
        }
        x.coords()
            .iter()
            .map(|c| c.residue_index(self.ball_exp, self.constancy_exp))
            .collect()
    }

    /// Flat index of the cell containing `x`; `None` outside B_N^n.
    pub fn index_of(&self, x: &Point) -> Option<usize> {
        self.coord_residues(x).map(|r| self.flatten(&r))
    }

    /// Sup-norm exponent of the representative of a cell (`None` for the 0 cell).
    pub fn norm_exponent_of_index(&self, idx: usize) -> Option<i64> {
        let p = self.params.p;
        self.split_index(idx)
            .into_iter()
            .filter_map(|r| {
                if r == 0 {
                    None
                } else {
                    let mut v = 0i64;
                    let mut r = r;
                    while r % p == 0 {
                        r /= p;
                        v += 1;
                    }
                    Some(self.ball_exp - v)
                }
            })
            .max()
    }
}

/// Ordered canonical representatives of the cosets of p^l O^n inside B_N^n.
pub fn enumerate_cosets(
    params: FieldParams,
    n: usize,
    ball_exp: i64,
    constancy_exp: i64,
) -> Result<Vec<Point>> {
    let grid = CosetGrid::new(params, n, ball_exp, constancy_exp)?;
    Ok((0..grid.cells()).map(|i| grid.representative(i)).collect())
}

/// Representatives of the cosets of p^l O^n covering exactly {||x|| = q^k}.
/// Requires l >= -k + 1 so the sphere is a union of cosets.
pub fn enumerate_sphere(
    params: FieldParams,
    n: usize,
    radius_exp: i64,
    constancy_exp: i64,
) -> Result<Vec<Point>> {
    let min = -radius_exp + 1;
    if constancy_exp < min {
        return Err(Error::InvalidSphereResolution {
            k: radius_exp,
            l: constancy_exp,
            min,
        });
    }
    let grid = CosetGrid::new(params, n, radius_exp, constancy_exp)?;
    Ok((0..grid.cells())
        .filter(|&i| grid.norm_exponent_of_index(i) == Some(radius_exp))
        .map(|i| grid.representative(i))
        .collect())
}
