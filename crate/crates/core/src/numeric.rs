//! Scalars and dense matrices.
//!
//! Automata arithmetic is generic over [`Field`], implemented for exact
//! [`Rational`] values and for `f64`. Mixing kinds inside one machine is
//! ruled out by the type system; at dynamic boundaries (documents, CLI
//! flags, cutpoints) values travel as [`Scalar`], whose binary operations
//! reject mixed operands instead of promoting them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

/// Default zero tolerance for float comparisons.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("scalar kind mismatch: {0} operand against {1} operand")]
    KindMismatch(ScalarKind, ScalarKind),
    #[error("matrix dimensions must be positive")]
    EmptyMatrix,
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires a {0} matrix")]
    WrongKind(ScalarKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Rational,
    Float,
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Rational => f.write_str("rational"),
            ScalarKind::Float => f.write_str("float"),
        }
    }
}

/// Number type that automata run over.
pub trait Field:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    const KIND: ScalarKind;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact zero for rationals, `|x| <= eps` for floats.
    fn is_zero_within(&self, eps: f64) -> bool;

    fn abs_value(&self) -> Self;

    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;

    fn into_scalar(self) -> Scalar;

    fn from_scalar(s: &Scalar) -> Result<Self, NumericError>;

    /// Three-way comparison where floats within `eps` count as equal.
    fn compare_within(&self, other: &Self, eps: f64) -> std::cmp::Ordering {
        let diff = self.clone() - other;
        if diff.is_zero_within(eps) {
            std::cmp::Ordering::Equal
        } else if diff > Self::zero() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Less
        }
    }
}

impl Field for Rational {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero_within(&self, _eps: f64) -> bool {
        self.is_zero()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Rational(self)
    }

    fn from_scalar(s: &Scalar) -> Result<Self, NumericError> {
        match s {
            Scalar::Rational(r) => Ok(r.clone()),
            Scalar::Float(_) => Err(NumericError::KindMismatch(ScalarKind::Float, Self::KIND)),
        }
    }
}

impl Field for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero_within(&self, eps: f64) -> bool {
        self.abs() <= eps
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn inverse(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }

    fn from_scalar(s: &Scalar) -> Result<Self, NumericError> {
        match s {
            Scalar::Float(x) => Ok(*x),
            Scalar::Rational(_) => Err(NumericError::KindMismatch(ScalarKind::Rational, Self::KIND)),
        }
    }
}

/// Shorthand for building exact rationals in constructions and tests.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::from_ratio(numer, denom)
}

/// Exact value converted to the nearest float.
pub fn rational_to_f64(r: &Rational) -> f64 {
    Field::to_f64(r)
}

/// A value of either kind, used wherever the kind is only known at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Float(f64),
}

impl Scalar {
    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Rational(_) => ScalarKind::Rational,
            Scalar::Float(_) => ScalarKind::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn is_zero_within(&self, eps: f64) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(x) => x.abs() <= eps,
        }
    }

    /// Explicit conversion; the only way a rational becomes a float.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Parses `s` as the given kind: `p/q` or an integer for rationals,
    /// a decimal literal for floats.
    pub fn parse_as(s: &str, kind: ScalarKind) -> Result<Scalar, NumericError> {
        match kind {
            ScalarKind::Rational => parse_rational(s).map(Scalar::Rational),
            ScalarKind::Float => s
                .trim()
                .parse::<f64>()
                .map(Scalar::Float)
                .map_err(|_| NumericError::Parse(s.to_string())),
        }
    }

    fn binary(
        &self,
        other: &Scalar,
        rat: impl FnOnce(&Rational, &Rational) -> Rational,
        flt: impl FnOnce(f64, f64) -> f64,
    ) -> Result<Scalar, NumericError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(rat(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(flt(*a, *b))),
            (a, b) => Err(NumericError::KindMismatch(a.kind(), b.kind())),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        self.binary(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        self.binary(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        self.binary(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        if other.is_zero_within(0.0) {
            return Err(NumericError::DivisionByZero);
        }
        self.binary(other, |a, b| a / b, |a, b| a / b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", r),
            Scalar::Float(x) => write!(f, "{}", x),
        }
    }
}

impl FromStr for Scalar {
    type Err = NumericError;

    /// Strings containing `.`, `e` or `E` (or `inf`/`nan`) read as floats;
    /// everything else as an exact rational.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let looks_float = t.contains(['.', 'e', 'E']) || t.eq_ignore_ascii_case("inf");
        if looks_float {
            Scalar::parse_as(t, ScalarKind::Float)
        } else {
            Scalar::parse_as(t, ScalarKind::Rational)
        }
    }
}

/// Parses `p/q` or `p`, normalising to lowest terms with a positive
/// denominator.
pub fn parse_rational(s: &str) -> Result<Rational, NumericError> {
    let t = s.trim();
    let err = || NumericError::Parse(s.to_string());
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| err())?;
    let q: BigInt = q.parse().map_err(|_| err())?;
    if q.is_zero() {
        return Err(NumericError::DivisionByZero);
    }
    Ok(Rational::new(p, q))
}

/// Serialises as `p/q`, omitting `/1`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, NumericError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(NumericError::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(NumericError::Ragged {
                    row: i,
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c)
    }

    pub fn mul(&self, other: &Matrix<T>) -> Result<Matrix<T>, NumericError> {
        if self.cols != other.rows {
            return Err(self.mismatch(other));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b;
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = std::mem::replace(cell, T::zero()) + &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix<T>) -> Result<Matrix<T>, NumericError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(self.mismatch(other));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Matrix<T>) -> Result<Matrix<T>, NumericError> {
        self.add(&other.map(|x| -x.clone()))
    }

    pub fn pow(&self, exp: u32) -> Result<Matrix<T>, NumericError> {
        if !self.is_square() {
            return Err(self.mismatch(self));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix<T>) -> Matrix<T> {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)].clone() * &other[(i % r2, j % c2)]
        })
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Matrix<T>) -> Matrix<T> {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<T>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<T> {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Largest absolute entry, as a float.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max)
    }

    fn mismatch(&self, other: &Matrix<T>) -> NumericError {
        NumericError::DimensionMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }
}

impl Matrix<Rational> {
    pub fn to_float(&self) -> Matrix<f64> {
        self.map(rational_to_f64)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Row vector times matrix.
pub fn vec_mat<T: Field>(v: &[T], m: &Matrix<T>) -> Result<Vec<T>, NumericError> {
    if v.len() != m.rows() {
        return Err(NumericError::DimensionMismatch {
            left_rows: 1,
            left_cols: v.len(),
            right_rows: m.rows(),
            right_cols: m.cols(),
        });
    }
    let mut out = vec![T::zero(); m.cols()];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, cell) in out.iter_mut().enumerate() {
            let mij = &m[(i, j)];
            if mij.is_zero() {
                continue;
            }
            let prod = vi.clone() * mij;
            *cell = std::mem::replace(cell, T::zero()) + &prod;
        }
    }
    Ok(out)
}

/// Matrix times column vector.
pub fn mat_vec<T: Field>(m: &Matrix<T>, v: &[T]) -> Result<Vec<T>, NumericError> {
    if v.len() != m.cols() {
        return Err(NumericError::DimensionMismatch {
            left_rows: m.rows(),
            left_cols: m.cols(),
            right_rows: v.len(),
            right_cols: 1,
        });
    }
    Ok((0..m.rows()).map(|i| dot(m.row(i), v)).collect())
}

/// Inner product of equal-length slices.
pub fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + &(x.clone() * y)
        }
    })
}

pub fn squared_norm<T: Field>(v: &[T]) -> T {
    dot(v, v)
}

/// Standard product of two matrices of one kind.
pub fn mat_mul<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, NumericError> {
    a.mul(b)
}

/// Every entry in `[0, 1]` and every row summing to exactly one.
pub fn is_stochastic(m: &Matrix<Rational>) -> bool {
    m.is_square() && first_non_stochastic_row(m).is_none()
}

/// Index of the first row violating stochasticity, if any.
pub fn first_non_stochastic_row(m: &Matrix<Rational>) -> Option<usize> {
    let one = Rational::one();
    (0..m.rows()).find(|&i| {
        let row = m.row(i);
        row.iter().any(|x| x.is_negative() || *x > one)
            || row.iter().fold(Rational::zero(), |acc, x| acc + x) != one
    })
}

/// Real-orthogonality test: `max |(m mᵀ − I)_{ij}| <= tol`.
pub fn is_unitary_within<T: Field>(m: &Matrix<T>, tol: f64) -> bool {
    m.is_square() && unitarity_defect(m) <= tol
}

/// `max |(m mᵀ − I)_{ij}|`, infinite for non-square input.
pub fn unitarity_defect<T: Field>(m: &Matrix<T>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let g = dot(m.row(i), m.row(j)).to_f64();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[(i64, i64)]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, d)| ratio(p, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_products() {
        let i2 = Matrix::<Rational>::identity(2);
        assert_eq!(mat_mul(&i2, &i2).unwrap(), i2);
        let m = q(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]);
        assert_eq!(mat_mul(&m, &i2).unwrap(), m);
    }

    #[test]
    fn rational_rotation_squared() {
        let r = q(&[&[(3, 5), (-4, 5)], &[(4, 5), (3, 5)]]);
        let expected = q(&[&[(-7, 25), (-24, 25)], &[(24, 25), (-7, 25)]]);
        assert_eq!(mat_mul(&r, &r).unwrap(), expected);
    }

    #[test]
    fn mul_dimension_mismatch() {
        let a = Matrix::<Rational>::zeros(2, 3);
        let b = Matrix::<Rational>::zeros(2, 3);
        assert!(matches!(
            mat_mul(&a, &b),
            Err(NumericError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn stochastic_examples() {
        assert!(is_stochastic(&Matrix::identity(3)));
        assert!(is_stochastic(&q(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]])));
        assert!(!is_stochastic(&q(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]])));
        assert!(!is_stochastic(&q(&[&[(3, 2), (-1, 2)], &[(0, 1), (1, 1)]])));
    }

    #[test]
    fn unitary_examples() {
        assert!(is_unitary_within(&Matrix::<f64>::identity(4), 1e-9));
        let t = std::f64::consts::FRAC_PI_3;
        let rot = Matrix::from_rows(vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap();
        assert!(is_unitary_within(&rot, 1e-9));
        let shear = Matrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(!is_unitary_within(&shear, 1e-9));
    }

    #[test]
    fn scalar_kind_mismatch_is_an_error() {
        let a = Scalar::Rational(ratio(1, 2));
        let b = Scalar::Float(0.5);
        assert_eq!(
            a.checked_add(&b),
            Err(NumericError::KindMismatch(ScalarKind::Rational, ScalarKind::Float))
        );
        assert_eq!(a.checked_add(&a).unwrap(), Scalar::Rational(ratio(1, 1)));
        assert_eq!(a.to_float().checked_mul(&b).unwrap(), Scalar::Float(0.25));
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(parse_rational(" 6/-8 ").unwrap(), ratio(-3, 4));
        assert_eq!(format_rational(&ratio(-3, 4)), "-3/4");
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert_eq!("0.25".parse::<Scalar>().unwrap(), Scalar::Float(0.25));
        assert_eq!("1/4".parse::<Scalar>().unwrap(), Scalar::Rational(ratio(1, 4)));
    }

    #[test]
    fn float_zero_uses_tolerance() {
        assert!(1e-10f64.is_zero_within(DEFAULT_EPSILON));
        assert!(!1e-8f64.is_zero_within(DEFAULT_EPSILON));
        assert!(!ratio(1, 1_000_000_000_000).is_zero_within(DEFAULT_EPSILON));
    }
}
