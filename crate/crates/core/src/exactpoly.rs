//! Exact rational polynomials and exact integration over `[0, 1]`.
//!
//! Everything in the crate that claims exactness is ultimately checked against
//! [`exact_l2_norm`] and [`exact_weighted_l2_norm`], which integrate monomials
//! in closed form and never touch floating point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num / den` from machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Dense polynomial in `x`; `coeffs[i]` is the coefficient of `x^i`.
///
/// Trailing zero coefficients are stripped after every operation, so the
/// empty vector is the zero polynomial and structural equality is
/// polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DensePoly {
    coeffs: Vec<Rational>,
}

impl DensePoly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = DensePoly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn derivative(&self) -> DensePoly {
        DensePoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> DensePoly {
        DensePoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Clears denominators: returns integer coefficients `a` and a positive
    /// `d` with `self = (1/d) * sum a_i x^i`.
    fn integerize(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (ints, den)
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => write!(f, "x")?,
                1 => write!(f, "{mag}*x")?,
                _ if mag.is_one() => write!(f, "x^{i}")?,
                _ => write!(f, "{mag}*x^{i}")?,
            }
        }
        Ok(())
    }
}

pub fn poly_add(a: &DensePoly, b: &DensePoly) -> DensePoly {
    let len = a.coeffs.len().max(b.coeffs.len());
    DensePoly::new((0..len).map(|i| a.coeff(i) + b.coeff(i)).collect())
}

pub fn poly_sub(a: &DensePoly, b: &DensePoly) -> DensePoly {
    let len = a.coeffs.len().max(b.coeffs.len());
    DensePoly::new((0..len).map(|i| a.coeff(i) - b.coeff(i)).collect())
}

pub fn poly_mul(a: &DensePoly, b: &DensePoly) -> DensePoly {
    if a.is_zero() || b.is_zero() {
        return DensePoly::zero();
    }
    let mut out = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, ai) in a.coeffs.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    DensePoly::new(out)
}

/// Returns `c * a`, or `c * x * a` when `mul_by_x` is set.
pub fn poly_scale_shift(a: &DensePoly, c: &Rational, mul_by_x: bool) -> DensePoly {
    if c.is_zero() || a.is_zero() {
        return DensePoly::zero();
    }
    let scaled = a.coeffs.iter().map(|ai| ai * c);
    if mul_by_x {
        DensePoly::new(std::iter::once(Rational::zero()).chain(scaled).collect())
    } else {
        DensePoly::new(scaled.collect())
    }
}

/// Horner evaluation.
pub fn poly_eval(a: &DensePoly, x: &Rational) -> Rational {
    a.coeffs
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Exact `∫₀¹ p(x) dx`.
pub fn integrate_unit(p: &DensePoly) -> Rational {
    p.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c / BigInt::from(i + 1))
        .sum()
}

/// Coefficients of `p(x)^2` after clearing denominators, i.e. integers `s`
/// and `d` with `p^2 = (1/d^2) * sum s_k x^k`.
fn integer_square(p: &DensePoly) -> (Vec<BigInt>, BigInt) {
    let (a, den) = p.integerize();
    let len = 2 * a.len() - 1;
    let nonzero: Vec<(usize, &BigInt)> =
        a.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    let mut sq = vec![BigInt::zero(); len];
    for (idx, &(i, ai)) in nonzero.iter().enumerate() {
        sq[2 * i] += ai * ai;
        for &(j, aj) in &nonzero[idx + 1..] {
            sq[i + j] += (ai * aj) << 1;
        }
    }
    (sq, den)
}

/// Sums `sq[k] * weight(k)` exactly, where every `weight(k)` is a rational with
/// denominator dividing `lcm(1..=max_den)`.
fn weighted_moment_sum(
    sq: &[BigInt],
    den: &BigInt,
    max_den: usize,
    weight: impl Fn(usize, &BigInt) -> BigInt,
) -> Rational {
    let common = (1..=max_den).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)));
    let total: BigInt = sq
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(k, s)| s * weight(k, &common))
        .sum();
    Rational::new(total, common * den * den)
}

/// Exact `∫₀¹ p(x)^2 dx = Σ c_i c_j / (i + j + 1)`.
pub fn exact_l2_norm(p: &DensePoly) -> Rational {
    if p.is_zero() {
        return Rational::zero();
    }
    let (sq, den) = integer_square(p);
    let max_den = sq.len();
    weighted_moment_sum(&sq, &den, max_den, |k, common| common / BigInt::from(k + 1))
}

/// Exact `∫₀¹ (1 - x^2) p(x)^2 dx`, using `∫₀¹ (1 - x²) x^k dx = 1/(k+1) - 1/(k+3)`.
pub fn exact_weighted_l2_norm(p: &DensePoly) -> Rational {
    if p.is_zero() {
        return Rational::zero();
    }
    let (sq, den) = integer_square(p);
    let max_den = sq.len() + 2;
    weighted_moment_sum(&sq, &den, max_den, |k, common| {
        common / BigInt::from(k + 1) - common / BigInt::from(k + 3)
    })
}

impl Add for &DensePoly {
    type Output = DensePoly;
    fn add(self, rhs: &DensePoly) -> DensePoly {
        poly_add(self, rhs)
    }
}

impl Sub for &DensePoly {
    type Output = DensePoly;
    fn sub(self, rhs: &DensePoly) -> DensePoly {
        poly_sub(self, rhs)
    }
}

impl Mul for &DensePoly {
    type Output = DensePoly;
    fn mul(self, rhs: &DensePoly) -> DensePoly {
        poly_mul(self, rhs)
    }
}

impl Mul<&Rational> for &DensePoly {
    type Output = DensePoly;
    fn mul(self, rhs: &Rational) -> DensePoly {
        poly_scale_shift(self, rhs, false)
    }
}

impl Neg for &DensePoly {
    type Output = DensePoly;
    fn neg(self) -> DensePoly {
        DensePoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}
