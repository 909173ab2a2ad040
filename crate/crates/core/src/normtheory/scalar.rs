use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::exactpoly::Rational;

/// Arithmetic mode of a norm table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

/// Running sum; exact for rationals, Neumaier-compensated for doubles.
pub trait Accumulator<S>: Default {
    fn push(&mut self, value: S);
    fn value(&self) -> S;
}

/// Scalar a norm table can be built over.
pub trait NormScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;
    type Acc: Accumulator<Self>;

    fn from_rational(value: &Rational) -> Self;
    fn from_int(value: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Equality up to the mode's resolution: exact for rationals, 1e-10
    /// relative for doubles.
    fn agrees_with(&self, other: &Self) -> bool;

    fn sum<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        let mut acc = Self::Acc::default();
        for v in iter {
            acc.push(v);
        }
        acc.value()
    }
}

#[derive(Default)]
pub struct ExactSum(Rational);

impl Accumulator<Rational> for ExactSum {
    fn push(&mut self, value: Rational) {
        self.0 += value;
    }
    fn value(&self) -> Rational {
        self.0.clone()
    }
}

impl NormScalar for Rational {
    const MODE: Mode = Mode::Exact;
    type Acc = ExactSum;

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }
    fn from_int(value: i64) -> Self {
        Rational::from_integer(BigInt::from(value))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Default, Clone, Copy, Debug)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl Accumulator<f64> for CompensatedSum {
    fn push(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl NormScalar for f64 {
    const MODE: Mode = Mode::Float;
    type Acc = CompensatedSum;

    fn from_rational(value: &Rational) -> Self {
        if value.is_zero() {
            return 0.0;
        }
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }
    fn from_int(value: i64) -> Self {
        value as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn agrees_with(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(f64::MIN_POSITIVE);
        (self - other).abs() <= 1e-10 * scale
    }
}
