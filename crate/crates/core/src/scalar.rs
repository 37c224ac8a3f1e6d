//! Number types the solvers can run over: exact rationals (the default) and
//! `f64` for instances too large for exact work.

use std::fmt::{Debug, Display};

use num_rational::BigRational;
use num_traits::{Num, Zero};

use crate::linalg::{self, Matrix};
use crate::rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

pub trait Scalar:
    Num + Clone + Debug + Display + PartialOrd + Send + Sync + std::ops::Neg<Output = Self> + 'static
{
    const MODE: Mode;

    fn from_rational(value: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality as the mode understands it: exact for rationals, a relative
    /// tolerance of `1e-9` for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Solves `a · X = b`; `None` when `a` is singular.
    fn solve(a: &Matrix<Self>, b: &Matrix<Self>) -> Option<Matrix<Self>>;

    fn sum<'a>(values: impl IntoIterator<Item = &'a Self>) -> Self {
        values.into_iter().fold(Self::zero(), |acc, v| acc + v.clone())
    }

    /// Exact textual form when one exists.
    fn exact_string(&self) -> Option<String>;
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Exact;

    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }

    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn solve(a: &Matrix<Self>, b: &Matrix<Self>) -> Option<Matrix<Self>> {
        linalg::solve_exact(a, b)
    }

    fn exact_string(&self) -> Option<String> {
        Some(self.to_string())
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_rational(value: &BigRational) -> Self {
        rational::to_f64(value)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= 1e-9 * scale
    }

    fn solve(a: &Matrix<Self>, b: &Matrix<Self>) -> Option<Matrix<Self>> {
        linalg::solve_f64(a, b)
    }

    fn exact_string(&self) -> Option<String> {
        None
    }
}

pub(crate) fn is_zero<S: Scalar>(value: &S) -> bool {
    Zero::is_zero(value)
}
