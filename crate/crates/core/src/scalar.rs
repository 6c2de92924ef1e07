// Copyright 2026 The urnvote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Numeric abstraction over exact rationals and `f64`.
//!
//! Every scheme in this crate is a rational function of the input
//! probabilities, so the same code runs in exact arithmetic (used by the
//! margin and kernel checks) and in floating point (used by simulations on
//! user-supplied decimal instances).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// Slack allowed when checking that a vector sums to one.
    fn stochastic_tolerance() -> Self;

    fn ratio(num: i64, den: i64) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self^-exp` for a small non-negative exponent.
    fn inv_pow(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out / self.clone();
        }
        out
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn stochastic_tolerance() -> Self {
        1e-12
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn stochastic_tolerance() -> Self {
        Self::zero()
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Larger of two partially ordered values (the first one on ties).
pub fn max<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub fn min<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub fn sum<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v.clone())
}

/// True when `|a - b| <= tol`.
pub fn close<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

/// Parses `"3/7"`, `"0.25"`, `"2.5e-3"` or `"2"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((mantissa, exp)) = text.split_once(['e', 'E']) {
        if mantissa.contains('/') {
            return None;
        }
        let value = parse_rational(mantissa)?;
        let exp: i32 = exp.parse().ok()?;
        let scale = BigRational::from_integer(num_traits::pow(
            BigInt::from(10),
            exp.unsigned_abs() as usize,
        ));
        return Some(if exp >= 0 {
            value * scale
        } else {
            value / scale
        });
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let num: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = BigRational::new(num, den);
        return Some(if negative { -value } else { value });
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Converts an `f64` to the scalar type (exactly, for rationals).
pub fn from_f64<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite value")
}

pub fn one_half<T: Scalar>() -> T {
    T::one() / (T::one() + T::one())
}
