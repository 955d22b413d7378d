//! Scalar tower: exact rationals, `f64`, and [`BigFloat`].
//!
//! [`Field`] is what the Dirichlet-ring code needs; [`Real`] adds ordering and
//! the elementary functions used by the solvers and closed forms.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};

/// Working precision in bits. `f64` always runs at 53 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision(pub u32);

impl Precision {
    pub const F64: Precision = Precision(53);
    pub const DEFAULT_HIGH: Precision = Precision(256);

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Unit roundoff `2^-bits`.
    pub fn unit_roundoff(self) -> f64 {
        crate::bigfloat::ldexp_f64(1.0, -(self.0 as i64))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT_HIGH
    }
}

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64, p: Precision) -> Self;
    fn from_bigint(v: &BigInt, p: Precision) -> Self;
    fn from_ratio(r: &BigRational, p: Precision) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn mul_i64(&self, k: i64, p: Precision) -> Self {
        self.clone() * Self::from_i64(k, p)
    }
}

pub trait Real: Field + PartialOrd {
    /// Whether sums should carry a Neumaier compensation term.
    const COMPENSATED: bool;

    fn from_f64(x: f64, p: Precision) -> Self;
    fn from_bigfloat(x: &BigFloat, p: Precision) -> Self;
    fn precision(&self) -> Precision;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
}

impl Field for f64 {
    fn from_i64(v: i64, _: Precision) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt, _: Precision) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }
    fn from_ratio(r: &BigRational, _: Precision) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn mul_i64(&self, k: i64, _: Precision) -> Self {
        self * k as f64
    }
}

impl Real for f64 {
    const COMPENSATED: bool = true;

    fn from_f64(x: f64, _: Precision) -> Self {
        x
    }
    fn from_bigfloat(x: &BigFloat, _: Precision) -> Self {
        x.to_f64()
    }
    fn precision(&self) -> Precision {
        Precision::F64
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
}

impl Field for BigRational {
    fn from_i64(v: i64, _: Precision) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_bigint(v: &BigInt, _: Precision) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn from_ratio(r: &BigRational, _: Precision) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Field for BigFloat {
    fn from_i64(v: i64, p: Precision) -> Self {
        BigFloat::from_i64(v, p.0)
    }
    fn from_bigint(v: &BigInt, p: Precision) -> Self {
        BigFloat::from_bigint(v, p.0)
    }
    fn from_ratio(r: &BigRational, p: Precision) -> Self {
        BigFloat::from_ratio(r.numer(), r.denom(), p.0)
    }
    fn is_zero(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }
    fn mul_i64(&self, k: i64, p: Precision) -> Self {
        self.clone() * BigFloat::from_i64(k, p.0)
    }
}

impl Real for BigFloat {
    const COMPENSATED: bool = false;

    fn from_f64(x: f64, p: Precision) -> Self {
        BigFloat::from_f64(x, p.0)
    }
    fn from_bigfloat(x: &BigFloat, p: Precision) -> Self {
        x.with_precision(p.0)
    }
    fn precision(&self) -> Precision {
        Precision(BigFloat::precision(self))
    }
    fn abs(&self) -> Self {
        BigFloat::abs(self)
    }
    fn sqrt(&self) -> Self {
        BigFloat::sqrt(self)
    }
    fn ln(&self) -> Self {
        BigFloat::ln(self)
    }
    fn exp(&self) -> Self {
        BigFloat::exp(self)
    }
    fn powf(&self, e: &Self) -> Self {
        BigFloat::powf(self, e)
    }
}

/// Neumaier-compensated running sum. For types with `COMPENSATED = false`
/// it degrades to plain summation.
#[derive(Debug, Clone)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new(p: Precision) -> Self {
        CompensatedSum {
            sum: T::from_i64(0, p),
            comp: T::from_i64(0, p),
        }
    }

    pub fn add(&mut self, x: T) {
        if !T::COMPENSATED {
            self.sum = self.sum.clone() + x;
            return;
        }
        let t = self.sum.clone() + x.clone();
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp.clone() + ((self.sum.clone() - t.clone()) + x);
        } else {
            self.comp = self.comp.clone() + ((x - t.clone()) + self.sum.clone());
        }
        self.sum = t;
    }

    /// Leading part and the accumulated correction.
    pub fn parts(&self) -> (T, T) {
        (self.sum.clone(), self.comp.clone())
    }

    pub fn value(&self) -> T {
        self.sum.clone() + self.comp.clone()
    }
}

/// `|a - b| / max(|a|, |b|)`, and 0 when both vanish.
pub fn relative_difference<T: Real>(a: &T, b: &T) -> f64 {
    let scale = if a.abs() > b.abs() { a.abs() } else { b.abs() };
    if scale.is_zero() {
        return 0.0;
    }
    ((a.clone() - b.clone()).abs() / scale).to_f64()
}

/// Parse `"3"`, `"-7/2"`, `"0.125"` or `"1.5e-3"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0")
        .parse::<BigInt>()
        .map_err(|_| bad())?
        / 10;
    let scale = exp10 - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Exact rational value of a finite `f64`.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// `base^e` for a rational exponent. Integer exponents are computed by
/// repeated multiplication and half-integers through `sqrt`, so the common
/// cases stay correctly rounded; anything else goes through `exp(e ln b)`.
/// `0^e` is 0 for `e > 0` and 1 for `e = 0`.
pub fn pow_rational<T: Real>(base: u64, e: &BigRational, p: Precision) -> Result<T> {
    if base == 0 {
        return match e.numer().sign() {
            num_bigint::Sign::Plus => Ok(T::from_i64(0, p)),
            num_bigint::Sign::NoSign => Ok(T::from_i64(1, p)),
            num_bigint::Sign::Minus => Err(Error::Domain(format!("0^{e} is singular"))),
        };
    }
    let b = T::from_i64(base as i64, p);
    let two = BigInt::from(2);
    let (whole, root) = if e.is_integer() {
        (e.to_integer(), None)
    } else if *e.denom() == two {
        // e = k + 1/2 with k = floor(e)
        (e.floor().to_integer(), Some(b.sqrt()))
    } else {
        let ef = T::from_ratio(e, p);
        return Ok((b.ln() * ef).exp());
    };
    let k = whole
        .to_i64()
        .filter(|k| k.unsigned_abs() <= 4096)
        .ok_or_else(|| Error::InvalidArgument(format!("exponent {e} too large")))?;
    let mut acc = T::from_i64(1, p);
    let mut sq = b;
    let mut m = k.unsigned_abs();
    while m > 0 {
        if m & 1 == 1 {
            acc = acc * sq.clone();
        }
        m >>= 1;
        if m > 0 {
            sq = sq.clone() * sq;
        }
    }
    if k < 0 {
        acc = T::from_i64(1, p) / acc;
    }
    Ok(match root {
        Some(r) => acc * r,
        None => acc,
    })
}
