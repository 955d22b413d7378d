//! Dirichlet ring on tables `u[n - 1] = u(n)`.
//!
//! Both kernels walk the pairs `(d, m)` with `d m <= N` directly, which touches
//! every divisor pair exactly once in `O(N log N)` without factoring anything.

use num_rational::BigRational;

use super::sequence::{CoefficientSequence, Scalar};
use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::real::{Field, Precision};

/// `(u ⋆ v)(n) = sum_{d | n} u(d) v(n / d)` for `n <= min(len u, len v)`.
pub fn convolve<T: Field>(u: &[T], v: &[T]) -> Vec<T> {
    let n = u.len().min(v.len());
    let mut out: Vec<Option<T>> = vec![None; n];
    for d in 1..=n {
        let ud = &u[d - 1];
        if ud.is_zero() {
            continue;
        }
        for m in 1..=n / d {
            let t = ud.clone() * v[m - 1].clone();
            let slot = &mut out[d * m - 1];
            *slot = Some(match slot.take() {
                Some(acc) => acc + t,
                None => t,
            });
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, x)| x.unwrap_or_else(|| zero_like(&u[i.min(u.len() - 1)])))
        .collect()
}

fn zero_like<T: Field>(x: &T) -> T {
    x.clone() - x.clone()
}

/// Dirichlet inverse: `w(1) = 1/u(1)`, and for `n >= 2`
/// `w(n) = -(1/u(1)) sum_{d | n, d < n} w(d) u(n / d)`.
pub fn inverse<T: Field>(u: &[T]) -> Result<Vec<T>> {
    let Some(u1) = u.first() else {
        return Ok(Vec::new());
    };
    if u1.is_zero() {
        return Err(Error::NotInvertible);
    }
    let n = u.len();
    let one = u1.clone() / u1.clone();
    let inv1 = one / u1.clone();
    // acc[k - 1] holds sum over the divisors d < k already finalized
    let mut acc: Vec<T> = vec![zero_like(u1); n];
    let mut w: Vec<T> = Vec::with_capacity(n);
    for d in 1..=n {
        let wd = if d == 1 {
            inv1.clone()
        } else {
            -(inv1.clone() * acc[d - 1].clone())
        };
        if !wd.is_zero() {
            for m in 2..=n / d {
                let um = &u[m - 1];
                if !um.is_zero() {
                    acc[d * m - 1] = acc[d * m - 1].clone() + wd.clone() * um.clone();
                }
            }
        }
        w.push(wd);
    }
    Ok(w)
}

fn to_tables(u: &CoefficientSequence, v: Option<&CoefficientSequence>, limit: u64) -> Result<bool> {
    if limit == 0 {
        return Err(Error::InvalidArgument("limit must be at least 1".into()));
    }
    Ok(u.is_exact() && v.is_none_or(|v| v.is_exact()))
}

fn explicit_from_rationals(values: Vec<BigRational>) -> Result<CoefficientSequence> {
    CoefficientSequence::explicit(values.into_iter().map(Scalar::Rational).collect())
}

fn explicit_from_floats(values: Vec<BigFloat>) -> Result<CoefficientSequence> {
    CoefficientSequence::explicit(values.into_iter().map(Scalar::Real).collect())
}

/// `u ⋆ v` on `1..=limit`, exact when both inputs are rational.
pub fn dirichlet_convolve(
    u: &CoefficientSequence,
    v: &CoefficientSequence,
    limit: u64,
    p: Precision,
) -> Result<CoefficientSequence> {
    if to_tables(u, Some(v), limit)? {
        let (a, b) = (u.tabulate_exact(limit)?, v.tabulate_exact(limit)?);
        explicit_from_rationals(convolve(&a, &b))
    } else {
        let a: Vec<BigFloat> = u.tabulate(limit, p)?;
        let b: Vec<BigFloat> = v.tabulate(limit, p)?;
        explicit_from_floats(convolve(&a, &b))
    }
}

/// `u⁻¹` on `1..=limit`, exact when `u` is rational.
pub fn dirichlet_inverse(
    u: &CoefficientSequence,
    limit: u64,
    p: Precision,
) -> Result<CoefficientSequence> {
    if to_tables(u, None, limit)? {
        explicit_from_rationals(inverse(&u.tabulate_exact(limit)?)?)
    } else {
        let a: Vec<BigFloat> = u.tabulate(limit, p)?;
        explicit_from_floats(inverse(&a)?)
    }
}
