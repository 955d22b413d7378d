//! Closed forms obtained by Möbius inversion, used as oracles for the solver.
//!
//! For `Φ_u` the equation `A(n) = n^{-β}` reads `sum_k k a(k) W(⌊n/k⌋) = n^{1-β}`
//! with `W = (u ⋆ 1)` summed, hence `n a(n) = (b ⋆ u⁻¹)(n)` where
//! `b = μ ⋆ Δ` and `Δ(d) = d^{1-β} - (d-1)^{1-β}`.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::arith::{convolve, inverse, CoefficientSequence, FactorSieve};
use crate::error::{Error, Result};
use crate::real::{pow_rational, CompensatedSum, Precision, Real};

fn check_range(n_max: u64, sieve: &FactorSieve) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if n_max > sieve.limit() && n_max > 1 {
        return Err(Error::OutOfRange {
            what: "N",
            value: n_max,
            limit: sieve.limit(),
        });
    }
    Ok(())
}

fn moebius_in<T: Real>(n_max: u64, sieve: &FactorSieve, p: Precision) -> Vec<T> {
    let mut mu = sieve.moebius_table();
    mu.resize(n_max as usize, 0);
    mu.truncate(n_max as usize);
    mu.into_iter().map(|m| T::from_i64(m as i64, p)).collect()
}

/// `b(n) = n a(n)` for the Ingham weight:
/// `b(n) = sum_{d | n} μ(n/d) (d^{1-β} - (d-1)^{1-β})`.
///
/// The `d = 1` term is `1`: it comes from `A(1) - A(0)` with `A(0)` the empty
/// sum. `β > 1` is rejected, since `(d-1)^{1-β}` is then singular at `d = 1`
/// as written.
pub fn ingham_numerators<T: Real>(
    beta: &BigRational,
    n_max: u64,
    sieve: &FactorSieve,
    p: Precision,
) -> Result<Vec<T>> {
    check_range(n_max, sieve)?;
    if *beta > BigRational::one() {
        return Err(Error::Domain(format!(
            "closed form needs β <= 1, got {beta}: (d-1)^(1-β) is singular at d = 1"
        )));
    }
    let e = BigRational::one() - beta;
    let mut prev = T::from_i64(0, p);
    let mut delta = Vec::with_capacity(n_max as usize);
    for d in 1..=n_max {
        let cur: T = pow_rational(d, &e, p)?;
        delta.push(cur.clone() - prev);
        prev = cur;
    }
    Ok(convolve(&moebius_in::<T>(n_max, sieve, p), &delta))
}

fn divide_by_index<T: Real>(c: Vec<T>, p: Precision) -> Vec<T> {
    c.into_iter()
        .enumerate()
        .map(|(i, x)| x / T::from_i64(i as i64 + 1, p))
        .collect()
}

/// `a(n) = (1/n) sum_{d | n} μ(n/d) (d^{1-β} - (d-1)^{1-β})`, the solution
/// for the Ingham weight.
pub fn moebius_closed_form<T: Real>(
    beta: &BigRational,
    n_max: u64,
    sieve: &FactorSieve,
    p: Precision,
) -> Result<Vec<T>> {
    Ok(divide_by_index(
        ingham_numerators(beta, n_max, sieve, p)?,
        p,
    ))
}

/// `a(n) = (1/n) sum_{d | n} b(d) χ(n/d) μ(n/d)`, the solution for `Φ_χ`
/// with `χ` completely multiplicative (so that `χ⁻¹ = μ χ`).
pub fn character_closed_form<T: Real>(
    beta: &BigRational,
    chi: &CoefficientSequence,
    n_max: u64,
    sieve: &FactorSieve,
    p: Precision,
) -> Result<Vec<T>> {
    if !chi.is_completely_multiplicative() {
        return Err(Error::InvalidArgument(format!(
            "{} is not completely multiplicative",
            chi.id()
        )));
    }
    let b = ingham_numerators::<T>(beta, n_max, sieve, p)?;
    let chi_vals: Vec<T> = chi.tabulate(n_max, p)?;
    let mu = moebius_in::<T>(n_max, sieve, p);
    let twisted: Vec<T> = chi_vals.into_iter().zip(mu).map(|(c, m)| c * m).collect();
    Ok(divide_by_index(convolve(&b, &twisted), p))
}

/// `a(n) = (1/n) sum_{d | n} b(n/d) u⁻¹(d)`, the solution for `Φ_u` with `u`
/// multiplicative and `u(1) = 1`.
pub fn multiplicative_closed_form<T: Real>(
    beta: &BigRational,
    u: &CoefficientSequence,
    n_max: u64,
    sieve: &FactorSieve,
    p: Precision,
) -> Result<Vec<T>> {
    if !u.is_multiplicative() {
        return Err(Error::InvalidArgument(format!(
            "{} is not multiplicative",
            u.id()
        )));
    }
    let vals: Vec<T> = u.tabulate(n_max, p)?;
    if vals[0] != T::from_i64(1, p) {
        return Err(Error::InvalidArgument(
            "multiplicative sequence needs u(1) = 1".into(),
        ));
    }
    let b = ingham_numerators::<T>(beta, n_max, sieve, p)?;
    Ok(divide_by_index(convolve(&b, &inverse(&vals)?), p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityRow {
    pub n: u64,
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

/// `sum_{k <= n} λ(k) ⌊n/k⌋ = ⌊sqrt n⌋` for every `n <= N`, in exact integers.
///
/// The left side is accumulated as `sum_{m <= n} (λ ⋆ 1)(m)`, the divisor-sum
/// form of the same quantity.
pub fn summatory_identity_check(n_max: u64, sieve: &FactorSieve) -> Result<Vec<IdentityRow>> {
    check_range(n_max, sieve)?;
    let n = n_max as usize;
    let lambda = sieve.liouville_table();
    let mut conv = vec![0i64; n];
    for d in 1..=n {
        let l = lambda[d - 1] as i64;
        let mut m = d;
        while m <= n {
            conv[m - 1] += l;
            m += d;
        }
    }
    let mut lhs = 0i64;
    Ok((1..=n_max)
        .map(|k| {
            lhs += conv[k as usize - 1];
            let rhs = k.isqrt() as i64;
            IdentityRow {
                n: k,
                lhs,
                rhs,
                equal: lhs == rhs,
            }
        })
        .collect())
}

/// `A(n)` for `g(x) = (x + 1)/2` and `A_g(n) = n^{1/2}`, by the exact formula
/// `A(n) = h(n) + r_n (2 + sum_{k=2}^{n-1} h(k) / r_k)` with
/// `h(k) = (k^{3/2} - (k-1)^{3/2}) / k` and `r_k = (1/2)_k / k!`.
pub fn affine_exact_formula<T: Real>(n: u64, p: Precision) -> Result<T> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "n (needs n >= 2)",
            value: n,
            limit: u64::MAX,
        });
    }
    let three_halves = BigRational::new(3.into(), 2.into());
    let int = |v: u64| T::from_i64(v as i64, p);
    let h = |k: u64| -> Result<T> {
        let hi: T = pow_rational(k, &three_halves, p)?;
        let lo: T = pow_rational(k - 1, &three_halves, p)?;
        Ok((hi - lo) / int(k))
    };
    let half = T::from_ratio(&BigRational::new(1.into(), 2.into()), p);
    // r_k = r_{k-1} (k - 1/2) / k
    let mut r = int(1);
    let mut sum = CompensatedSum::<T>::new(p);
    for k in 1..n {
        r = r * (int(k) - half.clone()) / int(k);
        if k >= 2 {
            sum.add(h(k)? / r.clone());
        }
    }
    let r_n = r * (int(n) - half) / int(n);
    Ok(h(n)? + r_n * (int(2) + sum.value()))
}
