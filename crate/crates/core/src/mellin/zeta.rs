//! Riemann and Hurwitz zeta by Euler–Maclaurin summation, in `f64`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Highest Bernoulli index pair used in the tail, `B_{2 J_MAX}`.
const J_MAX: usize = 80;

/// `B_{2j} / (2j)!` for `j = 1..=J_MAX`, at index `j - 1`.
fn tail_coefficients() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b = bernoulli_numbers(2 * J_MAX);
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(J_MAX);
        for k in 1..=2 * J_MAX {
            fact *= k;
            if k % 2 == 0 {
                let c = &b[k] / BigRational::from_integer(fact.clone());
                out.push(c.to_f64().unwrap_or(0.0));
            }
        }
        out
    })
}

/// `B_0..=B_n` (with `B_1 = +1/2`) by the Akiyama–Tanigawa transform.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut row: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let d = &row[j - 1] - &row[j];
            row[j - 1] = d * BigRational::from_integer(BigInt::from(j));
        }
        out.push(row[0].clone());
    }
    out
}

/// `x^e` for real `x > 0`.
pub(crate) fn rpow(x: f64, e: Complex64) -> Complex64 {
    (e * x.ln()).exp()
}

/// Result of one Euler–Maclaurin evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Summed {
    pub value: Complex64,
    /// Size of the first omitted tail term.
    pub truncation: f64,
    /// Bound on accumulated rounding.
    pub rounding: f64,
}

impl Summed {
    pub fn error(&self) -> f64 {
        self.truncation + self.rounding
    }
}

/// `sum_{k >= 0} (k + a)^{-s}` for any `a > 0` and `s != 1`, without checks.
pub(crate) fn hurwitz_raw(s: Complex64, a: f64) -> Summed {
    let mut n = 10 + (s.norm() / 3.0).ceil() as usize;
    loop {
        let r = hurwitz_with(s, a, n);
        if r.truncation <= 1e-17 * r.value.norm().max(1e-300) || n > 1 << 16 {
            return r;
        }
        n *= 2;
    }
}

fn hurwitz_with(s: Complex64, a: f64, n: usize) -> Summed {
    let mut head = Complex64::zero();
    let mut comp = Complex64::zero();
    let mut mag = 0.0;
    for k in 0..n {
        let t = rpow(k as f64 + a, -s);
        mag += t.norm();
        // Kahan on both parts
        let y = t - comp;
        let next = head + y;
        comp = (next - head) - y;
        head = next;
    }
    let x = n as f64 + a;
    let xs = rpow(x, -s);
    let mut tail = xs * x / (s - 1.0) + xs * 0.5;
    let coef = tail_coefficients();
    // rising factorial s (s+1) ... (s + 2j - 2) times x^{-s-2j+1}
    let mut fac = s * xs / x;
    let mut truncation = f64::INFINITY;
    for (j, c) in coef.iter().enumerate() {
        let term = fac * *c;
        let size = term.norm();
        if size >= truncation {
            break;
        }
        tail += term;
        truncation = size;
        if size <= 1e-18 * (head + tail).norm() {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        fac = fac * (s + (m - 1.0)) * (s + m) / (x * x);
    }
    let value = head + tail;
    Summed {
        value,
        truncation,
        rounding: 2.0 * f64::EPSILON * (mag + tail.norm()),
    }
}

fn check_envelope(s: Complex64) -> Result<()> {
    if s.im.abs() > 200.0 || !(-2.0..=3.0).contains(&s.re) {
        return Err(Error::Domain(format!(
            "s = {s} is outside |Im s| <= 200, -2 <= Re s <= 3"
        )));
    }
    if (s - 1.0).norm() == 0.0 {
        return Err(Error::Pole("s = 1".into()));
    }
    Ok(())
}

fn accept(r: Summed, tol: f64) -> Result<Complex64> {
    if r.error() > tol {
        return Err(Error::Precision(format!(
            "estimated error {:.3e} exceeds tolerance {tol:.3e} in f64",
            r.error()
        )));
    }
    Ok(r.value)
}

/// `ζ(s)` with absolute error at most `tol`, for `|Im s| <= 200` and
/// `-2 <= Re s <= 3`.
pub fn zeta_complex(s: Complex64, tol: f64) -> Result<Complex64> {
    check_envelope(s)?;
    accept(hurwitz_raw(s, 1.0), tol)
}

/// `ζ(s, a) = sum_{k >= 0} (k + a)^{-s}` for `0 < a <= 1`.
pub fn hurwitz_zeta(s: Complex64, a: f64, tol: f64) -> Result<Complex64> {
    check_envelope(s)?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!(
            "Hurwitz parameter a = {a} must lie in ]0, 1]"
        )));
    }
    accept(hurwitz_raw(s, a), tol)
}

/// `ψ(x)` for `x > 0`: upward recurrence to `x >= 10`, then the asymptotic
/// series.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let coef = tail_coefficients();
    let inv2 = 1.0 / (y * y);
    let mut pw = inv2;
    let mut series = 0.0;
    // B_{2k} / (2k y^{2k}) = coef[k-1] (2k-1)! / y^{2k}
    let mut fact = 1.0;
    for (k, c) in coef.iter().enumerate().take(10) {
        let m = 2 * (k + 1);
        if k > 0 {
            fact *= ((m - 2) * (m - 1)) as f64;
        }
        series += c * fact * pw;
        pw *= inv2;
    }
    shift + y.ln() - 0.5 / y - series
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bernoulli_head() {
        let b = bernoulli_numbers(8);
        let want = [
            (1, 1),
            (1, 2),
            (1, 6),
            (0, 1),
            (-1, 30),
            (0, 1),
            (1, 42),
            (0, 1),
            (-1, 30),
        ];
        for (x, (n, d)) in b.iter().zip(want) {
            assert_eq!(*x, BigRational::new(n.into(), d.into()));
        }
    }

    #[test]
    fn classical_values() {
        let z2 = zeta_complex(c(2.0, 0.0), 1e-13).unwrap();
        assert!((z2 - PI * PI / 6.0).norm() < 1e-13);
        let z0 = zeta_complex(c(0.0, 0.0), 1e-13).unwrap();
        assert!((z0 + 0.5).norm() < 1e-13);
        let zm1 = zeta_complex(c(-1.0, 0.0), 1e-13).unwrap();
        assert!((zm1 + 1.0 / 12.0).norm() < 1e-13);
        let z3 = zeta_complex(c(3.0, 0.0), 1e-13).unwrap();
        assert!((z3.re - 1.202_056_903_159_594_3).abs() < 1e-13);
    }

    #[test]
    fn first_zero_is_small() {
        let z = zeta_complex(c(0.5, 14.134725), 1e-10).unwrap();
        assert!(z.norm() < 1e-4);
        let z = zeta_complex(c(0.5, 14.134_725_141_734_693), 1e-12).unwrap();
        assert!(z.norm() < 1e-12);
    }

    #[test]
    fn hurwitz_values() {
        let h = hurwitz_zeta(c(2.0, 0.0), 1.0, 1e-13).unwrap();
        assert!((h - PI * PI / 6.0).norm() < 1e-13);
        let h = hurwitz_zeta(c(2.0, 0.0), 0.5, 1e-13).unwrap();
        assert!((h - PI * PI / 2.0).norm() < 1e-12);
        assert!(hurwitz_zeta(c(2.0, 0.0), 1.5, 1e-13).is_err());
    }

    #[test]
    fn envelope_and_pole() {
        assert!(matches!(
            zeta_complex(c(1.0, 0.0), 1e-10),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            zeta_complex(c(0.5, 300.0), 1e-10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            zeta_complex(c(2.0, 0.0), 1e-30),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn doubling_terms_is_stable() {
        for s in [c(0.5, 30.0), c(-1.5, 120.0), c(2.5, -199.0), c(0.2, 0.1)] {
            let a = hurwitz_with(s, 1.0, 80);
            let b = hurwitz_with(s, 1.0, 160);
            assert!(
                (a.value - b.value).norm() <= 1e-12 * a.value.norm().max(1.0),
                "{s}"
            );
        }
    }

    #[test]
    fn digamma_values() {
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler_gamma).abs() < 1e-14);
        assert!((digamma(0.5) + euler_gamma + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((digamma(0.25) + euler_gamma + PI / 2.0 + 3.0 * 2f64.ln()).abs() < 1e-14);
    }
}
