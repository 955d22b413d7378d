use std::sync::OnceLock;

use gvlab_core::arith::{
    build_sieve, character_value, convolve, factorize_trial, inverse, real_character_count, tau,
    CoefficientSequence, FactorSieve,
};
use gvlab_core::mellin::{eval_mellin, hurwitz_zeta, refine_zero, zeta_complex, MellinFunction};
use gvlab_core::volterra::{moebius_closed_form, solve, Rhs, SolveOptions, VolterraProblem};
use gvlab_core::weights::{eval_weight, Point, WeightFunction};
use gvlab_core::Precision;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn sieve() -> &'static FactorSieve {
    static S: OnceLock<FactorSieve> = OnceLock::new();
    S.get_or_init(|| build_sieve(200_000).unwrap())
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rationals(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-40i64..=40, 1i64..=6), len)
        .prop_map(|v| v.into_iter().map(|(n, d)| q(n, d)).collect())
}

fn unit_at_one(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<BigRational>> {
    rationals(len).prop_map(|mut v| {
        if v[0].is_zero() {
            v[0] = BigRational::one();
        }
        v
    })
}

fn truncate_to<T: Clone>(v: &[T], n: usize) -> Vec<T> {
    v[..n].to_vec()
}

/// Series for `η(s) = (1 - 2^{1-s}) ζ(s)` accelerated as in Borwein's
/// algorithm 2, used only as a reference for `ζ`.
fn zeta_by_eta(s: Complex64) -> Complex64 {
    let n = 60usize;
    let mut d = vec![0.0f64; n + 1];
    let mut term = 1.0 / n as f64;
    let mut acc = term;
    d[0] = n as f64 * acc;
    for i in 1..=n {
        term *=
            ((n + i - 1) as f64 * 4.0 * (n - i + 1) as f64) / ((2 * i - 1) as f64 * 2.0 * i as f64);
        acc += term;
        d[i] = n as f64 * acc;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = Complex64::new(k as f64 + 1.0, 0.0).powc(-s);
        sum += sign * (d[k] - d[n]) * w;
    }
    let eta = -sum / d[n];
    eta / (1.0 - Complex64::new(2.0, 0.0).powc(1.0 - s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_a_commutative_ring(u in rationals(1..30), v in rationals(1..30), w in rationals(1..30)) {
        let n = u.len().min(v.len()).min(w.len());
        let (u, v, w) = (truncate_to(&u, n), truncate_to(&v, n), truncate_to(&w, n));
        prop_assert_eq!(convolve(&u, &v), convolve(&v, &u));
        prop_assert_eq!(convolve(&convolve(&u, &v), &w), convolve(&u, &convolve(&v, &w)));
        let vw: Vec<BigRational> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let lhs = convolve(&u, &vw);
        let rhs: Vec<BigRational> =
            convolve(&u, &v).into_iter().zip(convolve(&u, &w)).map(|(a, b)| a + b).collect();
        prop_assert_eq!(lhs, rhs);
        let mut e = vec![BigRational::zero(); n];
        e[0] = BigRational::one();
        prop_assert_eq!(convolve(&u, &e), u);
    }

    #[test]
    fn inverse_is_two_sided(u in unit_at_one(1..40)) {
        let inv = inverse(&u).unwrap();
        let mut e = vec![BigRational::zero(); u.len()];
        e[0] = BigRational::one();
        prop_assert_eq!(convolve(&u, &inv), e.clone());
        prop_assert_eq!(convolve(&inv, &u), e);
    }

    #[test]
    fn real_character_inverse_is_moebius_twist(modulus in 1u64..=120, pick in 0u64..16) {
        let count = real_character_count(modulus).unwrap();
        let index = pick % count;
        let n = 200u64;
        let chi: Vec<BigRational> = (1..=n)
            .map(|k| BigRational::from_integer(character_value(modulus, index, k).unwrap().into()))
            .collect();
        let want: Vec<BigRational> = (1..=n)
            .map(|k| {
                let m = sieve().moebius(k).unwrap() as i64;
                BigRational::from_integer((m * character_value(modulus, index, k).unwrap() as i64).into())
            })
            .collect();
        prop_assert_eq!(inverse(&chi).unwrap(), want);
    }

    #[test]
    fn sieve_factorization_matches_trial_division(n in 1u64..=200_000) {
        prop_assert_eq!(sieve().factorize(n).unwrap(), factorize_trial(n));
        let product: u64 = factorize_trial(n).iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(product, n);
    }

    #[test]
    fn tau_is_multiplicative(m in 1u64..=100, n in 1u64..=100) {
        prop_assume!(m.gcd(&n) == 1);
        prop_assert_eq!(tau(m * n).unwrap(), tau(m).unwrap() * tau(n).unwrap());
    }

    #[test]
    fn ingham_weight_bounds(num in 1i64..=500, den in 1i64..=500) {
        prop_assume!(num <= den);
        let x = q(num, den);
        let g = eval_weight(&WeightFunction::ingham(), &Point::ratio(num, den), Precision::F64).unwrap();
        let g = g.value.as_rational().unwrap().clone();
        prop_assert!(g <= BigRational::one());
        prop_assert!(g > BigRational::one() - &x);
        prop_assert!((g / x).is_integer());
    }

    #[test]
    fn affine_weight_is_exact(c0 in 1i64..=5, c1 in 1i64..=5, num in 1i64..=100, den in 1i64..=100) {
        prop_assume!(num <= den);
        let (c0, c1) = (q(c0, 7), q(c1, 3));
        let g = WeightFunction::affine(c0.clone(), c1.clone()).unwrap();
        let v = eval_weight(&g, &Point::ratio(num, den), Precision::F64).unwrap();
        prop_assert!(v.exact);
        prop_assert_eq!(v.value.as_rational().unwrap().clone(), c1 * q(num, den) + c0);
    }

    #[test]
    fn transform_is_conjugate_symmetric(which in 0usize..4, re in -1.0f64..2.0, im in -100.0f64..100.0) {
        let u = match which {
            0 => CoefficientSequence::unit(),
            1 => CoefficientSequence::character(4, 1).unwrap(),
            2 => CoefficientSequence::davenport_heilbronn(),
            _ => CoefficientSequence::liouville(),
        };
        let z = Complex64::new(re, im);
        for pole in [0.0, 0.5, 1.0] {
            prop_assume!((z - pole).norm() > 0.05);
        }
        let m = MellinFunction::bhf(u);
        let (a, b) = match (eval_mellin(&m, z, 1e-10), eval_mellin(&m, z.conj(), 1e-10)) {
            (Ok(a), Ok(b)) => (a, b),
            // λ's transform has poles at the zeros of ζ; skip points close to one
            _ => return Ok(()),
        };
        prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn zeta_matches_eta_series(re in -2.0f64..3.0, im in -30.0f64..30.0) {
        prop_assume!((re - 1.0).abs() > 0.1);
        let s = Complex64::new(re, im);
        let got = zeta_complex(s, 1e-12).unwrap();
        let want = zeta_by_eta(s);
        prop_assert!((got - want).norm() <= 1e-9 * want.norm().max(1.0), "{}: {} vs {}", s, got, want);
    }

    #[test]
    fn hurwitz_at_one_half(re in -2.0f64..3.0, im in -50.0f64..50.0) {
        prop_assume!((re - 1.0).abs() > 0.1);
        let s = Complex64::new(re, im);
        let lhs = hurwitz_zeta(s, 0.5, 1e-10).unwrap();
        let rhs = (Complex64::new(2.0, 0.0).powc(s) - 1.0) * zeta_complex(s, 1e-10).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn refined_zeros_are_stable(which in 0usize..3, angle in 0.0f64..std::f64::consts::TAU) {
        let gamma = [14.134_725_141_734_694, 21.022_039_638_771_555, 25.010_857_580_145_69][which];
        let m = MellinFunction::bhf(CoefficientSequence::unit());
        let start = Complex64::new(0.5, gamma) + Complex64::from_polar(1e-3, angle);
        let (z, _) = refine_zero(&m, start, 1e-12).unwrap();
        prop_assert!((z - Complex64::new(0.5, gamma)).norm() < 1e-9, "{}", z);
    }

    #[test]
    fn ingham_solve_agrees_with_closed_form(num in -6i64..=6, den in 1i64..=6) {
        let beta = q(num, den);
        prop_assume!(beta <= BigRational::one());
        let n = 400;
        let prob = VolterraProblem::canonical(WeightFunction::ingham(), beta.clone(), n).unwrap();
        let sol = solve(&prob, &SolveOptions::f64()).unwrap();
        let cf: Vec<f64> = moebius_closed_form(&beta, n, sieve(), Precision::F64).unwrap();
        let scale = cf.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (k, (a, b)) in sol.a_f64().iter().zip(&cf).enumerate() {
            prop_assert!((a - b).abs() <= 1e-9 * scale, "β = {}, n = {}: {} vs {}", beta, k + 1, a, b);
        }
    }

    #[test]
    fn affine_residuals_are_small(c0 in 1i64..=6, c1 in 1i64..=6, e in -3i64..=3) {
        let g = WeightFunction::affine(q(c0, 4), q(c1, 4)).unwrap();
        let prob = VolterraProblem::new(g, Rhs::power(q(e, 2)), 300).unwrap();
        let sol = solve(&prob, &SolveOptions::f64()).unwrap();
        let r = sol.residual.unwrap();
        prop_assert!(r.within(64.0), "{:?}", r);
    }
}

#[test]
fn deligne_bound_up_to_a_thousand() {
    let s = build_sieve(1000).unwrap();
    for p in (2..=1000u64).filter(|&p| s.is_prime(p).unwrap()) {
        let t = tau(p).unwrap() as f64;
        assert!(t.abs() <= 2.0 * (p as f64).powf(5.5), "p = {p}");
    }
}

#[test]
fn eta_oracle_sanity() {
    assert!(
        (zeta_by_eta(Complex64::new(2.0, 0.0)).re - std::f64::consts::PI.powi(2) / 6.0).abs()
            < 1e-13
    );
}
