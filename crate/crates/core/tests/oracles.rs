//! Values checked against oracles written independently of the library:
//! naive exact solves, brute-force expansions, classical constants.

use std::f64::consts::PI;

use gvlab_core::arith::{
    build_sieve, dirichlet_convolve, ramanujan_tau, CoefficientSequence, Scalar,
};
use gvlab_core::mellin::{
    dirichlet_series, eval_mellin, zeta_complex, MellinFunction, SeriesStrategy,
};
use gvlab_core::volterra::{
    affine_exact_formula, max_relative_difference, moebius_closed_form, solve, Rhs, SolveOptions,
    VolterraProblem,
};
use gvlab_core::weights::{
    bhf_breakpoints, eval_generalized_ingham, eval_weight, weight_limit_at_zero, Point,
    WeightFunction,
};
use gvlab_core::{BigFloat, Precision};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn exact(v: &Scalar) -> BigRational {
    v.as_rational().cloned().expect("exact value")
}

/// `(√(10 - 2√5) - 2) / (√5 - 1)`.
fn xi() -> f64 {
    let r5 = 5f64.sqrt();
    ((10.0 - 2.0 * r5).sqrt() - 2.0) / (r5 - 1.0)
}

#[test]
fn weight_examples() {
    let p = Precision::F64;
    let ingham = WeightFunction::ingham();
    assert_eq!(
        exact(&eval_weight(&ingham, &Point::ratio(1, 1), p).unwrap().value),
        q(1, 1)
    );
    assert_eq!(
        exact(&eval_weight(&ingham, &Point::ratio(2, 5), p).unwrap().value),
        q(4, 5)
    );
    let ps = WeightFunction::power_scale(q(2, 1)).unwrap();
    assert!((eval_weight(&ps, &Point::Real(0.3), p).unwrap().to_f64() - 0.6).abs() < 1e-15);
    let one = CoefficientSequence::one();
    assert_eq!(
        exact(
            &eval_generalized_ingham(&one, &Point::ratio(1, 3), p)
                .unwrap()
                .value
        ),
        q(5, 3)
    );
    let dh = CoefficientSequence::davenport_heilbronn();
    let v = eval_generalized_ingham(&dh, &Point::ratio(1, 2), Precision(128))
        .unwrap()
        .to_f64();
    assert!((v - (1.0 + xi() / 2.0)).abs() < 1e-15, "{v}");
}

#[test]
fn breakpoint_examples() {
    let p = Precision::F64;
    let pairs = |g: &WeightFunction| -> Vec<(BigRational, BigRational)> {
        bhf_breakpoints(g, 3, p)
            .unwrap()
            .iter()
            .map(|(u, v)| (exact(u), exact(v)))
            .collect()
    };
    assert_eq!(
        pairs(&WeightFunction::ingham()),
        [(q(1, 1), q(1, 1)), (q(1, 2), q(2, 1)), (q(1, 3), q(3, 1))]
    );
    assert_eq!(
        pairs(&WeightFunction::power_scale(q(2, 1)).unwrap()),
        [(q(1, 1), q(1, 1)), (q(1, 2), q(2, 1)), (q(1, 4), q(4, 1))]
    );
    assert!(bhf_breakpoints(&WeightFunction::affine(q(1, 2), q(1, 2)).unwrap(), 3, p).is_err());
}

#[test]
fn divisor_count_by_convolution() {
    let one = CoefficientSequence::one();
    let d = dirichlet_convolve(&one, &one, 12, Precision::F64).unwrap();
    assert_eq!(d.eval_exact(12).unwrap(), q(6, 1));
}

/// Coefficients of `x ∏_{n ≤ N} (1 - x^n)^24` by plain polynomial products.
fn tau_by_product(n_max: usize) -> Vec<i128> {
    let mut poly = vec![0i128; n_max];
    poly[0] = 1;
    for n in 1..n_max {
        for _ in 0..24 {
            for i in (n..n_max).rev() {
                poly[i] -= poly[i - n];
            }
        }
    }
    poly
}

#[test]
fn tau_matches_direct_product() {
    let want = tau_by_product(200);
    let got = ramanujan_tau(200).unwrap();
    assert_eq!(got, want);
    assert_eq!(got[1], -24);
    assert_eq!(got[5], got[1] * got[2]);
}

#[test]
fn zeta_classical_values() {
    let z = |re: f64, im: f64| zeta_complex(Complex64::new(re, im), 1e-12).unwrap();
    assert!((z(2.0, 0.0).re - PI * PI / 6.0).abs() < 1e-13);
    assert!((z(-1.0, 0.0).re + 1.0 / 12.0).abs() < 1e-13);
    assert!((z(0.5, 0.0).re + 1.460_354_508_809_586_8).abs() < 1e-13);
    for gamma in [
        14.134_725_141_734_694,
        21.022_039_638_771_555,
        25.010_857_580_145_69,
    ] {
        assert!(z(0.5, gamma).norm() < 1e-12);
    }
}

#[test]
fn mellin_closed_forms() {
    let affine = MellinFunction::affine(0.5, 0.5);
    // ∫ (t + 1)/2 t^{-z-1} dt at z = -1, -2
    let v = eval_mellin(&affine, Complex64::new(-1.0, 0.0), 1e-12).unwrap();
    assert!((v.re - 0.75).abs() < 1e-14);
    let v = eval_mellin(&affine, Complex64::new(-2.0, 0.0), 1e-12).unwrap();
    assert!((v.re - (1.0 / 6.0 + 0.25)).abs() < 1e-14);
    // ∫_0^1 t ⌊1/t⌋ dt = π²/12
    let ingham = MellinFunction::bhf(CoefficientSequence::unit());
    let v = eval_mellin(&ingham, Complex64::new(-1.0, 0.0), 1e-12).unwrap();
    assert!((v.re - PI * PI / 12.0).abs() < 1e-12);
}

#[test]
fn character_series_at_one_is_pi_over_four() {
    let chi = CoefficientSequence::character(4, 1).unwrap();
    let lim = weight_limit_at_zero(
        &WeightFunction::generalized_ingham(chi.clone()),
        100_000,
        Precision::F64,
    )
    .unwrap();
    assert!((lim.value - PI / 4.0).abs() < 1e-3);
    // L(2, χ4) is Catalan's constant
    let v = dirichlet_series(&chi, Complex64::new(2.0, 0.0)).unwrap();
    assert!((v.value.re - 0.915_965_594_177_219).abs() < 1e-13);
}

#[test]
fn dirichlet_series_of_liouville_and_moebius() {
    let s = Complex64::new(2.0, 0.0);
    let lambda = dirichlet_series(&CoefficientSequence::liouville(), s).unwrap();
    // ζ(4)/ζ(2) = π²/15
    assert!((lambda.value.re - PI * PI / 15.0).abs() < 1e-13);
    let mu = dirichlet_series(&CoefficientSequence::moebius(), s).unwrap();
    assert!((mu.value.re - 6.0 / (PI * PI)).abs() < 1e-13);
    assert!(!lambda.truncated && !mu.truncated);
    let tau = dirichlet_series(
        &CoefficientSequence::ramanujan_tau_normalized(),
        Complex64::new(2.5, 0.0),
    )
    .unwrap();
    assert!(tau.truncated);
    assert_eq!(
        gvlab_core::mellin::series_strategy(&CoefficientSequence::ramanujan_tau_normalized())
            .unwrap(),
        SeriesStrategy::Truncated
    );
}

/// `A(n) = sum_k a(k) g(k/n)` solved row by row in exact rationals, for the
/// Ingham weight `g(x) = x ⌊1/x⌋` and integer powers on the right.
fn naive_ingham_solve(rhs: impl Fn(u64) -> BigRational, n_max: u64) -> Vec<BigRational> {
    let mut a: Vec<BigRational> = Vec::new();
    for n in 1..=n_max {
        let mut s = BigRational::zero();
        for k in 1..n {
            let g = q(k as i64, n as i64) * BigRational::from_integer(BigInt::from(n / k));
            s += &a[k as usize - 1] * g;
        }
        a.push(rhs(n) - s);
    }
    a
}

#[test]
fn ingham_solve_matches_naive_exact_solve() {
    let n = 80;
    let sieve = build_sieve(n).unwrap();
    let cases: [(BigRational, Box<dyn Fn(u64) -> BigRational>); 3] = [
        (q(0, 1), Box::new(|_| BigRational::one())),
        (q(1, 1), Box::new(|n| q(1, n as i64))),
        (q(-1, 1), Box::new(|n| q(n as i64, 1))),
    ];
    for (beta, rhs) in cases {
        let want = naive_ingham_solve(rhs, n);
        let want: Vec<BigFloat> = want
            .iter()
            .map(|r| BigFloat::from_ratio(r.numer(), r.denom(), 256))
            .collect();
        let prob = VolterraProblem::canonical(WeightFunction::ingham(), beta.clone(), n).unwrap();
        let sol = solve(&prob, &SolveOptions::high(256)).unwrap();
        let (d, at) = max_relative_difference(sol.a.high().unwrap(), &want, 1e-70);
        assert!(d < 1e-70, "β = {beta}: {d:e} at {at}");
        let cf: Vec<BigFloat> = moebius_closed_form(&beta, n, &sieve, Precision(256)).unwrap();
        let (d, at) = max_relative_difference(&cf, &want, 1e-70);
        assert!(d < 1e-70, "closed form β = {beta}: {d:e} at {at}");
    }
}

#[test]
fn beta_one_gives_moebius_over_n() {
    let n = 500;
    let sieve = build_sieve(n).unwrap();
    let a: Vec<f64> = moebius_closed_form(&q(1, 1), n, &sieve, Precision::F64).unwrap();
    for k in 1..=n {
        let want = f64::from(sieve.moebius(k).unwrap()) / k as f64;
        assert!(
            (a[k as usize - 1] - want).abs() <= 4.0 * f64::EPSILON / k as f64,
            "n = {k}"
        );
    }
}

#[test]
fn affine_formula_matches_naive_solve() {
    // g(x) = (x + 1)/2, A(n) = sqrt n, forward substitution in f64
    let n_max = 300usize;
    let mut a = vec![0.0f64; n_max];
    for n in 1..=n_max {
        let s: f64 = (1..n)
            .map(|k| a[k - 1] * (k as f64 / n as f64 + 1.0) / 2.0)
            .sum();
        a[n - 1] = (n as f64).sqrt() - s;
    }
    let mut partial = 0.0;
    for n in 1..=n_max {
        partial += a[n - 1];
        if n >= 2 {
            let e: f64 = affine_exact_formula(n as u64, Precision::F64).unwrap();
            assert!(
                (e - partial).abs() <= 1e-11 * e.abs(),
                "n = {n}: {e} vs {partial}"
            );
        }
    }
    let prob = VolterraProblem::new(
        WeightFunction::affine(q(1, 2), q(1, 2)).unwrap(),
        Rhs::power(q(1, 2)),
        300,
    )
    .unwrap();
    let sol = solve(&prob, &SolveOptions::f64()).unwrap();
    assert!((sol.partial_sums_f64()[299] - partial).abs() < 1e-11 * partial.abs());
}

#[test]
fn exact_rational_values_are_exact() {
    let v = eval_weight(
        &WeightFunction::affine(q(1, 3), q(2, 7)).unwrap(),
        &Point::ratio(7, 9),
        Precision::F64,
    )
    .unwrap();
    assert!(v.exact);
    assert_eq!(exact(&v.value), q(2, 9) + q(1, 3));
    assert!(exact(&v.value).is_positive());
    assert_eq!(exact(&v.value).to_f64().unwrap(), 5.0 / 9.0);
}
