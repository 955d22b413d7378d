//! Weight functions on `]0, 1]`.
//!
//! Every weight except the affine one is a broken harmonic function: on
//! `u_{i+1} < x <= u_i` it equals `v_i x`. Breakpoint membership is always
//! left-open, right-closed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{CoefficientSequence, Scalar};
use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::real::{parse_rational, CompensatedSum, Precision, Real};

/// Largest `⌊1/x⌋` the generalized Ingham evaluator will sum over.
const MAX_GINGHAM_TERMS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `c1 x + c0`.
    Affine { c0: BigRational, c1: BigRational },
    /// `x ⌊1/x⌋`.
    Ingham,
    /// `x sum_{k <= 1/x} u(k) ⌊1/(k x)⌋`.
    GeneralizedIngham(CoefficientSequence),
    /// `x λ^{⌊-log x / log λ⌋}`.
    PowerScale { lambda: BigRational },
    /// Breakpoints `1 = u_1 > u_2 > ... > u_m > 0` and slopes `v_i`; the last
    /// slope covers `]0, u_m]`.
    ExplicitBhf {
        breakpoints: Vec<BigRational>,
        slopes: Vec<BigRational>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
}

/// A point of `]0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Rational(BigRational),
    Real(f64),
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::Real(x)
    }
}

impl From<BigRational> for Point {
    fn from(x: BigRational) -> Self {
        Point::Rational(x)
    }
}

impl Point {
    pub fn ratio(num: i64, den: i64) -> Self {
        Point::Rational(BigRational::new(num.into(), den.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightValue {
    pub value: Scalar,
    /// No rounding happened anywhere in producing `value`.
    pub exact: bool,
}

impl WeightValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn floor_u64(r: &BigRational) -> Result<u64> {
    r.floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("{r} is too large")))
}

impl WeightFunction {
    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn affine(c0: BigRational, c1: BigRational) -> Result<Self> {
        if !c0.is_positive() || !c1.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "affine weight needs c0, c1 > 0, got c0 = {c0}, c1 = {c1}"
            )));
        }
        Ok(WeightFunction {
            kind: WeightKind::Affine { c0, c1 },
        })
    }

    pub fn ingham() -> Self {
        WeightFunction {
            kind: WeightKind::Ingham,
        }
    }

    pub fn generalized_ingham(u: CoefficientSequence) -> Self {
        WeightFunction {
            kind: WeightKind::GeneralizedIngham(u),
        }
    }

    pub fn power_scale(lambda: BigRational) -> Result<Self> {
        if lambda <= rat(1) {
            return Err(Error::InvalidArgument(format!(
                "power-scale needs λ > 1, got {lambda}"
            )));
        }
        Ok(WeightFunction {
            kind: WeightKind::PowerScale { lambda },
        })
    }

    pub fn explicit_bhf(breakpoints: Vec<BigRational>, slopes: Vec<BigRational>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("explicit BHF: {m}")));
        if breakpoints.is_empty() || breakpoints.len() != slopes.len() {
            return bad("need as many slopes as breakpoints, at least one");
        }
        if !breakpoints[0].is_one() {
            return bad("first breakpoint must be 1");
        }
        if breakpoints.windows(2).any(|w| w[1] >= w[0])
            || !breakpoints.last().unwrap().is_positive()
        {
            return bad("breakpoints must be strictly decreasing and positive");
        }
        if !slopes[0].is_positive() || slopes.windows(2).any(|w| w[1] <= w[0]) {
            return bad("slopes must be positive and strictly increasing");
        }
        Ok(WeightFunction {
            kind: WeightKind::ExplicitBhf {
                breakpoints,
                slopes,
            },
        })
    }

    pub fn is_bhf(&self) -> bool {
        !matches!(self.kind, WeightKind::Affine { .. })
    }

    /// `g(1)`, the diagonal of the Volterra system.
    pub fn at_one(&self, p: Precision) -> Result<Scalar> {
        Ok(eval_weight(self, &Point::Rational(rat(1)), p)?.value)
    }

    pub fn id(&self) -> String {
        match &self.kind {
            WeightKind::Affine { c0, c1 } => format!("affine:{c0},{c1}"),
            WeightKind::Ingham => "ingham".into(),
            WeightKind::GeneralizedIngham(u) => format!("gingham:{}", u.id()),
            WeightKind::PowerScale { lambda } => format!("power:{lambda}"),
            WeightKind::ExplicitBhf {
                breakpoints,
                slopes,
            } => {
                let j = |v: &[BigRational]| {
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                format!("bhf:{};{}", j(breakpoints), j(slopes))
            }
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Ids accepted by [`WeightFunction::from_str`].
pub const WEIGHT_IDS: &[(&str, &str)] = &[
    ("ingham", "x floor(1/x)"),
    ("affine:c0,c1", "c1 x + c0 with c0, c1 > 0"),
    (
        "power:lambda",
        "x lambda^floor(-log x / log lambda), lambda > 1 rational",
    ),
    (
        "gingham:<sequence-id>",
        "generalized Ingham function of a coefficient sequence",
    ),
    (
        "bhf:u1,...,um;v1,...,vm",
        "explicit broken harmonic function",
    ),
];

impl FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let list = |a: &str| a.split(',').map(parse_rational).collect::<Result<Vec<_>>>();
        match s.split_once(':') {
            None if s == "ingham" => Ok(Self::ingham()),
            Some(("affine", a)) => match list(a)?.as_slice() {
                [c0, c1] => Self::affine(c0.clone(), c1.clone()),
                _ => Err(Error::Parse(format!(
                    "affine needs two coefficients: {s:?}"
                ))),
            },
            Some(("power", a)) => Self::power_scale(parse_rational(a)?),
            Some(("gingham", a)) => Ok(Self::generalized_ingham(a.parse()?)),
            Some(("bhf", a)) => {
                let (u, v) = a.split_once(';').ok_or_else(|| {
                    Error::Parse(format!("bhf needs 'breakpoints;slopes': {s:?}"))
                })?;
                Self::explicit_bhf(list(u)?, list(v)?)
            }
            _ => Err(Error::Parse(format!(
                "unknown weight id {s:?}; known ids: {}",
                WEIGHT_IDS
                    .iter()
                    .map(|(id, _)| *id)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
        }
    }
}

fn exact_point(x: &Point) -> Result<(BigRational, bool)> {
    let (r, exact) = match x {
        Point::Rational(r) => (r.clone(), true),
        Point::Real(v) => (
            BigRational::from_float(*v)
                .ok_or_else(|| Error::Domain(format!("x = {v} is not finite")))?,
            false,
        ),
    };
    if !r.is_positive() || r > rat(1) {
        return Err(Error::Domain(format!(
            "weights are defined on ]0, 1], got x = {r}"
        )));
    }
    Ok((r, exact))
}

fn finish(value: Scalar, input_exact: bool, p: Precision) -> WeightValue {
    match value {
        Scalar::Rational(r) if input_exact => WeightValue {
            value: Scalar::Rational(r),
            exact: true,
        },
        v => WeightValue {
            value: Scalar::Real(v.to::<BigFloat>(p)),
            exact: false,
        },
    }
}

/// Number of times `x` can be multiplied by `λ` while staying `<= 1`.
fn power_scale_exponent(x: &BigRational, lambda: &BigRational) -> u64 {
    let mut k = 0;
    let mut y = x * lambda;
    while y <= rat(1) {
        k += 1;
        y *= lambda;
    }
    k
}

/// `g(x)`. Rational points are evaluated exactly whenever the weight's data
/// is rational; `f64` points are treated as the dyadic rationals they are and
/// the result is rounded to `p`.
pub fn eval_weight(g: &WeightFunction, x: &Point, p: Precision) -> Result<WeightValue> {
    let (r, input_exact) = exact_point(x)?;
    let value = match &g.kind {
        WeightKind::Affine { c0, c1 } => Scalar::Rational(c1 * &r + c0),
        WeightKind::Ingham => {
            let m = (r.denom() / r.numer()).clone();
            Scalar::Rational(&r * BigRational::from_integer(m))
        }
        WeightKind::GeneralizedIngham(u) => {
            return eval_generalized_ingham(u, &Point::Rational(r), p)
                .map(|v| finish(v.value, input_exact, p));
        }
        WeightKind::PowerScale { lambda } => {
            let k = power_scale_exponent(&r, lambda);
            Scalar::Rational(&r * num_traits::pow(lambda.clone(), k as usize))
        }
        WeightKind::ExplicitBhf {
            breakpoints,
            slopes,
        } => {
            let i = breakpoints.iter().rposition(|u| r <= *u).unwrap_or(0);
            Scalar::Rational(&slopes[i] * &r)
        }
    };
    Ok(finish(value, input_exact, p))
}

/// `Φ_u(x) = x sum_{k <= 1/x} u(k) ⌊1/(k x)⌋`, summed term by term.
pub fn eval_generalized_ingham(
    u: &CoefficientSequence,
    x: &Point,
    p: Precision,
) -> Result<WeightValue> {
    let (r, input_exact) = exact_point(x)?;
    let inv = r.recip();
    let m = floor_u64(&inv)?;
    if m > MAX_GINGHAM_TERMS {
        return Err(Error::OutOfRange {
            what: "1/x",
            value: m,
            limit: MAX_GINGHAM_TERMS,
        });
    }
    let (a, b) = (r.numer().clone(), r.denom().clone());
    let floor_at = |k: u64| -> BigInt { b.div_floor(&(&a * BigInt::from(k))) };
    let value = if u.is_exact() {
        let mut acc = BigRational::zero();
        for k in 1..=m {
            let uk = u.eval_exact(k)?;
            if !uk.is_zero() {
                acc += uk * BigRational::from_integer(floor_at(k));
            }
        }
        Scalar::Rational(acc * &r)
    } else {
        let mut acc = BigFloat::zero(p.0);
        for k in 1..=m {
            let uk = u.eval(k, p)?.to::<BigFloat>(p);
            acc = acc + uk * BigFloat::from_bigint(&floor_at(k), p.0);
        }
        Scalar::Real(acc * BigFloat::from_ratio(r.numer(), r.denom(), p.0))
    };
    Ok(finish(value, input_exact, p))
}

/// Estimate of `lim_{x -> 0} g(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitAtZero {
    /// Best estimate; `NaN` when the limit does not exist.
    pub value: f64,
    /// Plain partial sum `sum_{n <= N} u(n)/n`, when a series is involved.
    pub partial_sum: Option<f64>,
    /// Change of the averaged estimate between `N/2` and `N`.
    pub tail_estimate: f64,
    pub converged: bool,
    pub terms: u64,
}

/// `lim_{x -> 0} g(x)`. For `Φ_u` this is `sum u(n)/n`; the partial sums are
/// Cesàro-averaged and the change of the average over the second half of the
/// range is reported as the convergence diagnostic.
pub fn weight_limit_at_zero(g: &WeightFunction, terms: u64, p: Precision) -> Result<LimitAtZero> {
    let fixed = |value: f64, converged: bool| LimitAtZero {
        value,
        partial_sum: None,
        tail_estimate: if converged { 0.0 } else { f64::INFINITY },
        converged,
        terms: 0,
    };
    match &g.kind {
        WeightKind::Affine { c0, .. } => Ok(fixed(c0.to_f64().unwrap_or(f64::NAN), true)),
        WeightKind::Ingham => Ok(fixed(1.0, true)),
        // g(x) = v_m x on the last interval
        WeightKind::ExplicitBhf { .. } => Ok(fixed(0.0, true)),
        // g oscillates through ]1/λ, 1] on every scale
        WeightKind::PowerScale { .. } => Ok(fixed(f64::NAN, false)),
        WeightKind::GeneralizedIngham(u) => {
            if terms < 2 {
                return Err(Error::InvalidArgument("need at least 2 terms".into()));
            }
            let n_max = match u.support_len() {
                Some(len) => terms.min(len.max(2)),
                None => terms,
            };
            let vals: Vec<f64> = u.tabulate(n_max, p)?;
            let mut partial = CompensatedSum::<f64>::new(Precision::F64);
            let mut cesaro = CompensatedSum::<f64>::new(Precision::F64);
            let mut half_mean = f64::NAN;
            for (i, v) in vals.iter().enumerate() {
                let n = (i + 1) as f64;
                partial.add(v / n);
                cesaro.add(partial.value());
                if i + 1 == (n_max / 2) as usize {
                    half_mean = cesaro.value() / n;
                }
            }
            let mean = cesaro.value() / n_max as f64;
            let tail = (mean - half_mean).abs();
            Ok(LimitAtZero {
                value: if u.support_len().is_some() {
                    partial.value()
                } else {
                    mean
                },
                partial_sum: Some(partial.value()),
                tail_estimate: if u.support_len().is_some() { 0.0 } else { tail },
                converged: u.support_len().is_some() || tail <= 1e-2 * mean.abs().max(1e-3),
                terms: n_max,
            })
        }
    }
}

/// First `count` pairs `(u_i, v_i)` of a broken harmonic function.
///
/// For `Φ_u` the breakpoints are `1/i` and the slope on `]1/(i+1), 1/i]` is
/// `W(i) = sum_{j <= i} (u ⋆ 1)(j)`. Explicit weights return at most their
/// own breakpoints.
pub fn bhf_breakpoints(
    g: &WeightFunction,
    count: usize,
    p: Precision,
) -> Result<Vec<(Scalar, Scalar)>> {
    let q = |r: BigRational| Scalar::Rational(r);
    match &g.kind {
        WeightKind::Affine { .. } => Err(Error::Unsupported(
            "affine weights are not broken harmonic functions".into(),
        )),
        WeightKind::Ingham => Ok((1..=count as i64)
            .map(|i| (q(BigRational::new(1.into(), i.into())), q(rat(i))))
            .collect()),
        WeightKind::PowerScale { lambda } => {
            let mut out = Vec::with_capacity(count);
            let mut v = rat(1);
            for _ in 0..count {
                out.push((q(v.recip()), q(v.clone())));
                v *= lambda;
            }
            Ok(out)
        }
        WeightKind::ExplicitBhf {
            breakpoints,
            slopes,
        } => Ok(breakpoints
            .iter()
            .zip(slopes)
            .take(count)
            .map(|(u, v)| (q(u.clone()), q(v.clone())))
            .collect()),
        WeightKind::GeneralizedIngham(u) => {
            let slopes = ingham_slopes(u, count as u64, p)?;
            Ok(slopes
                .into_iter()
                .enumerate()
                .map(|(i, w)| (q(BigRational::new(1.into(), (i as i64 + 1).into())), w))
                .collect())
        }
    }
}

/// `W(1..=m)` with `W(i) = sum_{k <= i} u(k) ⌊i/k⌋`, the slopes of `Φ_u`.
pub fn ingham_slopes(u: &CoefficientSequence, m: u64, p: Precision) -> Result<Vec<Scalar>> {
    let n = m as usize;
    if u.is_exact() {
        let vals = u.tabulate_exact(m)?;
        let d = crate::arith::convolve(&vals, &vec![rat(1); n]);
        let mut acc = BigRational::zero();
        Ok(d.into_iter()
            .map(|x| {
                acc += x;
                Scalar::Rational(acc.clone())
            })
            .collect())
    } else {
        let vals: Vec<BigFloat> = u.tabulate(m, p)?;
        let d = crate::arith::convolve(&vals, &vec![BigFloat::one(p.0); n]);
        let mut acc = BigFloat::zero(p.0);
        Ok(d.into_iter()
            .map(|x| {
                acc = acc.clone() + x;
                Scalar::Real(acc.clone())
            })
            .collect())
    }
}

/// `W(1..=m)` in any real type, via the same harmonic loop.
pub fn ingham_slopes_in<T: Real>(u: &CoefficientSequence, m: u64, p: Precision) -> Result<Vec<T>> {
    let vals: Vec<T> = u.tabulate(m, p)?;
    let n = m as usize;
    let mut d: Vec<T> = vec![T::from_i64(0, p); n];
    for (k, uk) in vals.iter().enumerate() {
        if uk.is_zero() {
            continue;
        }
        let k = k + 1;
        let mut j = k;
        while j <= n {
            d[j - 1] = d[j - 1].clone() + uk.clone();
            j += k;
        }
    }
    let mut acc = CompensatedSum::<T>::new(p);
    Ok(d.into_iter()
        .map(|x| {
            acc.add(x);
            acc.value()
        })
        .collect())
}

/// `true` when every one of the first `count` slopes is positive. The
/// generalized Ingham function of a sign-changing sequence can fail this.
pub fn slopes_positive(g: &WeightFunction, count: usize, p: Precision) -> Result<bool> {
    Ok(bhf_breakpoints(g, count, p)?.iter().all(|(_, v)| match v {
        Scalar::Rational(r) => r.is_positive(),
        Scalar::Real(x) => !x.is_negative() && !x.is_zero(),
    }))
}
