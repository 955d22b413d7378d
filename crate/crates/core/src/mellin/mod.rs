//! Little Mellin transforms `g*(z) = ∫_0^1 g(t) t^{-z-1} dt` and their zeros.
//!
//! Evaluation is in `f64` complex arithmetic throughout. Continuation
//! machinery is confined to `|Im z| <= 200`, `-2 <= Re z <= 3`.

mod zeros;
pub mod zeta;

use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::{Builtin, CoefficientSequence, SequenceKind, Tail};
use crate::error::{Error, Result};
use crate::real::{CompensatedSum, Precision};
use crate::weights::{ingham_slopes_in, WeightFunction, WeightKind};

pub use zeros::{
    analytic_index, find_zeros, refine_zero, ComplexBox, Factor, IndexEstimate, ZeroRecord,
    ZeroScan,
};
pub use zeta::{bernoulli_numbers, digamma, hurwitz_zeta, zeta_complex};

use zeta::{hurwitz_raw, rpow};

/// Points closer than this to a pole are refused.
pub const POLE_GUARD: f64 = 1e-6;

/// Last harmonic breakpoint `1/K` integrated piece by piece.
pub const HARMONIC_CUTOFF: u64 = 1 << 20;

/// Terms of the truncated Dirichlet sum used for sequences with no
/// continuation formula.
const TRUNCATED_TERMS: u64 = 4000;

#[derive(Debug, Clone, PartialEq)]
pub enum MellinKind {
    /// `c1/(1 - z) - c0/z`, the transform of `c1 x + c0`.
    AffineClosedForm { c0: f64, c1: f64 },
    /// `ζ(1 - z) U(1 - z) / (1 - z)`, the transform of `Φ_u`.
    BhfFactorized(CoefficientSequence),
    /// Piecewise integration of the weight itself; `Re z < 0` only.
    NumericalIntegral(WeightFunction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MellinFunction {
    kind: MellinKind,
}

impl MellinFunction {
    pub fn affine(c0: f64, c1: f64) -> Self {
        MellinFunction {
            kind: MellinKind::AffineClosedForm { c0, c1 },
        }
    }

    pub fn bhf(u: CoefficientSequence) -> Self {
        MellinFunction {
            kind: MellinKind::BhfFactorized(u),
        }
    }

    pub fn numerical(g: WeightFunction) -> Self {
        MellinFunction {
            kind: MellinKind::NumericalIntegral(g),
        }
    }

    /// The analytic form when one exists, the integral otherwise.
    pub fn for_weight(g: &WeightFunction) -> Self {
        match g.kind() {
            WeightKind::Affine { c0, c1 } => Self::affine(
                c0.to_f64().unwrap_or(f64::NAN),
                c1.to_f64().unwrap_or(f64::NAN),
            ),
            WeightKind::Ingham => Self::bhf(CoefficientSequence::unit()),
            WeightKind::GeneralizedIngham(u) => Self::bhf(u.clone()),
            _ => Self::numerical(g.clone()),
        }
    }

    pub fn kind(&self) -> &MellinKind {
        &self.kind
    }

    /// Known poles of the continuation, with their orders.
    pub fn poles(&self) -> Vec<(Complex64, u32)> {
        let at = |re: f64| Complex64::new(re, 0.0);
        match &self.kind {
            MellinKind::AffineClosedForm { c0, c1 } => {
                let mut v = Vec::new();
                if *c0 != 0.0 {
                    v.push((at(0.0), 1));
                }
                if *c1 != 0.0 {
                    v.push((at(1.0), 1));
                }
                v
            }
            MellinKind::BhfFactorized(u) => match u.kind() {
                SequenceKind::Builtin(Builtin::Moebius) => vec![(at(1.0), 1)],
                SequenceKind::Builtin(Builtin::Liouville) => {
                    vec![(at(0.5), 1), (at(1.0), 1)]
                }
                SequenceKind::Builtin(Builtin::One) => vec![(at(0.0), 2), (at(1.0), 1)],
                _ => vec![(at(0.0), 1), (at(1.0), 1)],
            },
            MellinKind::NumericalIntegral(_) => vec![(at(0.0), 1)],
        }
    }

    fn pole_orders_inside(&self, b: &ComplexBox) -> u32 {
        self.poles()
            .iter()
            .filter(|(p, _)| b.contains_strictly(*p))
            .map(|(_, k)| k)
            .sum()
    }
}

impl fmt::Display for MellinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MellinKind::AffineClosedForm { c0, c1 } => write!(f, "affine({c0}, {c1})*"),
            MellinKind::BhfFactorized(u) => write!(f, "Phi_{}*", u.id()),
            MellinKind::NumericalIntegral(g) => write!(f, "integral[{}]", g.id()),
        }
    }
}

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Approx {
    pub value: Complex64,
    pub err: f64,
}

impl Approx {
    fn exact(value: Complex64) -> Self {
        Approx {
            value,
            err: 4.0 * f64::EPSILON * value.norm(),
        }
    }

    fn mul(self, o: Approx) -> Approx {
        Approx {
            value: self.value * o.value,
            err: self.err * o.value.norm() + o.err * self.value.norm() + self.err * o.err,
        }
    }

    fn div_by(self, d: Complex64) -> Approx {
        Approx {
            value: self.value / d,
            err: self.err / d.norm(),
        }
    }
}

fn from_summed(s: zeta::Summed) -> Approx {
    Approx {
        value: s.value,
        err: s.error(),
    }
}

fn real_values(u: &CoefficientSequence, n: u64) -> Result<Vec<f64>> {
    u.tabulate::<f64>(n, Precision::F64)
}

/// How `U(s) = sum u(n) n^{-s}` is continued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesStrategy {
    /// Finite support: the sum itself.
    Finite,
    /// `q^{-s} sum_r u(r) ζ(s, r/q)`.
    Hurwitz,
    /// `ζ(s)` for the constant sequence.
    Zeta,
    /// `ζ(2s) / ζ(s)`.
    LiouvilleQuotient,
    /// `1 / ζ(s)`.
    MoebiusReciprocal,
    /// Partial sum of the series; only for `Re s > 1`, and flagged.
    Truncated,
}

pub fn series_strategy(u: &CoefficientSequence) -> Result<SeriesStrategy> {
    Ok(match u.kind() {
        SequenceKind::Builtin(Builtin::One) => SeriesStrategy::Zeta,
        SequenceKind::Builtin(Builtin::Liouville) => SeriesStrategy::LiouvilleQuotient,
        SequenceKind::Builtin(Builtin::Moebius) => SeriesStrategy::MoebiusReciprocal,
        _ if u.support_len().is_some() => SeriesStrategy::Finite,
        _ if u.period().is_some() => SeriesStrategy::Hurwitz,
        SequenceKind::Explicit {
            tail: Tail::Undefined,
            ..
        } => {
            return Err(Error::Unsupported(format!(
                "{} is only defined on a finite range; its Dirichlet series has no value",
                u.id()
            )))
        }
        _ => SeriesStrategy::Truncated,
    })
}

/// `U(s)` together with whether the value came from a truncated sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub truncated: bool,
}

pub(crate) fn series_approx(u: &CoefficientSequence, s: Complex64) -> Result<(Approx, bool)> {
    let strategy = series_strategy(u)?;
    let zeta_at = |w: Complex64| -> Result<Approx> {
        if (w - 1.0).norm() == 0.0 {
            return Err(Error::Pole("ζ at 1".into()));
        }
        Ok(from_summed(hurwitz_raw(w, 1.0)))
    };
    match strategy {
        SeriesStrategy::Finite => {
            let len = u.support_len().unwrap_or(0);
            let vals = real_values(u, len)?;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut mag = 0.0;
            for (i, v) in vals.iter().enumerate() {
                if *v != 0.0 {
                    let t = *v * rpow((i + 1) as f64, -s);
                    mag += t.norm();
                    acc += t;
                }
            }
            Ok((
                Approx {
                    value: acc,
                    err: 4.0 * f64::EPSILON * mag,
                },
                false,
            ))
        }
        SeriesStrategy::Hurwitz => {
            let q = u.period().unwrap_or(1);
            let vals = real_values(u, q)?;
            let qf = q as f64;
            let mut acc = Approx {
                value: Complex64::new(0.0, 0.0),
                err: 0.0,
            };
            for (r, v) in vals.iter().enumerate() {
                if *v == 0.0 {
                    continue;
                }
                if (s - 1.0).norm() == 0.0 {
                    return Err(Error::Pole("Hurwitz zeta at s = 1".into()));
                }
                let h = from_summed(hurwitz_raw(s, (r + 1) as f64 / qf));
                acc.value += h.value * *v;
                acc.err += h.err * v.abs();
            }
            let scale = rpow(qf, -s);
            Ok((acc.mul(Approx::exact(scale)), false))
        }
        SeriesStrategy::Zeta => Ok((zeta_at(s)?, false)),
        SeriesStrategy::LiouvilleQuotient => {
            let den = zeta_at(s)?;
            if den.value.norm() <= den.err * 4.0 {
                return Err(Error::Pole(format!("ζ(s) vanishes near s = {s}")));
            }
            let num = zeta_at(2.0 * s)?;
            Ok((quotient(num, den), false))
        }
        SeriesStrategy::MoebiusReciprocal => {
            let den = zeta_at(s)?;
            if den.value.norm() <= den.err * 4.0 {
                return Err(Error::Pole(format!("ζ(s) vanishes near s = {s}")));
            }
            Ok((
                quotient(Approx::exact(Complex64::new(1.0, 0.0)), den),
                false,
            ))
        }
        SeriesStrategy::Truncated => {
            if s.re <= 1.0 {
                return Err(Error::Domain(format!(
                    "{} has no continuation formula; its series needs Re s > 1, got {s}",
                    u.id()
                )));
            }
            let vals = real_values(u, TRUNCATED_TERMS)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in vals.iter().enumerate() {
                acc += *v * rpow((i + 1) as f64, -s);
            }
            // |u(n)| <= d(n) <= 2 sqrt n covers every catalog entry
            let nf = TRUNCATED_TERMS as f64;
            let tail = 2.0 * nf.powf(1.5 - s.re) / (s.re - 1.5).max(1e-3);
            Ok((
                Approx {
                    value: acc,
                    err: tail,
                },
                true,
            ))
        }
    }
}

fn quotient(num: Approx, den: Approx) -> Approx {
    let d = den.value.norm();
    Approx {
        value: num.value / den.value,
        err: num.err / d + num.value.norm() * den.err / (d * d),
    }
}

/// `U(s) = sum_n u(n) n^{-s}`, continued according to [`series_strategy`].
pub fn dirichlet_series(u: &CoefficientSequence, s: Complex64) -> Result<SeriesValue> {
    let (a, truncated) = series_approx(u, s)?;
    Ok(SeriesValue {
        value: a.value,
        error_estimate: a.err,
        truncated,
    })
}

fn check_envelope(z: Complex64) -> Result<()> {
    if z.im.abs() > 200.0 || !(-2.0..=3.0).contains(&z.re) || !z.re.is_finite() {
        return Err(Error::Domain(format!(
            "z = {z} is outside |Im z| <= 200, -2 <= Re z <= 3"
        )));
    }
    Ok(())
}

fn check_poles(m: &MellinFunction, z: Complex64) -> Result<()> {
    for (p, _) in m.poles() {
        let d = (z - p).norm();
        if d < POLE_GUARD {
            return Err(Error::PoleProximity {
                point: z.to_string(),
                pole: p.to_string(),
                distance: d,
            });
        }
    }
    Ok(())
}

/// The two factors `ζ(1 - z)` and `U(1 - z)` of a factorized transform.
pub(crate) fn bhf_factors(u: &CoefficientSequence, z: Complex64) -> Result<(Approx, Approx)> {
    let s = Complex64::new(1.0, 0.0) - z;
    let zeta = from_summed(hurwitz_raw(s, 1.0));
    let (series, _) = series_approx(u, s)?;
    Ok((zeta, series))
}

/// `ζ(1 - z) U(1 - z)`, with the products for `λ` and `μ` simplified so that
/// the zeros of `ζ` cancel exactly.
fn bhf_numerator(u: &CoefficientSequence, z: Complex64) -> Result<Approx> {
    let s = Complex64::new(1.0, 0.0) - z;
    match series_strategy(u)? {
        SeriesStrategy::MoebiusReciprocal => Ok(Approx::exact(Complex64::new(1.0, 0.0))),
        SeriesStrategy::LiouvilleQuotient => Ok(from_summed(hurwitz_raw(2.0 * s, 1.0))),
        _ => {
            let (a, b) = bhf_factors(u, z)?;
            Ok(a.mul(b))
        }
    }
}

/// Evaluation without the tolerance check; used by the zero finder.
pub(crate) fn eval_approx(m: &MellinFunction, z: Complex64) -> Result<Approx> {
    let one = Complex64::new(1.0, 0.0);
    match &m.kind {
        MellinKind::AffineClosedForm { c0, c1 } => Ok(Approx::exact(*c1 / (one - z) - *c0 / z)),
        MellinKind::BhfFactorized(u) => Ok(bhf_numerator(u, z)?.div_by(one - z)),
        MellinKind::NumericalIntegral(g) => {
            let r = integrate_weight(g, z)?;
            Ok(Approx {
                value: r.value,
                err: r.error_bound,
            })
        }
    }
}

/// `g*(z)` with absolute error at most `tol`.
pub fn eval_mellin(m: &MellinFunction, z: Complex64, tol: f64) -> Result<Complex64> {
    check_envelope(z)?;
    check_poles(m, z)?;
    let a = eval_approx(m, z)?;
    if a.err > tol {
        return Err(Error::Precision(format!(
            "estimated error {:.3e} exceeds tolerance {tol:.3e}",
            a.err
        )));
    }
    Ok(a.value)
}

/// Outcome of integrating `g(t) t^{-z-1}` over `]0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralValue {
    pub value: Complex64,
    /// Tail bound plus rounding.
    pub error_bound: f64,
    /// Number of closed-form pieces summed.
    pub pieces: u64,
}

/// `∫_0^1 g(t) t^{-z-1} dt` for `Re z < 0`, one closed form per interval on
/// which `g(t) = v t + c`.
pub fn integrate_weight(g: &WeightFunction, z: Complex64) -> Result<IntegralValue> {
    if z.re >= 0.0 {
        return Err(Error::Domain(format!(
            "the integral converges only for Re z < 0, got {z}"
        )));
    }
    check_envelope(z)?;
    let one = Complex64::new(1.0, 0.0);
    match g.kind() {
        WeightKind::Affine { c0, c1 } => {
            let (c0, c1) = (
                c0.to_f64().unwrap_or(f64::NAN),
                c1.to_f64().unwrap_or(f64::NAN),
            );
            let value = c1 / (one - z) - c0 / z;
            Ok(IntegralValue {
                value,
                error_bound: 4.0 * f64::EPSILON * value.norm(),
                pieces: 1,
            })
        }
        WeightKind::ExplicitBhf {
            breakpoints,
            slopes,
        } => {
            let e = one - z;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut mag = 0.0;
            for (i, (u, v)) in breakpoints.iter().zip(slopes).enumerate() {
                let hi = rpow(u.to_f64().unwrap_or(f64::NAN), e);
                let lo = match breakpoints.get(i + 1) {
                    Some(next) => rpow(next.to_f64().unwrap_or(f64::NAN), e),
                    None => Complex64::new(0.0, 0.0),
                };
                let t = (hi - lo) * v.to_f64().unwrap_or(f64::NAN);
                mag += t.norm();
                acc += t;
            }
            let value = acc / e;
            Ok(IntegralValue {
                value,
                error_bound: 8.0 * f64::EPSILON * mag / e.norm(),
                pieces: breakpoints.len() as u64,
            })
        }
        WeightKind::PowerScale { lambda } => {
            // piece m: λ^m ∫_{λ^{-m-1}}^{λ^{-m}} t^{-z} dt = λ^{m z} (1 - λ^{z-1}) / (1 - z)
            let l = lambda.to_f64().unwrap_or(f64::NAN);
            let ratio = rpow(l, z);
            let r = ratio.norm();
            let factor = (one - rpow(l, z - 1.0)) / (one - z);
            let mut term = factor;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut pieces = 0u64;
            while term.norm() > 1e-18 * acc.norm().max(1e-300) && pieces < 100_000 {
                acc += term;
                term *= ratio;
                pieces += 1;
            }
            let tail = term.norm() / (1.0 - r);
            Ok(IntegralValue {
                value: acc,
                error_bound: tail + 4.0 * f64::EPSILON * pieces as f64 * acc.norm(),
                pieces,
            })
        }
        WeightKind::Ingham => harmonic_integral(&CoefficientSequence::unit(), z),
        WeightKind::GeneralizedIngham(u) => harmonic_integral(u, z),
    }
}

/// `lim W(i)/i = sum u(n)/n` for sequences where it is computable in closed
/// form: finite support, or periodic with mean zero (via the digamma function).
fn slope_growth(u: &CoefficientSequence) -> Result<f64> {
    if let Some(len) = u.support_len() {
        let vals = real_values(u, len)?;
        return Ok(vals
            .iter()
            .enumerate()
            .map(|(i, v)| v / (i + 1) as f64)
            .sum());
    }
    if let Some(q) = u.period() {
        let vals = real_values(u, q)?;
        let mean: f64 = vals.iter().sum::<f64>() / q as f64;
        if mean.abs() > 1e-12 {
            return Err(Error::Unsupported(format!(
                "{} has nonzero mean, so Φ_u is unbounded near 0",
                u.id()
            )));
        }
        let qf = q as f64;
        return Ok(-vals
            .iter()
            .enumerate()
            .map(|(r, v)| v * zeta::digamma((r + 1) as f64 / qf))
            .sum::<f64>()
            / qf);
    }
    Err(Error::Unsupported(format!(
        "integral of Φ_u needs u periodic or finitely supported, got {}",
        u.id()
    )))
}

/// `expm1` on the complex plane, accurate for small arguments.
fn expm1c(w: Complex64) -> Complex64 {
    let ea = w.re.exp();
    let s = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * w.im.cos() - 2.0 * s * s, ea * w.im.sin())
}

/// `∫_0^1 Φ_u(t) t^{-z-1} dt`. On `]1/(i+1), 1/i]` the weight is `W(i) t`,
/// giving `W(i) (i^{z-1} - (i+1)^{z-1}) / (1 - z)`. Pieces with `i < K` are
/// summed; beyond `K` the slope is replaced by `L i` with `L = lim W(i)/i`,
/// whose sum is `L (K^z + ζ(1 - z, K + 1))`. The remainder is bounded
/// assuming `|W(i) - L i| <= B sqrt(i/K)` for `i >= K`, with `B` measured over
/// `[K/2, K]`.
fn harmonic_integral(u: &CoefficientSequence, z: Complex64) -> Result<IntegralValue> {
    let k = HARMONIC_CUTOFF;
    let growth = slope_growth(u)?;
    let w: Vec<f64> = ingham_slopes_in(u, k, Precision::F64)?;
    let one = Complex64::new(1.0, 0.0);
    let zm1 = z - one;
    let mut re = CompensatedSum::<f64>::new(Precision::F64);
    let mut im = CompensatedSum::<f64>::new(Precision::F64);
    let mut mag = 0.0;
    for i in 1..k {
        let wi = w[i as usize - 1];
        if wi == 0.0 {
            continue;
        }
        let fi = i as f64;
        let pw = (zm1 * fi.ln()).exp();
        // i^{z-1} - (i+1)^{z-1} = -i^{z-1} expm1((z-1) log1p(1/i))
        let piece = -(pw * expm1c(zm1 * (1.0 / fi).ln_1p())) * wi;
        mag += piece.norm();
        re.add(piece.re);
        im.add(piece.im);
    }
    let kf = k as f64;
    let beyond = hurwitz_raw(one - z, kf + 1.0);
    let tail = (rpow(kf, z) + beyond.value) * growth;
    let value = (Complex64::new(re.value(), im.value()) + tail) / (one - z);
    let b = ((k / 2) as usize..k as usize)
        .map(|i| (w[i - 1] - growth * i as f64).abs())
        .fold(0.0, f64::max);
    let sigma = z.re;
    let remainder = b * kf.powf(sigma - 1.0) / (0.5 - sigma);
    let rounding =
        8.0 * f64::EPSILON * (mag + tail.norm()) / (one - z).norm() + beyond.error() * growth.abs();
    Ok(IntegralValue {
        value,
        error_bound: remainder + rounding,
        pieces: k,
    })
}

/// Both sides of `∫_0^1 Φ_u(t) t^{-z-1} dt = ζ(1-z) U(1-z) / (1-z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub difference: f64,
    /// Error bound carried by the integral side.
    pub integral_bound: f64,
}

/// Compares the piecewise integral of `Φ_u` with the factorized transform.
pub fn lemma23_consistency(
    u: &CoefficientSequence,
    z: Complex64,
    tol: f64,
) -> Result<FactorizationCheck> {
    if z.re >= 0.0 {
        return Err(Error::Domain(format!("needs Re z < 0, got {z}")));
    }
    if u.support_len().is_none() && u.period().is_none() {
        return Err(Error::Unsupported(format!(
            "{} is neither periodic nor finitely supported",
            u.id()
        )));
    }
    let lhs = harmonic_integral(u, z)?;
    if lhs.error_bound > tol {
        return Err(Error::Truncation {
            bound: lhs.error_bound,
            tol,
        });
    }
    let rhs = eval_mellin(&MellinFunction::bhf(u.clone()), z, tol)?;
    Ok(FactorizationCheck {
        lhs: lhs.value,
        rhs,
        difference: (lhs.value - rhs).norm(),
        integral_bound: lhs.error_bound,
    })
}
