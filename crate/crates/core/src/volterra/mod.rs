//! The discrete Volterra equation `A_g(n) = sum_{k <= n} a(k) g(k/n) = f(n)`.
//!
//! The system is lower triangular with constant diagonal `g(1)`, so
//! `a(n) = (f(n) - sum_{k < n} a(k) g(k/n)) / g(1)`.

mod closed_form;
mod kernel;

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

pub use closed_form::{
    affine_exact_formula, character_closed_form, ingham_numerators, moebius_closed_form,
    multiplicative_closed_form, summatory_identity_check, IdentityRow,
};

use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::real::{parse_rational, pow_rational, Precision, Real};
use crate::weights::WeightFunction;
use kernel::{row_abs_sum, row_sum, Kernel, RowState};

/// Right-hand side `f(n) = c n^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub coefficient: BigRational,
    pub exponent: BigRational,
}

impl Rhs {
    /// The canonical `n^{-β}`.
    pub fn inverse_power(beta: BigRational) -> Self {
        Rhs {
            coefficient: BigRational::from_integer(1.into()),
            exponent: -beta,
        }
    }

    pub fn power(exponent: BigRational) -> Self {
        Rhs {
            coefficient: BigRational::from_integer(1.into()),
            exponent,
        }
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        Rhs {
            coefficient: &self.coefficient * c,
            exponent: self.exponent.clone(),
        }
    }

    /// `β` such that `f(n) = c n^{-β}`.
    pub fn beta(&self) -> BigRational {
        -self.exponent.clone()
    }

    pub fn eval<T: Real>(&self, n: u64, p: Precision) -> Result<T> {
        let v: T = pow_rational(n, &self.exponent, p)?;
        Ok(if self.coefficient == BigRational::from_integer(1.into()) {
            v
        } else {
            T::from_ratio(&self.coefficient, p) * v
        })
    }

    /// `log2 |f(n)|`, for deciding whether `f64` can hold the values.
    fn log2_magnitude(&self, n: u64) -> f64 {
        let c = self.coefficient.abs().to_f64().unwrap_or(f64::INFINITY);
        c.log2() + self.exponent.to_f64().unwrap_or(0.0) * (n as f64).log2()
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient == BigRational::from_integer(1.into()) {
            write!(f, "n^{}", self.exponent)
        } else {
            write!(f, "{}*n^{}", self.coefficient, self.exponent)
        }
    }
}

impl FromStr for Rhs {
    type Err = Error;

    /// `"n^0.5"`, `"n^-1/3"`, `"2*n^-1/4"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (c, power) = match s.split_once('*') {
            Some((c, rest)) => (parse_rational(c)?, rest.trim()),
            None => (BigRational::from_integer(1.into()), s),
        };
        let e = power
            .strip_prefix("n^")
            .ok_or_else(|| Error::Parse(format!("rhs must look like n^e or c*n^e, got {s:?}")))?;
        let e = e.trim_start_matches('(').trim_end_matches(')');
        Ok(Rhs {
            coefficient: c,
            exponent: parse_rational(e)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolterraProblem {
    pub weight: WeightFunction,
    pub rhs: Rhs,
    pub horizon: u64,
}

impl VolterraProblem {
    pub fn new(weight: WeightFunction, rhs: Rhs, horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidArgument(
                "horizon N must be at least 1".into(),
            ));
        }
        Ok(VolterraProblem {
            weight,
            rhs,
            horizon,
        })
    }

    /// `A_g(n) = n^{-β}` for `n <= horizon`.
    pub fn canonical(weight: WeightFunction, beta: BigRational, horizon: u64) -> Result<Self> {
        Self::new(weight, Rhs::inverse_power(beta), horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "bits", rename_all = "snake_case")]
pub enum PrecisionPath {
    F64,
    HighPrec(u32),
}

impl PrecisionPath {
    pub fn precision(self) -> Precision {
        match self {
            PrecisionPath::F64 => Precision::F64,
            PrecisionPath::HighPrec(b) => Precision(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Term-by-term row sums, `O(N^2)`.
    Direct,
    /// Prefix-sum differences over breakpoint runs: `O(N^{3/2})` for the
    /// Ingham family, `O(N log N)` for power scales, `O(N)` for affine.
    Blocked,
    /// `Direct` up to [`AUTO_DIRECT_LIMIT`], `Blocked` beyond.
    Auto,
}

pub const AUTO_DIRECT_LIMIT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub path: PrecisionPath,
    pub method: Method,
    /// Also solve on the other precision path and record the disagreement.
    pub cross_check: bool,
    /// Recompute every row residual after solving.
    pub check_residuals: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            path: PrecisionPath::F64,
            method: Method::Auto,
            cross_check: false,
            check_residuals: true,
        }
    }
}

impl SolveOptions {
    pub fn f64() -> Self {
        Self::default()
    }

    pub fn high(bits: u32) -> Self {
        SolveOptions {
            path: PrecisionPath::HighPrec(bits),
            ..Self::default()
        }
    }

    pub fn with_method(mut self, m: Method) -> Self {
        self.method = m;
        self
    }
}

/// Solved values in the representation of the path that produced them.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    F64(Vec<f64>),
    High(Vec<BigFloat>),
}

impl Coefficients {
    pub fn len(&self) -> usize {
        match self {
            Coefficients::F64(v) => v.len(),
            Coefficients::High(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            Coefficients::F64(v) => v.clone(),
            Coefficients::High(v) => v.iter().map(BigFloat::to_f64).collect(),
        }
    }

    /// Value at `n` (1-based) as `f64`.
    pub fn get_f64(&self, n: usize) -> f64 {
        match self {
            Coefficients::F64(v) => v[n - 1],
            Coefficients::High(v) => v[n - 1].to_f64(),
        }
    }

    pub fn high(&self) -> Option<&[BigFloat]> {
        match self {
            Coefficients::High(v) => Some(v),
            Coefficients::F64(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `max_n |A_g(n) - f(n)|`.
    pub max_abs: f64,
    /// `max_n |A_g(n) - f(n)| / (u (sum_k |a(k) g(k/n)| + |f(n)|))` with `u`
    /// the unit roundoff of the path.
    pub max_ulp_ratio: f64,
    pub worst_n: u64,
}

impl ResidualReport {
    /// Residuals stay within `bound` units of roundoff at the row's scale.
    pub fn within(&self, bound: f64) -> bool {
        self.max_ulp_ratio <= bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolterraSolution {
    pub problem: VolterraProblem,
    /// `a(1..=N)`.
    pub a: Coefficients,
    /// `A(n) = sum_{k <= n} a(k)`, accumulated with compensation.
    pub partial_sums: Coefficients,
    pub path: PrecisionPath,
    pub method: Method,
    /// `f64` was requested but `f(n)` leaves its exponent range.
    pub forced_high_precision: bool,
    /// Largest disagreement between the two precision paths, in units of the
    /// row scale `max(|f(n)|, |g(1) a(n)|)`.
    pub divergence: Option<f64>,
    pub residual: Option<ResidualReport>,
}

impl VolterraSolution {
    pub fn horizon(&self) -> u64 {
        self.problem.horizon
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.to_f64_vec()
    }

    pub fn partial_sums_f64(&self) -> Vec<f64> {
        self.partial_sums.to_f64_vec()
    }

    /// `max_n |(A(n) - A(n-1)) - a(n)|` relative to `|a(n)|`, in units of roundoff.
    pub fn increment_consistency(&self) -> f64 {
        fn worst<T: Real>(a: &[T], s: &[T], p: Precision) -> f64 {
            let u = p.unit_roundoff();
            let mut prev = T::from_i64(0, p);
            let mut w: f64 = 0.0;
            for (ai, si) in a.iter().zip(s) {
                let d = (si.clone() - prev) - ai.clone();
                let scale = ai.abs().to_f64().max(si.abs().to_f64() * 1e-300);
                if !d.is_zero() {
                    let rel = d.abs().to_f64() / (u * scale.max(f64::MIN_POSITIVE));
                    w = w.max(rel);
                }
                prev = si.clone();
            }
            w
        }
        match (&self.a, &self.partial_sums) {
            (Coefficients::F64(a), Coefficients::F64(s)) => worst(a, s, Precision::F64),
            (Coefficients::High(a), Coefficients::High(s)) => worst(a, s, self.path.precision()),
            _ => f64::INFINITY,
        }
    }
}

fn resolve_method(m: Method, horizon: u64) -> Method {
    match m {
        Method::Auto if horizon <= AUTO_DIRECT_LIMIT => Method::Direct,
        Method::Auto => Method::Blocked,
        other => other,
    }
}

struct Solved<T> {
    a: Vec<T>,
    partial: Vec<T>,
    residual: Option<ResidualReport>,
}

fn solve_in<T: Real>(
    prob: &VolterraProblem,
    p: Precision,
    method: Method,
    check: bool,
) -> Result<Solved<T>> {
    let n_max = prob.horizon as usize;
    let kernel = Kernel::<T>::new(&prob.weight, prob.horizon, p)?;
    let g1 = kernel.g1().clone();
    let blocked = method == Method::Blocked;
    let mut st = RowState::<T>::new(n_max, p);
    for n in 1..=n_max {
        let f: T = prob.rhs.eval(n as u64, p)?;
        let (hi, lo) = row_sum(&kernel, &mut st, n, n - 1, blocked);
        let a = ((f - hi) - lo) / g1.clone();
        st.push(a, p);
    }
    let partial: Vec<T> = (1..=n_max).map(|n| st.partial_sum(n)).collect();
    let residual = if check {
        Some(residuals(prob, &kernel, &mut st, p)?)
    } else {
        None
    };
    Ok(Solved {
        a: st.a,
        partial,
        residual,
    })
}

/// Re-substitutes the solution into every row. Rows are summed blocked
/// beyond [`AUTO_DIRECT_LIMIT`] and term by term below it.
fn residuals<T: Real>(
    prob: &VolterraProblem,
    kernel: &Kernel<T>,
    st: &mut RowState<T>,
    p: Precision,
) -> Result<ResidualReport> {
    let n_max = prob.horizon as usize;
    let u = p.unit_roundoff();
    let blocked = prob.horizon > AUTO_DIRECT_LIMIT;
    let mut rep = ResidualReport {
        max_abs: 0.0,
        max_ulp_ratio: 0.0,
        worst_n: 1,
    };
    let a = st.a.clone();
    for n in 1..=n_max {
        let f: T = prob.rhs.eval(n as u64, p)?;
        let (hi, lo) = row_sum(kernel, st, n, n, blocked);
        let r = ((hi - f.clone()) + lo).abs().to_f64();
        let scale = if blocked {
            // the run-wise abs sum is O(n); use |f| and the diagonal term instead
            f.abs().to_f64() + (a[n - 1].clone() * kernel.g1().clone()).abs().to_f64()
        } else {
            row_abs_sum(kernel, &a, n).to_f64() + f.abs().to_f64()
        };
        let ratio = if r == 0.0 {
            0.0
        } else {
            r / (u * scale.max(f64::MIN_POSITIVE))
        };
        if r > rep.max_abs {
            rep.max_abs = r;
        }
        if ratio > rep.max_ulp_ratio {
            rep.max_ulp_ratio = ratio;
            rep.worst_n = n as u64;
        }
    }
    Ok(rep)
}

/// Solves `A_g(n) = f(n)` for `n = 1..=N` by forward substitution.
pub fn solve(prob: &VolterraProblem, opts: &SolveOptions) -> Result<VolterraSolution> {
    let method = resolve_method(opts.method, prob.horizon);
    let mut path = opts.path;
    let mut forced = false;
    if path == PrecisionPath::F64 {
        let lo = prob
            .rhs
            .log2_magnitude(prob.horizon)
            .min(prob.rhs.log2_magnitude(1));
        let hi = prob
            .rhs
            .log2_magnitude(prob.horizon)
            .max(prob.rhs.log2_magnitude(1));
        if lo < -1000.0 || hi > 1000.0 {
            path = PrecisionPath::HighPrec(Precision::DEFAULT_HIGH.bits());
            forced = true;
        }
    }
    let (a, partial, residual) = match path {
        PrecisionPath::F64 => {
            let s = solve_in::<f64>(prob, Precision::F64, method, opts.check_residuals)?;
            (
                Coefficients::F64(s.a),
                Coefficients::F64(s.partial),
                s.residual,
            )
        }
        PrecisionPath::HighPrec(bits) => {
            if bits < 16 {
                return Err(Error::Precision(format!("{bits} bits is too few")));
            }
            let s = solve_in::<BigFloat>(prob, Precision(bits), method, opts.check_residuals)?;
            (
                Coefficients::High(s.a),
                Coefficients::High(s.partial),
                s.residual,
            )
        }
    };
    let mut sol = VolterraSolution {
        problem: prob.clone(),
        a,
        partial_sums: partial,
        path,
        method,
        forced_high_precision: forced,
        divergence: None,
        residual,
    };
    if opts.cross_check && !forced {
        let other = match path {
            PrecisionPath::F64 => PrecisionPath::HighPrec(Precision::DEFAULT_HIGH.bits()),
            PrecisionPath::HighPrec(_) => PrecisionPath::F64,
        };
        let twin = solve(
            prob,
            &SolveOptions {
                path: other,
                method,
                cross_check: false,
                check_residuals: false,
            },
        )?;
        sol.divergence = Some(divergence(&sol, &twin)?);
    }
    Ok(sol)
}

fn divergence(x: &VolterraSolution, y: &VolterraSolution) -> Result<f64> {
    let p = Precision::F64;
    let g1 = x
        .problem
        .weight
        .at_one(Precision::DEFAULT_HIGH)?
        .to_f64()
        .abs();
    let (ax, ay) = (x.a_f64(), y.a_f64());
    let mut worst: f64 = 0.0;
    for n in 1..=x.horizon() {
        let f: f64 = x.problem.rhs.eval(n, p)?;
        let (u, v) = (ax[n as usize - 1], ay[n as usize - 1]);
        let scale = f.abs().max(g1 * u.abs()).max(g1 * v.abs());
        if scale > 0.0 {
            worst = worst.max(g1 * (u - v).abs() / scale);
        }
    }
    Ok(worst)
}

/// Largest relative difference `|x - y| / max(|x|, |y|)` over two tables,
/// treating pairs that are both below `floor` in magnitude as equal when
/// their difference is below `floor` too.
pub fn max_relative_difference<T: Real>(x: &[T], y: &[T], floor: f64) -> (f64, usize) {
    let mut worst = (0.0f64, 0usize);
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        let d = (a.clone() - b.clone()).abs().to_f64();
        let scale = a.abs().to_f64().max(b.abs().to_f64());
        let rel = if scale <= floor {
            if d <= floor {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / scale
        };
        if rel > worst.0 {
            worst = (rel, i + 1);
        }
    }
    worst
}

/// Multiplies the problem's right-hand side by `c`; used by linearity checks.
pub fn with_scaled_rhs(prob: &VolterraProblem, c: &BigRational) -> VolterraProblem {
    VolterraProblem {
        rhs: prob.rhs.scaled(c),
        ..prob.clone()
    }
}

impl Serialize for VolterraProblem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("VolterraProblem", 3)?;
        st.serialize_field("weight", &self.weight.id())?;
        st.serialize_field("rhs", &self.rhs.to_string())?;
        st.serialize_field("horizon", &self.horizon)?;
        st.end()
    }
}
