use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::sieve::{factorize_trial, FactorSieve};
use super::tau::ramanujan_tau;
use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::real::{parse_rational, pow_rational, Field, Precision, Real};

/// A coefficient value: exact when the data is rational, otherwise a
/// binary float carrying its own precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Real(BigFloat),
}

impl Scalar {
    pub fn integer(v: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(v.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Real(_) => None,
        }
    }

    pub fn to<T: Real>(&self, p: Precision) -> T {
        match self {
            Scalar::Rational(r) => T::from_ratio(r, p),
            Scalar::Real(x) => T::from_bigfloat(x, p),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => Field::to_f64(r),
            Scalar::Real(x) => x.to_f64(),
        }
    }

    fn mul(&self, other: &Scalar, p: Precision) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => Scalar::Real(self.to::<BigFloat>(p) * other.to::<BigFloat>(p)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => Zero::is_zero(r),
            Scalar::Real(x) => x.is_zero(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Real(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// What an [`Explicit`](SequenceKind::Explicit) list means past its end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Evaluation beyond the list is an error.
    Undefined,
    /// The sequence is finitely supported.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Liouville,
    Moebius,
    /// The constant sequence 1.
    One,
    /// The identity of the Dirichlet ring, `(1, 0, 0, ...)`.
    Unit,
    /// Real Dirichlet character; see [`character_value`] for the indexing.
    Character {
        modulus: u64,
        index: u64,
    },
    /// Period-5 sequence `(1, ξ, -ξ, -1, 0)`.
    DavenportHeilbronn,
    /// `τ(n) / n^{11/2}`.
    RamanujanTauNormalized,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    Explicit {
        values: Vec<Scalar>,
        tail: Tail,
    },
    Periodic {
        values: Vec<Scalar>,
    },
    CompletelyMultiplicative {
        primes: BTreeMap<u64, Scalar>,
    },
    Multiplicative {
        prime_powers: BTreeMap<(u64, u32), Scalar>,
    },
    Builtin(Builtin),
}

/// An arithmetic sequence `u(1), u(2), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    kind: SequenceKind,
    label: Option<String>,
}

impl CoefficientSequence {
    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn builtin(b: Builtin) -> Result<Self> {
        if let Builtin::Character { modulus, index } = &b {
            let count = real_character_count(*modulus)?;
            if *index >= count {
                return Err(Error::InvalidArgument(format!(
                    "modulus {modulus} has {count} real characters; index {index} is out of range"
                )));
            }
        }
        Ok(CoefficientSequence {
            kind: SequenceKind::Builtin(b),
            label: None,
        })
    }

    pub fn one() -> Self {
        Self::builtin(Builtin::One).expect("valid")
    }

    pub fn unit() -> Self {
        Self::builtin(Builtin::Unit).expect("valid")
    }

    pub fn liouville() -> Self {
        Self::builtin(Builtin::Liouville).expect("valid")
    }

    pub fn moebius() -> Self {
        Self::builtin(Builtin::Moebius).expect("valid")
    }

    pub fn character(modulus: u64, index: u64) -> Result<Self> {
        Self::builtin(Builtin::Character { modulus, index })
    }

    pub fn davenport_heilbronn() -> Self {
        Self::builtin(Builtin::DavenportHeilbronn).expect("valid")
    }

    pub fn ramanujan_tau_normalized() -> Self {
        Self::builtin(Builtin::RamanujanTauNormalized).expect("valid")
    }

    pub fn explicit(values: Vec<Scalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "explicit sequence needs at least one value".into(),
            ));
        }
        Ok(CoefficientSequence {
            kind: SequenceKind::Explicit {
                values,
                tail: Tail::Undefined,
            },
            label: None,
        })
    }

    pub fn finite(values: Vec<Scalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "finite sequence needs at least one value".into(),
            ));
        }
        Ok(CoefficientSequence {
            kind: SequenceKind::Explicit {
                values,
                tail: Tail::Zero,
            },
            label: None,
        })
    }

    pub fn periodic(values: Vec<Scalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        Ok(CoefficientSequence {
            kind: SequenceKind::Periodic { values },
            label: None,
        })
    }

    pub fn completely_multiplicative(primes: BTreeMap<u64, Scalar>) -> Result<Self> {
        for &p in primes.keys() {
            if !is_prime_u64(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
        }
        Ok(CoefficientSequence {
            kind: SequenceKind::CompletelyMultiplicative { primes },
            label: None,
        })
    }

    /// Multiplicative sequence given by its values at prime powers `p^k`, `k >= 1`.
    /// `u(1) = 1` is implied; an entry for `k = 0` must equal 1.
    pub fn multiplicative(mut prime_powers: BTreeMap<(u64, u32), Scalar>) -> Result<Self> {
        for (&(p, k), v) in &prime_powers {
            if !is_prime_u64(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            if k == 0 && *v != Scalar::integer(1) {
                return Err(Error::InvalidArgument(format!(
                    "multiplicative sequence must have u(1) = 1, got {v} at {p}^0"
                )));
            }
        }
        prime_powers.retain(|&(_, k), _| k > 0);
        Ok(CoefficientSequence {
            kind: SequenceKind::Multiplicative { prime_powers },
            label: None,
        })
    }

    /// Catalog id (`"liouville"`, `"character:4,1"`, ...) when there is one.
    pub fn id(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match &self.kind {
            SequenceKind::Builtin(b) => match b {
                Builtin::Liouville => "liouville".into(),
                Builtin::Moebius => "moebius".into(),
                Builtin::One => "one".into(),
                Builtin::Unit => "e".into(),
                Builtin::Character { modulus, index } => format!("character:{modulus},{index}"),
                Builtin::DavenportHeilbronn => "davenport_heilbronn".into(),
                Builtin::RamanujanTauNormalized => "ramanujan_tau_normalized".into(),
            },
            SequenceKind::Explicit { values, tail } => {
                let head = if *tail == Tail::Zero {
                    "finite"
                } else {
                    "explicit"
                };
                format!("{head}:{}", join(values))
            }
            SequenceKind::Periodic { values } => format!("periodic:{}", join(values)),
            SequenceKind::CompletelyMultiplicative { .. } => "completely-multiplicative".into(),
            SequenceKind::Multiplicative { .. } => "multiplicative".into(),
        }
    }

    /// All values are rational, so `eval` returns [`Scalar::Rational`].
    pub fn is_exact(&self) -> bool {
        match &self.kind {
            SequenceKind::Explicit { values, .. } | SequenceKind::Periodic { values } => {
                values.iter().all(Scalar::is_exact)
            }
            SequenceKind::CompletelyMultiplicative { primes } => {
                primes.values().all(Scalar::is_exact)
            }
            SequenceKind::Multiplicative { prime_powers } => {
                prime_powers.values().all(Scalar::is_exact)
            }
            SequenceKind::Builtin(b) => !matches!(
                b,
                Builtin::DavenportHeilbronn | Builtin::RamanujanTauNormalized
            ),
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        match &self.kind {
            SequenceKind::CompletelyMultiplicative { .. } | SequenceKind::Multiplicative { .. } => {
                true
            }
            SequenceKind::Builtin(b) => !matches!(b, Builtin::DavenportHeilbronn),
            _ => false,
        }
    }

    pub fn is_completely_multiplicative(&self) -> bool {
        match &self.kind {
            SequenceKind::CompletelyMultiplicative { .. } => true,
            SequenceKind::Builtin(b) => matches!(
                b,
                Builtin::Liouville | Builtin::One | Builtin::Unit | Builtin::Character { .. }
            ),
            _ => false,
        }
    }

    /// Period `q` when `u(n + q) = u(n)` holds by construction.
    pub fn period(&self) -> Option<u64> {
        match &self.kind {
            SequenceKind::Periodic { values } => Some(values.len() as u64),
            SequenceKind::Builtin(Builtin::One) => Some(1),
            SequenceKind::Builtin(Builtin::Character { modulus, .. }) => Some(*modulus),
            SequenceKind::Builtin(Builtin::DavenportHeilbronn) => Some(5),
            _ => None,
        }
    }

    /// Length of the support when the sequence is finitely supported.
    pub fn support_len(&self) -> Option<u64> {
        match &self.kind {
            SequenceKind::Explicit {
                values,
                tail: Tail::Zero,
            } => Some(values.len() as u64),
            SequenceKind::Builtin(Builtin::Unit) => Some(1),
            _ => None,
        }
    }

    /// Largest `n` for which `eval` is defined, if bounded.
    pub fn defined_up_to(&self) -> Option<u64> {
        match &self.kind {
            SequenceKind::Explicit {
                values,
                tail: Tail::Undefined,
            } => Some(values.len() as u64),
            _ => None,
        }
    }

    /// `u(n)` as an exact rational, or an error for irrational kinds.
    pub fn eval_exact(&self, n: u64) -> Result<BigRational> {
        match self.eval(n, Precision::F64)? {
            Scalar::Rational(r) => Ok(r),
            Scalar::Real(_) => Err(Error::Unsupported(format!(
                "sequence {} has irrational values",
                self.id()
            ))),
        }
    }

    /// `u(n)`; exact where the data allows, otherwise at precision `p`.
    pub fn eval(&self, n: u64, p: Precision) -> Result<Scalar> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "sequences are indexed from 1".into(),
            ));
        }
        let int = Scalar::integer;
        match &self.kind {
            SequenceKind::Explicit { values, tail } => match values.get(n as usize - 1) {
                Some(v) => Ok(v.clone()),
                None if *tail == Tail::Zero => Ok(int(0)),
                None => Err(Error::OutOfRange {
                    what: "explicit sequence index",
                    value: n,
                    limit: values.len() as u64,
                }),
            },
            SequenceKind::Periodic { values } => {
                Ok(values[((n - 1) % values.len() as u64) as usize].clone())
            }
            SequenceKind::CompletelyMultiplicative { primes } => {
                let mut acc = int(1);
                for (q, k) in factorize_trial(n) {
                    let v = primes
                        .get(&q)
                        .ok_or(Error::MissingPrimePower { p: q, k: 1 })?;
                    for _ in 0..k {
                        acc = acc.mul(v, p);
                    }
                }
                Ok(acc)
            }
            SequenceKind::Multiplicative { prime_powers } => {
                let mut acc = int(1);
                for (q, k) in factorize_trial(n) {
                    let v = prime_powers
                        .get(&(q, k))
                        .ok_or(Error::MissingPrimePower { p: q, k })?;
                    acc = acc.mul(v, p);
                }
                Ok(acc)
            }
            SequenceKind::Builtin(b) => {
                match b {
                    Builtin::One => Ok(int(1)),
                    Builtin::Unit => Ok(int(i64::from(n == 1))),
                    Builtin::Liouville => {
                        let omega: u32 = factorize_trial(n).iter().map(|&(_, k)| k).sum();
                        Ok(int(if omega.is_multiple_of(2) { 1 } else { -1 }))
                    }
                    Builtin::Moebius => {
                        let f = factorize_trial(n);
                        Ok(int(if f.iter().any(|&(_, k)| k > 1) {
                            0
                        } else if f.len().is_multiple_of(2) {
                            1
                        } else {
                            -1
                        }))
                    }
                    Builtin::Character { modulus, index } => {
                        Ok(int(character_value(*modulus, *index, n)? as i64))
                    }
                    Builtin::DavenportHeilbronn => Ok(match n % 5 {
                        1 => int(1),
                        2 => Scalar::Real(davenport_heilbronn_xi::<BigFloat>(p)),
                        3 => Scalar::Real(-davenport_heilbronn_xi::<BigFloat>(p)),
                        4 => int(-1),
                        _ => int(0),
                    }),
                    Builtin::RamanujanTauNormalized => Ok(Scalar::Real(
                        tau_normalized::<BigFloat>(n, &ramanujan_tau(n as usize)?, p)?,
                    )),
                }
            }
        }
    }

    /// `u(1..=n_max)` in `T`, at index `n - 1`.
    pub fn tabulate<T: Real>(&self, n_max: u64, p: Precision) -> Result<Vec<T>> {
        if let Some(len) = self.defined_up_to() {
            if n_max > len {
                return Err(Error::OutOfRange {
                    what: "explicit sequence index",
                    value: n_max,
                    limit: len,
                });
            }
        }
        let n = n_max as usize;
        let from_int = |v: i64| T::from_i64(v, p);
        match &self.kind {
            SequenceKind::Periodic { values } => {
                let cyc: Vec<T> = values.iter().map(|v| v.to::<T>(p)).collect();
                Ok((0..n).map(|i| cyc[i % cyc.len()].clone()).collect())
            }
            SequenceKind::Builtin(b) => match b {
                Builtin::One => Ok(vec![from_int(1); n]),
                Builtin::Unit => Ok((0..n).map(|i| from_int(i64::from(i == 0))).collect()),
                Builtin::Liouville | Builtin::Moebius if n >= 2 => {
                    let s = FactorSieve::new(n_max)?;
                    let t = if *b == Builtin::Liouville {
                        s.liouville_table()
                    } else {
                        s.moebius_table()
                    };
                    Ok(t.into_iter().map(|v| from_int(v as i64)).collect())
                }
                Builtin::Character { modulus, index } => {
                    let q = *modulus as usize;
                    let cyc = (1..=q as u64)
                        .map(|r| character_value(*modulus, *index, r).map(|v| from_int(v as i64)))
                        .collect::<Result<Vec<T>>>()?;
                    Ok((0..n).map(|i| cyc[i % q].clone()).collect())
                }
                Builtin::DavenportHeilbronn => {
                    let xi = davenport_heilbronn_xi::<T>(p);
                    let cyc = [from_int(1), xi.clone(), -xi, from_int(-1), from_int(0)];
                    Ok((0..n).map(|i| cyc[i % 5].clone()).collect())
                }
                Builtin::RamanujanTauNormalized => {
                    let t = ramanujan_tau(n.max(1))?;
                    (1..=n_max).map(|k| tau_normalized::<T>(k, &t, p)).collect()
                }
                _ => self.tabulate_pointwise(n_max, p),
            },
            _ => self.tabulate_pointwise(n_max, p),
        }
    }

    fn tabulate_pointwise<T: Real>(&self, n_max: u64, p: Precision) -> Result<Vec<T>> {
        (1..=n_max)
            .map(|k| self.eval(k, p).map(|v| v.to::<T>(p)))
            .collect()
    }

    /// `u(1..=n_max)` as exact rationals.
    pub fn tabulate_exact(&self, n_max: u64) -> Result<Vec<BigRational>> {
        if !self.is_exact() {
            return Err(Error::Unsupported(format!(
                "sequence {} has irrational values",
                self.id()
            )));
        }
        (1..=n_max).map(|k| self.eval_exact(k)).collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

fn join(values: &[Scalar]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn is_prime_u64(p: u64) -> bool {
    p >= 2 && factorize_trial(p) == vec![(p, 1)]
}

fn tau_normalized<T: Real>(n: u64, table: &[i128], p: Precision) -> Result<T> {
    let t = T::from_bigint(&BigInt::from(table[n as usize - 1]), p);
    let scale: T = pow_rational(n, &BigRational::new((-11).into(), 2.into()), p)?;
    Ok(t * scale)
}

/// `eval_coefficient` in free-function form.
pub fn eval_coefficient(u: &CoefficientSequence, n: u64, p: Precision) -> Result<Scalar> {
    u.eval(n, p)
}

/// `ξ = (-2 + sqrt(10 - 2 sqrt 5)) / (sqrt 5 - 1)` at precision `p`.
pub fn davenport_heilbronn_xi<T: Real>(p: Precision) -> T {
    let int = |v: i64| T::from_i64(v, p);
    let r5 = int(5).sqrt();
    let inner = (int(10) - int(2) * r5.clone()).sqrt();
    (inner - int(2)) / (r5 - int(1))
}

/// Number of real Dirichlet characters modulo `q`.
pub fn real_character_count(q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    Ok(factorize_trial(q)
        .iter()
        .map(|&(p, e)| match (p, e) {
            (2, 1) => 1,
            (2, 2) => 2,
            (2, _) => 4,
            _ => 2,
        })
        .product())
}

/// Legendre symbol `(n/p)` for an odd prime `p`.
fn legendre(n: u64, p: u64) -> i8 {
    let r = n % p;
    if r == 0 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mut base = r as u128;
    let mut e = (p - 1) / 2;
    let m = p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Value of the real character mod `q` with the given index at `n`.
///
/// Index digits run over the prime powers of `q` in increasing order, least
/// significant first. An odd `p^e` has digit 0 (principal) or 1 (Legendre
/// symbol mod `p`). `4` has digit 0 or 1 (`χ_{-4}`). `2^a` with `a >= 3` has
/// digits 0..=3 selecting `χ_{-4}^i χ_8^j` with `i = d & 1`, `j = d >> 1`.
/// Index 0 is the principal character; `character(4, 1)` is `1, 0, -1, 0, ...`.
pub fn character_value(q: u64, index: u64, n: u64) -> Result<i8> {
    let count = real_character_count(q)?;
    if index >= count {
        return Err(Error::InvalidArgument(format!(
            "modulus {q} has {count} real characters; index {index} is out of range"
        )));
    }
    let mut rest = index;
    let mut value = 1i8;
    for (p, e) in factorize_trial(q) {
        if n.is_multiple_of(p) {
            return Ok(0);
        }
        let radix = match (p, e) {
            (2, 1) => 1,
            (2, 2) => 2,
            (2, _) => 4,
            _ => 2,
        };
        let digit = rest % radix;
        rest /= radix;
        let comp = if p == 2 {
            let m4 = if n % 4 == 1 { 1 } else { -1 };
            let m8 = if n % 8 == 1 || n % 8 == 7 { 1 } else { -1 };
            (if digit & 1 == 1 { m4 } else { 1 }) * (if digit >> 1 == 1 { m8 } else { 1 })
        } else if digit == 1 {
            legendre(n, p)
        } else {
            1
        };
        value *= comp;
    }
    Ok(value)
}

/// A Dirichlet series `sum u(n) n^{-s}` plus the labels the catalog attaches
/// to it. The labels are informational; nothing is derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSeriesMeta {
    pub coefficients: CoefficientSequence,
    pub claims_functional_equation: bool,
    pub abscissa_hint: f64,
}

impl DirichletSeriesMeta {
    /// Catalog entry for a sequence. `abscissa_hint` is the abscissa of
    /// absolute convergence of the series.
    pub fn catalog(u: &CoefficientSequence) -> Self {
        let (claims, abscissa) = match &u.kind {
            SequenceKind::Builtin(b) => match b {
                Builtin::One | Builtin::Liouville | Builtin::Moebius => {
                    (matches!(b, Builtin::One), 1.0)
                }
                Builtin::Unit => (false, f64::NEG_INFINITY),
                Builtin::Character { .. } => (true, 1.0),
                Builtin::DavenportHeilbronn => (true, 1.0),
                Builtin::RamanujanTauNormalized => (true, 1.0),
            },
            SequenceKind::Explicit {
                tail: Tail::Zero, ..
            } => (false, f64::NEG_INFINITY),
            _ => (false, 1.0),
        };
        DirichletSeriesMeta {
            coefficients: u.clone(),
            claims_functional_equation: claims,
            abscissa_hint: abscissa,
        }
    }
}

fn parse_scalar(s: &str, p: Precision) -> Result<Scalar> {
    let s = s.trim();
    if s == "xi" || s == "-xi" {
        let xi = davenport_heilbronn_xi::<BigFloat>(p);
        return Ok(Scalar::Real(if s == "xi" { xi } else { -xi }));
    }
    parse_rational(s).map(Scalar::Rational)
}

fn parse_list(s: &str) -> Result<Vec<Scalar>> {
    s.split(',')
        .map(|t| parse_scalar(t, Precision::DEFAULT_HIGH))
        .collect()
}

/// Ids accepted by [`CoefficientSequence::from_str`], with a one-line gloss.
pub const SEQUENCE_IDS: &[(&str, &str)] = &[
    ("one", "constant 1"),
    ("e", "Dirichlet identity (1, 0, 0, ...)"),
    ("liouville", "Liouville lambda"),
    ("moebius", "Moebius mu"),
    (
        "character:q[,index]",
        "real Dirichlet character mod q (index defaults to 1)",
    ),
    ("davenport_heilbronn | dh", "period 5: (1, xi, -xi, -1, 0)"),
    ("ramanujan_tau_normalized | tau", "tau(n) / n^(11/2)"),
    (
        "periodic:v1,...,vq",
        "periodic with the given period values",
    ),
    ("explicit:v1,...,vN", "explicit list; undefined past N"),
    ("finite:v1,...,vN", "explicit list; zero past N"),
];

impl FromStr for CoefficientSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let seq = match (head, arg) {
            ("one", None) => Self::one(),
            ("e" | "unit", None) => Self::unit(),
            ("liouville" | "lambda", None) => Self::liouville(),
            ("moebius" | "mu", None) => Self::moebius(),
            ("davenport_heilbronn" | "dh", None) => Self::davenport_heilbronn(),
            ("ramanujan_tau_normalized" | "tau", None) => Self::ramanujan_tau_normalized(),
            ("character" | "chi", Some(a)) => {
                let mut parts = a.split(',').map(|t| t.trim().parse::<u64>());
                let q = parts
                    .next()
                    .and_then(|r| r.ok())
                    .ok_or_else(|| Error::Parse(format!("bad character modulus in {s:?}")))?;
                let index = match parts.next() {
                    Some(r) => {
                        r.map_err(|_| Error::Parse(format!("bad character index in {s:?}")))?
                    }
                    None => u64::from(real_character_count(q)? > 1),
                };
                if parts.next().is_some() {
                    return Err(Error::Parse(format!("too many fields in {s:?}")));
                }
                Self::character(q, index)?
            }
            ("periodic", Some(a)) => Self::periodic(parse_list(a)?)?,
            ("explicit", Some(a)) => Self::explicit(parse_list(a)?)?,
            ("finite", Some(a)) => Self::finite(parse_list(a)?)?,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown sequence id {s:?}; known ids: {}",
                    SEQUENCE_IDS
                        .iter()
                        .map(|(id, _)| *id)
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        };
        Ok(seq)
    }
}

impl fmt::Display for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Precision = Precision::DEFAULT_HIGH;

    #[test]
    fn character_mod_4_values() {
        let chi = CoefficientSequence::character(4, 1).unwrap();
        let vals: Vec<i64> = (1..=8)
            .map(|n| chi.eval_exact(n).unwrap().to_integer().try_into().unwrap())
            .collect();
        assert_eq!(vals, vec![1, 0, -1, 0, 1, 0, -1, 0]);
        assert_eq!("character:4".parse::<CoefficientSequence>().unwrap(), chi);
    }

    #[test]
    fn principal_and_legendre_characters() {
        assert_eq!(real_character_count(4).unwrap(), 2);
        assert_eq!(real_character_count(8).unwrap(), 4);
        assert_eq!(real_character_count(15).unwrap(), 4);
        for n in 1..30 {
            let principal = character_value(15, 0, n).unwrap();
            assert_eq!(principal, i8::from(n % 3 != 0 && n % 5 != 0));
        }
        assert_eq!(character_value(5, 1, 2).unwrap(), -1);
        assert_eq!(character_value(5, 1, 4).unwrap(), 1);
        assert!(character_value(4, 2, 1).is_err());
    }

    #[test]
    fn davenport_heilbronn_wraps_with_period_5() {
        let h = CoefficientSequence::davenport_heilbronn();
        let xi = davenport_heilbronn_xi::<f64>(Precision::F64);
        assert_eq!(h.eval(7, P).unwrap().to_f64(), xi);
        assert_eq!(h.eval(5, P).unwrap(), Scalar::integer(0));
        assert_eq!(h.eval(9, P).unwrap(), Scalar::integer(-1));
        assert!((xi - 0.284079).abs() < 5e-7);
    }

    #[test]
    fn xi_identity_holds() {
        let p = Precision(256);
        let xi: BigFloat = davenport_heilbronn_xi(p);
        let r5 = BigFloat::from_u64(5, 256).sqrt();
        let one = BigFloat::one(256);
        let two = BigFloat::from_u64(2, 256);
        let lhs = (r5.clone() - one) * xi + two.clone();
        let lhs = lhs.clone() * lhs;
        let rhs = BigFloat::from_u64(10, 256) - two * r5;
        assert!((lhs - rhs).abs().to_f64() < 1e-70);
    }

    #[test]
    fn tau_normalized_starts_at_one() {
        let t = CoefficientSequence::ramanujan_tau_normalized();
        assert_eq!(t.eval(1, P).unwrap().to_f64(), 1.0);
        let v = t.eval(2, P).unwrap().to_f64();
        assert!((v - (-24.0 / 2f64.powf(5.5))).abs() < 1e-15);
    }

    #[test]
    fn multiplicative_requires_prime_power_data() {
        let mut m = BTreeMap::new();
        m.insert((2, 1), Scalar::integer(3));
        let u = CoefficientSequence::multiplicative(m).unwrap();
        assert_eq!(
            u.eval_exact(2).unwrap(),
            BigRational::from_integer(3.into())
        );
        assert_eq!(u.eval(4, P), Err(Error::MissingPrimePower { p: 2, k: 2 }));
        let mut bad = BTreeMap::new();
        bad.insert((2, 0), Scalar::integer(2));
        assert!(CoefficientSequence::multiplicative(bad).is_err());
    }

    #[test]
    fn explicit_tail_rules() {
        let u: CoefficientSequence = "explicit:1,2,3".parse().unwrap();
        assert!(matches!(u.eval(4, P), Err(Error::OutOfRange { .. })));
        let f: CoefficientSequence = "finite:1,2,3".parse().unwrap();
        assert_eq!(f.eval(4, P).unwrap(), Scalar::integer(0));
        assert_eq!(f.support_len(), Some(3));
    }

    #[test]
    fn tabulate_matches_eval() {
        let ids = [
            "one",
            "e",
            "liouville",
            "moebius",
            "character:12,3",
            "dh",
            "periodic:1,-1/2,0",
        ];
        for id in ids {
            let u: CoefficientSequence = id.parse().unwrap();
            let t = u.tabulate::<f64>(60, Precision::F64).unwrap();
            for n in 1..=60u64 {
                assert_eq!(
                    t[n as usize - 1],
                    u.eval(n, P).unwrap().to_f64(),
                    "{id} at {n}"
                );
            }
        }
    }

    #[test]
    fn unknown_id_lists_catalog() {
        let err = "nope".parse::<CoefficientSequence>().unwrap_err();
        assert!(err.to_string().contains("liouville"));
    }
}
