//! Fixed-precision binary floating point on top of `num-bigint`.
//!
//! A value is `(-1)^neg * mant * 2^exp` with `mant` holding exactly `prec`
//! significant bits (or zero). Every arithmetic result is rounded to nearest,
//! ties to even, at the larger of the operand precisions. Transcendental
//! functions run with guard bits and round once at the end.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const GUARD_BITS: u32 = 40;

#[derive(Clone)]
pub struct BigFloat {
    neg: bool,
    mant: BigUint,
    exp: i64,
    prec: u32,
}

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, BigFloat>> = RefCell::new(HashMap::new());
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        assert!(prec >= 2, "precision must be at least 2 bits");
        BigFloat {
            neg: false,
            mant: BigUint::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_u64(1, prec)
    }

    pub fn from_u64(v: u64, prec: u32) -> Self {
        Self::round_from(false, BigUint::from(v), 0, prec, false)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::round_from(v < 0, BigUint::from(v.unsigned_abs()), 0, prec, false)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Self::round_from(
            v.sign() == Sign::Minus,
            v.magnitude().clone(),
            0,
            prec,
            false,
        )
    }

    /// Correctly rounded `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let neg = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
        Self::div_mag(neg, num.magnitude(), 0, den.magnitude(), 0, prec)
    }

    /// Exact conversion (then rounded to `prec` if `prec < 53`).
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "cannot convert non-finite f64 {x}");
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Self::round_from(neg, BigUint::from(m), e, prec, false)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    /// Same value re-rounded to `prec` bits.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::round_from(self.neg, self.mant.clone(), self.exp, prec, false)
    }

    /// Multiply by `2^k` (exact).
    pub fn ldexp(&self, k: i64) -> Self {
        let mut r = self.clone();
        if !r.is_zero() {
            r.exp += k;
        }
        r
    }

    /// Position of the leading bit: `|x|` lies in `[2^(top-1), 2^top)`.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    fn round_from(neg: bool, mant: BigUint, exp: i64, prec: u32, sticky: bool) -> Self {
        let bits = mant.bits();
        if bits == 0 {
            return Self::zero(prec);
        }
        let p = prec as u64;
        if bits <= p {
            let shift = p - bits;
            return BigFloat {
                neg,
                mant: mant << shift,
                exp: exp - shift as i64,
                prec,
            };
        }
        let shift = bits - p;
        let mut q = &mant >> shift;
        let half = mant.bit(shift - 1);
        let rest = sticky || mant.trailing_zeros().is_some_and(|tz| tz < shift - 1);
        let mut e = exp + shift as i64;
        if half && (rest || q.bit(0)) {
            q += 1u32;
            if q.bits() > p {
                q >>= 1;
                e += 1;
            }
        }
        BigFloat {
            neg,
            mant: q,
            exp: e,
            prec,
        }
    }

    fn div_mag(neg: bool, a: &BigUint, ae: i64, b: &BigUint, be: i64, prec: u32) -> Self {
        if a.is_zero() {
            return Self::zero(prec);
        }
        let want = prec as i64 + 2 + b.bits() as i64 - a.bits() as i64;
        let shift = want.max(0) as u64;
        let (q, r) = (a << shift).div_rem(b);
        Self::round_from(neg, q, ae - be - shift as i64, prec, !r.is_zero())
    }

    fn add_signed(&self, other: &Self, negate_other: bool) -> Self {
        let prec = self.prec.max(other.prec);
        let other_neg = other.neg != negate_other;
        if other.is_zero() {
            return self.with_precision(prec);
        }
        if self.is_zero() {
            return Self::round_from(other_neg, other.mant.clone(), other.exp, prec, false);
        }
        // an operand this far below the other's last bit cannot move the rounded result
        let cutoff = prec as i64 + 3;
        if other.top() < self.top() - cutoff {
            return self.with_precision(prec);
        }
        if self.top() < other.top() - cutoff {
            return Self::round_from(other_neg, other.mant.clone(), other.exp, prec, false);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        if self.neg == other_neg {
            Self::round_from(self.neg, a + b, e, prec, false)
        } else {
            match a.cmp(&b) {
                Ordering::Equal => Self::zero(prec),
                Ordering::Greater => Self::round_from(self.neg, a - b, e, prec, false),
                Ordering::Less => Self::round_from(other_neg, b - a, e, prec, false),
            }
        }
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative BigFloat");
        if self.is_zero() {
            return self.clone();
        }
        let want = 2 * (self.prec as i64 + 2);
        let mut shift = (want - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as u64;
        let r = m.sqrt();
        let sticky = &r * &r != m;
        Self::round_from(false, r, (self.exp - shift) / 2, self.prec, sticky)
    }

    fn ln2(prec: u32) -> Self {
        if let Some(v) = LN2_CACHE.with(|c| c.borrow().get(&prec).cloned()) {
            return v;
        }
        let w = prec + GUARD_BITS;
        let third = Self::from_ratio(&BigInt::from(1), &BigInt::from(3), w);
        let v = Self::atanh_series(&third, w).ldexp(1).with_precision(prec);
        LN2_CACHE.with(|c| c.borrow_mut().insert(prec, v.clone()));
        v
    }

    /// `atanh(t)` for small `|t|` by its odd power series, evaluated at `w` bits.
    fn atanh_series(t: &Self, w: u32) -> Self {
        let t2 = t.clone() * t.clone();
        let mut sum = t.clone();
        let mut power = t.clone();
        let mut j: u64 = 1;
        loop {
            power = power * t2.clone();
            j += 2;
            let term = power.clone() / Self::from_u64(j, w);
            if term.is_zero() || term.top() < sum.top() - w as i64 - 2 {
                break;
            }
            sum = sum + term;
        }
        sum
    }

    pub fn ln(&self) -> Self {
        assert!(
            !self.is_negative() && !self.is_zero(),
            "ln of non-positive BigFloat"
        );
        self.ln_at(self.prec + GUARD_BITS).with_precision(self.prec)
    }

    fn ln_at(&self, w: u32) -> Self {
        let bits = self.mant.bits() as i64;
        let mut k = self.exp + bits;
        let mut y = BigFloat {
            neg: false,
            mant: self.mant.clone(),
            exp: -bits,
            prec: self.prec,
        }
        .with_precision(w);
        if y.to_f64() < std::f64::consts::FRAC_1_SQRT_2 {
            y = y.ldexp(1);
            k -= 1;
        }
        let one = Self::one(w);
        let t = (y.clone() - one.clone()) / (y + one);
        let ln_y = if t.is_zero() {
            Self::zero(w)
        } else {
            Self::atanh_series(&t, w).ldexp(1)
        };
        if k == 0 {
            return ln_y;
        }
        let extra = 64 - k.unsigned_abs().leading_zeros();
        let ln2 = Self::ln2(w + extra);
        (ln_y + ln2 * Self::from_i64(k, w + extra)).with_precision(w)
    }

    pub fn exp(&self) -> Self {
        self.exp_at(self.prec + GUARD_BITS)
            .with_precision(self.prec)
    }

    fn exp_at(&self, w: u32) -> Self {
        const HALVINGS: i64 = 12;
        if self.is_zero() {
            return Self::one(w);
        }
        let xf = self.to_f64();
        assert!(xf.abs() < 1e15, "BigFloat::exp argument {xf} out of range");
        let k = (xf / std::f64::consts::LN_2).round() as i64;
        let wk = w + HALVINGS as u32 + 8;
        let extra = 64 - k.unsigned_abs().leading_zeros();
        let r = if k == 0 {
            self.with_precision(wk)
        } else {
            let ln2 = Self::ln2(wk + extra);
            (self.with_precision(wk + extra) - ln2 * Self::from_i64(k, wk + extra))
                .with_precision(wk)
        };
        let r = r.ldexp(-HALVINGS);
        let mut sum = Self::one(wk);
        let mut term = Self::one(wk);
        let mut j: u64 = 0;
        loop {
            j += 1;
            term = term * r.clone() / Self::from_u64(j, wk);
            if term.is_zero() || term.top() < -(wk as i64) - 2 {
                break;
            }
            sum = sum + term.clone();
        }
        for _ in 0..HALVINGS {
            sum = sum.clone() * sum;
        }
        sum.ldexp(k).with_precision(w)
    }

    /// `self^e` for positive `self`.
    pub fn powf(&self, e: &Self) -> Self {
        if e.is_zero() {
            return Self::one(self.prec.max(e.prec));
        }
        let prec = self.prec.max(e.prec);
        let w = prec + GUARD_BITS + 16;
        let l = self.ln_at(w) * e.with_precision(w);
        l.exp_at(w).with_precision(prec)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            let mut m = (&self.mant >> shift).to_u64().expect("64-bit window");
            if self.mant.trailing_zeros().is_some_and(|tz| tz < shift) {
                m |= 1;
            }
            (m, self.exp + shift as i64)
        } else {
            (self.mant.to_u64().expect("64-bit mantissa"), self.exp)
        };
        let v = ldexp_f64(m as f64, e);
        if self.neg {
            -v
        } else {
            v
        }
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.top().cmp(&other.top()) {
            Ordering::Equal => {}
            o => return o,
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let lead = {
            let bits = self.mant.bits();
            let window = bits.min(53);
            let m = (&self.mant >> (bits - window)).to_u64().unwrap_or(1) as f64;
            m.log10() + ((self.exp + (bits - window) as i64) as f64) * std::f64::consts::LOG10_2
        };
        let mut e10 = lead.floor() as i64;
        let mut int = self.scaled_integer(digits as i64 - 1 - e10);
        let lower = BigUint::from(10u32).pow(digits as u32 - 1);
        let upper = &lower * 10u32;
        if int >= upper {
            e10 += 1;
            int = self.scaled_integer(digits as i64 - 1 - e10);
        } else if int < lower {
            e10 -= 1;
            int = self.scaled_integer(digits as i64 - 1 - e10);
        }
        let s = int.to_string();
        let (head, tail) = s.split_at(1);
        let sign = if self.neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }

    /// `round(|self| * 10^scale)` as an integer.
    fn scaled_integer(&self, scale: i64) -> BigUint {
        let ten = BigUint::from(10u32);
        let (mut num, mut den) = (self.mant.clone(), BigUint::one());
        if scale >= 0 {
            num *= ten.pow(scale as u32);
        } else {
            den *= ten.pow((-scale) as u32);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        let (q, r) = num.div_rem(&den);
        if r * 2u32 >= den {
            q + 1u32
        } else {
            q
        }
    }
}

/// `x * 2^e` without intermediate overflow.
pub(crate) fn ldexp_f64(mut x: f64, mut e: i64) -> f64 {
    let big = f64::from_bits(((1023 + 1000) as u64) << 52);
    let small = f64::from_bits(((1023 - 1000) as u64) << 52);
    while e > 1000 {
        x *= big;
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= small;
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((1023 + e) as u64) << 52)
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BigFloat({}, {} bits)",
            self.to_sci_string(20),
            self.prec
        )
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or(((self.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let a_neg = self.is_negative();
        let b_neg = other.is_negative();
        Some(match (a_neg, b_neg) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_abs(other),
            (true, true) => other.cmp_abs(self),
        })
    }
}

impl Add for BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: BigFloat) -> BigFloat {
        self.add_signed(&rhs, false)
    }
}

impl Sub for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        self.add_signed(&rhs, true)
    }
}

impl Mul for BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: BigFloat) -> BigFloat {
        let prec = self.prec.max(rhs.prec);
        Self::round_from(
            self.neg != rhs.neg,
            self.mant * rhs.mant,
            self.exp + rhs.exp,
            prec,
            false,
        )
    }
}

impl Div for BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: BigFloat) -> BigFloat {
        assert!(!rhs.is_zero(), "BigFloat division by zero");
        let prec = self.prec.max(rhs.prec);
        Self::div_mag(
            self.neg != rhs.neg,
            &self.mant,
            self.exp,
            &rhs.mant,
            rhs.exp,
            prec,
        )
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(mut self) -> BigFloat {
        if !self.is_zero() {
            self.neg = !self.neg;
        }
        self
    }
}
