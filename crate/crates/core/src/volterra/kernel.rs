//! Row sums `sum_{k < n} a(k) g(k/n)` for the cataloged weights.
//!
//! Every weight is written as `g(k/n) = (k/n) v + c0` where the slope `v` is
//! constant on runs of `k`: for broken harmonic functions `c0 = 0` and the
//! runs are the breakpoint intervals, for the affine weight there is a single
//! run. `Direct` sums term by term; `Blocked` replaces each run by a
//! difference of prefix sums of `k a(k)`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::arith::Scalar;
use crate::error::{Error, Result};
use crate::real::{Precision, Real};
use crate::weights::{ingham_slopes, ingham_slopes_in, WeightFunction, WeightKind};

/// How the slope on a run is stored.
#[derive(Debug, Clone)]
enum Slopes<T> {
    /// Small integers; multiplication stays exact longer.
    Int(Vec<i64>),
    Real(Vec<T>),
}

impl<T: Real> Slopes<T> {
    fn mul(&self, i: usize, x: &T, p: Precision) -> T {
        match self {
            Slopes::Int(v) => x.mul_i64(v[i], p),
            Slopes::Real(v) => x.clone() * v[i].clone(),
        }
    }

    fn get(&self, i: usize, p: Precision) -> T {
        match self {
            Slopes::Int(v) => T::from_i64(v[i], p),
            Slopes::Real(v) => v[i].clone(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Slopes::Int(v) => v.len(),
            Slopes::Real(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone)]
enum Shape<T> {
    Affine {
        c0: T,
        c1: T,
    },
    /// Breakpoints `1/i`: slope `W(⌊n/k⌋)` stored at index `⌊n/k⌋ - 1`.
    Harmonic {
        w: Slopes<T>,
    },
    /// Arbitrary rational breakpoints `u_1 = 1 > u_2 > ...`; `v_i` at index `i - 1`.
    Cuts {
        cuts: Vec<BigRational>,
        cuts_f64: Vec<f64>,
        v: Slopes<T>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Kernel<T> {
    shape: Shape<T>,
    g1: T,
    p: Precision,
}

/// Run of `k` values `lo..=hi` sharing slope index `idx`.
#[derive(Debug, Clone, Copy)]
struct Run {
    lo: usize,
    hi: usize,
    idx: usize,
}

/// `⌊n u⌋` for a positive rational `u`, via `f64` with an exact fallback near integers.
fn floor_mul(n: usize, u: &BigRational, u_f64: f64) -> usize {
    let x = n as f64 * u_f64;
    let r = x.round();
    if (x - r).abs() > 1e-6 * x.max(1.0) && x < 9.0e15 {
        return x.floor() as usize;
    }
    (u * BigRational::from_integer(n.into()))
        .floor()
        .to_integer()
        .to_usize()
        .unwrap_or(usize::MAX)
}

fn int_slopes(v: &[Scalar]) -> Option<Vec<i64>> {
    v.iter()
        .map(|s| match s {
            Scalar::Rational(r) if r.is_integer() => {
                r.to_integer().to_i64().filter(|x| x.abs() < 1 << 40)
            }
            _ => None,
        })
        .collect()
}

impl<T: Real> Kernel<T> {
    pub(crate) fn new(g: &WeightFunction, horizon: u64, p: Precision) -> Result<Self> {
        let shape = match g.kind() {
            WeightKind::Affine { c0, c1 } => Shape::Affine {
                c0: T::from_ratio(c0, p),
                c1: T::from_ratio(c1, p),
            },
            WeightKind::Ingham => Shape::Harmonic {
                w: Slopes::Int((1..=horizon as i64).collect()),
            },
            WeightKind::GeneralizedIngham(u) => {
                let w = if u.is_exact() {
                    let exact = ingham_slopes(u, horizon, p)?;
                    match int_slopes(&exact) {
                        Some(v) => Slopes::Int(v),
                        None => Slopes::Real(exact.iter().map(|s| s.to::<T>(p)).collect()),
                    }
                } else {
                    Slopes::Real(ingham_slopes_in::<T>(u, horizon, p)?)
                };
                Shape::Harmonic { w }
            }
            WeightKind::PowerScale { lambda } => {
                let mut cuts = vec![BigRational::one()];
                let floor = BigRational::new(1.into(), (horizon as i64 + 1).into());
                while *cuts.last().unwrap() > floor {
                    let next = cuts.last().unwrap() / lambda;
                    cuts.push(next);
                }
                let mut v = Vec::with_capacity(cuts.len());
                let mut s = BigRational::one();
                for _ in 0..cuts.len() {
                    v.push(Scalar::Rational(s.clone()));
                    s *= lambda;
                }
                Self::cuts_shape(cuts, &v, p)
            }
            WeightKind::ExplicitBhf {
                breakpoints,
                slopes,
            } => {
                let v: Vec<Scalar> = slopes.iter().cloned().map(Scalar::Rational).collect();
                Self::cuts_shape(breakpoints.clone(), &v, p)
            }
        };
        let g1 = match &shape {
            Shape::Affine { c0, c1 } => c0.clone() + c1.clone(),
            Shape::Harmonic { w } => w.get(0, p),
            Shape::Cuts { v, .. } => v.get(0, p),
        };
        if g1.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Kernel { shape, g1, p })
    }

    fn cuts_shape(cuts: Vec<BigRational>, v: &[Scalar], p: Precision) -> Shape<T> {
        let cuts_f64 = cuts.iter().map(|c| c.to_f64().unwrap_or(0.0)).collect();
        let v = match int_slopes(v) {
            Some(ints) => Slopes::Int(ints),
            None => Slopes::Real(v.iter().map(|s| s.to::<T>(p)).collect()),
        };
        Shape::Cuts { cuts, cuts_f64, v }
    }

    pub(crate) fn g1(&self) -> &T {
        &self.g1
    }

    /// Runs covering `k in 1..=kmax` for row `n`.
    fn runs(&self, n: usize, kmax: usize, out: &mut Vec<Run>) {
        out.clear();
        match &self.shape {
            Shape::Affine { .. } => out.push(Run {
                lo: 1,
                hi: kmax,
                idx: 0,
            }),
            Shape::Harmonic { .. } => {
                let mut k = 1;
                while k <= kmax {
                    let q = n / k;
                    let hi = (n / q).min(kmax);
                    out.push(Run {
                        lo: k,
                        hi,
                        idx: q - 1,
                    });
                    k = hi + 1;
                }
            }
            Shape::Cuts { cuts, cuts_f64, v } => {
                // interval i holds n u_{i+1} < k <= n u_i
                let mut hi = kmax;
                for i in 0..cuts.len() {
                    let lo = if i + 1 < cuts.len() && i + 1 < v.len() {
                        floor_mul(n, &cuts[i + 1], cuts_f64[i + 1]) + 1
                    } else {
                        1
                    };
                    let top = floor_mul(n, &cuts[i], cuts_f64[i]).min(hi);
                    if lo <= top {
                        out.push(Run {
                            lo,
                            hi: top,
                            idx: i.min(v.len() - 1),
                        });
                        hi = lo - 1;
                    }
                    if lo <= 1 {
                        break;
                    }
                }
            }
        }
    }

    fn slope_times(&self, idx: usize, x: &T) -> T {
        match &self.shape {
            Shape::Affine { c1, .. } => x.clone() * c1.clone(),
            Shape::Harmonic { w } => w.mul(idx, x, self.p),
            Shape::Cuts { v, .. } => v.mul(idx, x, self.p),
        }
    }

    fn c0(&self) -> Option<&T> {
        match &self.shape {
            Shape::Affine { c0, .. } => Some(c0),
            _ => None,
        }
    }
}

/// Running state shared by the two summation strategies.
pub(crate) struct RowState<T> {
    /// `k a(k)` at index `k - 1`.
    pub ka: Vec<T>,
    /// `a(k)` at index `k - 1`.
    pub a: Vec<T>,
    /// Compensated prefix sums of `k a(k)`: `(hi, lo)` for `k = 0..=len`.
    prefix_ka: Vec<(T, T)>,
    /// Compensated prefix sums of `a(k)`.
    prefix_a: Vec<(T, T)>,
    runs: Vec<Run>,
}

fn two_sum<T: Real>(a: &T, b: &T) -> (T, T) {
    let s = a.clone() + b.clone();
    let bb = s.clone() - a.clone();
    let err = (a.clone() - (s.clone() - bb.clone())) + (b.clone() - bb);
    (s, err)
}

/// Adds `x` to a double-length `(hi, lo)` accumulator. Types without
/// compensation keep `lo` at zero.
fn dd_add<T: Real>(acc: &(T, T), x: &T) -> (T, T) {
    if !T::COMPENSATED {
        return (acc.0.clone() + x.clone(), acc.1.clone());
    }
    let (s, e) = two_sum(&acc.0, x);
    let lo = acc.1.clone() + e;
    two_sum(&s, &lo)
}

fn dd_sub<T: Real>(a: &(T, T), b: &(T, T)) -> (T, T) {
    if !T::COMPENSATED {
        return (a.0.clone() - b.0.clone(), a.1.clone());
    }
    let (s, e) = two_sum(&a.0, &(-b.0.clone()));
    let lo = e + (a.1.clone() - b.1.clone());
    two_sum(&s, &lo)
}

impl<T: Real> RowState<T> {
    pub(crate) fn new(capacity: usize, p: Precision) -> Self {
        let z = T::from_i64(0, p);
        RowState {
            ka: Vec::with_capacity(capacity),
            a: Vec::with_capacity(capacity),
            prefix_ka: vec![(z.clone(), z.clone())],
            prefix_a: vec![(z.clone(), z)],
            runs: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, a: T, p: Precision) {
        let k = self.a.len() as i64 + 1;
        let ka = a.mul_i64(k, p);
        let next_ka = dd_add(self.prefix_ka.last().unwrap(), &ka);
        let next_a = dd_add(self.prefix_a.last().unwrap(), &a);
        self.prefix_ka.push(next_ka);
        self.prefix_a.push(next_a);
        self.ka.push(ka);
        self.a.push(a);
    }

    pub(crate) fn partial_sum(&self, n: usize) -> T {
        let (hi, lo) = &self.prefix_a[n];
        hi.clone() + lo.clone()
    }
}

/// `(hi, lo)` of `sum_{k <= kmax} a(k) g(k/n)`, from whatever `a` values
/// `st` holds.
pub(crate) fn row_sum<T: Real>(
    kernel: &Kernel<T>,
    st: &mut RowState<T>,
    n: usize,
    kmax: usize,
    blocked: bool,
) -> (T, T) {
    let p = kernel.p;
    let z = T::from_i64(0, p);
    if kmax == 0 {
        return (z.clone(), z);
    }
    let mut runs = std::mem::take(&mut st.runs);
    kernel.runs(n, kmax, &mut runs);
    let mut acc = (z.clone(), z.clone());
    for r in &runs {
        let part = if blocked {
            dd_sub(&st.prefix_ka[r.hi], &st.prefix_ka[r.lo - 1])
        } else {
            let mut s = (z.clone(), z.clone());
            for x in &st.ka[r.lo - 1..r.hi] {
                s = dd_add(&s, x);
            }
            s
        };
        acc = dd_add(&acc, &kernel.slope_times(r.idx, &part.0));
        if T::COMPENSATED {
            acc = dd_add(&acc, &kernel.slope_times(r.idx, &part.1));
        }
    }
    st.runs = runs;
    let nn = T::from_i64(n as i64, p);
    let mut out = (acc.0 / nn.clone(), acc.1 / nn);
    if let Some(c0) = kernel.c0() {
        let sa = if blocked {
            st.prefix_a[kmax].clone()
        } else {
            let mut s = (z.clone(), z);
            for x in &st.a[..kmax] {
                s = dd_add(&s, x);
            }
            s
        };
        out = dd_add(&out, &(c0.clone() * sa.0));
        if T::COMPENSATED {
            out = dd_add(&out, &(c0.clone() * sa.1));
        }
    }
    out
}

/// `sum_{k <= n} |a(k) g(k/n)|`, the conditioning scale of row `n`.
pub(crate) fn row_abs_sum<T: Real>(kernel: &Kernel<T>, a: &[T], n: usize) -> T {
    let p = kernel.p;
    let mut runs = Vec::new();
    kernel.runs(n, n, &mut runs);
    let nn = T::from_i64(n as i64, p);
    let mut total = T::from_i64(0, p);
    for r in &runs {
        for k in r.lo..=r.hi {
            let ka = a[k - 1].mul_i64(k as i64, p);
            let mut t = kernel.slope_times(r.idx, &ka) / nn.clone();
            if let Some(c0) = kernel.c0() {
                t = t + c0.clone() * a[k - 1].clone();
            }
            total = total + t.abs();
        }
    }
    total
}
