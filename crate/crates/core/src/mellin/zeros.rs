//! Zeros in a rectangle by argument-principle counting and box subdivision.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::{bhf_factors, eval_approx, MellinFunction, MellinKind};
use crate::error::{Error, Result};

/// Boxes closer than this to a known pole are shrunk before counting.
const POLE_CLEARANCE: f64 = 1e-3;
/// Inward shift applied to an edge that runs too close to a pole.
const POLE_SHRINK: f64 = 1e-2;
/// Largest phase step accepted while tracking the argument.
const MAX_PHASE_STEP: f64 = PI / 4.0;
/// Boxes holding one zero and at most this wide are handed to the secant.
const REFINE_SIZE: f64 = 2.0;
const SPLIT_FRACTIONS: [f64; 7] = [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ComplexBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::InvalidArgument(format!(
                "empty box [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(ComplexBox {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }

    pub(crate) fn contains_strictly(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    fn grown(&self, by: f64) -> ComplexBox {
        ComplexBox {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }

    /// Distance from `z` to the boundary of the box.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let dx = if z.re < self.re_min {
            self.re_min - z.re
        } else if z.re > self.re_max {
            z.re - self.re_max
        } else {
            0.0
        };
        let dy = if z.im < self.im_min {
            self.im_min - z.im
        } else if z.im > self.im_max {
            z.im - self.im_max
        } else {
            0.0
        };
        if dx > 0.0 || dy > 0.0 {
            return dx.hypot(dy);
        }
        (z.re - self.re_min)
            .min(self.re_max - z.re)
            .min(z.im - self.im_min)
            .min(self.im_max - z.im)
    }

    /// Corners in counterclockwise order starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn split(&self, frac: f64) -> (ComplexBox, ComplexBox) {
        if self.width() >= self.height() {
            let m = self.re_min + frac * self.width();
            (
                ComplexBox { re_max: m, ..*self },
                ComplexBox { re_min: m, ..*self },
            )
        } else {
            let m = self.im_min + frac * self.height();
            (
                ComplexBox { im_max: m, ..*self },
                ComplexBox { im_min: m, ..*self },
            )
        }
    }
}

impl fmt::Display for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]",
            self.re_min, self.re_max, self.im_min, self.im_max
        )
    }
}

impl FromStr for ComplexBox {
    type Err = Error;

    /// `re_min,re_max,im_min,im_max`.
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("box {s:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        match v[..] {
            [a, b, c, d] => ComplexBox::new(a, b, c, d),
            _ => Err(Error::Parse(format!(
                "box {s:?} needs four numbers re_min,re_max,im_min,im_max"
            ))),
        }
    }
}

/// Which factor of `ζ(1 - z) U(1 - z)` vanishes at a zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Factor {
    Zeta,
    Series,
    Both,
    /// The transform is not a product.
    Whole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub location: Complex64,
    /// Winding number of the final box around the zero.
    pub winding_certificate: i64,
    /// `|g*(z)|` at the refined point.
    pub residual: f64,
    pub method: &'static str,
    pub factor: Factor,
    pub certified_box: ComplexBox,
}

/// Result of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroScan {
    /// Zeros sorted by imaginary, then real part.
    pub zeros: Vec<ZeroRecord>,
    /// Box actually searched, after moving edges away from poles.
    pub searched: ComplexBox,
    pub adjusted: bool,
    /// Winding number of the whole searched box.
    pub total_winding: i64,
    /// Pole orders enclosed by the searched box.
    pub enclosed_poles: u32,
    pub evaluations: u64,
}

impl ZeroScan {
    /// Zeros counted with multiplicity.
    pub fn zero_count(&self) -> i64 {
        self.zeros.iter().map(|z| z.winding_certificate).sum()
    }
}

struct Counter<'a> {
    m: &'a MellinFunction,
    evaluations: u64,
}

impl Counter<'_> {
    fn f(&mut self, z: Complex64) -> Result<Complex64> {
        self.evaluations += 1;
        Ok(eval_approx(self.m, z)?.value)
    }

    /// Change of `arg f` along the segment `a -> b`.
    fn phase_change(&mut self, a: Complex64, b: Complex64) -> Result<f64> {
        let len = (b - a).norm();
        let dir = (b - a) / len;
        let h_max = 0.1f64.min(len);
        let h_min = 1e-10 * len.max(1.0);
        let mut pos = 0.0;
        let mut f0 = self.f(a)?;
        let mut h = h_max;
        let mut total = 0.0;
        while pos < len {
            let step = h.min(len - pos);
            let z1 = if pos + step >= len {
                b
            } else {
                a + dir * (pos + step)
            };
            let zm = a + dir * (pos + 0.5 * step);
            let f1 = self.f(z1)?;
            let fm = self.f(zm)?;
            if f0 == Complex64::new(0.0, 0.0)
                || fm == Complex64::new(0.0, 0.0)
                || f1 == Complex64::new(0.0, 0.0)
            {
                return Err(Error::ContourTooClose(format!("{zm}")));
            }
            let d = (f1 / f0).arg();
            let d1 = (fm / f0).arg();
            let d2 = (f1 / fm).arg();
            if d1.abs() < MAX_PHASE_STEP && d2.abs() < MAX_PHASE_STEP && (d1 + d2 - d).abs() < 1e-6
            {
                total += d1 + d2;
                pos += step;
                f0 = f1;
                h = (2.0 * step).min(h_max);
            } else {
                h = 0.5 * step;
                if h < h_min {
                    return Err(Error::ContourTooClose(format!("{zm}")));
                }
            }
        }
        Ok(total)
    }

    /// Winding number of `f` around the boundary of `b`.
    fn winding(&mut self, b: &ComplexBox) -> Result<i64> {
        let c = b.corners();
        let mut total = 0.0;
        for i in 0..4 {
            total += self.phase_change(c[i], c[(i + 1) % 4])?;
        }
        let w = total / (2.0 * PI);
        let r = w.round();
        if (w - r).abs() >= 0.25 {
            return Err(Error::ContourTooClose(format!(
                "non-integer winding {w:.3} on {b}"
            )));
        }
        Ok(r as i64)
    }

    /// Zeros inside `b`: winding plus enclosed pole orders.
    fn count(&mut self, b: &ComplexBox) -> Result<i64> {
        Ok(self.winding(b)? + self.m.pole_orders_inside(b) as i64)
    }

    fn secant(&mut self, z0: Complex64, z1: Complex64, tol: f64) -> Result<(Complex64, f64)> {
        let (mut a, mut b) = (z0, z1);
        let (mut fa, mut fb) = (self.f(a)?, self.f(b)?);
        for _ in 0..80 {
            if fb.norm() == 0.0 {
                return Ok((b, 0.0));
            }
            let den = fb - fa;
            if den.norm() == 0.0 {
                break;
            }
            let c = b - fb * (b - a) / den;
            let fc = self.f(c)?;
            let step = (c - b).norm();
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            if step <= 4.0 * f64::EPSILON * b.norm().max(1.0) {
                break;
            }
        }
        let res = fb.norm();
        if !res.is_finite() || res > tol {
            return Err(Error::NoConvergence(format!(
                "secant from {z0} stopped at {b} with |g*| = {res:.3e}"
            )));
        }
        Ok((b, res))
    }
}

/// Moves edges that pass within [`POLE_CLEARANCE`] of a pole inward by
/// [`POLE_SHRINK`].
fn clear_poles(m: &MellinFunction, b: ComplexBox) -> Result<(ComplexBox, bool)> {
    let mut out = b;
    let mut moved = false;
    for (p, _) in m.poles() {
        if out.boundary_distance(p) >= POLE_CLEARANCE {
            continue;
        }
        let gaps = [
            (p.re - out.re_min).abs(),
            (out.re_max - p.re).abs(),
            (p.im - out.im_min).abs(),
            (out.im_max - p.im).abs(),
        ];
        let (side, _) = gaps
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, g)| if *g < acc.1 { (i, *g) } else { acc },
            );
        match side {
            0 => out.re_min = out.re_min.max(p.re) + POLE_SHRINK,
            1 => out.re_max = out.re_max.min(p.re) - POLE_SHRINK,
            2 => out.im_min = out.im_min.max(p.im) + POLE_SHRINK,
            _ => out.im_max = out.im_max.min(p.im) - POLE_SHRINK,
        }
        moved = true;
    }
    let out = ComplexBox::new(out.re_min, out.re_max, out.im_min, out.im_max)?;
    Ok((out, moved))
}

fn near_pole(m: &MellinFunction, b: &ComplexBox) -> bool {
    m.poles()
        .iter()
        .any(|(p, _)| b.boundary_distance(*p) < POLE_CLEARANCE)
}

fn classify(m: &MellinFunction, z: Complex64) -> Factor {
    match m.kind() {
        MellinKind::BhfFactorized(u) => match bhf_factors(u, z) {
            Ok((a, b)) => {
                let (za, zb) = (a.value.norm(), b.value.norm());
                if za <= 1e-3 * zb {
                    Factor::Zeta
                } else if zb <= 1e-3 * za {
                    Factor::Series
                } else {
                    Factor::Both
                }
            }
            // μ and λ are evaluated through simplified products
            Err(_) => Factor::Series,
        },
        _ => Factor::Whole,
    }
}

/// Every zero of `g*` in `bx`, each certified by a box of winding number one
/// and refined by the secant method to `|g*(z)| <= tol`.
pub fn find_zeros(m: &MellinFunction, bx: &ComplexBox, tol: f64) -> Result<ZeroScan> {
    if let MellinKind::NumericalIntegral(_) = m.kind() {
        return Err(Error::Unsupported(
            "the integral form is only defined for Re z < 0; zeros need a continuation".into(),
        ));
    }
    for z in bx.corners() {
        if z.im.abs() > 200.0 || !(-2.0..=3.0).contains(&z.re) {
            return Err(Error::Domain(format!(
                "box {bx} leaves |Im z| <= 200, -2 <= Re z <= 3"
            )));
        }
    }
    let (searched, adjusted) = clear_poles(m, *bx)?;
    let mut ctr = Counter { m, evaluations: 0 };
    let total = ctr.winding(&searched)?;
    let enclosed = m.pole_orders_inside(&searched);
    let mut zeros: Vec<ZeroRecord> = Vec::new();
    let mut work = vec![(searched, total + enclosed as i64)];
    while let Some((b, n)) = work.pop() {
        if n <= 0 {
            if n < 0 {
                return Err(Error::NoConvergence(format!(
                    "negative zero count {n} on {b}"
                )));
            }
            continue;
        }
        let small = b.width().max(b.height());
        if n == 1 && small <= REFINE_SIZE && m.pole_orders_inside(&b) == 0 {
            let c = b.center();
            let nudge = Complex64::new(1e-3 * b.width(), 1e-3 * b.height());
            if let Ok((z, residual)) = ctr.secant(c, c + nudge, tol) {
                if b.grown(1e-9).contains(z) {
                    zeros.push(ZeroRecord {
                        location: z,
                        winding_certificate: 1,
                        residual,
                        method: "argument-principle + secant",
                        factor: classify(m, z),
                        certified_box: b,
                    });
                    continue;
                }
            }
        }
        if small < 1e-9 {
            // a multiple zero, or zeros closer than the box resolution
            let c = b.center();
            let (z, residual) = ctr.secant(c, c + Complex64::new(1e-12, 1e-12), tol)?;
            zeros.push(ZeroRecord {
                location: z,
                winding_certificate: n,
                residual,
                method: "argument-principle + secant",
                factor: classify(m, z),
                certified_box: b,
            });
            continue;
        }
        let mut done = false;
        let mut last_err = None;
        for frac in SPLIT_FRACTIONS {
            let (lo, hi) = b.split(frac);
            if near_pole(m, &lo) || near_pole(m, &hi) {
                continue;
            }
            let counts = ctr.count(&lo).and_then(|a| Ok((a, ctr.count(&hi)?)));
            match counts {
                Ok((a, c)) if a + c == n => {
                    work.push((lo, a));
                    work.push((hi, c));
                    done = true;
                    break;
                }
                Ok((a, c)) => {
                    last_err = Some(Error::ContourTooClose(format!(
                        "split of {b} counted {a} + {c}, expected {n}"
                    )))
                }
                Err(e @ Error::ContourTooClose(_)) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(last_err
                .unwrap_or_else(|| Error::NoConvergence(format!("no admissible split of {b}"))));
        }
    }
    zeros.sort_by(|a, b| {
        a.location
            .im
            .total_cmp(&b.location.im)
            .then(a.location.re.total_cmp(&b.location.re))
    });
    Ok(ZeroScan {
        zeros,
        searched,
        adjusted,
        total_winding: total,
        enclosed_poles: enclosed,
        evaluations: ctr.evaluations,
    })
}

/// Re-runs the secant from `start` (used for stability checks).
pub fn refine_zero(m: &MellinFunction, start: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let mut ctr = Counter { m, evaluations: 0 };
    ctr.secant(start, start + Complex64::new(1e-4, 1e-4), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexEstimate {
    /// Smallest real part among the zeros found, if any.
    pub eta: Option<f64>,
    pub zeros_used: Vec<ZeroRecord>,
    /// Always set: only the searched box was examined.
    pub box_limited: bool,
}

/// `min Re ρ` over the zeros of `g*` in the box.
pub fn analytic_index(m: &MellinFunction, bx: &ComplexBox, tol: f64) -> Result<IndexEstimate> {
    let scan = find_zeros(m, bx, tol)?;
    let eta = scan
        .zeros
        .iter()
        .map(|z| z.location.re)
        .min_by(f64::total_cmp);
    Ok(IndexEstimate {
        eta,
        zeros_used: scan.zeros,
        box_limited: true,
    })
}
