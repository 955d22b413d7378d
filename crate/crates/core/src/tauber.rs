//! Growth tests on solved sequences: HLR, asymptotic fits, slowly varying
//! bounds.
//!
//! Limits and limsups are replaced by finite windows: "no new record over the
//! final half" for HLR, and the final decade `[N/10, N]` for fits and bounds.
//! Every verdict is three-valued and a pure function of the data.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mellin::{eval_mellin, MellinFunction};
use crate::real::Precision;
use crate::volterra::VolterraSolution;
use crate::weights::{weight_limit_at_zero, WeightFunction};

/// Horizon below which the HLR test declines to judge.
pub const HLR_MIN_HORIZON: u64 = 1_000;
/// Horizon required by fits and bound diagnostics.
pub const FIT_MIN_HORIZON: u64 = 10_000;
/// Largest growth factor of the running max over the final decade still
/// read as bounded.
pub const BOUNDED_GROWTH: f64 = 1.05;
pub const DEFAULT_EPSILONS: [f64; 6] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HlrVerdict {
    ConsistentWithHlr,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// `max |a(n)| n^{1-ε}` over `n < N/2`.
    pub first_half_max: f64,
    /// Same over `N/2 <= n <= N`.
    pub final_half_max: f64,
    /// Where the overall maximum sits.
    pub argmax: u64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HlrReport {
    pub weight: String,
    pub beta: Option<f64>,
    pub horizon: u64,
    pub rows: Vec<EpsilonRow>,
    pub verdict: HlrVerdict,
    /// Latest record of the first failing `ε`.
    pub witness: Option<u64>,
    /// `sup_{n <= N} |n a(n)|` and where it is attained.
    pub sup_na: f64,
    pub sup_na_at: u64,
}

/// Checks that `|a(n)| n^{1-ε}` sets no new record over the final half of the
/// range, for each `ε` in the grid.
pub fn hlr_test(sol: &VolterraSolution, epsilons: &[f64]) -> Result<HlrReport> {
    let a = sol.a_f64();
    let mut rep = hlr_on_series(&a, epsilons)?;
    rep.weight = sol.problem.weight.id();
    rep.beta = Some(sol.problem.rhs.beta().to_f64_lossy());
    Ok(rep)
}

/// [`hlr_test`] on a bare coefficient table `a(1..=N)`.
pub fn hlr_on_series(a: &[f64], epsilons: &[f64]) -> Result<HlrReport> {
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0 && *e <= 0.5)) {
        return Err(Error::InvalidArgument(
            "ε values must lie in ]0, 1/2]".into(),
        ));
    }
    let n_max = a.len() as u64;
    let (sup_na, sup_na_at) = a
        .iter()
        .enumerate()
        .map(|(i, x)| ((i + 1) as f64 * x.abs(), i as u64 + 1))
        .fold((0.0, 0), |acc, v| if v.0 > acc.0 { v } else { acc });
    let half = (n_max / 2) as usize;
    let mut rows = Vec::with_capacity(epsilons.len());
    let mut witness = None;
    for &eps in epsilons {
        let (mut first, mut last, mut argmax, mut best) = (0.0f64, 0.0f64, 0u64, 0.0f64);
        for (i, x) in a.iter().enumerate() {
            let v = x.abs() * ((i + 1) as f64).powf(1.0 - eps);
            if i < half {
                first = first.max(v);
            } else {
                last = last.max(v);
            }
            if v > best {
                best = v;
                argmax = i as u64 + 1;
            }
        }
        let consistent = last <= first;
        if !consistent && witness.is_none() {
            witness = Some(argmax);
        }
        rows.push(EpsilonRow {
            epsilon: eps,
            first_half_max: first,
            final_half_max: last,
            argmax,
            consistent,
        });
    }
    let verdict = if n_max < HLR_MIN_HORIZON {
        HlrVerdict::Inconclusive
    } else if rows.iter().all(|r| r.consistent) {
        HlrVerdict::ConsistentWithHlr
    } else {
        HlrVerdict::Inconsistent
    };
    Ok(HlrReport {
        weight: String::new(),
        beta: None,
        horizon: n_max,
        rows,
        verdict,
        witness: if verdict == HlrVerdict::Inconsistent {
            witness
        } else {
            None
        },
        sup_na,
        sup_na_at,
    })
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for num_rational::BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Shape assumed for `A(n)` over the final decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum AsymptoticModel {
    /// `C n^{-β}`.
    Power { beta: f64 },
    /// `C n^{-β} + D n^{-β-1} log n + E n^{-β-1}`.
    PowerWithLogCorrection { beta: f64 },
    /// `C n^{-β} + E n^{-α}`, the second term coming from the zero of `g*` at `α`.
    PowerWithSecondary { beta: f64, alpha: f64 },
    /// `C n^{-α} log n + E n^{-α}`.
    PowerLog { alpha: f64 },
    /// Running max of `|A(n)| n^{α}` against `C + D log n`.
    SlowlyVaryingBound { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub model: AsymptoticModel,
    /// The leading constant `C`.
    pub fitted_c: f64,
    /// All fitted coefficients, leading one first.
    pub coefficients: Vec<f64>,
    pub n_lo: u64,
    pub n_hi: u64,
    /// Root-mean-square residual in the scaled variable.
    pub residual_norm: f64,
    pub predicted_c: Option<f64>,
    pub relative_error: Option<f64>,
}

/// Least squares by modified Gram–Schmidt, run twice for orthogonality.
fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let k = cols.len();
    let m = y.len();
    let mut q: Vec<Vec<f64>> = cols.to_vec();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        for _pass in 0..2 {
            for i in 0..j {
                let d: f64 = (0..m).map(|t| q[i][t] * q[j][t]).sum();
                r[i][j] += d;
                for t in 0..m {
                    q[j][t] -= d * q[i][t];
                }
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("fit columns are linearly dependent".into()));
        }
        r[j][j] = norm;
        q[j].iter_mut().for_each(|v| *v /= norm);
    }
    let qty: Vec<f64> = (0..k)
        .map(|j| (0..m).map(|t| q[j][t] * y[t]).sum())
        .collect();
    let mut coef = vec![0.0; k];
    for j in (0..k).rev() {
        let s: f64 = (j + 1..k).map(|i| r[j][i] * coef[i]).sum();
        coef[j] = (qty[j] - s) / r[j][j];
    }
    let rss: f64 = (0..m)
        .map(|t| {
            let fit: f64 = (0..k).map(|j| cols[j][t] * coef[j]).sum();
            (y[t] - fit).powi(2)
        })
        .sum();
    Ok((coef, (rss / m as f64).sqrt()))
}

/// Fits `model` to the partial sums `A(1..=N)` over `[N/10, N]`.
pub fn fit_series(partial_sums: &[f64], model: AsymptoticModel) -> Result<AsymptoticFit> {
    let n_hi = partial_sums.len() as u64;
    if n_hi < 10 {
        return Err(Error::InvalidArgument("need at least 10 points".into()));
    }
    let n_lo = (n_hi / 10).max(1);
    let ns: Vec<f64> = (n_lo..=n_hi).map(|n| n as f64).collect();
    let at = |n: f64| partial_sums[n as usize - 1];
    // each model is linear after scaling A(n) to the leading term
    let (y, cols): (Vec<f64>, Vec<Vec<f64>>) = match model {
        AsymptoticModel::Power { beta } => (
            ns.iter().map(|&n| at(n) * n.powf(beta)).collect(),
            vec![vec![1.0; ns.len()]],
        ),
        AsymptoticModel::PowerWithLogCorrection { beta } => (
            ns.iter().map(|&n| at(n) * n.powf(beta)).collect(),
            vec![
                vec![1.0; ns.len()],
                ns.iter().map(|&n| n.ln() / n).collect(),
                ns.iter().map(|&n| 1.0 / n).collect(),
            ],
        ),
        AsymptoticModel::PowerWithSecondary { beta, alpha } => (
            ns.iter().map(|&n| at(n) * n.powf(beta)).collect(),
            vec![
                vec![1.0; ns.len()],
                ns.iter().map(|&n| n.powf(beta - alpha)).collect(),
            ],
        ),
        AsymptoticModel::PowerLog { alpha } => (
            ns.iter().map(|&n| at(n) * n.powf(alpha)).collect(),
            vec![ns.iter().map(|&n| n.ln()).collect(), vec![1.0; ns.len()]],
        ),
        AsymptoticModel::SlowlyVaryingBound { alpha } => {
            let mut run = 0.0f64;
            for n in 1..n_lo {
                run = run.max(partial_sums[n as usize - 1].abs() * (n as f64).powf(alpha));
            }
            let y = ns
                .iter()
                .map(|&n| {
                    run = run.max(at(n).abs() * n.powf(alpha));
                    run
                })
                .collect();
            (
                y,
                vec![vec![1.0; ns.len()], ns.iter().map(|&n| n.ln()).collect()],
            )
        }
    };
    let (coefficients, residual_norm) = least_squares(&cols, &y)?;
    Ok(AsymptoticFit {
        model,
        fitted_c: coefficients[0],
        coefficients,
        n_lo,
        n_hi,
        residual_norm,
        predicted_c: None,
        relative_error: None,
    })
}

/// `g*'(x)` at a real point by the complex step, valid since `g*` is real on
/// the real axis.
fn mellin_derivative(m: &MellinFunction, x: f64) -> Result<f64> {
    let h = 1e-8;
    Ok(eval_mellin(m, Complex64::new(x, h), 1e-9)?.im / h)
}

/// Leading constant the table predicts for `model` and weight `g`:
/// `-1/(β g*(β))` for power laws (`1/g(0)` at `β = 0`) and `1/(α g*'(α))`
/// for the logarithmic row. `None` where `g*` cannot be evaluated at the
/// point.
pub fn predicted_constant(g: &WeightFunction, model: AsymptoticModel) -> Result<Option<f64>> {
    let m = MellinFunction::for_weight(g);
    let power = |beta: f64| -> Result<Option<f64>> {
        if beta == 0.0 {
            let lim = weight_limit_at_zero(g, 1 << 16, Precision::F64)?;
            if !lim.converged || lim.value == 0.0 {
                return Err(Error::Domain("β = 0 needs a nonzero limit g(0)".into()));
            }
            return Ok(Some(1.0 / lim.value));
        }
        match eval_mellin(&m, Complex64::new(beta, 0.0), 1e-9) {
            Ok(v) if v.norm() < 1e-12 => Err(Error::Domain(format!(
                "g*({beta}) = 0: the power-law constant is undefined there"
            ))),
            Ok(v) => Ok(Some(-1.0 / (beta * v.re))),
            Err(Error::PoleProximity { .. }) => {
                Err(Error::Domain(format!("g* has a pole at {beta}")))
            }
            Err(_) => Ok(None),
        }
    };
    match model {
        AsymptoticModel::Power { beta }
        | AsymptoticModel::PowerWithLogCorrection { beta }
        | AsymptoticModel::PowerWithSecondary { beta, .. } => power(beta),
        AsymptoticModel::PowerLog { alpha } => {
            match eval_mellin(&m, Complex64::new(alpha, 0.0), 1e-9) {
                Ok(v) if v.norm() > 1e-9 => Err(Error::Domain(format!(
                    "g*({alpha}) = {v} is not zero, so no logarithmic row applies"
                ))),
                Ok(_) => Ok(Some(1.0 / (alpha * mellin_derivative(&m, alpha)?))),
                Err(_) => Ok(None),
            }
        }
        AsymptoticModel::SlowlyVaryingBound { .. } => Ok(None),
    }
}

/// Fits the solution's partial sums and attaches the predicted constant.
pub fn fit_asymptotic(sol: &VolterraSolution, model: AsymptoticModel) -> Result<AsymptoticFit> {
    if sol.horizon() < FIT_MIN_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "fits need N >= {FIT_MIN_HORIZON}, got {}",
            sol.horizon()
        )));
    }
    let mut fit = fit_series(&sol.partial_sums_f64(), model)?;
    fit.predicted_c = predicted_constant(&sol.problem.weight, model)?;
    fit.relative_error = fit.predicted_c.map(|p| ((fit.fitted_c - p) / p).abs());
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVerdict {
    /// The running maximum grows by at most [`BOUNDED_GROWTH`] over the final decade.
    Bounded,
    /// New maxima, but running max / log n stays within ±10% over the final decade.
    BoundedByLog,
    Unbounded,
}

impl BoundVerdict {
    pub fn is_log_bounded(self) -> bool {
        matches!(self, BoundVerdict::Bounded | BoundVerdict::BoundedByLog)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowlyVaryingReport {
    pub exponent: f64,
    /// `n^{exponent} a(n)` for `n = 1..=N`.
    #[serde(skip)]
    pub scaled: Vec<f64>,
    /// Running max of `|n^{exponent} a(n)|`, started at `running_from`.
    #[serde(skip)]
    pub running_max: Vec<f64>,
    pub running_from: u64,
    /// `c0 + c1 log n` fitted to the running max over the final decade.
    pub log_fit: (f64, f64),
    /// Extremes of running max / log n over the final decade.
    pub ratio_range: (f64, f64),
    /// Running max at `N` over running max at `N/10`.
    pub decade_growth: f64,
    pub last_record: u64,
    pub verdict: BoundVerdict,
}

/// Running-max diagnostic for `n^{exponent} a(n)`. The running max starts at
/// `max(2, N/100)` so that the first few, transient, terms do not dominate.
pub fn slowly_varying_diagnostic(
    sol: &VolterraSolution,
    exponent: f64,
) -> Result<SlowlyVaryingReport> {
    slowly_varying_on_series(&sol.a_f64(), exponent)
}

/// [`slowly_varying_diagnostic`] on a bare table `a(1..=N)`.
pub fn slowly_varying_on_series(a: &[f64], exponent: f64) -> Result<SlowlyVaryingReport> {
    let n_max = a.len() as u64;
    if n_max < 100 {
        return Err(Error::InvalidArgument("need at least 100 terms".into()));
    }
    let scaled: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(i, x)| ((i + 1) as f64).powf(exponent) * x)
        .collect();
    let from = (n_max / 100).max(2);
    let mut running_max = vec![f64::NAN; a.len()];
    let mut run = 0.0f64;
    let mut last_record = from;
    for n in from..=n_max {
        let v = scaled[n as usize - 1].abs();
        if v > run {
            run = v;
            last_record = n;
        }
        running_max[n as usize - 1] = run;
    }
    let lo = (n_max / 10).max(from);
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    let mut cols = vec![Vec::new(), Vec::new()];
    let mut y = Vec::new();
    for n in lo..=n_max {
        let l = (n as f64).ln();
        let r = running_max[n as usize - 1] / l;
        rmin = rmin.min(r);
        rmax = rmax.max(r);
        cols[0].push(1.0);
        cols[1].push(l);
        y.push(running_max[n as usize - 1]);
    }
    let (coef, _) = least_squares(&cols, &y).unwrap_or((vec![f64::NAN, f64::NAN], f64::NAN));
    let decade_growth = running_max[n_max as usize - 1] / running_max[lo as usize - 1];
    let verdict = if decade_growth <= BOUNDED_GROWTH {
        BoundVerdict::Bounded
    } else if rmax <= 1.1 / 0.9 * rmin {
        BoundVerdict::BoundedByLog
    } else {
        BoundVerdict::Unbounded
    };
    Ok(SlowlyVaryingReport {
        exponent,
        scaled,
        running_max,
        running_from: from,
        log_fit: (coef[0], coef[1]),
        ratio_range: (rmin, rmax),
        decade_growth,
        last_record,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiHlrRow {
    pub epsilon: f64,
    /// Max of `n^{1/2-ε} |a(n)|` over `[N/100, N/10)` and over `[N/10, N]`.
    pub lower_windows: (f64, f64),
    /// The second window maximum is smaller: consistent with a zero limit.
    pub lower_decays: bool,
    /// Max of `n^{1/2+ε} |a(n)|` before `N/10` and over `[N/10, N]`.
    pub upper_windows: (f64, f64),
    /// New maxima over the final decade: consistent with an infinite limsup.
    pub upper_grows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiHlrReport {
    pub horizon: u64,
    pub rows: Vec<AntiHlrRow>,
}

impl AntiHlrReport {
    pub fn both_positive(&self) -> bool {
        self.rows.iter().all(|r| r.lower_decays && r.upper_grows)
    }
}

/// Probes `lim a(n) n^{1/2-ε} = 0` and `limsup |a(n)| n^{1/2+ε} = ∞` for
/// `ε ∈ {0.05, 0.1}`.
pub fn anti_hlr_probe(sol: &VolterraSolution) -> Result<AntiHlrReport> {
    anti_hlr_on_series(&sol.a_f64())
}

/// [`anti_hlr_probe`] on a bare table `a(1..=N)`.
pub fn anti_hlr_on_series(a: &[f64]) -> Result<AntiHlrReport> {
    let n_max = a.len();
    if n_max < 1000 {
        return Err(Error::InvalidArgument("need at least 1000 terms".into()));
    }
    let window_max = |e: f64, lo: usize, hi: usize| -> f64 {
        (lo..=hi)
            .map(|n| a[n - 1].abs() * (n as f64).powf(e))
            .fold(0.0, f64::max)
    };
    let (d2, d1) = (n_max / 100, n_max / 10);
    let rows = [0.05, 0.1]
        .into_iter()
        .map(|eps| {
            let lower = (
                window_max(0.5 - eps, d2.max(1), d1 - 1),
                window_max(0.5 - eps, d1, n_max),
            );
            let upper = (
                window_max(0.5 + eps, 1, d1 - 1),
                window_max(0.5 + eps, d1, n_max),
            );
            AntiHlrRow {
                epsilon: eps,
                lower_windows: lower,
                lower_decays: lower.1 < lower.0,
                upper_windows: upper,
                upper_grows: upper.1 > upper.0,
            }
        })
        .collect();
    Ok(AntiHlrReport {
        horizon: n_max as u64,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(c: f64, beta: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|k| c * (k as f64).powf(-beta)).collect()
    }

    #[test]
    fn fit_recovers_synthetic_constant() {
        for (c, beta) in [(1.7, 0.25), (-0.3, 0.5), (2.0, -0.5)] {
            let fit =
                fit_series(&synthetic(c, beta, 20_000), AsymptoticModel::Power { beta }).unwrap();
            assert!(((fit.fitted_c - c) / c).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_with_correction_separates_terms() {
        let s: Vec<f64> = (1..=50_000)
            .map(|n| {
                let n = n as f64;
                1.5 * n.sqrt() - 0.1875 * n.ln() / n.sqrt() + 0.3 / n.sqrt()
            })
            .collect();
        let fit = fit_series(&s, AsymptoticModel::PowerWithLogCorrection { beta: -0.5 }).unwrap();
        assert!((fit.coefficients[0] - 1.5).abs() < 1e-9);
        assert!((fit.coefficients[1] + 0.1875).abs() < 1e-6);
        assert!((fit.coefficients[2] - 0.3).abs() < 1e-5);
    }

    #[test]
    fn hlr_flags_late_growth() {
        let a: Vec<f64> = (1..=2000).map(|n| (n as f64).powf(-0.5)).collect();
        let rep = hlr_on_series(&a, &[0.1, 0.2]).unwrap();
        assert_eq!(rep.verdict, HlrVerdict::Inconsistent);
        assert_eq!(rep.witness, Some(2000));
        let b: Vec<f64> = (1..=2000).map(|n| 1.0 / (n as f64).powi(2)).collect();
        assert_eq!(
            hlr_on_series(&b, &[0.1]).unwrap().verdict,
            HlrVerdict::ConsistentWithHlr
        );
        assert_eq!(
            hlr_on_series(&b[..500], &[0.1]).unwrap().verdict,
            HlrVerdict::Inconclusive
        );
        assert!(hlr_on_series(&b, &[0.7]).is_err());
    }

    #[test]
    fn bound_verdicts_on_model_sequences() {
        let n = 20_000;
        let flat: Vec<f64> = (1..=n).map(|k| (1.0 + 1.0 / k as f64) / k as f64).collect();
        assert_eq!(
            slowly_varying_on_series(&flat, 1.0).unwrap().verdict,
            BoundVerdict::Bounded
        );
        // |a(n)| n = log n with a new record at every n
        let log: Vec<f64> = (1..=n).map(|k| (k as f64).ln() / k as f64).collect();
        assert_eq!(
            slowly_varying_on_series(&log, 1.0).unwrap().verdict,
            BoundVerdict::BoundedByLog
        );
        let grow: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-0.5)).collect();
        assert_eq!(
            slowly_varying_on_series(&grow, 1.0).unwrap().verdict,
            BoundVerdict::Unbounded
        );
    }

    #[test]
    fn verdicts_are_deterministic() {
        let a: Vec<f64> = (1..=5000)
            .map(|k| ((k * 7919) % 13) as f64 / (k as f64))
            .collect();
        assert_eq!(
            hlr_on_series(&a, &DEFAULT_EPSILONS).unwrap(),
            hlr_on_series(&a, &DEFAULT_EPSILONS).unwrap()
        );
        assert_eq!(
            anti_hlr_on_series(&a).unwrap(),
            anti_hlr_on_series(&a).unwrap()
        );
    }
}
