//! `solve`, `mellin`, `sequence`, `analyze`, `selftest` and `list`.

use std::time::Instant;

use gvlab_core::arith::{
    build_sieve, convolve, inverse, ramanujan_tau, CoefficientSequence, SEQUENCE_IDS,
};
use gvlab_core::mellin::{eval_mellin, find_zeros, series_strategy, MellinFunction};
use gvlab_core::tauber::{
    anti_hlr_probe, fit_asymptotic, hlr_test, slowly_varying_diagnostic, AsymptoticModel,
    DEFAULT_EPSILONS,
};
use gvlab_core::volterra::{
    solve, Coefficients, PrecisionPath, SolveOptions, VolterraProblem, VolterraSolution,
};
use gvlab_core::weights::WEIGHT_IDS;
use gvlab_core::{BigFloat, Precision};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Target;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{fmt_big, fmt_f64, RunRecord, Table};
use crate::report::{Check, Report};

/// Residuals above this many units of roundoff (at the row's scale) fail.
pub const RESIDUAL_ULPS: f64 = 64.0;

pub fn path_label(p: PrecisionPath) -> String {
    match p {
        PrecisionPath::F64 => "f64".into(),
        PrecisionPath::HighPrec(bits) => format!("binary-{bits}"),
    }
}

/// `Ok` as its JSON form, `Err` as `{"error": message}`.
pub fn json_or_error<T: Serialize>(r: &gvlab_core::Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Rows `n, a_n, A_n, n a_n` in the precision of the path that solved them.
pub fn solution_table(sol: &VolterraSolution) -> Result<Table> {
    let mut t = Table::new(&["n", "a_n", "A_n", "n_a_n"])?;
    match (&sol.a, &sol.partial_sums) {
        (Coefficients::F64(a), Coefficients::F64(s)) => {
            for (i, (x, y)) in a.iter().zip(s).enumerate() {
                let n = i + 1;
                t.row([
                    n.to_string(),
                    fmt_f64(*x),
                    fmt_f64(*y),
                    fmt_f64(n as f64 * x),
                ])?;
            }
        }
        (Coefficients::High(a), Coefficients::High(s)) => {
            for (i, (x, y)) in a.iter().zip(s).enumerate() {
                let n = i as u64 + 1;
                let na = x.clone() * BigFloat::from_u64(n, x.precision());
                t.row([n.to_string(), fmt_big(x), fmt_big(y), fmt_big(&na)])?;
            }
        }
        _ => unreachable!("a solution holds both tables in one representation"),
    }
    Ok(t)
}

fn residual_check(sol: &VolterraSolution) -> Check {
    match &sol.residual {
        Some(r) => Check::new(
            "residual",
            r.within(RESIDUAL_ULPS),
            format!(
                "max |A(n) - f(n)| = {:.3e}, {:.2} units of roundoff at n = {} (limit {RESIDUAL_ULPS})",
                r.max_abs, r.max_ulp_ratio, r.worst_n
            ),
        ),
        None => Check::new("residual", true, "not computed"),
    }
}

fn solve_from(cfg: &RunConfig) -> Result<VolterraSolution> {
    let prob = VolterraProblem::new(cfg.weight()?, cfg.rhs()?, cfg.horizon()?)?;
    let opts = SolveOptions {
        path: cfg.path(),
        cross_check: cfg.cross_check,
        ..SolveOptions::f64()
    };
    Ok(solve(&prob, &opts)?)
}

fn forced_note(sol: &VolterraSolution) -> Option<String> {
    sol.forced_high_precision.then(|| {
        format!(
            "f(n) = {} leaves the f64 exponent range for n <= {}; solved on the forced high-precision path ({})",
            sol.problem.rhs,
            sol.horizon(),
            path_label(sol.path)
        )
    })
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let sol = solve_from(cfg)?;
    let mut rep = Report::default();
    rep.notes.extend(forced_note(&sol));
    let csv = cfg.out.join("solution.csv");
    solution_table(&sol)?.write(&csv)?;
    rep.artifacts.push(csv);
    rep.checks.push(residual_check(&sol));
    let n = sol.horizon() as usize;
    let last = |c: &Coefficients| match c {
        Coefficients::F64(v) => fmt_f64(v[n - 1]),
        Coefficients::High(v) => fmt_big(&v[n - 1]),
    };
    rep.lines
        .push(format!("A({n}) = {}", last(&sol.partial_sums)));
    rep.lines.push(format!("a({n}) = {}", last(&sol.a)));
    if let Some(d) = sol.divergence {
        rep.lines
            .push(format!("f64 / high-precision divergence: {d:.3e}"));
    }
    let results = json!({
        "weight": sol.problem.weight.id(),
        "rhs": sol.problem.rhs.to_string(),
        "horizon": sol.horizon(),
        "path": path_label(sol.path),
        "method": format!("{:?}", sol.method).to_lowercase(),
        "forced_high_precision": sol.forced_high_precision,
        "a_N": last(&sol.a),
        "A_N": last(&sol.partial_sums),
    });
    let residuals = json!({
        "residual": sol.residual,
        "divergence": sol.divergence,
        "increment_consistency_ulps": sol.increment_consistency(),
    });
    let run = cfg.out.join("run.json");
    RunRecord::new(cfg, results, residuals, start.elapsed()).write(&run)?;
    rep.artifacts.push(run);
    Ok(rep)
}

fn grid_points(cfg: &RunConfig) -> Result<Vec<Complex64>> {
    let mut pts = cfg.points()?;
    if let Some(b) = cfg.complex_box()? {
        let k = cfg.grid.unwrap_or(0);
        if k < 2 {
            return Err(CliError::Usage(
                "--grid needs at least 2 points per side".into(),
            ));
        }
        for i in 0..k {
            for j in 0..k {
                let re = b.re_min + (b.re_max - b.re_min) * j as f64 / (k - 1) as f64;
                let im = b.im_min + (b.im_max - b.im_min) * i as f64 / (k - 1) as f64;
                pts.push(Complex64::new(re, im));
            }
        }
    }
    if pts.is_empty() {
        return Err(CliError::Usage(
            "give --z points or --box with --grid".into(),
        ));
    }
    Ok(pts)
}

pub fn cmd_mellin_eval(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let m = MellinFunction::for_weight(&cfg.weight()?);
    let tol = cfg.tol.unwrap_or(1e-10);
    let mut rep = Report::default();
    let mut t = Table::new(&["z_re", "z_im", "re", "im", "abs"])?;
    let mut values = Vec::new();
    for z in grid_points(cfg)? {
        let v = eval_mellin(&m, z, tol)?;
        t.row([
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(v.norm()),
        ])?;
        if values.len() < 20 {
            rep.lines.push(if v.im == 0.0 {
                format!("g*({z}) = {}", fmt_f64(v.re))
            } else {
                let sign = if v.im < 0.0 { '-' } else { '+' };
                format!(
                    "g*({z}) = {} {sign} {} i",
                    fmt_f64(v.re),
                    fmt_f64(v.im.abs())
                )
            });
        }
        values.push(json!({ "z": [z.re, z.im], "value": [v.re, v.im] }));
    }
    let csv = cfg.out.join("values.csv");
    t.write(&csv)?;
    rep.artifacts.push(csv);
    let run = cfg.out.join("run.json");
    let results = json!({ "transform": m.to_string(), "values": values });
    RunRecord::new(cfg, results, json!({ "tolerance": tol }), start.elapsed()).write(&run)?;
    rep.artifacts.push(run);
    Ok(rep)
}

pub fn cmd_mellin_zeros(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let m = MellinFunction::for_weight(&cfg.weight()?);
    let bx = cfg
        .complex_box()?
        .ok_or_else(|| CliError::Usage("--box is required".into()))?;
    let tol = cfg.tol.unwrap_or(1e-10);
    let scan = find_zeros(&m, &bx, tol)?;
    let mut rep = Report::default();
    if scan.adjusted {
        rep.notes.push(format!(
            "box moved away from a pole; searched {}",
            scan.searched
        ));
    }
    let mut t = Table::new(&["re", "im", "residual", "winding", "factor", "method"])?;
    for z in &scan.zeros {
        t.row([
            fmt_f64(z.location.re),
            fmt_f64(z.location.im),
            fmt_f64(z.residual),
            z.winding_certificate.to_string(),
            format!("{:?}", z.factor).to_lowercase(),
            z.method.to_string(),
        ])?;
        rep.lines.push(format!(
            "zero at {} (|g*| = {:.1e})",
            z.location, z.residual
        ));
    }
    let expected = scan.total_winding + i64::from(scan.enclosed_poles);
    rep.checks.push(Check::new(
        "zero-count",
        scan.zero_count() == expected,
        format!(
            "{} zeros certified, winding {} + {} enclosed pole orders = {expected}",
            scan.zero_count(),
            scan.total_winding,
            scan.enclosed_poles
        ),
    ));
    let csv = cfg.out.join("zeros.csv");
    t.write(&csv)?;
    rep.artifacts.push(csv);
    let run = cfg.out.join("run.json");
    let results = json!({ "transform": m.to_string(), "scan": scan });
    RunRecord::new(cfg, results, json!({ "tolerance": tol }), start.elapsed()).write(&run)?;
    rep.artifacts.push(run);
    Ok(rep)
}

pub fn cmd_sequence(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let u = cfg.sequence()?;
    let n = cfg.horizon()?;
    let mut t = Table::new(&["n", "u_n"])?;
    if u.is_exact() {
        for (i, v) in u.tabulate_exact(n)?.iter().enumerate() {
            t.row([(i + 1).to_string(), v.to_string()])?;
        }
    } else {
        for (i, v) in u.tabulate::<f64>(n, Precision::F64)?.iter().enumerate() {
            t.row([(i + 1).to_string(), fmt_f64(*v)])?;
        }
    }
    let mut rep = Report::default();
    let csv = cfg.out.join("sequence.csv");
    t.write(&csv)?;
    rep.artifacts.push(csv);
    let results = json!({
        "id": u.id(),
        "exact": u.is_exact(),
        "multiplicative": u.is_multiplicative(),
        "completely_multiplicative": u.is_completely_multiplicative(),
        "period": u.period(),
        "series_strategy": json_or_error(&series_strategy(&u)),
    });
    rep.lines.push(format!("{} tabulated to n = {n}", u.id()));
    let run = cfg.out.join("run.json");
    RunRecord::new(cfg, results, Value::Null, start.elapsed()).write(&run)?;
    rep.artifacts.push(run);
    Ok(rep)
}

fn parse_model(spec: &str, beta: f64) -> Result<AsymptoticModel> {
    let param = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad model parameter {s:?}")))
    };
    Ok(match spec.split_once(':') {
        None if spec == "power" => AsymptoticModel::Power { beta },
        None if spec == "log-correction" => AsymptoticModel::PowerWithLogCorrection { beta },
        Some(("secondary", a)) => AsymptoticModel::PowerWithSecondary { beta, alpha: param(a)? },
        Some(("power-log", a)) => AsymptoticModel::PowerLog { alpha: param(a)? },
        Some(("sv-bound", a)) => AsymptoticModel::SlowlyVaryingBound { alpha: param(a)? },
        _ => {
            return Err(CliError::Usage(format!(
                "unknown model {spec:?}; use power, log-correction, secondary:A, power-log:A or sv-bound:A"
            )))
        }
    })
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let beta = cfg.rhs()?.beta().to_f64().unwrap_or(f64::NAN);
    let model = parse_model(cfg.model.as_deref().unwrap_or("power"), beta)?;
    let sol = solve_from(cfg)?;
    let mut rep = Report::default();
    rep.notes.extend(forced_note(&sol));
    rep.checks.push(residual_check(&sol));
    let eps = if cfg.epsilons.is_empty() {
        DEFAULT_EPSILONS.to_vec()
    } else {
        cfg.epsilons.clone()
    };
    let hlr = hlr_test(&sol, &eps);
    let fit = fit_asymptotic(&sol, model);
    let exponent = cfg.exponent.unwrap_or(0.5);
    let sv = slowly_varying_diagnostic(&sol, exponent);
    let anti = anti_hlr_probe(&sol);
    match &hlr {
        Ok(h) => rep.lines.push(format!(
            "HLR: {:?}, sup |n a(n)| = {} at n = {}",
            h.verdict,
            fmt_f64(h.sup_na),
            h.sup_na_at
        )),
        Err(e) => rep.lines.push(format!("HLR: {e}")),
    }
    match &fit {
        Ok(f) => rep.lines.push(format!(
            "fit: C = {} (predicted {})",
            fmt_f64(f.fitted_c),
            f.predicted_c.map_or("n/a".into(), fmt_f64)
        )),
        Err(e) => rep.lines.push(format!("fit: {e}")),
    }
    match &sv {
        Ok(s) => {
            rep.lines.push(format!(
                "n^{exponent} a(n): {:?}, decade growth {:.4}",
                s.verdict, s.decade_growth
            ));
            let a = sol.a_f64();
            let mut t = Table::new(&["n", "a_n", "scaled"])?;
            for (i, (x, y)) in a.iter().zip(&s.scaled).enumerate() {
                t.row([(i + 1).to_string(), fmt_f64(*x), fmt_f64(*y)])?;
            }
            let csv = cfg.out.join("scaled.csv");
            t.write(&csv)?;
            rep.artifacts.push(csv);
        }
        Err(e) => rep.lines.push(format!("bound diagnostic: {e}")),
    }
    if let Ok(r) = &anti {
        rep.lines.push(format!(
            "anti-HLR windows both positive: {}",
            r.both_positive()
        ));
    }
    let results = json!({
        "hlr": json_or_error(&hlr),
        "fit": json_or_error(&fit),
        "slowly_varying": json_or_error(&sv),
        "anti_hlr": json_or_error(&anti),
    });
    let residuals = json!({ "residual": sol.residual, "divergence": sol.divergence });
    let run = cfg.out.join("analysis.json");
    RunRecord::new(cfg, results, residuals, start.elapsed()).write(&run)?;
    rep.artifacts.push(run);
    Ok(rep)
}

pub fn catalog_lines() -> Vec<String> {
    let mut out = vec!["weights:".to_string()];
    out.extend(WEIGHT_IDS.iter().map(|(id, d)| format!("  {id:<28} {d}")));
    out.push("sequences:".into());
    out.extend(SEQUENCE_IDS.iter().map(|(id, d)| format!("  {id:<28} {d}")));
    out.push("reproduce targets:".into());
    out.extend(Target::EACH.iter().map(|t| format!("  {}", t.name())));
    out
}

type Rationals = Vec<BigRational>;

fn random_sequence(rng: &mut ChaCha8Rng, n: usize, invertible: bool) -> Rationals {
    (0..n)
        .map(|i| {
            let mut v: i64 = rng.gen_range(-9..=9);
            if i == 0 && invertible && v == 0 {
                v = 1;
            }
            BigRational::from_integer(v.into())
        })
        .collect()
}

fn unit(n: usize) -> Rationals {
    let mut e = vec![BigRational::zero(); n];
    e[0] = BigRational::one();
    e
}

/// Dirichlet-ring axioms on random integer sequences, then the fixed
/// arithmetic facts (characters, τ).
pub fn kernel_checks(seed: u64, n: u64) -> Result<Vec<Check>> {
    if n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let len = n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u, v, w) = (
        random_sequence(&mut rng, len, true),
        random_sequence(&mut rng, len, false),
        random_sequence(&mut rng, len, false),
    );
    let add = |x: &Rationals, y: &Rationals| -> Rationals {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    };
    let mut checks = vec![
        Check::new(
            "associativity",
            convolve(&convolve(&u, &v), &w) == convolve(&u, &convolve(&v, &w)),
            format!("(u*v)*w = u*(v*w) to n = {n}"),
        ),
        Check::new(
            "commutativity",
            convolve(&u, &v) == convolve(&v, &u),
            format!("u*v = v*u to n = {n}"),
        ),
        Check::new(
            "distributivity",
            convolve(&u, &add(&v, &w)) == add(&convolve(&u, &v), &convolve(&u, &w)),
            format!("u*(v+w) = u*v + u*w to n = {n}"),
        ),
        Check::new(
            "identity",
            convolve(&u, &unit(len)) == u,
            format!("u*e = u to n = {n}"),
        ),
        Check::new(
            "inverse",
            convolve(&u, &inverse(&u)?) == unit(len),
            format!("u*u^-1 = e to n = {n}"),
        ),
    ];
    let sieve = build_sieve(n)?;
    let mu: Rationals = sieve
        .moebius_table()
        .iter()
        .map(|&m| BigRational::from_integer(m.into()))
        .collect();
    let moduli = [3u64, 4, 5, 7, 8, 11, 12, 13];
    let q = moduli[rng.gen_range(0..moduli.len())];
    let chi: Rationals = CoefficientSequence::character(q, 1)?.tabulate_exact(n)?;
    let twisted: Rationals = chi.iter().zip(&mu).map(|(c, m)| c * m).collect();
    checks.push(Check::new(
        "character-inverse",
        inverse(&chi)? == twisted,
        format!("chi^-1 = mu chi for the character mod {q} to n = {n}"),
    ));
    let tau = ramanujan_tau(100)?;
    let mut bad = 0;
    for m in 1..=100usize {
        for k in 1..=100 / m {
            if num_integer::gcd(m, k) == 1 && tau[m * k - 1] != tau[m - 1] * tau[k - 1] {
                bad += 1;
            }
        }
    }
    checks.push(Check::new(
        "tau-multiplicative",
        bad == 0,
        format!("{bad} coprime pairs with mn <= 100 fail"),
    ));
    let mut bad = 0;
    let small = build_sieve(100)?;
    for p in (2..=100u64).filter(|&p| small.is_prime(p).unwrap_or(false)) {
        let t = tau[p as usize - 1] as f64;
        if t.abs() > 2.0 * (p as f64).powf(5.5) {
            bad += 1;
        }
    }
    checks.push(Check::new(
        "deligne-bound",
        bad == 0,
        format!("{bad} primes p <= 100 with |tau(p)| > 2 p^(11/2)"),
    ));
    Ok(checks)
}

pub fn cmd_selftest(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let n = cfg.horizon()?;
    let checks = kernel_checks(cfg.seed, n)?;
    let run = cfg.out.join("selftest.json");
    RunRecord::new(
        cfg,
        json!({ "checks": checks }),
        Value::Null,
        start.elapsed(),
    )
    .write(&run)?;
    Ok(Report {
        checks,
        artifacts: vec![run],
        ..Report::default()
    })
}
