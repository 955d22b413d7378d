//! The serializable description of one run. Commands read their inputs from
//! here only, so the copy embedded in `run.json` is enough to repeat a run.

use std::path::PathBuf;

use gvlab_core::arith::{CoefficientSequence, SEQUENCE_IDS};
use gvlab_core::mellin::ComplexBox;
use gvlab_core::real::parse_rational;
use gvlab_core::volterra::{PrecisionPath, Rhs};
use gvlab_core::weights::{WeightFunction, WEIGHT_IDS};
use gvlab_core::Error;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::args::{
    AnalyzeArgs, Common, MellinEvalArgs, MellinZerosArgs, ProblemArgs, ReproduceArgs, SelftestArgs,
    SequenceArgs, SolveArgs,
};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub weight: Option<String>,
    pub sequence: Option<String>,
    pub beta: Option<String>,
    pub rhs: Option<String>,
    pub n: Option<u64>,
    pub precision_bits: Option<u32>,
    pub epsilons: Vec<f64>,
    #[serde(rename = "box")]
    pub bounds: Option<String>,
    pub z: Vec<String>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub exponent: Option<f64>,
    pub model: Option<String>,
    pub cross_check: bool,
    pub out: PathBuf,
    pub seed: u64,
}

fn catalog(ids: &[(&str, &str)]) -> String {
    ids.iter().map(|(id, _)| *id).collect::<Vec<_>>().join(", ")
}

/// Bad ids and malformed values are the caller's mistake.
fn usage(e: Error) -> CliError {
    match e {
        Error::Parse(m) | Error::InvalidArgument(m) => CliError::Usage(m),
        other => CliError::Core(other),
    }
}

impl RunConfig {
    fn base(subcommand: &str, common: &Common) -> Self {
        RunConfig {
            subcommand: subcommand.to_string(),
            weight: None,
            sequence: None,
            beta: None,
            rhs: None,
            n: None,
            precision_bits: common.precision_bits,
            epsilons: Vec::new(),
            bounds: None,
            z: Vec::new(),
            grid: None,
            tol: None,
            exponent: None,
            model: None,
            cross_check: false,
            out: common.out.clone(),
            seed: common.seed,
        }
    }

    fn with_problem(mut self, p: &ProblemArgs) -> Self {
        self.weight = Some(p.weight.clone());
        self.beta = p.beta.clone();
        self.rhs = p.rhs.clone();
        self.n = Some(p.n);
        self
    }

    pub fn for_solve(a: &SolveArgs) -> Self {
        let mut c = Self::base("solve", &a.common).with_problem(&a.problem);
        c.cross_check = a.cross_check;
        c
    }

    pub fn for_analyze(a: &AnalyzeArgs) -> Self {
        let mut c = Self::base("analyze", &a.common).with_problem(&a.problem);
        c.epsilons = a.epsilon.clone();
        c.exponent = Some(a.exponent);
        c.model = Some(a.model.clone());
        c
    }

    pub fn for_reproduce(a: &ReproduceArgs) -> Self {
        let mut c = Self::base(&format!("reproduce {}", a.target.name()), &a.common);
        c.n = a.n;
        c.bounds = a.bounds.clone();
        c
    }

    pub fn for_mellin_eval(a: &MellinEvalArgs) -> Self {
        let mut c = Self::base("mellin eval", &a.common);
        c.weight = Some(a.weight.clone());
        c.z = a.z.clone();
        c.bounds = a.bounds.clone();
        c.grid = a.grid;
        c.tol = Some(a.tol);
        c
    }

    pub fn for_mellin_zeros(a: &MellinZerosArgs) -> Self {
        let mut c = Self::base("mellin zeros", &a.common);
        c.weight = Some(a.weight.clone());
        c.bounds = Some(a.bounds.clone());
        c.tol = Some(a.tol);
        c
    }

    pub fn for_sequence(a: &SequenceArgs) -> Self {
        let mut c = Self::base("sequence", &a.common);
        c.sequence = Some(a.sequence.clone());
        c.n = Some(a.n);
        c
    }

    pub fn for_selftest(a: &SelftestArgs) -> Self {
        let mut c = Self::base("selftest", &a.common);
        c.n = Some(a.n);
        c
    }

    pub fn weight(&self) -> Result<WeightFunction> {
        let id = self
            .weight
            .as_deref()
            .ok_or_else(|| CliError::Usage("--weight is required".into()))?;
        id.parse().map_err(|e: Error| match e {
            Error::Parse(m) | Error::InvalidArgument(m) => CliError::Usage(format!(
                "{m}\nweights: {}\nsequences: {}",
                catalog(WEIGHT_IDS),
                catalog(SEQUENCE_IDS)
            )),
            other => CliError::Core(other),
        })
    }

    pub fn sequence(&self) -> Result<CoefficientSequence> {
        let id = self
            .sequence
            .as_deref()
            .ok_or_else(|| CliError::Usage("--sequence is required".into()))?;
        id.parse().map_err(|e: Error| match e {
            Error::Parse(m) | Error::InvalidArgument(m) => {
                CliError::Usage(format!("{m}\nsequences: {}", catalog(SEQUENCE_IDS)))
            }
            other => CliError::Core(other),
        })
    }

    pub fn rhs(&self) -> Result<Rhs> {
        match (&self.beta, &self.rhs) {
            (Some(b), None) => Ok(Rhs::inverse_power(parse_rational(b).map_err(usage)?)),
            (None, Some(r)) => r.parse().map_err(usage),
            (Some(_), Some(_)) => Err(CliError::Usage(
                "give either --beta or --rhs, not both".into(),
            )),
            (None, None) => Err(CliError::Usage("one of --beta or --rhs is required".into())),
        }
    }

    /// `N`, which must be at least one.
    pub fn horizon(&self) -> Result<u64> {
        match self.n {
            Some(0) => Err(CliError::Usage(
                "--n must be at least 1 (the horizon is empty)".into(),
            )),
            Some(n) => Ok(n),
            None => Err(CliError::Usage("--n is required".into())),
        }
    }

    pub fn path(&self) -> PrecisionPath {
        match self.precision_bits {
            None | Some(53) => PrecisionPath::F64,
            Some(bits) => PrecisionPath::HighPrec(bits),
        }
    }

    pub fn complex_box(&self) -> Result<Option<ComplexBox>> {
        self.bounds
            .as_deref()
            .map(|b| b.parse().map_err(usage))
            .transpose()
    }

    pub fn points(&self) -> Result<Vec<Complex64>> {
        self.z
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<Complex64>()
                    .map_err(|_| CliError::Usage(format!("cannot read {s:?} as a complex number")))
            })
            .collect()
    }
}
