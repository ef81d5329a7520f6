//! Inequality-verification harness.
//!
//! Every check evaluates both sides of an inequality on a fixed, seeded test
//! family, takes the worst-case ratio at each refinement level as the
//! constant estimate, and judges whether that estimate stays bounded as the
//! grids are refined. Checks with an exact identity behind them (fractional
//! calculus identities, parabolic rescaling) are judged against an absolute
//! tolerance instead.

mod checks;
pub mod family;
mod regularity;
mod report;
mod suite;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::BesselSymbol;

pub use regularity::{regularity_ratio, regularity_ratio_of, second_derivative_norm};
pub use report::{CsvRow, Report};
pub use suite::{run_suite, run_suite_with, suite, SuiteOptions, DEFAULT_SEED, SUITES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    FracIdentities,
    IalphaBound,
    SolutionNormBound,
    LpEquivalence,
    Interpolation,
    Multiplier,
    Localization,
    MaximalRegularity,
    ScalingInvariance,
    ApMembership,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::FracIdentities,
        CheckId::IalphaBound,
        CheckId::SolutionNormBound,
        CheckId::LpEquivalence,
        CheckId::Interpolation,
        CheckId::Multiplier,
        CheckId::Localization,
        CheckId::MaximalRegularity,
        CheckId::ScalingInvariance,
        CheckId::ApMembership,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::FracIdentities => "frac-identities",
            CheckId::IalphaBound => "ialpha-bound",
            CheckId::SolutionNormBound => "solution-norm-bound",
            CheckId::LpEquivalence => "lp-equivalence",
            CheckId::Interpolation => "interpolation",
            CheckId::Multiplier => "multiplier",
            CheckId::Localization => "localization",
            CheckId::MaximalRegularity => "maximal-regularity",
            CheckId::ScalingInvariance => "scaling-invariance",
            CheckId::ApMembership => "ap-membership",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCheck(s.into()))
    }
}

/// Trend of the constant estimates under refinement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    #[default]
    Bounded,
    Diverging,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Diverging => "diverging",
        })
    }
}

/// One parameter tuple. Fields a check does not use stay `None`.
///
/// Weights are given as weight specs (`"1"`, `"power:0.5"`), spatial ones on
/// the box of the current level and temporal ones on `(0, T)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Second endpoint of an interpolation or embedding pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_x1: Option<String>,
    /// Dyadic rescaling ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// Check-specific switch: which side, identity or coefficient family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// Verdict the instance must produce to pass.
    pub expect: Verdict,
}

macro_rules! setter {
    ($name:ident, $field:ident, f64) => {
        pub fn $name(mut self, v: f64) -> Self {
            self.$field = Some(v);
            self
        }
    };
    ($name:ident, $field:ident, str) => {
        pub fn $name(mut self, v: &str) -> Self {
            self.$field = Some(v.into());
            self
        }
    };
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    setter!(with_alpha, alpha, f64);
    setter!(with_beta, beta, f64);
    setter!(with_p, p, f64);
    setter!(with_q, q, f64);
    setter!(with_gamma, gamma, f64);
    setter!(with_w_x, w_x, str);
    setter!(with_w_t, w_t, str);
    setter!(with_final_time, final_time, f64);
    setter!(with_theta, theta, f64);
    setter!(with_gamma1, gamma1, f64);
    setter!(with_p1, p1, f64);
    setter!(with_w_x1, w_x1, str);
    setter!(with_ratio, ratio, f64);
    setter!(with_variant, variant, str);

    pub fn expecting(mut self, v: Verdict) -> Self {
        self.expect = v;
        self
    }

    /// `key=value` pairs of the fields that are set.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        let mut num = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        };
        num("alpha", self.alpha);
        num("beta", self.beta);
        num("p", self.p);
        num("q", self.q);
        num("gamma", self.gamma);
        num("T", self.final_time);
        num("theta", self.theta);
        num("gamma1", self.gamma1);
        num("p1", self.p1);
        num("r", self.ratio);
        for (k, v) in [("w_x", &self.w_x), ("w_t", &self.w_t), ("w_x1", &self.w_x1), ("variant", &self.variant)] {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        }
        if self.expect == Verdict::Diverging {
            parts.push("expect=diverging".into());
        }
        parts.join(" ")
    }

    pub(crate) fn need(&self, field: Option<f64>, name: &str) -> Result<f64> {
        field.ok_or_else(|| Error::InvalidArgument(format!("parameter {name} missing")))
    }

    pub(crate) fn variant_or<'a>(&'a self, default: &'a str) -> &'a str {
        self.variant.as_deref().unwrap_or(default)
    }
}

/// How constant estimates are judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Largest admissible ratio of successive constant estimates.
    pub drift: f64,
    /// When set, the "ratio" is a relative error and the finest level must
    /// stay below this value.
    pub tolerance: Option<f64>,
    /// Largest admissible max/min spread across instances that should
    /// share a constant (`T` sweeps).
    pub spread: f64,
    /// Largest admissible factor between variable- and constant-coefficient
    /// constants on matched grids.
    pub coefficient_factor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            drift: 1.25,
            tolerance: None,
            spread: 1.25,
            coefficient_factor: 3.0,
        }
    }
}

impl TolerancePolicy {
    pub fn exact(tolerance: f64) -> Self {
        Self {
            tolerance: Some(tolerance),
            ..Self::default()
        }
    }
}

/// What to run: one check over a parameter grid and a refinement ladder.
///
/// The meaning of a level depends on the check: the number of spatial nodes
/// for spatial and solver checks, the number of time steps for the
/// fractional-calculus checks, the deepest ball level for `ap-membership`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub check: CheckId,
    pub params: Vec<Params>,
    pub levels: Vec<usize>,
    pub policy: TolerancePolicy,
    pub seed: u64,
    /// Bessel symbol used by every Sobolev norm in the check.
    pub bessel: BesselSymbol,
}

impl CheckSpec {
    pub fn new(check: CheckId, params: Vec<Params>, levels: Vec<usize>) -> Result<Self> {
        let spec = Self {
            check,
            params,
            levels,
            policy: TolerancePolicy::default(),
            seed: suite::DEFAULT_SEED,
            bessel: BesselSymbol::Standard,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_policy(mut self, policy: TolerancePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_bessel(mut self, bessel: BesselSymbol) -> Self {
        self.bessel = bessel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() {
            return Err(Error::InvalidArgument(format!("{}: empty parameter grid", self.check)));
        }
        if self.levels.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "{}: at least two refinement levels are needed",
                self.check
            )));
        }
        if !(self.policy.drift >= 1.0) {
            return Err(Error::InvalidArgument(format!("drift threshold {} below 1", self.policy.drift)));
        }
        Ok(())
    }
}

/// Both sides of one inequality for one test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub member: String,
    #[serde(with = "report::lenient")]
    pub lhs: f64,
    #[serde(with = "report::lenient")]
    pub rhs: f64,
}

impl Sample {
    pub fn new(member: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            member: member.into(),
            lhs,
            rhs,
        }
    }

    /// `lhs / rhs`; `0` when both vanish, `inf` when only `rhs` does.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else if self.rhs == 0.0 {
            f64::INFINITY
        } else {
            self.lhs / self.rhs
        }
    }
}

/// The worst-case sample at one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: usize,
    pub member: String,
    #[serde(with = "report::lenient")]
    pub lhs: f64,
    #[serde(with = "report::lenient")]
    pub rhs: f64,
    /// Constant estimate at this level.
    #[serde(with = "report::lenient")]
    pub ratio: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub params: Params,
    pub levels: Vec<LevelResult>,
    /// Largest ratio of successive constant estimates.
    #[serde(with = "report::lenient")]
    pub drift: f64,
    pub verdict: Verdict,
    pub pass: bool,
}

impl InstanceResult {
    pub fn constants(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.ratio).collect()
    }

    /// Estimate at the finest level.
    pub fn constant(&self) -> f64 {
        self.levels.last().map_or(f64::NAN, |l| l.ratio)
    }
}

/// A cross-instance property, such as independence of `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub name: String,
    pub group: String,
    #[serde(with = "report::lenient::vec")]
    pub values: Vec<f64>,
    #[serde(with = "report::lenient")]
    pub statistic: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: CheckId,
    pub instances: Vec<InstanceResult>,
    pub aggregates: Vec<Aggregate>,
    pub pass: bool,
}

impl CheckResult {
    /// Instances and aggregates that failed, as labels.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .instances
            .iter()
            .filter(|i| !i.pass)
            .map(|i| format!("[{}] {} (drift {:.3})", i.params.label(), i.verdict, i.drift))
            .collect();
        out.extend(
            self.aggregates
                .iter()
                .filter(|a| !a.pass)
                .map(|a| format!("{} [{}]: {:.3} > {:.3}", a.name, a.group, a.statistic, a.limit)),
        );
        out
    }
}

/// Largest ratio of successive estimates (`inf` when an estimate is not
/// finite or jumps away from zero).
pub fn drift(constants: &[f64]) -> f64 {
    if constants.iter().any(|c| !c.is_finite()) {
        return f64::INFINITY;
    }
    constants
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (a, b) if a == 0.0 => {
                if b == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            (a, b) => b / a,
        })
        .fold(0.0, f64::max)
}

pub(crate) fn judge(params: &Params, levels: Vec<LevelResult>, policy: &TolerancePolicy) -> InstanceResult {
    let constants: Vec<f64> = levels.iter().map(|l| l.ratio).collect();
    let d = drift(&constants);
    let verdict = match policy.tolerance {
        Some(tol) => {
            if constants.last().is_some_and(|&c| c <= tol) {
                Verdict::Bounded
            } else {
                Verdict::Diverging
            }
        }
        None => {
            if d <= policy.drift {
                Verdict::Bounded
            } else {
                Verdict::Diverging
            }
        }
    };
    InstanceResult {
        params: params.clone(),
        levels,
        drift: d,
        verdict,
        pass: verdict == params.expect,
    }
}

/// Worst case over the samples of one level.
pub(crate) fn worst(level: usize, samples: &[Sample]) -> LevelResult {
    let mut best: Option<&Sample> = None;
    for s in samples {
        let r = s.ratio();
        let better = match best {
            None => true,
            Some(b) => r > b.ratio() || r.is_nan(),
        };
        if better {
            best = Some(s);
        }
    }
    match best {
        Some(s) => LevelResult {
            level,
            member: s.member.clone(),
            lhs: s.lhs,
            rhs: s.rhs,
            ratio: s.ratio(),
            samples: samples.len(),
        },
        None => LevelResult {
            level,
            member: String::new(),
            lhs: 0.0,
            rhs: 0.0,
            ratio: 0.0,
            samples: 0,
        },
    }
}

pub(crate) fn wrap(check: CheckId, params: &Params) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Check {
        check: check.to_string(),
        params: params.label(),
        source: Box::new(e),
    }
}

/// Runs one check: every parameter tuple at every level, in parallel over
/// tuples, merged in parameter order.
pub fn run_check(spec: &CheckSpec) -> Result<CheckResult> {
    spec.validate()?;
    log::info!(
        "{}: {} parameter tuples x {} levels",
        spec.check,
        spec.params.len(),
        spec.levels.len()
    );
    let (levels, aggregates) = match spec.check {
        CheckId::MaximalRegularity => regularity::maximal_regularity(spec)?,
        CheckId::ScalingInvariance => (regularity::scaling_invariance(spec)?, Vec::new()),
        _ => {
            let per_instance: Vec<Vec<LevelResult>> = spec
                .params
                .par_iter()
                .map(|params| {
                    spec.levels
                        .iter()
                        .map(|&level| {
                            let samples = checks::evaluate(spec, params, level).map_err(wrap(spec.check, params))?;
                            Ok(worst(level, &samples))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            (per_instance, Vec::new())
        }
    };
    let instances: Vec<InstanceResult> = spec
        .params
        .iter()
        .zip(levels)
        .map(|(p, l)| judge(p, l, &spec.policy))
        .collect();
    let mut aggregates = aggregates;
    if spec.check == CheckId::IalphaBound {
        aggregates.extend(checks::ialpha_flatness(&instances, &spec.policy));
    }
    let pass = instances.iter().all(|i| i.pass) && aggregates.iter().all(|a| a.pass);
    Ok(CheckResult {
        check: spec.check,
        instances,
        aggregates,
        pass,
    })
}

/// Groups instances whose parameters agree after `key` and reports the
/// max/min spread of `value` within each group of two or more.
pub(crate) fn spread_aggregates(
    name: &str,
    instances: &[InstanceResult],
    key: impl Fn(&Params) -> Option<String>,
    value: impl Fn(&InstanceResult) -> f64,
    limit: f64,
) -> Vec<Aggregate> {
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for inst in instances {
        let Some(k) = key(&inst.params) else { continue };
        let v = value(inst);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, vs)) => vs.push(v),
            None => groups.push((k, vec![v])),
        }
    }
    groups
        .into_iter()
        .filter(|(_, vs)| vs.len() > 1)
        .map(|(group, values)| {
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let statistic = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            Aggregate {
                name: name.into(),
                group,
                values,
                statistic,
                limit,
                pass: statistic <= limit,
            }
        })
        .collect()
}
