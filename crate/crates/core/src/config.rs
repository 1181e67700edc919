//! Solver configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Algorithm {
    /// Classical extragradient with the constant stepsize `eta0`.
    EgFixed,
    /// Adaptive stepsize from local Lipschitz estimates, no line search.
    PfNeEg,
    /// Adaptive initial stepsize followed by a backtracking line search
    /// (stepsizes may grow between iterations).
    PfNeEgAdabt,
    /// Standard backtracking from the previous stepsize, optionally with the
    /// `1/rho` increase at the start of every iteration.
    PfNeEgBt,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::EgFixed,
        Algorithm::PfNeEg,
        Algorithm::PfNeEgBt,
        Algorithm::PfNeEgAdabt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::EgFixed => "EG_FIXED",
            Algorithm::PfNeEg => "PF_NE_EG",
            Algorithm::PfNeEgAdabt => "PF_NE_EG_ADABT",
            Algorithm::PfNeEgBt => "PF_NE_EG_BT",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::InvalidConfig(format!("unknown algorithm '{s}'; valid names are {}", names.join(", ")))
            })
    }
}

/// The growth allowance `lambda_t >= 1` applied to the previous stepsize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LambdaSchedule {
    ConstantOne,
    /// `lambda_t = 1 + 1 / ln(t + 2)`.
    LogDecay,
}

impl LambdaSchedule {
    pub fn value(self, t: usize) -> f64 {
        match self {
            LambdaSchedule::ConstantOne => 1.0,
            LambdaSchedule::LogDecay => 1.0 + 1.0 / ((t as f64) + 2.0).ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LambdaSchedule::ConstantOne => "CONSTANT_ONE",
            LambdaSchedule::LogDecay => "LOG_DECAY",
        }
    }
}

impl FromStr for LambdaSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [LambdaSchedule::ConstantOne, LambdaSchedule::LogDecay]
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown lambda schedule '{s}'; valid names are CONSTANT_ONE, LOG_DECAY"
                ))
            })
    }
}

/// Metric checked against `residual_tol` after every iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopMetric {
    /// `||F(z_{t+1}) + xi_{t+1}||`.
    #[default]
    EgResidual,
    /// Natural residual with the reporting stepsize (see [`MetricSet::nat_eta`]).
    NaturalResidual,
    /// The problem's gap oracle.
    Gap,
}

/// Optional per-iteration metrics. Monitoring evaluations are not counted as
/// operator evaluations of the run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub nat: bool,
    pub tan: bool,
    pub gap: bool,
    pub dist: bool,
    /// Reference stepsize of the reported natural residual.
    pub nat_eta: f64,
}

impl Default for MetricSet {
    fn default() -> Self {
        MetricSet {
            nat: false,
            tan: false,
            gap: false,
            dist: false,
            nat_eta: 0.01,
        }
    }
}

impl MetricSet {
    pub fn all() -> Self {
        MetricSet {
            nat: true,
            tan: true,
            gap: true,
            dist: true,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErgodicWeights {
    Uniform,
    StepsizeWeighted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub eta0: f64,
    pub theta: f64,
    pub rho: f64,
    pub lambda_schedule: LambdaSchedule,
    pub max_iter: usize,
    pub residual_tol: f64,
    /// Relative threshold for declaring `w_t = z_t`.
    pub stationarity_tol: f64,
    /// Start every standard-backtracking iteration from `eta_{t-1} / rho`.
    pub bt_increase_trick: bool,
    pub seed: u64,
    pub stop_metric: StopMetric,
    pub record: MetricSet,
    /// Maintain an averaged look-ahead point alongside the last iterate.
    pub ergodic: Option<ErgodicWeights>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::PfNeEg,
            eta0: 0.1,
            theta: 0.9,
            rho: 0.9,
            lambda_schedule: LambdaSchedule::LogDecay,
            max_iter: 100_000,
            residual_tol: 1e-6,
            stationarity_tol: 1e-14,
            bt_increase_trick: true,
            seed: 0,
            stop_metric: StopMetric::EgResidual,
            record: MetricSet::default(),
            ergodic: None,
        }
    }
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, eta0: f64) -> Self {
        SolverConfig {
            algorithm,
            eta0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return bad(format!("eta0 must be positive and finite, got {}", self.eta0));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0,1)".into());
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0,1)".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if !(self.residual_tol >= 0.0) {
            return bad("residual_tol must be nonnegative".into());
        }
        if !(self.stationarity_tol >= 0.0) {
            return bad("stationarity_tol must be nonnegative".into());
        }
        if !(self.record.nat_eta > 0.0) {
            return bad("natural residual stepsize must be positive".into());
        }
        Ok(())
    }
}
