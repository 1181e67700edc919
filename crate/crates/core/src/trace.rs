//! Per-iteration records and solver results.

use serde::{Deserialize, Serialize};

use crate::config::StopMetric;
use crate::point::Point;

/// Quantities observed at iteration `t`, which maps `z_t` to `z_{t+1}`.
/// Residuals refer to the new iterate `z_{t+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub eta: f64,
    pub l_t: f64,
    pub hat_l_t: f64,
    pub eg_residual: f64,
    pub nat_residual: Option<f64>,
    pub tan_residual: Option<f64>,
    pub gap: Option<f64>,
    pub dist_to_solution: Option<f64>,
    pub backtrack_failures: u32,
    pub elapsed_seconds: f64,
}

impl IterationRecord {
    pub fn metric(&self, metric: StopMetric) -> Option<f64> {
        match metric {
            StopMetric::EgResidual => Some(self.eg_residual),
            StopMetric::NaturalResidual => self.nat_residual,
            StopMetric::Gap => self.gap,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopReason {
    TolReached,
    MaxIter,
    /// The look-ahead point coincided with the iterate, which certifies a
    /// solution for a monotone operator.
    StationaryPoint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub final_point: Point,
    pub stop_reason: StopReason,
    pub trace: Vec<IterationRecord>,
    pub ergodic_point: Option<Point>,
    /// Operator evaluations spent by the algorithm (monitoring excluded).
    pub operator_evals: u64,
}

impl SolveResult {
    /// Number of completed extragradient updates.
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn total_backtrack_failures(&self) -> u64 {
        self.trace.iter().map(|r| r.backtrack_failures as u64).sum()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.trace.last()
    }

    /// Index `t` of the first record whose `metric` is at most `tol`.
    pub fn iters_to_tol(&self, metric: StopMetric, tol: f64) -> Option<usize> {
        self.trace
            .iter()
            .find(|r| r.metric(metric).is_some_and(|v| v <= tol))
            .map(|r| r.t)
    }
}
