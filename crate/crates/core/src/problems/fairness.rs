//! Minimax group fairness with exponential losses:
//! `min_theta max_{q in simplex} sum_i q_i l_i(theta)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, DVectorView};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{check_dim, Point};
use crate::problem::{Operator, VIProblem};
use crate::set::FeasibleSet;

/// Largest exponent argument accepted before reporting overflow.
pub const EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessGroup {
    /// Features, one sample per row.
    pub x: DMatrix<f64>,
    /// Labels in `{-1, +1}`.
    pub y: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessInstance {
    pub groups: Vec<FairnessGroup>,
    pub d: usize,
    pub seed: u64,
}

/// Sign of the primal block of the operator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FairnessSign {
    /// `(grad_theta phi, -grad_q phi)`: monotone.
    #[default]
    Standard,
    /// `(-grad_theta phi, -grad_q phi)`.
    Flipped,
}

impl FairnessInstance {
    pub fn new(groups: Vec<FairnessGroup>, seed: u64) -> Result<Self> {
        let d = groups
            .first()
            .map(|g| g.x.ncols())
            .ok_or_else(|| Error::InvalidProblem("no groups".into()))?;
        for g in &groups {
            check_dim(d, g.x.ncols())?;
            check_dim(g.x.nrows(), g.y.len())?;
            if g.y.is_empty() {
                return Err(Error::InvalidProblem("every group needs at least one sample".into()));
            }
            if g.y.iter().any(|v| *v != 1.0 && *v != -1.0) {
                return Err(Error::InvalidProblem("labels must be -1 or +1".into()));
            }
        }
        Ok(FairnessInstance { groups, d, seed })
    }

    pub fn m(&self) -> usize {
        self.groups.len()
    }
}

/// `m` groups of `n` samples in `R^d`. Group `i` (1-based) has
/// `P(y = +1) = 0.5 + 0.1 i/m`; features are `N(0, I) + 0.5 y u` for a common
/// random unit vector `u`; then `round(0.1 (i/m)^2 n)` labels are redrawn
/// uniformly from `{-1, +1}`.
pub fn generate_fairness(m: usize, n: usize, d: usize, seed: u64) -> Result<FairnessInstance> {
    if m == 0 || n == 0 || d == 0 {
        return Err(Error::InvalidProblem(format!(
            "fairness needs m, n, d >= 1, got {m}, {n}, {d}"
        )));
    }
    let mut rng = super::rng(seed);
    let mut u = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    u /= u.norm();
    let mut groups = Vec::with_capacity(m);
    for i in 1..=m {
        let frac = i as f64 / m as f64;
        let p_pos = 0.5 + 0.1 * frac;
        let mut y = DVector::from_fn(n, |_, _| if rng.random::<f64>() < p_pos { 1.0 } else { -1.0 });
        let mut x = DMatrix::zeros(n, d);
        for j in 0..n {
            for k in 0..d {
                x[(j, k)] = rng.sample::<f64, _>(StandardNormal) + 0.5 * y[j] * u[k];
            }
        }
        let flips = (0.1 * frac * frac * n as f64).round() as usize;
        let mut idx = rand::seq::index::sample(&mut rng, n, flips.min(n)).into_vec();
        idx.sort_unstable();
        for j in idx {
            y[j] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        groups.push(FairnessGroup { x, y });
    }
    FairnessInstance::new(groups, seed)
}

/// Per-sample exponent arguments `-y_j theta^T x_j` for one group.
fn margins(g: &FairnessGroup, theta: &[f64]) -> Result<DVector<f64>> {
    let mut t = &g.x * DVectorView::from_slice(theta, theta.len());
    for (tj, yj) in t.iter_mut().zip(g.y.iter()) {
        *tj *= -yj;
        if *tj > EXP_LIMIT {
            return Err(Error::Overflow {
                value: *tj,
                limit: EXP_LIMIT,
            });
        }
    }
    Ok(t)
}

/// Group losses `l_i(theta) = mean_j exp(-y_ij theta^T x_ij)`.
pub fn fairness_losses(instance: &FairnessInstance, theta: &[f64]) -> Result<Vec<f64>> {
    check_dim(instance.d, theta.len())?;
    instance
        .groups
        .iter()
        .map(|g| Ok(margins(g, theta)?.iter().map(|t| t.exp()).sum::<f64>() / g.y.len() as f64))
        .collect()
}

struct FairnessOperator {
    instance: FairnessInstance,
    sign: f64,
}

impl Operator for FairnessOperator {
    fn dim(&self) -> usize {
        self.instance.d + self.instance.m()
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.instance.d;
        let (theta, q) = z.split_at(d);
        let (ftheta, fq) = out.split_at_mut(d);
        let mut grad = DVector::zeros(d);
        for (i, g) in self.instance.groups.iter().enumerate() {
            let e = margins(g, theta)?.map(f64::exp);
            let n = g.y.len() as f64;
            fq[i] = -e.sum() / n;
            // grad l_i = (1/n) sum_j -y_j e_j x_j
            let coef = e.component_mul(&g.y) * (-q[i] / n);
            grad.gemv_tr(1.0, &g.x, &coef, 1.0);
        }
        for k in 0..d {
            ftheta[k] = self.sign * grad[k];
        }
        Ok(())
    }
}

/// `F(theta, q) = (sum_i q_i grad l_i(theta), -l(theta))` on
/// `R^d x simplex(m)`, started at `(0, 1/m)`.
pub fn fairness_operator(instance: &FairnessInstance, sign: FairnessSign) -> Result<VIProblem> {
    let (d, m) = (instance.d, instance.m());
    let set = FeasibleSet::product(vec![FeasibleSet::full_space(d), FeasibleSet::simplex(m)?])?;
    let z0 = Point::concat(&[&vec![0.0; d], &vec![1.0 / m as f64; m]]);
    let sign = match sign {
        FairnessSign::Standard => 1.0,
        FairnessSign::Flipped => -1.0,
    };
    VIProblem::new(
        "fairness",
        Arc::new(FairnessOperator {
            instance: instance.clone(),
            sign,
        }),
        set,
        z0,
    )
}
