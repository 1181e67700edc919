//! LASSO `min_x 1/2 ||Ax - b||^2 + lambda ||x||_1` written as the saddle
//! problem `min_x max_{|y|_inf <= lambda} 1/2 ||Ax - b||^2 + <x, y>`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, DVectorView, DVectorViewMut};
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::power_iteration_norm;
use crate::error::{Error, Result};
use crate::point::Point;
use crate::problem::{Operator, VIProblem};
use crate::set::FeasibleSet;

const POWER_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LassoInstance {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lambda: f64,
    pub x_true: DVector<f64>,
    pub noise_sigma: f64,
}

impl LassoInstance {
    /// An instance from explicit data; `x_true` is left at zero.
    pub fn from_data(a: DMatrix<f64>, b: DVector<f64>, lambda: f64) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                actual: b.len(),
            });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidProblem(format!("lambda must be positive, got {lambda}")));
        }
        let n = a.ncols();
        Ok(LassoInstance {
            a,
            b,
            lambda,
            x_true: DVector::zeros(n),
            noise_sigma: 0.0,
        })
    }
}

/// Gaussian design with unit-norm columns, an `s`-sparse standard-normal
/// `x_true` with `s = round(sparsity_frac * n)`, and `b = A x_true + sigma e`.
pub fn generate_lasso(
    m: usize,
    n: usize,
    sparsity_frac: f64,
    sigma: f64,
    lambda: f64,
    seed: u64,
) -> Result<LassoInstance> {
    if m == 0 || m >= n {
        return Err(Error::InvalidProblem(format!(
            "lasso needs 0 < m < n, got m={m}, n={n}"
        )));
    }
    if !(sparsity_frac > 0.0 && sparsity_frac <= 1.0) {
        return Err(Error::InvalidProblem(format!(
            "sparsity_frac must lie in (0,1], got {sparsity_frac}"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidProblem(format!("sigma must be nonnegative, got {sigma}")));
    }
    let mut rng = super::rng(seed);
    let mut a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    let s = ((sparsity_frac * n as f64).round() as usize).clamp(1, n);
    let mut x_true = DVector::zeros(n);
    let mut support = rand::seq::index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    for j in support {
        x_true[j] = rng.sample(StandardNormal);
    }
    let noise = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let b = &a * &x_true + noise * sigma;
    let mut inst = LassoInstance::from_data(a, b, lambda)?;
    inst.x_true = x_true;
    inst.noise_sigma = sigma;
    Ok(inst)
}

struct LassoOperator {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl Operator for LassoOperator {
    fn dim(&self) -> usize {
        2 * self.a.ncols()
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.a.ncols();
        let (x, y) = z.split_at(n);
        let (fx, fy) = out.split_at_mut(n);
        let mut r = self.b.clone();
        r.gemv(1.0, &self.a, &DVectorView::from_slice(x, n), -1.0);
        DVectorViewMut::from_slice(fx, n).gemv_tr(1.0, &self.a, &r, 0.0);
        for i in 0..n {
            fx[i] += y[i];
            fy[i] = -x[i];
        }
        Ok(())
    }
}

/// `F(x, y) = (A^T (Ax - b) + y, -x)` on `R^n x [-lambda, lambda]^n`,
/// started at the origin. The Lipschitz estimate is the spectral norm of the
/// full linear part `[[A^T A, I], [-I, 0]]`.
pub fn lasso_problem(instance: &LassoInstance) -> Result<VIProblem> {
    let n = instance.a.ncols();
    let set = FeasibleSet::product(vec![
        FeasibleSet::full_space(n),
        FeasibleSet::uniform_box(n, -instance.lambda, instance.lambda)?,
    ])?;
    let op = LassoOperator {
        a: instance.a.clone(),
        b: instance.b.clone(),
    };
    let ata = instance.a.tr_mul(&instance.a);
    // K = [[G, I], [-I, 0]] with G = A^T A symmetric, so
    // K^T K = [[G^2 + I, G], [G, I]].
    let l = power_iteration_norm(2 * n, POWER_ITERATIONS, |v, out| {
        let (u, w) = v.split_at(n);
        let u = DVectorView::from_slice(u, n);
        let w = DVectorView::from_slice(w, n);
        let gu = &ata * u;
        let ggu = &ata * &gu;
        let gw = &ata * w;
        let (o1, o2) = out.split_at_mut(n);
        for i in 0..n {
            o1[i] = ggu[i] + u[i] + gw[i];
            o2[i] = gu[i] + w[i];
        }
    });
    Ok(VIProblem::new("lasso", Arc::new(op), set, Point::zeros(2 * n))?.with_lipschitz(l))
}

pub fn make_lasso(m: usize, n: usize, sparsity_frac: f64, sigma: f64, lambda: f64, seed: u64) -> Result<VIProblem> {
    lasso_problem(&generate_lasso(m, n, sparsity_frac, sigma, lambda, seed)?)
}
