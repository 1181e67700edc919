//! Double-scaled linx relaxation of maximum-entropy sampling:
//! `min_{x in capped simplex} max_{rho, omega} phi(x, rho, omega)` with
//! `phi = 1/2 <x, rho> + 1/2 <1 - x, omega> - 1/2 logdet M` and
//! `M = C Diag(e^rho) Diag(x) C + Diag(e^omega) Diag(1 - x)`.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::point::{check_dim, Point};
use crate::problem::{Operator, VIProblem};
use crate::set::FeasibleSet;

const JITTER: f64 = 1e-10;
const RIDGE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct MespInstance {
    pub c: DMatrix<f64>,
    pub s: usize,
    pub seed: u64,
}

impl MespInstance {
    /// Validates symmetry, positive semidefiniteness and `1 <= s <= d`.
    pub fn new(c: DMatrix<f64>, s: usize, seed: u64) -> Result<Self> {
        let d = c.nrows();
        check_dim(d, c.ncols())?;
        if d == 0 || s == 0 || s > d {
            return Err(Error::InvalidCardinality { d, s });
        }
        let scale = c.amax().max(1.0);
        if (&c - c.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidProblem("covariance matrix is not symmetric".into()));
        }
        let c = (&c + c.transpose()) * 0.5;
        let min_eig = c.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return Err(Error::InvalidProblem(format!(
                "covariance matrix has eigenvalue {min_eig}"
            )));
        }
        Ok(MespInstance { c, s, seed })
    }

    pub fn d(&self) -> usize {
        self.c.nrows()
    }
}

/// `C = G^T G / d + 1e-3 I` with `G` a `d x d` standard-normal matrix.
pub fn generate_mesp(d: usize, s: usize, seed: u64) -> Result<MespInstance> {
    if d == 0 || s == 0 || s > d {
        return Err(Error::InvalidCardinality { d, s });
    }
    let mut rng = super::rng(seed);
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut c = g.tr_mul(&g) / d as f64;
    for i in 0..d {
        c[(i, i)] += RIDGE;
    }
    // Exact symmetry regardless of summation order.
    let c = (&c + c.transpose()) * 0.5;
    MespInstance::new(c, s, seed)
}

fn split<'a>(instance: &MespInstance, z: &'a [f64]) -> Result<(usize, [&'a [f64]; 3])> {
    let d = instance.d();
    check_dim(3 * d, z.len())?;
    Ok((d, [&z[..d], &z[d..2 * d], &z[2 * d..]]))
}

/// Builds and factors `M`, retrying once with a diagonal jitter.
fn factor(instance: &MespInstance, x: &[f64], rho: &[f64], omega: &[f64]) -> Result<Cholesky<f64, Dyn>> {
    let d = instance.d();
    let c = &instance.c;
    let mut scaled = c.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= rho[j].exp() * x[j];
    }
    let mut m = &scaled * c;
    for i in 0..d {
        m[(i, i)] += omega[i].exp() * (1.0 - x[i]);
    }
    let m = (&m + m.transpose()) * 0.5;
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularMatrix("M has non-finite entries".into()));
    }
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Ok(ch);
    }
    let shift = JITTER * m.trace() / d as f64;
    let mut jittered = m;
    for i in 0..d {
        jittered[(i, i)] += shift;
    }
    Cholesky::new(jittered).ok_or_else(|| Error::SingularMatrix("M is not positive definite after jitter".into()))
}

fn logdet(ch: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * ch.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
}

/// Evaluates `phi(x, rho, omega)`.
pub fn mesp_objective(instance: &MespInstance, x: &[f64], rho: &[f64], omega: &[f64]) -> Result<f64> {
    let d = instance.d();
    for v in [x, rho, omega] {
        check_dim(d, v.len())?;
    }
    let ch = factor(instance, x, rho, omega)?;
    let lin: f64 = (0..d)
        .map(|i| 0.5 * x[i] * rho[i] + 0.5 * (1.0 - x[i]) * omega[i])
        .sum();
    Ok(lin - 0.5 * logdet(&ch))
}

/// Partial gradients of `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct MespGradient {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub omega: Vec<f64>,
}

pub fn mesp_gradient(instance: &MespInstance, x: &[f64], rho: &[f64], omega: &[f64]) -> Result<MespGradient> {
    let d = instance.d();
    for v in [x, rho, omega] {
        check_dim(d, v.len())?;
    }
    let c = &instance.c;
    let ch = factor(instance, x, rho, omega)?;
    let minv = ch.inverse();
    let p = &minv * c;
    let mut g = MespGradient {
        x: vec![0.0; d],
        rho: vec![0.0; d],
        omega: vec![0.0; d],
    };
    for i in 0..d {
        // (C M^{-1} C)_ii with C symmetric.
        let cmc = c.column(i).dot(&p.column(i));
        let mi = minv[(i, i)];
        let (er, eo) = (rho[i].exp(), omega[i].exp());
        g.x[i] = 0.5 * (rho[i] - omega[i]) - 0.5 * (er * cmc - eo * mi);
        g.rho[i] = 0.5 * x[i] - 0.5 * er * x[i] * cmc;
        g.omega[i] = 0.5 * (1.0 - x[i]) - 0.5 * eo * (1.0 - x[i]) * mi;
    }
    Ok(g)
}

struct MespOperator {
    instance: MespInstance,
}

impl Operator for MespOperator {
    fn dim(&self) -> usize {
        3 * self.instance.d()
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        let (d, [x, rho, omega]) = split(&self.instance, z)?;
        let g = mesp_gradient(&self.instance, x, rho, omega)?;
        for i in 0..d {
            out[i] = g.x[i];
            out[d + i] = -g.rho[i];
            out[2 * d + i] = -g.omega[i];
        }
        Ok(())
    }
}

/// `F = (grad_x phi, -grad_rho phi, -grad_omega phi)` on
/// `CappedSimplex(d, s) x R^d x R^d`, started at `(s/d, 0, 0)`.
pub fn mesp_operator(instance: &MespInstance) -> Result<VIProblem> {
    let (d, s) = (instance.d(), instance.s);
    let set = FeasibleSet::product(vec![
        FeasibleSet::capped_simplex(d, s)?,
        FeasibleSet::full_space(d),
        FeasibleSet::full_space(d),
    ])?;
    let mut z0 = Point::zeros(3 * d);
    z0[..d].fill(s as f64 / d as f64);
    VIProblem::new(
        "mesp",
        Arc::new(MespOperator {
            instance: instance.clone(),
        }),
        set,
        z0,
    )
}

pub fn make_mesp(d: usize, s: usize, seed: u64) -> Result<VIProblem> {
    mesp_operator(&generate_mesp(d, s, seed)?)
}
