//! Convergence metrics: extragradient, natural and tangent residuals, and the
//! closed-form matrix game gap.

use nalgebra::{DMatrix, DVectorView};

use crate::error::{Error, Result};
use crate::point::{check_dim, dist, Point};
use crate::problem::VIProblem;
use crate::projection::project;
use crate::set::FeasibleSet;

/// Boundary contact threshold used by the tangent residual.
pub const ACTIVITY_TOL: f64 = 1e-12;

/// Stepsize of the natural residual reported by the harness.
pub const REPORT_NAT_ETA: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSnapshot {
    pub eg_residual: f64,
    pub nat_residual: f64,
    pub tan_residual: Option<f64>,
    pub gap: Option<f64>,
}

/// Projection residual of the correction step,
/// `xi = -(1/eta) [z_next - (z - eta F(w))]`.
///
/// When `z_next` came out of that projection, `xi` lies in the normal cone
/// of the feasible set at `z_next`.
pub fn xi_vector(z_next: &[f64], z: &[f64], f_w: &[f64], eta: f64) -> Result<Point> {
    if !(eta > 0.0) {
        return Err(Error::NonpositiveStepsize(eta));
    }
    check_dim(z.len(), z_next.len())?;
    check_dim(z.len(), f_w.len())?;
    Ok(z_next
        .iter()
        .zip(z.iter().zip(f_w))
        .map(|(zn, (zc, fw))| -(zn - (zc - eta * fw)) / eta)
        .collect())
}

/// `||F(z_next) + xi||_2`.
pub fn extragradient_residual(problem: &VIProblem, z_next: &[f64], xi: &[f64]) -> Result<f64> {
    check_dim(z_next.len(), xi.len())?;
    let f = problem.evaluate(z_next)?;
    Ok(eg_residual_from(&f, xi))
}

/// Extragradient residual from a cached `F(z_next)`.
pub fn eg_residual_from(f_znext: &[f64], xi: &[f64]) -> f64 {
    f_znext
        .iter()
        .zip(xi)
        .map(|(f, x)| (f + x) * (f + x))
        .sum::<f64>()
        .sqrt()
}

/// `(1/eta) ||z - Proj(z - eta F(z))||_2`.
pub fn natural_residual(problem: &VIProblem, z: &[f64], eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::NonpositiveStepsize(eta));
    }
    let f = problem.evaluate(z)?;
    natural_residual_with(&problem.set, z, &f, eta)
}

/// Natural residual from a cached `F(z)`; costs one projection.
pub fn natural_residual_with(set: &FeasibleSet, z: &[f64], f_z: &[f64], eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::NonpositiveStepsize(eta));
    }
    check_dim(z.len(), f_z.len())?;
    let trial: Vec<f64> = z.iter().zip(f_z).map(|(a, b)| a - eta * b).collect();
    let p = project(set, &trial)?;
    Ok(dist(z, &p) / eta)
}

/// `||F(z) + Proj_{N(z)}(-F(z))||_2` for box-structured sets; `None` when the
/// set contains a simplex-type factor.
pub fn tangent_residual(problem: &VIProblem, z: &[f64]) -> Result<Option<f64>> {
    if !problem.set.is_box_structured() {
        return Ok(None);
    }
    let f = problem.evaluate(z)?;
    Ok(tangent_residual_with(&problem.set, z, &f))
}

/// Tangent residual from a cached `F(z)`.
pub fn tangent_residual_with(set: &FeasibleSet, z: &[f64], f_z: &[f64]) -> Option<f64> {
    let (lo, hi) = set.box_bounds()?;
    let mut acc = 0.0;
    for i in 0..z.len() {
        let at_lo = lo[i].is_finite() && (z[i] - lo[i]).abs() <= ACTIVITY_TOL * lo[i].abs().max(1.0);
        let at_hi = hi[i].is_finite() && (z[i] - hi[i]).abs() <= ACTIVITY_TOL * hi[i].abs().max(1.0);
        let v = -f_z[i];
        // Normal cone of an interval: (-inf, 0] at lo, [0, inf) at hi.
        let normal = match (at_lo, at_hi) {
            (true, true) => v,
            (true, false) => v.min(0.0),
            (false, true) => v.max(0.0),
            (false, false) => 0.0,
        };
        let r = f_z[i] + normal;
        acc += r * r;
    }
    Some(acc.sqrt())
}

/// Saddle gap of the bilinear game `min_x max_y x^T A y` over two simplices:
/// `max_i (A^T x)_i - min_i (A y)_i`.
pub fn matrix_game_gap(a: &DMatrix<f64>, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(a.nrows(), x.len())?;
    check_dim(a.ncols(), y.len())?;
    for (name, v) in [("x", x), ("y", y)] {
        let simplex = FeasibleSet::Simplex(v.len());
        if !simplex.contains(v, 1e-9)? {
            return Err(Error::InfeasibleInput(format!("{name} is not in the simplex")));
        }
    }
    let xv = DVectorView::from_slice(x, x.len());
    let yv = DVectorView::from_slice(y, y.len());
    let atx = a.tr_mul(&xv);
    let ay = a * yv;
    Ok(atx.max() - ay.min())
}

/// All metrics at an extragradient iterate. `xi` must be the correction-step
/// residual that produced `z_next`.
pub fn snapshot(problem: &VIProblem, z_next: &[f64], xi: &[f64], nat_eta: f64) -> Result<ResidualSnapshot> {
    let f = problem.evaluate(z_next)?;
    Ok(ResidualSnapshot {
        eg_residual: eg_residual_from(&f, xi),
        nat_residual: natural_residual_with(&problem.set, z_next, &f, nat_eta)?,
        tan_residual: tangent_residual_with(&problem.set, z_next, &f),
        gap: match &problem.gap_oracle {
            Some(g) => Some(g.gap(z_next)?),
            None => None,
        },
    })
}
