//! The extragradient update and the local Lipschitz estimates.

use crate::error::{Error, Result};
use crate::point::{dist, norm, Point};
use crate::problem::{CountingOracle, VIProblem};
use crate::projection::project_into;

/// Default relative threshold for `w = z`.
pub const DEFAULT_STATIONARITY_TOL: f64 = 1e-14;

/// One accepted extragradient update with its cached operator values.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    /// Look-ahead point `Proj(z - eta F(z))`.
    pub w: Point,
    /// `Proj(z - eta F(w))`.
    pub z_next: Point,
    pub f_z: Point,
    pub f_w: Point,
    pub f_znext: Point,
    pub l_t: f64,
    pub hat_l_t: f64,
    pub eta: f64,
    pub backtrack_failures: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// `w = z`: the current iterate already solves the VI.
    Stationary,
    Moved(StepOutcome),
}

/// `||a - b|| <= tol * max(1, ||b||)`.
pub fn coincide(a: &[f64], b: &[f64], tol: f64) -> bool {
    dist(a, b) <= tol * norm(b).max(1.0)
}

/// Local Lipschitz estimates of one extragradient step:
/// `L_t = ||F(w) - F(z)|| / ||w - z||` and
/// `hatL_t = ||F(w) - F(z_next)|| / ||w - z_next||`, or 0 when `w = z_next`.
///
/// Fails with [`Error::Stationary`] when `w = z`; callers must stop first.
pub fn lipschitz_estimates(
    f_z: &[f64],
    f_w: &[f64],
    f_znext: &[f64],
    z: &[f64],
    w: &[f64],
    z_next: &[f64],
    stationarity_tol: f64,
) -> Result<(f64, f64)> {
    if coincide(w, z, stationarity_tol) {
        return Err(Error::Stationary);
    }
    let l_t = dist(f_w, f_z) / dist(w, z);
    Ok((l_t, hat_estimate(f_w, f_znext, w, z_next, stationarity_tol)))
}

fn hat_estimate(f_w: &[f64], f_znext: &[f64], w: &[f64], z_next: &[f64], tol: f64) -> f64 {
    if coincide(z_next, w, tol) {
        0.0
    } else {
        dist(f_w, f_znext) / dist(w, z_next)
    }
}

pub(crate) struct LookAhead {
    pub w: Point,
    pub f_w: Point,
    pub l_t: f64,
}

pub(crate) struct Correction {
    pub z_next: Point,
    pub f_znext: Point,
    pub hat_l_t: f64,
}

/// `w = Proj(z - eta F(z))`, `F(w)` and `L_t`; `None` when `w = z`.
pub(crate) fn look_ahead(
    oracle: &mut CountingOracle<'_>,
    z: &[f64],
    f_z: &[f64],
    eta: f64,
    tol: f64,
) -> Result<Option<LookAhead>> {
    let mut w = Point::zeros(z.len());
    let trial: Vec<f64> = z.iter().zip(f_z).map(|(a, b)| a - eta * b).collect();
    project_into(&oracle.problem().set, &trial, &mut w)?;
    if coincide(&w, z, tol) {
        return Ok(None);
    }
    let f_w = oracle.evaluate(&w)?;
    let l_t = dist(&f_w, f_z) / dist(&w, z);
    Ok(Some(LookAhead { w, f_w, l_t }))
}

/// `z_next = Proj(z - eta F(w))`, `F(z_next)` and `hatL_t`.
pub(crate) fn correct(
    oracle: &mut CountingOracle<'_>,
    z: &[f64],
    la: &LookAhead,
    eta: f64,
    tol: f64,
) -> Result<Correction> {
    let mut z_next = Point::zeros(z.len());
    let trial: Vec<f64> = z.iter().zip(la.f_w.iter()).map(|(a, b)| a - eta * b).collect();
    project_into(&oracle.problem().set, &trial, &mut z_next)?;
    let f_znext = oracle.evaluate(&z_next)?;
    let hat_l_t = hat_estimate(&la.f_w, &f_znext, &la.w, &z_next, tol);
    Ok(Correction {
        z_next,
        f_znext,
        hat_l_t,
    })
}

pub(crate) fn assemble(z_f: Point, la: LookAhead, c: Correction, eta: f64, failures: u32) -> StepOutcome {
    StepOutcome {
        w: la.w,
        z_next: c.z_next,
        f_z: z_f,
        f_w: la.f_w,
        f_znext: c.f_znext,
        l_t: la.l_t,
        hat_l_t: c.hat_l_t,
        eta,
        backtrack_failures: failures,
    }
}

/// A single extragradient step from `z` with stepsize `eta`: three operator
/// evaluations (`F(z)`, `F(w)`, and `F(z_next)` for the estimates).
pub fn eg_step(problem: &VIProblem, z: &[f64], eta: f64) -> Result<Step> {
    eg_step_with_tol(problem, z, eta, DEFAULT_STATIONARITY_TOL)
}

pub fn eg_step_with_tol(problem: &VIProblem, z: &[f64], eta: f64, stationarity_tol: f64) -> Result<Step> {
    if !(eta > 0.0) {
        return Err(Error::NonpositiveStepsize(eta));
    }
    let mut oracle = CountingOracle::new(problem);
    let f_z = oracle.evaluate(z)?;
    let Some(la) = look_ahead(&mut oracle, z, &f_z, eta, stationarity_tol)? else {
        return Ok(Step::Stationary);
    };
    let c = correct(&mut oracle, z, &la, eta, stationarity_tol)?;
    Ok(Step::Moved(assemble(f_z, la, c, eta, 0)))
}
