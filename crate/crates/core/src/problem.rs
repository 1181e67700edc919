//! The variational inequality abstraction: an operator paired with a
//! feasible set.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::{check_dim, dot, Point};
use crate::set::FeasibleSet;

/// A deterministic map `F: R^d -> R^d`.
///
/// Implementations must be pure: the same input yields bitwise the same
/// output. Errors are reserved for genuine numerical failures (overflow,
/// singular factorizations).
pub trait Operator: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, z: &[f64], out: &mut [f64]) -> Result<()>;
}

/// A problem-specific restricted gap evaluator.
pub trait GapOracle: Send + Sync {
    fn gap(&self, z: &[f64]) -> Result<f64>;
}

/// Adapts a closure into an [`Operator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F> Operator for FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(z, out)
    }
}

/// An immutable VI instance. Cheap to clone; safe to share across threads.
#[derive(Clone)]
pub struct VIProblem {
    pub name: String,
    pub operator: Arc<dyn Operator>,
    pub set: FeasibleSet,
    pub gap_oracle: Option<Arc<dyn GapOracle>>,
    pub known_solution: Option<Point>,
    /// Default starting point used by [`crate::solver::solve`].
    pub initial_point: Point,
    /// Global Lipschitz constant (or an estimate of it) when one exists.
    pub lipschitz: Option<f64>,
}

impl fmt::Debug for VIProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VIProblem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("set", &self.set)
            .field("has_gap_oracle", &self.gap_oracle.is_some())
            .field("has_known_solution", &self.known_solution.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl VIProblem {
    pub fn new(
        name: impl Into<String>,
        operator: Arc<dyn Operator>,
        set: FeasibleSet,
        initial_point: Point,
    ) -> Result<Self> {
        set.validate()?;
        check_dim(set.dim(), operator.dim())?;
        check_dim(set.dim(), initial_point.dim())?;
        initial_point.ensure_finite()?;
        Ok(VIProblem {
            name: name.into(),
            operator,
            set,
            gap_oracle: None,
            known_solution: None,
            initial_point,
            lipschitz: None,
        })
    }

    /// Convenience constructor from a closure.
    pub fn from_fn<F>(name: impl Into<String>, set: FeasibleSet, initial_point: Point, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &mut [f64]) -> Result<()> + Send + Sync + 'static,
    {
        let op = Arc::new(FnOperator::new(set.dim(), f));
        Self::new(name, op, set, initial_point)
    }

    pub fn with_gap_oracle(mut self, oracle: Arc<dyn GapOracle>) -> Self {
        self.gap_oracle = Some(oracle);
        self
    }

    pub fn with_known_solution(mut self, z: Point) -> Result<Self> {
        check_dim(self.dim(), z.dim())?;
        self.known_solution = Some(z);
        Ok(self)
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// Evaluates `F(z)` into `out`, validating dimensions and finiteness.
    pub fn evaluate_into(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), z.len())?;
        check_dim(self.dim(), out.len())?;
        if let Some(index) = z.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonfiniteInput { index });
        }
        self.operator.apply(z, out)?;
        match out.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonfiniteOutput { index }),
            None => Ok(()),
        }
    }

    pub fn evaluate(&self, z: &[f64]) -> Result<Point> {
        let mut out = Point::zeros(self.dim());
        self.evaluate_into(z, &mut out)?;
        Ok(out)
    }

    /// `<F(z) - F(w), z - w>`; non-negative for a monotone operator.
    pub fn monotonicity_product(&self, z: &[f64], w: &[f64]) -> Result<f64> {
        let fz = self.evaluate(z)?;
        let fw = self.evaluate(w)?;
        let df = fz.sub(&fw);
        let dz: Vec<f64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
        Ok(dot(&df, &dz))
    }
}

/// Evaluates `F(z)`; see [`VIProblem::evaluate`].
pub fn evaluate_operator(problem: &VIProblem, z: &[f64]) -> Result<Point> {
    problem.evaluate(z)
}

/// Operator access that counts evaluations for one solver run.
pub struct CountingOracle<'a> {
    problem: &'a VIProblem,
    evals: u64,
}

impl<'a> CountingOracle<'a> {
    pub fn new(problem: &'a VIProblem) -> Self {
        CountingOracle { problem, evals: 0 }
    }

    pub fn problem(&self) -> &'a VIProblem {
        self.problem
    }

    pub fn evaluate(&mut self, z: &[f64]) -> Result<Point> {
        self.evals += 1;
        self.problem.evaluate(z)
    }

    pub fn evaluations(&self) -> u64 {
        self.evals
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_problem(d: usize) -> VIProblem {
        VIProblem::from_fn("zero", FeasibleSet::full_space(d), Point::zeros(d), |_, out| {
            out.fill(0.0);
            Ok(())
        })
        .unwrap()
    }

    #[test]
    fn zero_operator_returns_zero() {
        let p = zero_problem(3);
        let f = evaluate_operator(&p, &[1.0, -2.0, 7.5]).unwrap();
        assert_eq!(f.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn nonfinite_output_is_an_error() {
        let p = VIProblem::from_fn("bad", FeasibleSet::full_space(2), Point::zeros(2), |z, out| {
            out[0] = z[0];
            out[1] = 1.0 / z[1];
            Ok(())
        })
        .unwrap();
        assert_eq!(p.evaluate(&[1.0, 0.0]), Err(Error::NonfiniteOutput { index: 1 }));
        assert!(p.evaluate(&[1.0, 2.0]).is_ok());
    }

    #[test]
    fn input_checks() {
        let p = zero_problem(2);
        assert!(matches!(p.evaluate(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            p.evaluate(&[1.0, f64::INFINITY]),
            Err(Error::NonfiniteInput { index: 1 })
        ));
    }

    #[test]
    fn counting_oracle_counts() {
        let p = zero_problem(1);
        let mut oracle = CountingOracle::new(&p);
        oracle.evaluate(&[0.0]).unwrap();
        oracle.evaluate(&[1.0]).unwrap();
        assert_eq!(oracle.evaluations(), 2);
    }
}
