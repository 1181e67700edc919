//! Bilinear games `min_{x in simplex} max_{y in simplex} x^T A y`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVectorView, DVectorViewMut};
use rand::Rng;

use super::linalg::power_iteration_norm;
use crate::error::{Error, Result};
use crate::metrics::matrix_game_gap;
use crate::point::{check_dim, Point};
use crate::problem::{GapOracle, Operator, VIProblem};
use crate::set::FeasibleSet;

const POWER_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGameInstance {
    pub a: DMatrix<f64>,
    pub kappa: f64,
    pub seed: u64,
}

/// Samples a `d x d` payoff matrix whose entries are nonzero with probability
/// `kappa` and, when nonzero, uniform on `[-1, 1]`.
pub fn generate_matrix_game(d: usize, kappa: f64, seed: u64) -> Result<MatrixGameInstance> {
    if d == 0 {
        return Err(Error::InvalidProblem("matrix game needs d >= 1".into()));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::InvalidProblem(format!("kappa must lie in (0,1], got {kappa}")));
    }
    let mut rng = super::rng(seed);
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if rng.random::<f64>() < kappa {
                a[(i, j)] = rng.random_range(-1.0..=1.0);
            }
        }
    }
    Ok(MatrixGameInstance { a, kappa, seed })
}

struct BilinearOperator {
    a: Arc<DMatrix<f64>>,
}

impl Operator for BilinearOperator {
    fn dim(&self) -> usize {
        self.a.nrows() + self.a.ncols()
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        let (m, n) = self.a.shape();
        let (x, y) = z.split_at(m);
        let (fx, fy) = out.split_at_mut(m);
        DVectorViewMut::from_slice(fx, m).gemv(1.0, &self.a, &DVectorView::from_slice(y, n), 0.0);
        DVectorViewMut::from_slice(fy, n).gemv_tr(-1.0, &self.a, &DVectorView::from_slice(x, m), 0.0);
        Ok(())
    }
}

/// Gap oracle `max(A^T x) - min(A y)`.
pub struct MatrixGameGap {
    a: Arc<DMatrix<f64>>,
}

impl MatrixGameGap {
    pub fn new(a: DMatrix<f64>) -> Self {
        MatrixGameGap { a: Arc::new(a) }
    }
}

impl GapOracle for MatrixGameGap {
    fn gap(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.a.nrows() + self.a.ncols(), z.len())?;
        let (x, y) = z.split_at(self.a.nrows());
        matrix_game_gap(&self.a, x, y)
    }
}

/// Wraps an instance as a VI on the product of two simplices, started at the
/// barycentre. The Lipschitz estimate is `||A||_2` from power iteration.
pub fn matrix_game_problem(instance: &MatrixGameInstance) -> Result<VIProblem> {
    let (m, n) = instance.a.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidProblem("empty payoff matrix".into()));
    }
    let a = Arc::new(instance.a.clone());
    let set = FeasibleSet::product(vec![FeasibleSet::simplex(m)?, FeasibleSet::simplex(n)?])?;
    let z0 = Point::concat(&[&vec![1.0 / m as f64; m], &vec![1.0 / n as f64; n]]);
    let l = power_iteration_norm(n, POWER_ITERATIONS, |v, out| {
        let av = &*a * DVectorView::from_slice(v, n);
        DVectorViewMut::from_slice(out, n).gemv_tr(1.0, &a, &av, 0.0);
    });
    let problem = VIProblem::new("matrix_game", Arc::new(BilinearOperator { a: a.clone() }), set, z0)?
        .with_gap_oracle(Arc::new(MatrixGameGap { a }))
        .with_lipschitz(l);
    Ok(problem)
}

pub fn make_matrix_game(d: usize, kappa: f64, seed: u64) -> Result<VIProblem> {
    matrix_game_problem(&generate_matrix_game(d, kappa, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn dense_entries_in_range() {
        let g = generate_matrix_game(2, 1.0, 11).unwrap();
        assert!(g.a.iter().all(|v| *v != 0.0 && v.abs() <= 1.0));
    }

    #[test]
    fn sparse_density() {
        let g = generate_matrix_game(100, 0.1, 3).unwrap();
        let nnz = g.a.iter().filter(|v| **v != 0.0).count() as f64;
        assert!((nnz / 1e4 - 0.1).abs() < 0.02);
    }

    #[test]
    fn zero_matrix_gives_zero_operator() {
        let inst = MatrixGameInstance {
            a: DMatrix::zeros(3, 3),
            kappa: 1.0,
            seed: 0,
        };
        let p = matrix_game_problem(&inst).unwrap();
        let f = p.evaluate(&[0.2, 0.3, 0.5, 0.1, 0.1, 0.8]).unwrap();
        assert!(f.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn skew_example() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let p = matrix_game_problem(&MatrixGameInstance { a, kappa: 1.0, seed: 0 }).unwrap();
        let f = p.evaluate(&p.initial_point).unwrap();
        assert_eq!(f.as_slice(), &[0.5, -0.5, 0.5, -0.5]);
    }

    #[test]
    fn monotone_with_equality() {
        let p = make_matrix_game(8, 0.7, 5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let z: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
            let w: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(p.monotonicity_product(&z, &w).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn lipschitz_matches_svd() {
        let g = generate_matrix_game(30, 1.0, 9).unwrap();
        let p = matrix_game_problem(&g).unwrap();
        let exact = g.a.clone().singular_values().max();
        let est = p.lipschitz.unwrap();
        assert!(est <= exact + 1e-9 && est > 0.95 * exact);
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            generate_matrix_game(10, 0.5, 4).unwrap(),
            generate_matrix_game(10, 0.5, 4).unwrap()
        );
    }

    #[test]
    fn rejects_bad_kappa() {
        assert!(generate_matrix_game(3, 0.0, 0).is_err());
        assert!(generate_matrix_game(3, 1.5, 0).is_err());
    }
}
