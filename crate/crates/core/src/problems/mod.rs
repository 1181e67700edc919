//! Benchmark problem families and test oracles.

mod fairness;
mod fd;
mod io;
mod lasso;
mod linalg;
mod matrix_game;
mod mesp;

pub use fairness::{
    fairness_losses, fairness_operator, generate_fairness, FairnessGroup, FairnessInstance, FairnessSign,
};
pub use fd::finite_difference_gradient;
pub use io::{load_matrix_game, load_mesp, read_square_matrix};
pub use lasso::{generate_lasso, lasso_problem, make_lasso, LassoInstance};
pub use linalg::power_iteration_norm;
pub use matrix_game::{generate_matrix_game, make_matrix_game, matrix_game_problem, MatrixGameGap, MatrixGameInstance};
pub use mesp::{generate_mesp, make_mesp, mesp_gradient, mesp_objective, mesp_operator, MespGradient, MespInstance};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
