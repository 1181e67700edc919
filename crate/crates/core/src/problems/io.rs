//! Plain-text instance files: a header line (`d`, or `d s` for sampling
//! problems) followed by `d` rows of `d` whitespace-separated numbers.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::matrix_game::{matrix_game_problem, MatrixGameInstance};
use super::mesp::{mesp_operator, MespInstance};
use crate::error::{Error, Result};
use crate::problem::VIProblem;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidProblem(format!("line {line}: {msg}"))
}

/// Parses the header fields and the square matrix from `text`.
pub fn read_square_matrix(text: &str) -> Result<(Vec<usize>, DMatrix<f64>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let header: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(hline + 1, format!("bad header field '{t}'")))
        })
        .collect::<Result<_>>()?;
    let d = *header
        .first()
        .ok_or_else(|| parse_err(hline + 1, "missing dimension"))?;
    if d == 0 {
        return Err(parse_err(hline + 1, "dimension must be positive"));
    }
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        let (ln, row) = lines
            .next()
            .ok_or_else(|| parse_err(hline + 2 + i, format!("expected {d} rows")))?;
        let vals: Vec<f64> = row
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln + 1, format!("bad number '{t}'"))))
            .collect::<Result<_>>()?;
        if vals.len() != d {
            return Err(parse_err(ln + 1, format!("expected {d} entries, found {}", vals.len())));
        }
        for (j, v) in vals.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln + 1, "trailing data"));
    }
    Ok((header, m))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidProblem(format!("{}: {e}", path.display())))
}

/// Loads a payoff matrix file (header `d`).
pub fn load_matrix_game(path: impl AsRef<Path>) -> Result<VIProblem> {
    let (header, a) = read_square_matrix(&read(path.as_ref())?)?;
    if header.len() != 1 {
        return Err(parse_err(1, "matrix game header must be 'd'"));
    }
    matrix_game_problem(&MatrixGameInstance { a, kappa: 1.0, seed: 0 })
}

/// Loads a covariance file (header `d s`).
pub fn load_mesp(path: impl AsRef<Path>) -> Result<VIProblem> {
    let (header, c) = read_square_matrix(&read(path.as_ref())?)?;
    if header.len() != 2 {
        return Err(parse_err(1, "sampling header must be 'd s'"));
    }
    mesp_operator(&MespInstance::new(c, header[1], 0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_matrix() {
        let (h, m) = read_square_matrix("2 1\n1 0.5\n0.5 2\n").unwrap();
        assert_eq!(h, vec![2, 1]);
        assert_eq!(m[(0, 1)], 0.5);
        assert_eq!(m[(1, 1)], 2.0);
    }

    #[test]
    fn reports_short_row() {
        let err = read_square_matrix("2\n1 2\n3\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn reports_missing_rows() {
        assert!(read_square_matrix("3\n1 2 3\n").is_err());
    }

    #[test]
    fn loads_files() {
        let dir = tempfile::tempdir().unwrap();
        let game = dir.path().join("game.txt");
        fs::write(&game, "2\n0 1\n-1 0\n").unwrap();
        assert_eq!(load_matrix_game(&game).unwrap().dim(), 4);
        let mesp = dir.path().join("mesp.txt");
        fs::write(&mesp, "2 1\n1 0\n0 1\n").unwrap();
        assert_eq!(load_mesp(&mesp).unwrap().dim(), 6);
        fs::write(&mesp, "2\n1 0\n0 1\n").unwrap();
        assert!(load_mesp(&mesp).is_err());
    }
}
