//! Averaged look-ahead points, the classical ergodic output of extragradient.

use crate::config::ErgodicWeights;
use crate::error::{Error, Result};
use crate::point::Point;

/// Weighted average of look-ahead iterates `(w_t, eta_t)`.
pub fn ergodic_average(iterates: &[(Point, f64)], weights: ErgodicWeights) -> Result<Point> {
    let mut acc = ErgodicAccumulator::new(weights);
    for (w, eta) in iterates {
        acc.push(w, *eta);
    }
    acc.average()
}

/// Running form of [`ergodic_average`].
#[derive(Clone, Debug)]
pub struct ErgodicAccumulator {
    weights: ErgodicWeights,
    sum: Vec<f64>,
    total: f64,
}

impl ErgodicAccumulator {
    pub fn new(weights: ErgodicWeights) -> Self {
        ErgodicAccumulator {
            weights,
            sum: Vec::new(),
            total: 0.0,
        }
    }

    pub fn push(&mut self, w: &[f64], eta: f64) {
        let weight = match self.weights {
            ErgodicWeights::Uniform => 1.0,
            ErgodicWeights::StepsizeWeighted => eta,
        };
        if self.sum.is_empty() {
            self.sum = vec![0.0; w.len()];
        }
        for (s, v) in self.sum.iter_mut().zip(w) {
            *s += weight * v;
        }
        self.total += weight;
    }

    pub fn average(&self) -> Result<Point> {
        if self.total == 0.0 {
            return Err(Error::EmptyTrace);
        }
        Ok(self.sum.iter().map(|s| s / self.total).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let one = vec![(Point::from([3.0, -1.0]), 0.2)];
        assert_eq!(
            ergodic_average(&one, ErgodicWeights::Uniform).unwrap().as_slice(),
            &[3.0, -1.0]
        );

        let two = vec![(Point::from([0.0]), 0.1), (Point::from([2.0]), 0.7)];
        assert_eq!(
            ergodic_average(&two, ErgodicWeights::Uniform).unwrap().as_slice(),
            &[1.0]
        );
        let weighted = ergodic_average(&two, ErgodicWeights::StepsizeWeighted).unwrap();
        assert!((weighted[0] - 1.75).abs() < 1e-15);

        let equal = vec![
            (Point::from([0.0]), 0.3),
            (Point::from([5.0]), 0.3),
            (Point::from([1.0]), 0.3),
        ];
        let a = ergodic_average(&equal, ErgodicWeights::Uniform).unwrap();
        let b = ergodic_average(&equal, ErgodicWeights::StepsizeWeighted).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-15);

        assert_eq!(ergodic_average(&[], ErgodicWeights::Uniform), Err(Error::EmptyTrace));
    }
}
