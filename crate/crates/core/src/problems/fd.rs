use crate::error::{Error, Result};
use crate::point::Point;

/// Central-difference gradient `[phi(z + h e_i) - phi(z - h e_i)] / 2h`.
pub fn finite_difference_gradient<F>(phi: F, z: &[f64], h: f64) -> Result<Point>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let mut probe = z.to_vec();
    let mut grad = Point::zeros(z.len());
    for i in 0..z.len() {
        probe[i] = z[i] + h;
        let up = phi(&probe)?;
        probe[i] = z[i] - h;
        let down = phi(&probe)?;
        probe[i] = z[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    Ok(grad)
}
