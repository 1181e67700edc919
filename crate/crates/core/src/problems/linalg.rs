use crate::point::norm;

/// Estimates `||K||_2` by power iteration on `K^T K`, starting from the
/// all-ones vector. `apply_ktk` writes `K^T K v` into its second argument.
pub fn power_iteration_norm<F>(dim: usize, iters: usize, mut apply_ktk: F) -> f64
where
    F: FnMut(&[f64], &mut [f64]),
{
    if dim == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut kv = vec![0.0; dim];
    let mut estimate = 0.0;
    for _ in 0..iters {
        apply_ktk(&v, &mut kv);
        let n = norm(&kv);
        if n == 0.0 {
            return 0.0;
        }
        // Rayleigh quotient of the normalised iterate.
        estimate = v.iter().zip(&kv).map(|(a, b)| a * b).sum::<f64>();
        for (vi, ki) in v.iter_mut().zip(&kv) {
            *vi = ki / n;
        }
    }
    estimate.max(0.0).sqrt()
}
