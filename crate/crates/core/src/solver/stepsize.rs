/// `min{lambda * eta_prev, theta / L_prev, theta / hatL_prev}`, where a zero
/// estimate contributes `+inf`.
pub fn adaptive_stepsize(eta_prev: f64, lambda_prev: f64, l_prev: f64, hat_l_prev: f64, theta: f64) -> f64 {
    let cap = |l: f64| if l > 0.0 { theta / l } else { f64::INFINITY };
    (lambda_prev * eta_prev).min(cap(l_prev)).min(cap(hat_l_prev))
}
