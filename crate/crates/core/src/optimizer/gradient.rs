use std::f64::consts::FRAC_PI_2;

/// `[f(x + pi/2 e_i) - f(x - pi/2 e_i)] / 2` for every component.
///
/// Exact when every parameter enters through a single `exp(-i a P / 2)`
/// rotation with `P` a Pauli operator, as for RY/RZ ansatz costs.
pub fn parameter_shift_gradient(cost: impl Fn(&[f64]) -> f64, params: &[f64]) -> Vec<f64> {
    symmetric_difference(cost, params, FRAC_PI_2, 2.0)
}

/// `[f(x + h e_i) - f(x - h e_i)] / (2h)` for every component.
pub fn central_difference_gradient(cost: impl Fn(&[f64]) -> f64, params: &[f64], step: f64) -> Vec<f64> {
    symmetric_difference(cost, params, step, 2.0 * step)
}

fn symmetric_difference(cost: impl Fn(&[f64]) -> f64, params: &[f64], shift: f64, denom: f64) -> Vec<f64> {
    let mut x = params.to_vec();
    (0..params.len())
        .map(|i| {
            x[i] = params[i] + shift;
            let plus = cost(&x);
            x[i] = params[i] - shift;
            let minus = cost(&x);
            x[i] = params[i];
            (plus - minus) / denom
        })
        .collect()
}
