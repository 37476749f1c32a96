//! Central finite differences over a flat parameter vector.

/// Largest relative error between `analytic` and the numerical gradient of
/// `f` at `params`, with `floor` guarding near-zero components.
pub fn max_relative_error<F>(
    params: &mut [f64],
    analytic: &[f64],
    h: f64,
    floor: f64,
    mut f: F,
) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let mut worst = 0.0f64;
    for k in 0..params.len() {
        let orig = params[k];
        params[k] = orig + h;
        let up = f(params);
        params[k] = orig - h;
        let down = f(params);
        params[k] = orig;
        let numeric = (up - down) / (2.0 * h);
        let denom = numeric.abs().max(analytic[k].abs()).max(floor);
        worst = worst.max((numeric - analytic[k]).abs() / denom);
    }
    worst
}
