/// Error function.
///
/// Backed by `statrs` (rational Chebyshev fits, ~1e-15 accuracy); the wrapper
/// makes the function exactly odd and clamps to `[-1, 1]`.
pub fn erf(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let y = statrs::function::erf::erf(x.abs()).clamp(0.0, 1.0);
    if x < 0.0 {
        -y
    } else {
        y
    }
}
