//! Central finite differences with the step policy `h = 1e-5 (1 + |c|)`.

use crate::Result;

/// Relative step factor.
pub const STEP_FACTOR: f64 = 1e-5;

/// Step size at coordinate value `c`.
pub fn step(c: f64) -> f64 {
    STEP_FACTOR * (1.0 + c.abs())
}

/// Step size at `c` with a custom factor.
pub fn step_with(c: f64, factor: f64) -> f64 {
    factor * (1.0 + c.abs())
}

/// First derivative of a vector-valued `f` at `c` by central differences.
pub fn central<const N: usize, F>(mut f: F, c: f64, h: f64) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let hi = f(c + h)?;
    let lo = f(c - h)?;
    Ok(std::array::from_fn(|i| (hi[i] - lo[i]) / (2.0 * h)))
}

/// Scalar variant of [`central`].
pub fn central1<F>(mut f: F, c: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((f(c + h)? - f(c - h)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_difference_accuracy() {
        let d = central1(|x| Ok(x.sin()), 0.7, step(0.7)).unwrap();
        assert!((d - 0.7f64.cos()).abs() < 1e-9);
        let v = central(|x| Ok([x * x, x.exp()]), 1.5, step(1.5)).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-9);
        assert!((v[1] - 1.5f64.exp()).abs() < 1e-8);
    }
}
