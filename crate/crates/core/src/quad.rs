//! One-dimensional quadrature.
//!
//! [`adaptive_simpson`] drives the time integrals of the canonical maps.
//! [`GaussLegendre`] backs the Faraday completion helpers, whose results are
//! differentiated numerically afterwards and therefore need an error that
//! varies smoothly with the integration limits.

use crate::{Error, Expression, Result};

/// Absolute tolerance used by [`quad`].
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Maximum bisection depth before reporting non-convergence.
pub const MAX_DEPTH: u32 = 50;

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute tolerance
/// `tol`. Integrand errors are passed through.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    root_tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        // integrable endpoint singularities leave tiny but unresolved leaves
        if delta.abs() <= root_tol {
            return Ok(left + right + delta / 15.0);
        }
        return Err(Error::Quadrature { a, b });
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, root_tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, root_tol, depth - 1)?;
    Ok(l + r)
}

/// `∫_{t0}^{t} f(μ) dμ` for an expression in `t`, by adaptive Simpson with
/// absolute tolerance [`DEFAULT_TOLERANCE`].
pub fn quad(f: &Expression, t0: f64, t: f64) -> Result<f64> {
    if f.vars().len() != 1 {
        return Err(Error::InvalidParams(format!(
            "quad expects a function of one variable, got ({})",
            f.vars().join(", ")
        )));
    }
    adaptive_simpson(|s| Ok(f.eval(&[s])?), t0, t, DEFAULT_TOLERANCE)
}

/// Composite Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Upper bound on panel width.
    max_panel: f64,
}

impl GaussLegendre {
    /// `n`-point rule on panels no wider than `max_panel`.
    pub fn new(n: usize, max_panel: f64) -> Self {
        assert!(n >= 1 && max_panel > 0.0);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Newton iteration on P_n from the Chebyshev-like initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre {
            nodes,
            weights,
            max_panel,
        }
    }

    /// Integral of `f` over `[a, b]` (either orientation).
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if a == b {
            return Ok(0.0);
        }
        let panels = ((b - a).abs() / self.max_panel).ceil().max(1.0) as usize;
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let half = 0.5 * width;
            let mid = lo + half;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + half * x)?;
            }
            total += half * s;
        }
        Ok(total)
    }
}

impl Default for GaussLegendre {
    fn default() -> Self {
        GaussLegendre::new(20, 0.5)
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
