//! Behavioral symmetry test: push a computed orbit along the generator to
//! first order in ε and measure how badly the result violates the Lorentz
//! equations. A point symmetry leaves an O(ε²) residual, a broken one O(ε).

use crate::dynamics::{integrate_lab, IntegrateSpec, PhaseState, Trajectory};
use crate::fieldgen::EmField;
use crate::interp::{hermite, segment};
use crate::symcore::SymmetryParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSpec {
    pub t0: f64,
    pub t1: f64,
    /// RK4 step of the underlying orbit.
    pub step: f64,
    pub epsilon: f64,
    /// Spacing of the uniform grid the transformed curve is resampled on.
    pub spacing: f64,
}

impl OrbitSpec {
    pub fn new(t0: f64, t1: f64) -> OrbitSpec {
        OrbitSpec {
            t0,
            t1,
            step: 1e-3,
            epsilon: 1e-3,
            spacing: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitResult {
    pub epsilon: f64,
    pub residual_eps: f64,
    pub residual_half: f64,
    /// `residual_eps / residual_half`; about 4 for a symmetry, 2 otherwise.
    pub ratio: f64,
}

impl OrbitResult {
    pub fn quadratic(&self) -> bool {
        (3.5..=4.5).contains(&self.ratio)
    }
}

/// Integrates an orbit from `state` and compares the transformed-curve
/// residuals at ε and ε/2.
pub fn orbit_symmetry_test<F: EmField + ?Sized>(
    field: &F,
    params: &SymmetryParams,
    state: PhaseState,
    spec: OrbitSpec,
) -> Result<OrbitResult> {
    let traj = integrate_lab(
        field,
        state,
        IntegrateSpec::new(spec.t0, spec.t1, spec.step).without_estimate(),
    )?;
    let r1 = transformed_curve_residual(field, params, &traj, spec.epsilon, spec.spacing)?;
    let r2 = transformed_curve_residual(field, params, &traj, 0.5 * spec.epsilon, spec.spacing)?;
    Ok(OrbitResult {
        epsilon: spec.epsilon,
        residual_eps: r1,
        residual_half: r2,
        ratio: r1 / r2,
    })
}

/// Max Lorentz residual of the curve `(x + εη₁, y + εη₂)` parameterized by
/// `t + ετ`, after resampling onto a uniform grid of the new time with the
/// given spacing. Derivatives use five-point stencils.
pub fn transformed_curve_residual<F: EmField + ?Sized>(
    field: &F,
    params: &SymmetryParams,
    traj: &Trajectory,
    epsilon: f64,
    spacing: f64,
) -> Result<f64> {
    let n = traj.samples().len();
    let mut tt = Vec::with_capacity(n);
    let mut xx = Vec::with_capacity(n);
    let mut yy = Vec::with_capacity(n);
    let mut dx = Vec::with_capacity(n);
    let mut dy = Vec::with_capacity(n);
    for s in traj.samples() {
        let c = params.coefficients(s.t)?;
        let [r0, r1, r2, _] = c.rho;
        let [om, omd, _] = c.omega;
        let rate = c.radial_rate();
        let curv = r1 * r1 + r0 * r2;
        let tau = r0 * r0;
        let eta1 = rate * s.q1 - om * s.q2 + c.a1[0];
        let eta2 = om * s.q1 + rate * s.q2 + c.a2[0];
        // total time derivatives along the orbit
        let deta1 = curv * s.q1 - omd * s.q2 + c.a1[1] + rate * s.v1 - om * s.v2;
        let deta2 = curv * s.q2 + omd * s.q1 + c.a2[1] + om * s.v1 + rate * s.v2;
        let dtau = 1.0 + epsilon * 2.0 * r0 * r1;
        if !(dtau > 0.0) {
            return Err(Error::NonMonotone(format!(
                "transformed time is not increasing near t = {}",
                s.t
            )));
        }
        tt.push(s.t + epsilon * tau);
        xx.push(s.q1 + epsilon * eta1);
        yy.push(s.q2 + epsilon * eta2);
        dx.push((s.v1 + epsilon * deta1) / dtau);
        dy.push((s.v2 + epsilon * deta2) / dtau);
    }
    if tt.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotone("transformed time samples are not increasing".into()));
    }
    let h = spacing;
    let lo = tt[0] + 2.0 * h;
    let hi = tt[n - 1] - 2.0 * h;
    if !(hi > lo) {
        return Err(Error::InvalidParams(format!(
            "orbit too short for resampling spacing {h}"
        )));
    }
    let centers = ((hi - lo) / h).floor() as usize + 1;
    let interp = |t: f64| -> (f64, f64) {
        let i = segment(&tt, t);
        let x = hermite(tt[i], tt[i + 1], xx[i], xx[i + 1], dx[i], dx[i + 1], t).0;
        let y = hermite(tt[i], tt[i + 1], yy[i], yy[i + 1], dy[i], dy[i + 1], t).0;
        (x, y)
    };
    let mut worst: f64 = 0.0;
    for c in 0..centers {
        let g = lo + h * c as f64;
        let p = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|o| interp(g + o * h));
        let d1 = |f: fn(&(f64, f64)) -> f64| (f(&p[0]) - 8.0 * f(&p[1]) + 8.0 * f(&p[3]) - f(&p[4])) / (12.0 * h);
        let d2 = |f: fn(&(f64, f64)) -> f64| {
            (-f(&p[0]) + 16.0 * f(&p[1]) - 30.0 * f(&p[2]) + 16.0 * f(&p[3]) - f(&p[4])) / (12.0 * h * h)
        };
        let (vx, vy) = (d1(|q| q.0), d1(|q| q.1));
        let (ax, ay) = (d2(|q| q.0), d2(|q| q.1));
        let (x, y) = p[2];
        let f = field.eval(x, y, g)?;
        let n1 = ax - f.e1 - vy * f.b;
        let n2 = ay - f.e2 + vx * f.b;
        worst = worst.max(n1.abs()).max(n2.abs());
    }
    Ok(worst)
}
