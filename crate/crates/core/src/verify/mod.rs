//! Numerical checks of the symmetry conditions.
//!
//! With `G F = τ F_t + η₁ F_x + η₂ F_y` the residuals are
//!
//! ```text
//! R_B  = G B + 2ρρ̇ B + 2Ω̇
//! R_E1 = G E₁ − [(k − 3ρρ̇) E₁ − Ω E₂ − ((ρρ̈ + ρ̇²) y + Ω̇ x + ȧ₂) B
//!                + (ρρ⃛ + 3ρ̇ρ̈) x − Ω̈ y + ä₁]
//! R_E2 = G E₂ − [(k − 3ρρ̇) E₂ + Ω E₁ + ((ρρ̈ + ρ̇²) x − Ω̇ y + ȧ₁) B
//!                + (ρρ⃛ + 3ρ̇ρ̈) y + Ω̈ x + ä₂]
//! R_F  = E₂_x − E₁_y + B_t
//! ```
//!
//! Partial derivatives are central differences with step
//! `h = factor · (1 + |c|)` per coordinate.

mod orbit;
mod report;

pub use orbit::{orbit_symmetry_test, transformed_curve_residual, OrbitResult, OrbitSpec};
pub use report::{residual_report, Axis, ComponentSummary, GridSpec, PointResidual, ReportOptions, ResidualReport};

use crate::fieldgen::{EmField, FieldValue};
use crate::symcore::{generator_from, SymmetryParams};
use crate::{fd, Result};

/// Default scaled tolerance for the determining equations.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default scaled tolerance for Faraday's law.
pub const DEFAULT_FARADAY_TOL: f64 = 1e-7;

/// Finite-difference step policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub factor: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            factor: fd::STEP_FACTOR,
        }
    }
}

impl StepPolicy {
    pub fn step(&self, c: f64) -> f64 {
        fd::step_with(c, self.factor)
    }

    pub fn halved(&self) -> StepPolicy {
        StepPolicy {
            factor: 0.5 * self.factor,
        }
    }
}

/// Residual scale `1 + |B| + |E₁| + |E₂|`.
pub fn field_scale(f: &FieldValue) -> f64 {
    1.0 + f.b.abs() + f.e1.abs() + f.e2.abs()
}

/// Determining-equation residuals at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminingResidual {
    pub r_b: f64,
    pub r_e1: f64,
    pub r_e2: f64,
    /// Field value at the point.
    pub field: FieldValue,
}

impl DeterminingResidual {
    pub fn scale(&self) -> f64 {
        field_scale(&self.field)
    }

    /// Largest residual divided by the scale.
    pub fn max_scaled(&self) -> f64 {
        self.r_b.abs().max(self.r_e1.abs()).max(self.r_e2.abs()) / self.scale()
    }
}

fn partials<F: EmField + ?Sized>(
    field: &F,
    x: f64,
    y: f64,
    t: f64,
    policy: StepPolicy,
    with_t: bool,
) -> Result<[[f64; 3]; 3]> {
    let as_arr = |f: FieldValue| [f.e1, f.e2, f.b];
    let dx = fd::central(|x| Ok(as_arr(field.eval(x, y, t)?)), x, policy.step(x))?;
    let dy = fd::central(|y| Ok(as_arr(field.eval(x, y, t)?)), y, policy.step(y))?;
    let dt = if with_t {
        fd::central(|t| Ok(as_arr(field.eval(x, y, t)?)), t, policy.step(t))?
    } else {
        [0.0; 3]
    };
    Ok([dx, dy, dt])
}

/// Residuals of the determining equations for `field` under the generator
/// of `params` at `(x, y, t)`.
pub fn determining_residual<F: EmField + ?Sized>(
    field: &F,
    params: &SymmetryParams,
    x: f64,
    y: f64,
    t: f64,
) -> Result<DeterminingResidual> {
    determining_residual_with(field, params, x, y, t, StepPolicy::default())
}

pub fn determining_residual_with<F: EmField + ?Sized>(
    field: &F,
    params: &SymmetryParams,
    x: f64,
    y: f64,
    t: f64,
    policy: StepPolicy,
) -> Result<DeterminingResidual> {
    let c = params.coefficients(t)?;
    let g = generator_from(&c, x, y);
    let f = field.eval(x, y, t)?;
    let [dx, dy, dt] = partials(field, x, y, t, policy, g.tau != 0.0)?;
    let apply = |i: usize| g.tau * dt[i] + g.eta1 * dx[i] + g.eta2 * dy[i];
    let [r0, r1, r2, r3] = c.rho;
    let [om, omd, omdd] = c.omega;
    let rr = r0 * r1;
    let rr2 = r0 * r2 + r1 * r1;
    let rr3 = r0 * r3 + 3.0 * r1 * r2;
    let lin = c.k - 3.0 * rr;
    let rhs1 = lin * f.e1 - om * f.e2 - (rr2 * y + omd * x + c.a2[1]) * f.b + rr3 * x - omdd * y + c.a1[2];
    let rhs2 = lin * f.e2 + om * f.e1 + (rr2 * x - omd * y + c.a1[1]) * f.b + rr3 * y + omdd * x + c.a2[2];
    Ok(DeterminingResidual {
        r_b: apply(2) + 2.0 * rr * f.b + 2.0 * omd,
        r_e1: apply(0) - rhs1,
        r_e2: apply(1) - rhs2,
        field: f,
    })
}

/// Faraday residual `E₂_x − E₁_y + B_t` at `(x, y, t)`.
pub fn faraday_residual<F: EmField + ?Sized>(field: &F, x: f64, y: f64, t: f64) -> Result<f64> {
    faraday_residual_with(field, x, y, t, StepPolicy::default())
}

pub fn faraday_residual_with<F: EmField + ?Sized>(
    field: &F,
    x: f64,
    y: f64,
    t: f64,
    policy: StepPolicy,
) -> Result<f64> {
    let e2x = fd::central1(|x| Ok(field.eval(x, y, t)?.e2), x, policy.step(x))?;
    let e1y = fd::central1(|y| Ok(field.eval(x, y, t)?.e1), y, policy.step(y))?;
    let bt = fd::central1(|t| Ok(field.eval(x, y, t)?.b), t, policy.step(t))?;
    Ok(e2x - e1y + bt)
}

#[cfg(test)]
mod tests;
