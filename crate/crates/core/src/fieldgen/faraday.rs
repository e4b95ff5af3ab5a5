//! Faraday completion helpers. Each fixes the free "constant" of
//! integration (a function of the other variable) to zero and returns a
//! quadrature-backed evaluator.

use std::sync::Arc;

use super::{planar_fn, PlanarExpr, PlanarFn};
use crate::quad::GaussLegendre;
use crate::symcore::{Case, SymmetryParams};
use crate::{Error, Expression, Result};

/// `(Ē₁, Ē₂) = (−V̄_x̄, −V̄_ȳ)`, the potential solution of the case A
/// constraint for `k = 0`.
pub fn potential_pair(vbar: &Expression) -> Result<(Expression, Expression)> {
    PlanarExpr::new(vbar.clone())?;
    Ok((vbar.derive("xb", 1)?.neg(), vbar.derive("yb", 1)?.neg()))
}

/// Case A: `Ē₂(x̄, ȳ) = ∫₀^x̄ [Ē₁_ȳ + k (s B̄_x̄ + ȳ B̄_ȳ)](s, ȳ) ds`, which
/// solves `Ē₂_x̄ − Ē₁_ȳ = k (x̄ B̄_x̄ + ȳ B̄_ȳ)`.
pub fn faraday_complete_case_a(k: f64, bbar: &Expression, e1bar: &Expression) -> Result<Arc<dyn PlanarFn>> {
    PlanarExpr::new(bbar.clone())?;
    PlanarExpr::new(e1bar.clone())?;
    let e1_y = e1bar.derive("yb", 1)?;
    let b_x = bbar.derive("xb", 1)?;
    let b_y = bbar.derive("yb", 1)?;
    let rule = GaussLegendre::default();
    Ok(planar_fn(move |xb, yb| {
        rule.integrate(
            |s| {
                let p = [s, yb];
                let mut v = e1_y.eval(&p)?;
                if k != 0.0 {
                    v += k * (s * b_x.eval(&p)? + yb * b_y.eval(&p)?);
                }
                Ok(v)
            },
            0.0,
            xb,
        )
    }))
}

/// Case D: `B̄(x̄, ȳ) = (1/k) ∫_{t₀}^{ȳ} R(x̄, s) ds` with `t₀` the working
/// interval start and
///
/// ```text
/// R = −Ω̈ + (k sin x̄ − Ω cos x̄) Ē₁ − (k cos x̄ + Ω sin x̄) Ē₂
///     + (k cos x̄ − Ω sin x̄) Ē₁_x̄ + (k sin x̄ + Ω cos x̄) Ē₂_x̄
/// ```
///
/// where Ω and its derivatives are evaluated at `s`.
pub fn faraday_complete_case_d(
    params: &SymmetryParams,
    e1bar: &Expression,
    e2bar: &Expression,
) -> Result<Arc<dyn PlanarFn>> {
    if params.case() != Case::D {
        return Err(Error::InvalidParams(
            "the case D Faraday helper needs case D parameters".into(),
        ));
    }
    PlanarExpr::new(e1bar.clone())?;
    PlanarExpr::new(e2bar.clone())?;
    let k = params.k();
    let omega = params.omega().clone();
    let y0 = params.interval().start;
    let (e1, e2) = (e1bar.clone(), e2bar.clone());
    let (e1_x, e2_x) = (e1bar.derive("xb", 1)?, e2bar.derive("xb", 1)?);
    let rule = GaussLegendre::default();
    Ok(planar_fn(move |xb, yb| {
        let (sx, cx) = xb.sin_cos();
        let integral = rule.integrate(
            |s| {
                let [om, _, omdd] = omega.jet::<3>(s)?;
                let p = [xb, s];
                Ok(
                    -omdd + (k * sx - om * cx) * e1.eval(&p)? - (k * cx + om * sx) * e2.eval(&p)?
                        + (k * cx - om * sx) * e1_x.eval(&p)?
                        + (k * sx + om * cx) * e2_x.eval(&p)?,
                )
            },
            y0,
            yb,
        )?;
        Ok(integral / k)
    }))
}
