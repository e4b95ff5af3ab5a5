//! Electromagnetic field families admitting a given symmetry generator.
//!
//! Each family is assembled from free functions of the canonical spatial
//! coordinates `(x̄, ȳ)` (declared as `xb`, `yb`), pulled back to the lab
//! frame through the case's [`CanonicalMap`].

mod faraday;

use std::fmt;
use std::sync::Arc;

pub use faraday::{faraday_complete_case_a, faraday_complete_case_d, potential_pair};

use crate::symcore::{CanonicalMap, Case, LabPoint};
use crate::{Error, Expression, Result, PLANE_VARS};

/// Variable list for lab-frame field expressions.
pub const LAB_VARS: [&str; 3] = ["x", "y", "t"];

/// Field components at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldValue {
    pub e1: f64,
    pub e2: f64,
    pub b: f64,
}

/// A planar electromagnetic field `(E₁, E₂, B)` over `(x, y, t)`.
pub trait EmField: Send + Sync {
    fn eval(&self, x: f64, y: f64, t: f64) -> Result<FieldValue>;
}

impl<T: EmField + ?Sized> EmField for Arc<T> {
    fn eval(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        (**self).eval(x, y, t)
    }
}

impl<T: EmField + ?Sized> EmField for &T {
    fn eval(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        (**self).eval(x, y, t)
    }
}

/// A free function of the canonical coordinates `(x̄, ȳ)`.
pub trait PlanarFn: Send + Sync {
    fn value(&self, xb: f64, yb: f64) -> Result<f64>;
}

/// An [`Expression`] declared over `(xb, yb)`.
#[derive(Debug, Clone)]
pub struct PlanarExpr(Expression);

impl PlanarExpr {
    pub fn new(expr: Expression) -> Result<PlanarExpr> {
        if expr.vars() != PLANE_VARS {
            return Err(Error::InvalidParams(format!(
                "free function must be declared over (xb, yb), got ({})",
                expr.vars().join(", ")
            )));
        }
        Ok(PlanarExpr(expr))
    }

    pub fn parse(src: &str) -> Result<PlanarExpr> {
        PlanarExpr::new(Expression::parse(src, &PLANE_VARS)?)
    }

    pub fn expr(&self) -> &Expression {
        &self.0
    }

    pub fn shared(self) -> Arc<dyn PlanarFn> {
        Arc::new(self)
    }
}

impl PlanarFn for PlanarExpr {
    fn value(&self, xb: f64, yb: f64) -> Result<f64> {
        Ok(self.0.eval(&[xb, yb])?)
    }
}

/// A closure used as a free function.
pub struct PlanarClosure<F>(pub F);

impl<F> PlanarFn for PlanarClosure<F>
where
    F: Fn(f64, f64) -> Result<f64> + Send + Sync,
{
    fn value(&self, xb: f64, yb: f64) -> Result<f64> {
        (self.0)(xb, yb)
    }
}

/// Wraps a closure as a shared free function.
pub fn planar_fn<F>(f: F) -> Arc<dyn PlanarFn>
where
    F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
{
    Arc::new(PlanarClosure(f))
}

/// A field given directly by a closure.
pub struct FnField<F>(pub F);

impl<F> EmField for FnField<F>
where
    F: Fn(f64, f64, f64) -> Result<FieldValue> + Send + Sync,
{
    fn eval(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        (self.0)(x, y, t)
    }
}

/// A field given by three expressions over `(x, y, t)`.
#[derive(Debug, Clone)]
pub struct ExprField {
    pub e1: Expression,
    pub e2: Expression,
    pub b: Expression,
}

impl ExprField {
    pub fn parse(e1: &str, e2: &str, b: &str) -> Result<ExprField> {
        Ok(ExprField {
            e1: Expression::parse(e1, &LAB_VARS)?,
            e2: Expression::parse(e2, &LAB_VARS)?,
            b: Expression::parse(b, &LAB_VARS)?,
        })
    }
}

impl EmField for ExprField {
    fn eval(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        let p = [x, y, t];
        Ok(FieldValue {
            e1: self.e1.eval(&p)?,
            e2: self.e2.eval(&p)?,
            b: self.b.eval(&p)?,
        })
    }
}

/// The canonical free functions `B̄, Ē₁, Ē₂` of a family.
#[derive(Clone)]
pub struct FreeFunctions {
    pub bbar: Arc<dyn PlanarFn>,
    pub e1bar: Arc<dyn PlanarFn>,
    pub e2bar: Arc<dyn PlanarFn>,
}

impl FreeFunctions {
    pub fn new(bbar: Arc<dyn PlanarFn>, e1bar: Arc<dyn PlanarFn>, e2bar: Arc<dyn PlanarFn>) -> Self {
        FreeFunctions { bbar, e1bar, e2bar }
    }

    /// Three expressions over `(xb, yb)`.
    pub fn from_exprs(bbar: &Expression, e1bar: &Expression, e2bar: &Expression) -> Result<Self> {
        Ok(FreeFunctions {
            bbar: PlanarExpr::new(bbar.clone())?.shared(),
            e1bar: PlanarExpr::new(e1bar.clone())?.shared(),
            e2bar: PlanarExpr::new(e2bar.clone())?.shared(),
        })
    }

    fn at(&self, xb: f64, yb: f64) -> Result<(f64, f64, f64)> {
        Ok((
            self.bbar.value(xb, yb)?,
            self.e1bar.value(xb, yb)?,
            self.e2bar.value(xb, yb)?,
        ))
    }
}

/// A field family of one of the four symmetry cases.
#[derive(Clone)]
pub struct FieldFamily {
    map: Arc<CanonicalMap>,
    free: FreeFunctions,
}

impl fmt::Debug for FieldFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldFamily")
            .field("case", &self.map.case())
            .finish_non_exhaustive()
    }
}

fn expect_case(map: &CanonicalMap, case: Case) -> Result<()> {
    if map.case() != case {
        return Err(Error::InvalidParams(format!(
            "expected case {case} parameters, got case {}",
            map.case()
        )));
    }
    Ok(())
}

/// Case A family from `B̄, Ē₁, Ē₂`.
pub fn build_case_a(map: Arc<CanonicalMap>, free: FreeFunctions) -> Result<FieldFamily> {
    expect_case(&map, Case::A)?;
    Ok(FieldFamily { map, free })
}

/// Case B family from the flux function ψ and Ē₁, with
/// `Ē₂ = ψ_ȳ / x̄²` and `B̄ = −ψ_x̄ / x̄`.
pub fn build_case_b(map: Arc<CanonicalMap>, psi: &Expression, e1bar: &Expression) -> Result<FieldFamily> {
    expect_case(&map, Case::B)?;
    PlanarExpr::new(psi.clone())?;
    let xb = Expression::variable("xb", &PLANE_VARS)?;
    let bbar = psi.derive("xb", 1)?.div(&xb).neg();
    let e2bar = psi.derive("yb", 1)?.div(&xb.powi(2));
    let free = FreeFunctions::from_exprs(&bbar, e1bar, &e2bar)?;
    Ok(FieldFamily { map, free })
}

/// Case B family from arbitrary `B̄, Ē₁, Ē₂` (Faraday not enforced).
pub fn build_case_b_raw(map: Arc<CanonicalMap>, free: FreeFunctions) -> Result<FieldFamily> {
    expect_case(&map, Case::B)?;
    Ok(FieldFamily { map, free })
}

/// Case C family from ψ and the potential V̄: `B̄ = ψ_x̄`, `Ē₁ = −V̄_x̄` and
/// `Ē₂ = (ä₁/a₂) x̄ − (ȧ₂/a₂) ψ − ψ_ȳ + (a₁/a₂) V̄_x̄` with the time functions
/// evaluated at ȳ.
pub fn build_case_c(map: Arc<CanonicalMap>, psi: &Expression, vbar: &Expression) -> Result<FieldFamily> {
    expect_case(&map, Case::C)?;
    let psi = PlanarExpr::new(psi.clone())?;
    PlanarExpr::new(vbar.clone())?;
    let bbar = psi.expr().derive("xb", 1)?;
    let vx = vbar.derive("xb", 1)?;
    let e1bar = vx.neg();
    let psi_y = psi.expr().derive("yb", 1)?;
    let [a1, a2] = map.params().translations().clone();
    let vx_fn = vx.clone();
    let e2bar = planar_fn(move |xb, yb| {
        let ([a1v, _, a1dd], [a2v, a2d, _]) = (a1.jet::<3>(yb)?, a2.jet::<3>(yb)?);
        let p = [xb, yb];
        Ok(a1dd / a2v * xb - a2d / a2v * psi.expr().eval(&p)? - psi_y.eval(&p)? + a1v / a2v * vx_fn.eval(&p)?)
    });
    let free = FreeFunctions {
        bbar: PlanarExpr::new(bbar)?.shared(),
        e1bar: PlanarExpr::new(e1bar)?.shared(),
        e2bar,
    };
    Ok(FieldFamily { map, free })
}

/// Case C family from arbitrary `B̄, Ē₁, Ē₂` (Faraday not enforced).
pub fn build_case_c_raw(map: Arc<CanonicalMap>, free: FreeFunctions) -> Result<FieldFamily> {
    expect_case(&map, Case::C)?;
    Ok(FieldFamily { map, free })
}

/// Case D family from `B̄, Ē₁, Ē₂`. The free functions should be
/// 2π-periodic in x̄ for the field to be single valued.
pub fn build_case_d(map: Arc<CanonicalMap>, free: FreeFunctions) -> Result<FieldFamily> {
    expect_case(&map, Case::D)?;
    Ok(FieldFamily { map, free })
}

impl FieldFamily {
    pub fn case(&self) -> Case {
        self.map.case()
    }

    pub fn map(&self) -> &Arc<CanonicalMap> {
        &self.map
    }

    pub fn free(&self) -> &FreeFunctions {
        &self.free
    }

    /// Replaces the free functions, keeping the parameters.
    pub fn with_free(&self, free: FreeFunctions) -> FieldFamily {
        FieldFamily {
            map: Arc::clone(&self.map),
            free,
        }
    }

    fn eval_a(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        let params = self.map.params();
        let (q, _) = self.map.quadratures(t)?;
        let c = self.map.to_canonical(LabPoint::new(x, y, t))?;
        let (bb, e1b, e2b) = self.free.at(c.xb, c.yb)?;
        let [r, rd, rdd] = params.rho().expect("case A").jet::<3>(t)?;
        let [om, omd] = params.omega().jet::<2>(t)?;
        let [al1, al2] = params.alpha().expect("case A");
        let ([a1, a1d, a1dd], [a2, a2d, a2dd]) = (al1.jet::<3>(t)?, al2.jet::<3>(t)?);
        let k = params.k();
        let ekt = (k * q.tbar).exp();
        let (s, co) = q.phase.sin_cos();
        let (d1, d2) = (q.delta1, q.delta2);
        let (r3, r4) = (r * r * r, r * r * r * r);
        let swirl = r * omd - 2.0 * rd * om;

        let e1 = a1dd + rdd / r * (x - a1) + om * om * x / r4 - swirl * y / r3
            + om / r3 * (r * a2d - rd * a2)
            + k * k * ekt / r3 * (d2 * s - d1 * co)
            - k * om * a2 / r4
            + ekt / r3 * (e1b * co - e2b * s)
            - (r * rd * (y - a2) + r * r * a2d + om * x - k * r * ekt * (d2 * co + d1 * s)) * bb / r4;
        let e2 = a2dd + rdd / r * (y - a2) + om * om * y / r4 + swirl * x / r3
            - om / r3 * (r * a1d - rd * a1)
            - k * k * ekt / r3 * (d2 * co + d1 * s)
            + k * om * a1 / r4
            + ekt / r3 * (e2b * co + e1b * s)
            + (r * rd * (x - a1) + r * r * a1d - om * y - k * r * ekt * (d1 * co - d2 * s)) * bb / r4;
        Ok(FieldValue {
            e1,
            e2,
            b: (bb - 2.0 * om) / (r * r),
        })
    }

    fn eval_b(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        let c = self.map.to_canonical(LabPoint::new(x, y, t))?;
        let (bb, e1b, e2b) = self.free.at(c.xb, c.yb)?;
        let [b1, b2] = self.map.center().expect("case B");
        let ([b1v, b1d, b1dd], [b2v, b2d, b2dd]) = (b1.jet::<3>(t)?, b2.jet::<3>(t)?);
        let (u, v) = (x - b1v, y - b2v);
        Ok(FieldValue {
            e1: b1dd - b2d * bb + u * e1b - v * e2b,
            e2: b2dd + b1d * bb + u * e2b + v * e1b,
            b: bb,
        })
    }

    fn eval_c(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        let c = self.map.to_canonical(LabPoint::new(x, y, t))?;
        let (bb, e1b, e2b) = self.free.at(c.xb, c.yb)?;
        let [a1, a2] = self.map.params().translations();
        let ([_, a1d, a1dd], [a2v, a2d, a2dd]) = (a1.jet::<3>(t)?, a2.jet::<3>(t)?);
        Ok(FieldValue {
            e1: a1dd * y / a2v - a2d * y * bb / a2v + e1b,
            e2: a2dd * y / a2v + a1d * y * bb / a2v + e2b,
            b: bb,
        })
    }

    fn eval_d(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        let c = self.map.to_canonical(LabPoint::new(x, y, t))?;
        let (bb, e1b, e2b) = self.free.at(c.xb, c.yb)?;
        let [g1, g2] = self.map.center().expect("case D");
        let ([g1v, g1d, g1dd], [g2v, g2d, g2dd]) = (g1.jet::<3>(t)?, g2.jet::<3>(t)?);
        let [om, omd, omdd] = self.map.params().omega().jet::<3>(t)?;
        let k = self.map.params().k();
        let tb = c.tb;
        let (u, v) = (x - g1v, y - g2v);
        let ekt = (k * tb).exp();
        let (s, co) = (om * tb).sin_cos();
        let spin = omd * tb * (omd * tb - bb);
        Ok(FieldValue {
            e1: g1dd + 2.0 * omd * g2d * tb - g2d * bb + spin * u - omdd * tb * v + ekt * (e1b * co - e2b * s),
            e2: g2dd - 2.0 * omd * g1d * tb + g1d * bb + spin * v + omdd * tb * u + ekt * (e1b * s + e2b * co),
            b: bb - 2.0 * omd * tb,
        })
    }
}

impl EmField for FieldFamily {
    fn eval(&self, x: f64, y: f64, t: f64) -> Result<FieldValue> {
        match self.map.case() {
            Case::A => self.eval_a(x, y, t),
            Case::B => self.eval_b(x, y, t),
            Case::C => self.eval_c(x, y, t),
            Case::D => self.eval_d(x, y, t),
        }
    }
}
