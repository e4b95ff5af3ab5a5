//! Canonical group coordinates `(x̄, ȳ, t̄)`, in which the generator acts as
//! `∂/∂t̄`: `G x̄ = 0`, `G ȳ = 0`, `G t̄ = 1`.
//!
//! | case | t̄ | x̄ | ȳ |
//! |------|----|----|----|
//! | A | `∫ dμ/ρ²` | `e^{−kt̄}/ρ ((x−α₁) cos T + (y−α₂) sin T) + δ₁` | `e^{−kt̄}/ρ (−(x−α₁) sin T + (y−α₂) cos T) + δ₂` |
//! | B | `atan2(y−β₂, x−β₁)/Ω` | `|(x, y) − β|` | `t` |
//! | C | `y/a₂` | `x − a₁ y/a₂` | `t` |
//! | D | `log|(x, y) − γ|² / 2k` | `atan2(y−γ₂, x−γ₁) − Ω t̄` | `t` |
//!
//! Case A integrals start at the working-interval start and are cached on a
//! uniform grid (see [`QuadTables`]).

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use super::params::{Case, Interval, SymmetryParams, TimeFn};
use crate::interp::hermite;
use crate::quad::{adaptive_simpson, DEFAULT_TOLERANCE};
use crate::{fd, Error, Result};

/// Default number of cache nodes for the case A quadratures.
pub const DEFAULT_CACHE_NODES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl LabPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        LabPoint { x, y, t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPoint {
    pub xb: f64,
    pub yb: f64,
    pub tb: f64,
}

impl CanonicalPoint {
    pub fn new(xb: f64, yb: f64, tb: f64) -> Self {
        CanonicalPoint { xb, yb, tb }
    }
}

/// Partial derivatives of `(x̄, ȳ, t̄)` (rows) with respect to `(x, y, t)`
/// (columns).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian(pub [[f64; 3]; 3]);

impl Jacobian {
    /// Image of the lab tangent `(ẋ, ẏ, 1)`.
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [0, 1, 2].map(|r| m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2])
    }

    /// Solves `J w = v`.
    pub fn solve(&self, v: [f64; 3]) -> Option<[f64; 3]> {
        let m = &self.0;
        let det = |a: [[f64; 3]; 3]| {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        };
        let d = det(*m);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let mut out = [0.0; 3];
        for (c, slot) in out.iter_mut().enumerate() {
            let mut a = *m;
            for r in 0..3 {
                a[r][c] = v[r];
            }
            *slot = det(a) / d;
        }
        Some(out)
    }
}

/// Values of the case A time integrals at one instant: t̄, the rotation
/// phase T, and the translation offsets δ₁, δ₂.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadratures {
    pub tbar: f64,
    pub phase: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl Quadratures {
    fn from_array(a: [f64; 4]) -> Self {
        Quadratures {
            tbar: a[0],
            phase: a[1],
            delta1: a[2],
            delta2: a[3],
        }
    }
}

/// Case A integrands `(t̄', T', δ₁', δ₂')` at time `t`, given t̄(t) and T(t).
fn integrands(params: &SymmetryParams, t: f64, tbar: f64, phase: f64) -> Result<[f64; 4]> {
    let rho = params.rho().expect("case A").value(t)?;
    let omega = params.omega().value(t)?;
    let [al1, al2] = params.alpha().expect("case A");
    let (al1, al2) = (al1.value(t)?, al2.value(t)?);
    let (s, c) = phase.sin_cos();
    let r2 = rho * rho;
    let common = -omega / (r2 * rho) * (-params.k() * tbar).exp();
    Ok([
        1.0 / r2,
        omega / r2,
        common * (al1 * s - al2 * c),
        common * (al1 * c + al2 * s),
    ])
}

/// Cached case A quadratures on a uniform grid over the working interval.
/// Values between nodes come from cubic Hermite interpolation using the
/// exact integrands as node slopes.
#[derive(Debug, Clone)]
pub struct QuadTables {
    start: f64,
    step: f64,
    values: Vec<[f64; 4]>,
    rates: Vec<[f64; 4]>,
}

impl QuadTables {
    fn build(params: &SymmetryParams, nodes: usize) -> Result<QuadTables> {
        if nodes < 2 {
            return Err(Error::InvalidParams("cache needs at least two nodes".into()));
        }
        let iv = params.interval();
        let step = iv.len() / (nodes - 1) as f64;
        let times: Vec<f64> = iv.samples(nodes).collect();
        let tol = DEFAULT_TOLERANCE / (nodes - 1) as f64;
        let rho = params.rho().expect("case A");
        let omega = params.omega();

        let mut values = vec![[0.0; 4]; nodes];
        let mut rates = vec![[0.0; 4]; nodes];
        // t̄ and T only need ρ and Ω
        for i in 0..nodes {
            let r = rho.value(times[i])?;
            rates[i][0] = 1.0 / (r * r);
            rates[i][1] = omega.value(times[i])? / (r * r);
            if i > 0 {
                let (a, b) = (times[i - 1], times[i]);
                let inv = |t: f64| -> Result<f64> { Ok(1.0 / rho.value(t)?.powi(2)) };
                let rot = |t: f64| -> Result<f64> { Ok(omega.value(t)? / rho.value(t)?.powi(2)) };
                values[i][0] = values[i - 1][0] + adaptive_simpson(inv, a, b, tol)?;
                values[i][1] = values[i - 1][1] + adaptive_simpson(rot, a, b, tol)?;
            }
        }
        // δ integrands depend on t̄(μ), T(μ): interpolate those within each segment
        for i in 0..nodes {
            let r = integrands(params, times[i], values[i][0], values[i][1])?;
            rates[i][2] = r[2];
            rates[i][3] = r[3];
            if i > 0 {
                let (a, b) = (times[i - 1], times[i]);
                let (va, vb, ra, rb) = (values[i - 1], values[i], rates[i - 1], rates[i]);
                let inner = |t: f64| {
                    let tbar = hermite(a, b, va[0], vb[0], ra[0], rb[0], t).0;
                    let phase = hermite(a, b, va[1], vb[1], ra[1], rb[1], t).0;
                    (tbar, phase)
                };
                for slot in [2usize, 3] {
                    let f = |t: f64| -> Result<f64> {
                        let (tbar, phase) = inner(t);
                        Ok(integrands(params, t, tbar, phase)?[slot])
                    };
                    values[i][slot] = values[i - 1][slot] + adaptive_simpson(f, a, b, tol)?;
                }
            }
        }
        Ok(QuadTables {
            start: iv.start,
            step,
            values,
            rates,
        })
    }

    fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    fn segment_of(&self, t: f64) -> Result<usize> {
        // one node spacing of extrapolation is tolerated at either end
        let (lo, hi) = (self.start - self.step, self.end() + self.step);
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfInterval {
                t,
                start: self.start,
                end: self.end(),
            });
        }
        let last = self.values.len() - 2;
        let i = ((t - self.start) / self.step).floor();
        Ok((i.max(0.0) as usize).min(last))
    }

    /// Interpolated values and slopes at `t`.
    pub fn lookup(&self, t: f64) -> Result<(Quadratures, Quadratures)> {
        let i = self.segment_of(t)?;
        let a = self.start + self.step * i as f64;
        let b = a + self.step;
        let (va, vb, ra, rb) = (self.values[i], self.values[i + 1], self.rates[i], self.rates[i + 1]);
        let mut v = [0.0; 4];
        let mut d = [0.0; 4];
        for j in 0..4 {
            (v[j], d[j]) = hermite(a, b, va[j], vb[j], ra[j], rb[j], t);
        }
        Ok((Quadratures::from_array(v), Quadratures::from_array(d)))
    }

    /// Time at which the interpolated t̄ equals `tbar`.
    fn invert_tbar(&self, tbar: f64) -> Result<f64> {
        let n = self.values.len();
        let first = self.values[0][0];
        let last = self.values[n - 1][0];
        let slack = 1e-12 * (1.0 + first.abs().max(last.abs()));
        if !(first - slack..=last + slack).contains(&tbar) {
            return Err(Error::OutOfRange {
                what: "canonical time",
                value: tbar,
            });
        }
        let i = self.values.partition_point(|v| v[0] <= tbar).clamp(1, n - 1) - 1;
        let (mut lo, mut hi) = (
            self.start + self.step * i as f64,
            self.start + self.step * (i + 1) as f64,
        );
        let f = |t: f64| -> f64 {
            let a = self.start + self.step * i as f64;
            let (va, vb, ra, rb) = (self.values[i], self.values[i + 1], self.rates[i], self.rates[i + 1]);
            hermite(a, a + self.step, va[0], vb[0], ra[0], rb[0], t).0 - tbar
        };
        // widen slightly so values sitting exactly on the end nodes bracket
        lo -= 1e-9 * self.step;
        hi += 1e-9 * self.step;
        let (mut flo, fhi) = (f(lo), f(hi));
        if flo > 0.0 || fhi < 0.0 {
            return Err(Error::NonMonotone(format!(
                "canonical time table is not monotone near t̄ = {tbar}"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-12 * f64::EPSILON.max(1e-16) {
                break;
            }
            let fm = f(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[derive(Debug, Clone)]
enum MapKind {
    A(QuadTables),
    /// Rotation center β.
    B {
        center: [TimeFn; 2],
        omega: f64,
    },
    C,
    /// Dilatation center γ.
    D {
        center: [TimeFn; 2],
    },
}

/// Forward and inverse canonical coordinate map for one parameter bundle.
#[derive(Debug, Clone)]
pub struct CanonicalMap {
    params: Arc<SymmetryParams>,
    kind: MapKind,
}

fn unwrap_near(value: f64, reference: f64, period: f64) -> f64 {
    value + period * ((reference - value) / period).round()
}

impl CanonicalMap {
    pub fn new(params: Arc<SymmetryParams>) -> Result<CanonicalMap> {
        CanonicalMap::with_cache_nodes(params, DEFAULT_CACHE_NODES)
    }

    pub fn with_cache_nodes(params: Arc<SymmetryParams>, nodes: usize) -> Result<CanonicalMap> {
        let kind = match params.case() {
            Case::A => MapKind::A(QuadTables::build(&params, nodes)?),
            Case::B => {
                let omega = params.omega().value(params.interval().start)?;
                let [a1, a2] = params.translations();
                let center = [
                    TimeFn::new(a2.expr().scale(-1.0 / omega))?,
                    TimeFn::new(a1.expr().scale(1.0 / omega))?,
                ];
                MapKind::B { center, omega }
            }
            Case::C => MapKind::C,
            Case::D => {
                let k = params.k();
                let om = params.omega().expr();
                let [a1, a2] = params.translations();
                let den = om.powi(2).offset(k * k);
                let g1 = a1.expr().scale(k).add(&om.mul(a2.expr())).neg().div(&den);
                let g2 = om.mul(a1.expr()).sub(&a2.expr().scale(k)).div(&den);
                MapKind::D {
                    center: [TimeFn::new(g1)?, TimeFn::new(g2)?],
                }
            }
        };
        Ok(CanonicalMap { params, kind })
    }

    pub fn params(&self) -> &SymmetryParams {
        &self.params
    }

    pub fn shared_params(&self) -> Arc<SymmetryParams> {
        Arc::clone(&self.params)
    }

    pub fn case(&self) -> Case {
        self.params.case()
    }

    /// Moving center of cases B (β) and D (γ).
    pub fn center(&self) -> Option<&[TimeFn; 2]> {
        match &self.kind {
            MapKind::B { center, .. } | MapKind::D { center } => Some(center),
            _ => None,
        }
    }

    /// Cached case A quadratures and their time derivatives at `t`.
    pub fn quadratures(&self, t: f64) -> Result<(Quadratures, Quadratures)> {
        match &self.kind {
            MapKind::A(tables) => tables.lookup(t),
            _ => Err(Error::InvalidParams("time quadratures exist for case A only".into())),
        }
    }

    /// Case A quadratures from direct adaptive integration starting at the
    /// nearest cache node at or below `t`. Slower than [`Self::quadratures`];
    /// meant for accuracy checks of the cache.
    pub fn quadratures_direct(&self, t: f64) -> Result<Quadratures> {
        let MapKind::A(tables) = &self.kind else {
            return Err(Error::InvalidParams("time quadratures exist for case A only".into()));
        };
        let i = tables.segment_of(t)?;
        let a = tables.start + tables.step * i as f64;
        let base = tables.values[i];
        let mut out = base;
        for slot in 0..4 {
            let f = |s: f64| -> Result<f64> {
                let (q, _) = tables.lookup(s)?;
                Ok(integrands(&self.params, s, q.tbar, q.phase)?[slot])
            };
            out[slot] = base[slot] + adaptive_simpson(f, a, t, DEFAULT_TOLERANCE)?;
        }
        Ok(Quadratures::from_array(out))
    }

    fn singular(p: LabPoint, what: &'static str) -> Error {
        Error::Singular {
            x: p.x,
            y: p.y,
            t: p.t,
            what,
        }
    }

    /// Maps a lab point to canonical coordinates. Angles take the principal
    /// branch of `atan2`.
    pub fn to_canonical(&self, p: LabPoint) -> Result<CanonicalPoint> {
        let LabPoint { x, y, t } = p;
        match &self.kind {
            MapKind::A(tables) => {
                let (q, _) = tables.lookup(t)?;
                let rho = self.params.rho().expect("case A").value(t)?;
                let [al1, al2] = self.params.alpha().expect("case A");
                let (u, v) = (x - al1.value(t)?, y - al2.value(t)?);
                let scale = (-self.params.k() * q.tbar).exp() / rho;
                let (s, c) = q.phase.sin_cos();
                Ok(CanonicalPoint {
                    xb: scale * (u * c + v * s) + q.delta1,
                    yb: scale * (-u * s + v * c) + q.delta2,
                    tb: q.tbar,
                })
            }
            MapKind::B { center, omega } => {
                let (dx, dy) = (x - center[0].value(t)?, y - center[1].value(t)?);
                if dx == 0.0 && dy == 0.0 {
                    return Err(Self::singular(p, "rotation center"));
                }
                Ok(CanonicalPoint {
                    xb: dx.hypot(dy),
                    yb: t,
                    tb: dy.atan2(dx) / omega,
                })
            }
            MapKind::C => {
                let [a1, a2] = self.params.translations();
                let (a1, a2) = (a1.value(t)?, a2.value(t)?);
                if a2 == 0.0 {
                    return Err(Self::singular(p, "a2 vanishes"));
                }
                Ok(CanonicalPoint {
                    xb: x - a1 * y / a2,
                    yb: t,
                    tb: y / a2,
                })
            }
            MapKind::D { center } => {
                let (dx, dy) = (x - center[0].value(t)?, y - center[1].value(t)?);
                let r2 = dx * dx + dy * dy;
                if r2 == 0.0 {
                    return Err(Self::singular(p, "dilatation center"));
                }
                let tb = r2.ln() / (2.0 * self.params.k());
                let omega = self.params.omega().value(t)?;
                Ok(CanonicalPoint {
                    xb: dy.atan2(dx) - omega * tb,
                    yb: t,
                    tb,
                })
            }
        }
    }

    /// Like [`Self::to_canonical`], choosing the angular branch closest to
    /// `hint` (cases B and D). Used for continuity along curves.
    pub fn to_canonical_near(&self, p: LabPoint, hint: &CanonicalPoint) -> Result<CanonicalPoint> {
        let mut c = self.to_canonical(p)?;
        match &self.kind {
            MapKind::B { omega, .. } => c.tb = unwrap_near(c.tb, hint.tb, TAU / omega.abs()),
            MapKind::D { .. } => c.xb = unwrap_near(c.xb, hint.xb, TAU),
            _ => {}
        }
        Ok(c)
    }

    /// Inverse map.
    pub fn from_canonical(&self, c: CanonicalPoint) -> Result<LabPoint> {
        let CanonicalPoint { xb, yb, tb } = c;
        match &self.kind {
            MapKind::A(tables) => {
                let t = tables.invert_tbar(tb)?;
                let (q, _) = tables.lookup(t)?;
                let rho = self.params.rho().expect("case A").value(t)?;
                let [al1, al2] = self.params.alpha().expect("case A");
                let scale = rho * (self.params.k() * q.tbar).exp();
                let (s, co) = q.phase.sin_cos();
                let (p, r) = (xb - q.delta1, yb - q.delta2);
                Ok(LabPoint {
                    x: scale * (p * co - r * s) + al1.value(t)?,
                    y: scale * (p * s + r * co) + al2.value(t)?,
                    t,
                })
            }
            MapKind::B { center, omega } => {
                let t = yb;
                let (s, co) = (omega * tb).sin_cos();
                Ok(LabPoint {
                    x: center[0].value(t)? + xb * co,
                    y: center[1].value(t)? + xb * s,
                    t,
                })
            }
            MapKind::C => {
                let t = yb;
                let [a1, a2] = self.params.translations();
                Ok(LabPoint {
                    x: xb + a1.value(t)? * tb,
                    y: a2.value(t)? * tb,
                    t,
                })
            }
            MapKind::D { center } => {
                let t = yb;
                let omega = self.params.omega().value(t)?;
                let r = (self.params.k() * tb).exp();
                let (s, co) = (xb + omega * tb).sin_cos();
                Ok(LabPoint {
                    x: center[0].value(t)? + r * co,
                    y: center[1].value(t)? + r * s,
                    t,
                })
            }
        }
    }

    /// Analytic Jacobian of the forward map at a lab point.
    pub fn jacobian(&self, p: LabPoint) -> Result<Jacobian> {
        let LabPoint { x, y, t } = p;
        match &self.kind {
            MapKind::A(tables) => {
                let (q, dq) = tables.lookup(t)?;
                let [rho, drho] = self.params.rho().expect("case A").jet::<2>(t)?;
                let [al1, al2] = self.params.alpha().expect("case A");
                let ([a1, da1], [a2, da2]) = (al1.jet::<2>(t)?, al2.jet::<2>(t)?);
                let (u, v) = (x - a1, y - a2);
                let k = self.params.k();
                let scale = (-k * q.tbar).exp() / rho;
                let dscale = scale * (-k * dq.tbar - drho / rho);
                let (s, c) = q.phase.sin_cos();
                let rot_x = u * c + v * s;
                let rot_y = -u * s + v * c;
                let dxb_dt = dscale * rot_x + scale * (-da1 * c - da2 * s + dq.phase * rot_y) + dq.delta1;
                let dyb_dt = dscale * rot_y + scale * (da1 * s - da2 * c - dq.phase * rot_x) + dq.delta2;
                Ok(Jacobian([
                    [scale * c, scale * s, dxb_dt],
                    [-scale * s, scale * c, dyb_dt],
                    [0.0, 0.0, dq.tbar],
                ]))
            }
            MapKind::B { center, omega } => {
                let ([b1, db1], [b2, db2]) = (center[0].jet::<2>(t)?, center[1].jet::<2>(t)?);
                let (dx, dy) = (x - b1, y - b2);
                let r2 = dx * dx + dy * dy;
                if r2 == 0.0 {
                    return Err(Self::singular(p, "rotation center"));
                }
                let r = r2.sqrt();
                Ok(Jacobian([
                    [dx / r, dy / r, -(dx * db1 + dy * db2) / r],
                    [0.0, 0.0, 1.0],
                    [
                        -dy / (r2 * omega),
                        dx / (r2 * omega),
                        (dy * db1 - dx * db2) / (r2 * omega),
                    ],
                ]))
            }
            MapKind::C => {
                let [a1, a2] = self.params.translations();
                let ([a1, da1], [a2, da2]) = (a1.jet::<2>(t)?, a2.jet::<2>(t)?);
                if a2 == 0.0 {
                    return Err(Self::singular(p, "a2 vanishes"));
                }
                let a22 = a2 * a2;
                Ok(Jacobian([
                    [1.0, -a1 / a2, -y * (da1 * a2 - a1 * da2) / a22],
                    [0.0, 0.0, 1.0],
                    [0.0, 1.0 / a2, -y * da2 / a22],
                ]))
            }
            MapKind::D { center } => {
                let ([g1, dg1], [g2, dg2]) = (center[0].jet::<2>(t)?, center[1].jet::<2>(t)?);
                let (dx, dy) = (x - g1, y - g2);
                let r2 = dx * dx + dy * dy;
                if r2 == 0.0 {
                    return Err(Self::singular(p, "dilatation center"));
                }
                let k = self.params.k();
                let [om, dom] = self.params.omega().jet::<2>(t)?;
                let tb = [dx / (k * r2), dy / (k * r2), -(dx * dg1 + dy * dg2) / (k * r2)];
                let th = [-dy / r2, dx / r2, (dy * dg1 - dx * dg2) / r2];
                let tbar = r2.ln() / (2.0 * k);
                Ok(Jacobian([
                    [th[0] - om * tb[0], th[1] - om * tb[1], th[2] - dom * tbar - om * tb[2]],
                    [0.0, 0.0, 1.0],
                    tb,
                ]))
            }
        }
    }

    /// Residuals `(G x̄, G ȳ, G t̄ − 1)` at a lab point, with the partial
    /// derivatives taken by central differences of [`Self::to_canonical`].
    pub fn canonical_defining_residual(&self, p: LabPoint) -> Result<[f64; 3]> {
        let g = self.params.generator(p.x, p.y, p.t)?;
        let center = self.to_canonical(p)?;
        let eval = |q: LabPoint| -> Result<[f64; 3]> {
            let c = self.to_canonical_near(q, &center)?;
            Ok([c.xb, c.yb, c.tb])
        };
        let (hx, hy, ht) = (fd::step(p.x), fd::step(p.y), fd::step(p.t));
        let dx = fd::central(|x| eval(LabPoint { x, ..p }), p.x, hx)?;
        let dy = fd::central(|y| eval(LabPoint { y, ..p }), p.y, hy)?;
        let dt = if g.tau != 0.0 {
            fd::central(|t| eval(LabPoint { t, ..p }), p.t, ht)?
        } else {
            [0.0; 3]
        };
        let mut r = [0.0; 3];
        for i in 0..3 {
            r[i] = g.tau * dt[i] + g.eta1 * dx[i] + g.eta2 * dy[i];
        }
        r[2] -= 1.0;
        Ok(r)
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn principal_angle(a: f64) -> f64 {
    let w = a - TAU * ((a + PI) / TAU).floor();
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Canonical interval of the working interval's case A quadrature cache.
pub fn cache_span(map: &CanonicalMap) -> Option<Interval> {
    match &map.kind {
        MapKind::A(tables) => Interval::new(tables.start, tables.end()).ok(),
        _ => None,
    }
}
