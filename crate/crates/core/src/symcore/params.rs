use std::fmt;
use std::sync::Arc;

use crate::{Error, Expression, Result, TIME_VARS};

/// Number of samples used to check that a function does not vanish on the
/// working interval.
const NONVANISHING_SAMPLES: usize = 4096;

/// A function of time together with its first three symbolic derivatives.
#[derive(Debug, Clone)]
pub struct TimeFn {
    jet: Arc<[Expression; 4]>,
}

impl TimeFn {
    pub fn new(expr: Expression) -> Result<TimeFn> {
        if expr.vars() != TIME_VARS {
            return Err(Error::InvalidParams(format!(
                "time function must be declared over (t), got ({})",
                expr.vars().join(", ")
            )));
        }
        let d1 = expr.derive("t", 1)?;
        let d2 = d1.derive("t", 1)?;
        let d3 = d2.derive("t", 1)?;
        Ok(TimeFn {
            jet: Arc::new([expr, d1, d2, d3]),
        })
    }

    pub fn parse(src: &str) -> Result<TimeFn> {
        TimeFn::new(Expression::parse(src, &TIME_VARS)?)
    }

    pub fn constant(value: f64) -> TimeFn {
        TimeFn::new(Expression::constant(value, &TIME_VARS).expect("valid variable list"))
            .expect("constant time function")
    }

    pub fn expr(&self) -> &Expression {
        &self.jet[0]
    }

    /// The `order`-th derivative as an expression (order ≤ 3).
    pub fn derivative(&self, order: usize) -> &Expression {
        &self.jet[order]
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.jet[0].eval(&[t])?)
    }

    /// Value and the first `N - 1` derivatives at `t`.
    pub fn jet<const N: usize>(&self, t: f64) -> Result<[f64; N]> {
        assert!(N <= 4, "derivatives are available up to order 3");
        let mut out = [0.0; N];
        for (slot, e) in out.iter_mut().zip(self.jet.iter()) {
            *slot = e.eval(&[t])?;
        }
        Ok(out)
    }

    /// True when the function does not depend on time.
    pub fn is_constant(&self) -> bool {
        self.jet[1].is_zero()
    }
}

impl fmt::Display for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.jet[0].fmt(f)
    }
}

/// Closed working time interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Interval> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidParams(format!(
                "working interval [{start}, {end}] must be finite and non-empty"
            )));
        }
        Ok(Interval { start, end })
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        (self.start..=self.end).contains(&t)
    }

    /// Evenly spaced sample points including both ends.
    pub fn samples(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let h = self.len() / (n - 1) as f64;
        (0..n).map(move |i| {
            if i + 1 == n {
                self.end
            } else {
                self.start + h * i as f64
            }
        })
    }
}

/// The four generator classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// ρ ≠ 0: quasi-invariance plus rotation, translation and dilatation.
    A,
    /// ρ = k = 0, Ω constant and nonzero: rotation about a moving center.
    B,
    /// ρ = k = Ω = 0, a₂ ≠ 0: time-dependent translation.
    C,
    /// ρ = 0, k ≠ 0: dilatation about a moving center.
    D,
}

impl Case {
    pub fn tag(self) -> &'static str {
        match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
            Case::D => "D",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Case> {
        match s.trim() {
            "A" | "a" => Ok(Case::A),
            "B" | "b" => Ok(Case::B),
            "C" | "c" => Ok(Case::C),
            "D" | "d" => Ok(Case::D),
            other => Err(Error::InvalidParams(format!("unknown case '{other}'"))),
        }
    }
}

/// Values of the generator coefficient functions at one instant.
///
/// `rho[i]`, `omega[i]`, `a1[i]`, `a2[i]` hold the `i`-th time derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coefficients {
    pub k: f64,
    pub rho: [f64; 4],
    pub omega: [f64; 3],
    pub a1: [f64; 3],
    pub a2: [f64; 3],
}

impl Coefficients {
    /// ρρ̇ + k, the common radial rate of η₁ and η₂.
    pub fn radial_rate(&self) -> f64 {
        self.rho[0] * self.rho[1] + self.k
    }

    /// d/dt (ρρ̇) = ρ̇² + ρρ̈.
    pub fn radial_rate_dot(&self) -> f64 {
        self.rho[1] * self.rho[1] + self.rho[0] * self.rho[2]
    }

    /// d²/dt² (ρρ̇) = ρρ⃛ + 3ρ̇ρ̈.
    pub fn radial_rate_ddot(&self) -> f64 {
        self.rho[0] * self.rho[3] + 3.0 * self.rho[1] * self.rho[2]
    }
}

/// Generator components `(τ, η₁, η₂)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorValue {
    pub tau: f64,
    pub eta1: f64,
    pub eta2: f64,
}

/// Parameter bundle fixing the symmetry generator
///
/// ```text
/// τ  = ρ²
/// η₁ = (ρρ̇ + k) x − Ω y + a₁
/// η₂ = Ω x + (ρρ̇ + k) y + a₂
/// ```
///
/// In case A the translations are parameterized through α₁, α₂ with
/// `aᵢ = ρ² α̇ᵢ − (ρρ̇ + k) αᵢ`.
#[derive(Debug, Clone)]
pub struct SymmetryParams {
    case: Case,
    k: f64,
    rho: Option<TimeFn>,
    omega: TimeFn,
    alpha: Option<[TimeFn; 2]>,
    a: [TimeFn; 2],
    interval: Interval,
}

fn check_nonvanishing(f: &TimeFn, interval: Interval, name: &str) -> Result<()> {
    let mut sign = 0.0;
    for t in interval.samples(NONVANISHING_SAMPLES) {
        let v = f.value(t)?;
        if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
            return Err(Error::InvalidParams(format!(
                "{name}(t) vanishes on [{}, {}] (near t = {t})",
                interval.start, interval.end
            )));
        }
        sign = v.signum();
    }
    Ok(())
}

impl SymmetryParams {
    /// Case A: ρ ≠ 0 on the working interval.
    pub fn case_a(
        k: f64,
        rho: TimeFn,
        omega: TimeFn,
        alpha1: TimeFn,
        alpha2: TimeFn,
        interval: Interval,
    ) -> Result<SymmetryParams> {
        check_nonvanishing(&rho, interval, "rho")?;
        let translation = |alpha: &TimeFn| -> Result<TimeFn> {
            // ρ² α̇ − (ρρ̇ + k) α
            let r = rho.expr();
            let rate = r.mul(rho.derivative(1)).offset(k);
            TimeFn::new(r.powi(2).mul(alpha.derivative(1)).sub(&rate.mul(alpha.expr())))
        };
        let a = [translation(&alpha1)?, translation(&alpha2)?];
        Ok(SymmetryParams {
            case: Case::A,
            k,
            rho: Some(rho),
            omega,
            alpha: Some([alpha1, alpha2]),
            a,
            interval,
        })
    }

    /// Case B: pure rotation with constant nonzero rate Ω about the moving
    /// center `(−a₂/Ω, a₁/Ω)`.
    pub fn case_b(omega: f64, a1: TimeFn, a2: TimeFn, interval: Interval) -> Result<SymmetryParams> {
        if omega == 0.0 || !omega.is_finite() {
            return Err(Error::InvalidParams("case B requires a constant nonzero Omega".into()));
        }
        Ok(SymmetryParams {
            case: Case::B,
            k: 0.0,
            rho: None,
            omega: TimeFn::constant(omega),
            alpha: None,
            a: [a1, a2],
            interval,
        })
    }

    /// Case C: pure translation, a₂ ≠ 0 on the working interval.
    pub fn case_c(a1: TimeFn, a2: TimeFn, interval: Interval) -> Result<SymmetryParams> {
        check_nonvanishing(&a2, interval, "a2")?;
        Ok(SymmetryParams {
            case: Case::C,
            k: 0.0,
            rho: None,
            omega: TimeFn::constant(0.0),
            alpha: None,
            a: [a1, a2],
            interval,
        })
    }

    /// Case D: dilatation with strength k ≠ 0 plus rotation and translation.
    pub fn case_d(k: f64, omega: TimeFn, a1: TimeFn, a2: TimeFn, interval: Interval) -> Result<SymmetryParams> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::InvalidParams("case D requires k != 0".into()));
        }
        Ok(SymmetryParams {
            case: Case::D,
            k,
            rho: None,
            omega,
            alpha: None,
            a: [a1, a2],
            interval,
        })
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn rho(&self) -> Option<&TimeFn> {
        self.rho.as_ref()
    }

    pub fn omega(&self) -> &TimeFn {
        &self.omega
    }

    /// α₁, α₂ (case A only).
    pub fn alpha(&self) -> Option<&[TimeFn; 2]> {
        self.alpha.as_ref()
    }

    /// Translation functions a₁, a₂ (derived from α in case A).
    pub fn translations(&self) -> &[TimeFn; 2] {
        &self.a
    }

    /// Coefficient functions and their derivatives at `t`.
    pub fn coefficients(&self, t: f64) -> Result<Coefficients> {
        Ok(Coefficients {
            k: self.k,
            rho: match &self.rho {
                Some(r) => r.jet::<4>(t)?,
                None => [0.0; 4],
            },
            omega: self.omega.jet::<3>(t)?,
            a1: self.a[0].jet::<3>(t)?,
            a2: self.a[1].jet::<3>(t)?,
        })
    }

    /// `(a₁, a₂)` at `t` for case A, computed from α₁, α₂.
    pub fn derived_translations(&self, t: f64) -> Result<(f64, f64)> {
        if self.case != Case::A {
            return Err(Error::InvalidParams(
                "derived translations are defined for case A only".into(),
            ));
        }
        Ok((self.a[0].value(t)?, self.a[1].value(t)?))
    }

    /// Generator components at `(x, y, t)`.
    pub fn generator(&self, x: f64, y: f64, t: f64) -> Result<GeneratorValue> {
        Ok(generator_from(&self.coefficients(t)?, x, y))
    }
}

/// Generator from precomputed coefficients.
pub fn generator_from(c: &Coefficients, x: f64, y: f64) -> GeneratorValue {
    let rate = c.radial_rate();
    GeneratorValue {
        tau: c.rho[0] * c.rho[0],
        eta1: rate * x - c.omega[0] * y + c.a1[0],
        eta2: c.omega[0] * x + rate * y + c.a2[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(s: &str) -> TimeFn {
        TimeFn::parse(s).unwrap()
    }

    fn iv() -> Interval {
        Interval::new(-1.0, 2.0).unwrap()
    }

    fn case_a(k: f64, rho: &str, omega: &str, a1: &str, a2: &str) -> SymmetryParams {
        SymmetryParams::case_a(k, tf(rho), tf(omega), tf(a1), tf(a2), iv()).unwrap()
    }

    #[test]
    fn derived_translation_examples() {
        let p = case_a(0.0, "1", "0", "t", "0");
        assert_eq!(p.derived_translations(0.7).unwrap(), (1.0, 0.0));
        let p = case_a(1.0, "1", "0", "1", "0");
        assert_eq!(p.derived_translations(0.7).unwrap().0, -1.0);
        let p = case_a(0.0, "exp(t)", "0", "1", "0");
        assert!((p.derived_translations(0.0).unwrap().0 + 1.0).abs() < 1e-15);
    }

    #[test]
    fn derived_translation_matches_finite_difference() {
        // a₁ = ρ² α̇₁ − (ρρ̇ + k) α₁ with α̇, ρ̇ from central differences
        let (k, t, h) = (0.4, 0.3, 1e-5);
        let rho = |t: f64| 1.0 + 0.3 * t.sin();
        let alpha = |t: f64| t * t - 0.5 * t;
        let d = |f: &dyn Fn(f64) -> f64| (f(t + h) - f(t - h)) / (2.0 * h);
        let expected = rho(t).powi(2) * d(&alpha) - (rho(t) * d(&rho) + k) * alpha(t);
        let p = case_a(k, "1 + 0.3*sin(t)", "0", "t^2 - 0.5*t", "0");
        assert!((p.derived_translations(t).unwrap().0 - expected).abs() < 1e-9);
    }

    #[test]
    fn generator_examples() {
        let p = case_a(0.0, "1", "0", "0", "0");
        let g = p.generator(3.0, -2.0, 0.5).unwrap();
        assert_eq!((g.tau, g.eta1, g.eta2), (1.0, 0.0, 0.0));

        let p = SymmetryParams::case_b(1.0, tf("0"), tf("0"), iv()).unwrap();
        let g = p.generator(2.0, 3.0, 0.0).unwrap();
        assert_eq!((g.tau, g.eta1, g.eta2), (0.0, -3.0, 2.0));

        let p = SymmetryParams::case_d(2.0, tf("0"), tf("0"), tf("0"), iv()).unwrap();
        let g = p.generator(1.0, -1.0, 0.0).unwrap();
        assert_eq!((g.tau, g.eta1, g.eta2), (0.0, 2.0, -2.0));
    }

    #[test]
    fn constructor_invariants() {
        assert!(SymmetryParams::case_a(0.0, tf("t"), tf("0"), tf("0"), tf("0"), iv()).is_err());
        assert!(SymmetryParams::case_b(0.0, tf("0"), tf("0"), iv()).is_err());
        assert!(SymmetryParams::case_c(tf("0"), tf("sin(t)"), iv()).is_err());
        assert!(SymmetryParams::case_c(tf("0"), tf("2 + sin(t)"), iv()).is_ok());
        assert!(SymmetryParams::case_d(0.0, tf("0"), tf("0"), tf("0"), iv()).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn time_function_jet() {
        let f = tf("t^3");
        assert_eq!(f.jet::<4>(2.0).unwrap(), [8.0, 12.0, 12.0, 6.0]);
        assert!(tf("3").is_constant());
        assert!(!f.is_constant());
    }
}
