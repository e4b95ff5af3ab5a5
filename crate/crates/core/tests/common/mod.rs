#![allow(dead_code)]

use std::sync::Arc;

use lielorentz::fieldgen::{
    build_case_a, build_case_b, build_case_b_raw, build_case_c, build_case_c_raw, build_case_d,
    faraday_complete_case_a, faraday_complete_case_d, FieldFamily, FreeFunctions, PlanarExpr,
};
use lielorentz::symcore::{CanonicalMap, Case, Interval, SymmetryParams, TimeFn};
use lielorentz::verify::{Axis, GridSpec};
use lielorentz::{Expression, PLANE_VARS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CASES: [Case; 4] = [Case::A, Case::B, Case::C, Case::D];

/// Working interval of every random draw.
pub const INTERVAL: (f64, f64) = (0.0, 2.0);

pub fn grid4() -> GridSpec {
    GridSpec {
        x: Axis::new(-1.5, 1.5, 4).unwrap(),
        y: Axis::new(-1.5, 1.5, 4).unwrap(),
        t: Axis::new(0.2, 1.8, 4).unwrap(),
    }
}

pub fn plane(src: &str) -> Expression {
    Expression::parse(src, &PLANE_VARS).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn time(src: &str) -> TimeFn {
    TimeFn::parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// Seeded source of random smooth parameter functions and free functions.
pub struct Draw {
    rng: ChaCha8Rng,
}

impl Draw {
    pub fn new(seed: u64) -> Draw {
        Draw {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn u(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn sign(&mut self) -> f64 {
        if self.rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn int(&mut self, lo: i32, hi: i32) -> i32 {
        self.rng.gen_range(lo..=hi)
    }

    /// `c + a sin(b t + d)` with the given amplitude bounds.
    pub fn wave(&mut self, offset: f64, amp: f64) -> String {
        let a = self.u(-amp, amp);
        let b = self.u(0.5, 2.0);
        let d = self.u(-1.0, 1.0);
        format!("{offset:.6} + {a:.6}*sin({b:.6}*t + {d:.6})")
    }

    /// Small smooth time function mixing a wave and a drift.
    pub fn drift(&mut self, amp: f64) -> String {
        let w = self.wave(0.0, amp);
        let c = self.u(-amp, amp);
        format!("{w} + {c:.6}*t")
    }

    /// Smooth free function of (xb, yb) with amplitude at most about `amp`.
    pub fn planar(&mut self, amp: f64) -> String {
        let a = self.u(-amp, amp);
        let b = self.u(-1.0, 1.0);
        let c = self.u(-1.0, 1.0);
        let d = self.u(-amp, amp);
        let e = self.u(0.3, 1.2);
        format!("{a:.6}*sin({b:.6}*xb + {c:.6}*yb + 0.3) + {d:.6}*cos({e:.6}*yb)*exp(-0.2*xb^2)")
    }

    /// Free function 2π-periodic in xb.
    pub fn periodic(&mut self, amp: f64) -> String {
        let a = self.u(-amp, amp);
        let n = self.int(1, 2);
        let p = self.u(-1.0, 1.0);
        let c = self.u(0.3, 1.2);
        let d = self.u(-amp, amp);
        format!("{a:.6}*sin({n}*xb + {p:.6})*cos({c:.6}*yb) + {d:.6}*cos(xb)")
    }

    pub fn params(&mut self, case: Case) -> SymmetryParams {
        let iv = Interval::new(INTERVAL.0, INTERVAL.1).unwrap();
        match case {
            Case::A => {
                let k = if self.rng.gen_bool(0.3) { 0.0 } else { self.u(-0.8, 0.8) };
                let rho = self.wave(1.0, 0.3);
                let w0 = self.u(-1.0, 1.0);
                let omega = self.wave(w0, 0.5);
                let al1 = self.drift(0.4);
                let al2 = self.drift(0.4);
                SymmetryParams::case_a(k, time(&rho), time(&omega), time(&al1), time(&al2), iv).unwrap()
            }
            Case::B => {
                let omega = self.sign() * self.u(0.5, 1.5);
                let s = 0.15 * omega.abs();
                let a1 = self.drift(s);
                let a2 = self.drift(s);
                SymmetryParams::case_b(omega, time(&a1), time(&a2), iv).unwrap()
            }
            Case::C => {
                let a1 = self.drift(0.5);
                let a2 = self.wave(1.2, 0.5);
                SymmetryParams::case_c(time(&a1), time(&a2), iv).unwrap()
            }
            Case::D => {
                let k = self.sign() * self.u(0.4, 1.2);
                let w0 = self.u(-1.0, 1.0);
                let omega = self.wave(w0, 0.4);
                let a1 = self.drift(0.08);
                let a2 = self.drift(0.08);
                SymmetryParams::case_d(k, time(&omega), time(&a1), time(&a2), iv).unwrap()
            }
        }
    }

    pub fn map(&mut self, case: Case) -> Arc<CanonicalMap> {
        Arc::new(CanonicalMap::new(Arc::new(self.params(case))).unwrap())
    }

    fn free(&mut self, periodic: bool) -> FreeFunctions {
        let f = |d: &mut Draw| if periodic { d.periodic(0.6) } else { d.planar(0.6) };
        let (b, e1, e2) = (f(self), f(self), f(self));
        FreeFunctions::from_exprs(&plane(&b), &plane(&e1), &plane(&e2)).unwrap()
    }

    /// Family with unconstrained free functions (Faraday not imposed).
    pub fn family(&mut self, case: Case) -> FieldFamily {
        let map = self.map(case);
        match case {
            Case::A => build_case_a(map, self.free(false)).unwrap(),
            Case::B => build_case_b_raw(map, self.free(false)).unwrap(),
            Case::C => build_case_c_raw(map, self.free(false)).unwrap(),
            Case::D => build_case_d(map, self.free(true)).unwrap(),
        }
    }

    /// Family whose free functions satisfy Faraday's law through the
    /// case's completion helper.
    pub fn faraday_family(&mut self, case: Case) -> FieldFamily {
        let map = self.map(case);
        match case {
            Case::A => {
                let b = plane(&self.planar(0.6));
                let e1 = plane(&self.planar(0.6));
                let e2 = faraday_complete_case_a(map.params().k(), &b, &e1).unwrap();
                let free = FreeFunctions::new(
                    PlanarExpr::new(b).unwrap().shared(),
                    PlanarExpr::new(e1).unwrap().shared(),
                    e2,
                );
                build_case_a(map, free).unwrap()
            }
            Case::B => {
                let (a, b, c, d) = (self.u(0.5, 1.0), self.u(-0.3, 0.3), self.u(0.5, 1.5), self.u(-0.1, 0.1));
                let psi = plane(&format!("-xb^2*({a:.6} + {b:.6}*sin({c:.6}*yb))/2 + {d:.6}*xb^3"));
                let e1 = plane(&self.planar(0.6));
                build_case_b(map, &psi, &e1).unwrap()
            }
            Case::C => {
                let psi = plane(&self.planar(0.6));
                let v = plane(&self.planar(0.6));
                build_case_c(map, &psi, &v).unwrap()
            }
            Case::D => {
                let e1 = plane(&self.periodic(0.6));
                let e2 = plane(&self.periodic(0.6));
                let b = faraday_complete_case_d(map.params(), &e1, &e2).unwrap();
                let free = FreeFunctions::new(
                    b,
                    PlanarExpr::new(e1).unwrap().shared(),
                    PlanarExpr::new(e2).unwrap().shared(),
                );
                build_case_d(map, free).unwrap()
            }
        }
    }
}

/// Variables of the random expressions.
pub const EXPR_VARS: [&str; 2] = ["x", "t"];

impl Draw {
    /// Random expression over (x, t) of depth at most `depth`, built from
    /// every operator and function of the grammar in forms that stay
    /// finite for all real inputs.
    pub fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return match self.int(0, 3) {
                0 => "t".into(),
                1 => "x".into(),
                2 => format!("{:.4}", self.u(-2.0, 2.0)),
                _ => format!("({:.4}*t)", self.u(-1.5, 1.5)),
            };
        }
        let d = depth - 1;
        match self.int(0, 15) {
            0 => format!("({} + {})", self.expr(d), self.expr(d)),
            1 => format!("({} - {})", self.expr(d), self.expr(d)),
            2 => format!("({} * {})", self.expr(d), self.expr(d)),
            3 => format!("({} / (2 + cos({})))", self.expr(d), self.expr(d)),
            4 => format!("sin({})", self.expr(d)),
            5 => format!("cos({})", self.expr(d)),
            6 => format!("exp(sin({}))", self.expr(d)),
            7 => format!("log(1 + ({})^2)", self.expr(d)),
            8 => format!("sqrt(1 + ({})^2)", self.expr(d)),
            9 => format!("atan({})", self.expr(d)),
            10 => format!("tan(0.5*atan({}))", self.expr(d)),
            11 => format!("({})^{}", self.expr(d), self.int(2, 3)),
            12 => format!("(1.5 + sin({}))^(cos({}))", self.expr(d), self.expr(d)),
            13 => format!("atan2({}, 2 + cos({}))", self.expr(d), self.expr(d)),
            14 => format!("-{}", self.expr(d)),
            _ => format!("(0.5*{})^-1", format_args!("(3 + sin({}))", self.expr(d))),
        }
    }
}

/// Golden corpus of expressions over (x, y, t) for parse/print round trips.
pub const GOLDEN: [&str; 20] = [
    "t^2",
    "sin(t) + 2*t",
    "-x^2",
    "(-x)^2",
    "2^3^2",
    "(2^3)^2",
    "a - (b - c)",
    "a - b - c",
    "a/(b*c)",
    "a/b/c",
    "exp(-2*t)*cos(3*t + 0.5)",
    "atan2(y, x) + atan(y/x)",
    "log(1 + x^2) - sqrt(x^2 + y^2)",
    "tan(x)/(1 + t^2)",
    "-(-x)",
    "x*-y",
    "1e-3*t + .5",
    "pi*x^(y - 1)",
    "(x + y)*(x - y)/(t + 2)",
    "-sin(-t)^2",
];

/// Variables of [`GOLDEN`].
pub const GOLDEN_VARS: [&str; 6] = ["x", "y", "t", "a", "b", "c"];
