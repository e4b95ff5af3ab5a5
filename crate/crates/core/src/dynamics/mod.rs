//! Trajectory integration in the lab and canonical frames.
//!
//! Lab frame:
//!
//! ```text
//! ẍ = E₁ + ẏ B,   ÿ = E₂ − ẋ B
//! ```
//!
//! Case A canonical frame (primes are `d/dt̄`):
//!
//! ```text
//! x̄'' + 2k x̄' + k² x̄ = Ē₁ + (ȳ' + k ȳ) B̄
//! ȳ'' + 2k ȳ' + k² ȳ = Ē₂ − (x̄' + k x̄) B̄
//! ```

mod transform;

use std::fmt;
use std::io::Write;

pub use transform::transform_trajectory;

use crate::fieldgen::{EmField, FreeFunctions};
use crate::output::fmt_f64;
use crate::{Error, Result};

/// Default fixed step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// One trajectory sample: time, position `(q₁, q₂)` and velocity `(v₁, v₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q1: f64,
    pub q2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl Sample {
    pub fn new(t: f64, state: PhaseState) -> Sample {
        Sample {
            t,
            q1: state.q1,
            q2: state.q2,
            v1: state.v1,
            v2: state.v2,
        }
    }

    pub fn state(&self) -> PhaseState {
        PhaseState::new(self.q1, self.q2, self.v1, self.v2)
    }
}

/// Position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub q1: f64,
    pub q2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl PhaseState {
    pub fn new(q1: f64, q2: f64, v1: f64, v2: f64) -> Self {
        PhaseState { q1, q2, v1, v2 }
    }

    fn to_array(self) -> [f64; 4] {
        [self.q1, self.q2, self.v1, self.v2]
    }

    fn from_array(a: [f64; 4]) -> Self {
        PhaseState::new(a[0], a[1], a[2], a[3])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Canonical,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Canonical => "canonical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorMeta {
    pub method: &'static str,
    pub step: f64,
    /// Max position difference against a half-step run, Richardson scaled.
    pub error_estimate: Option<f64>,
}

/// Time-ordered samples in one frame. Times are strictly increasing and
/// there are at least two samples.
#[derive(Debug, Clone)]
pub struct Trajectory {
    frame: Frame,
    samples: Vec<Sample>,
    meta: IntegratorMeta,
}

impl Trajectory {
    pub fn new(frame: Frame, samples: Vec<Sample>, meta: IntegratorMeta) -> Result<Trajectory> {
        if samples.len() < 2 {
            return Err(Error::InvalidParams("a trajectory needs at least two samples".into()));
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[1].t > w[0].t)) {
            return Err(Error::NonMonotone(format!(
                "trajectory time not increasing at t = {}",
                w[1].t
            )));
        }
        Ok(Trajectory { frame, samples, meta })
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn meta(&self) -> &IntegratorMeta {
        &self.meta
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("non-empty")
    }

    /// Writes `t,q1,q2,v1,v2` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "q1", "q2", "v1", "v2"])?;
        for s in &self.samples {
            w.write_record([s.t, s.q1, s.q2, s.v1, s.v2].map(fmt_f64))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Time span and fixed step. The step is shrunk slightly when needed so
/// that it divides the span evenly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateSpec {
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
    /// Also run at half the step to estimate the global error.
    pub estimate_error: bool,
}

impl IntegrateSpec {
    pub fn new(t0: f64, t1: f64, step: f64) -> Self {
        IntegrateSpec {
            t0,
            t1,
            step,
            estimate_error: true,
        }
    }

    pub fn without_estimate(mut self) -> Self {
        self.estimate_error = false;
        self
    }

    fn steps(&self) -> Result<usize> {
        if !(self.step > 0.0) || !(self.t1 > self.t0) || !self.step.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need t1 > t0 and step > 0, got [{}, {}] with step {}",
                self.t0, self.t1, self.step
            )));
        }
        Ok((((self.t1 - self.t0) / self.step) - 1e-9).ceil().max(1.0) as usize)
    }
}

fn add(a: [f64; 4], b: [f64; 4], h: f64) -> [f64; 4] {
    std::array::from_fn(|i| a[i] + h * b[i])
}

/// Classical RK4 with `n` equal steps over `[t0, t1]`.
fn rk4<F>(rhs: &F, y0: [f64; 4], t0: f64, t1: f64, n: usize) -> Result<Vec<Sample>>
where
    F: Fn(f64, [f64; 4]) -> Result<[f64; 4]>,
{
    let h = (t1 - t0) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push(Sample::new(t0, PhaseState::from_array(y)));
    for i in 0..n {
        let t = t0 + h * i as f64;
        let step = || -> Result<[f64; 4]> {
            let k1 = rhs(t, y)?;
            let k2 = rhs(t + 0.5 * h, add(y, k1, 0.5 * h))?;
            let k3 = rhs(t + 0.5 * h, add(y, k2, 0.5 * h))?;
            let k4 = rhs(t + h, add(y, k3, h))?;
            Ok(std::array::from_fn(|j| {
                y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            }))
        };
        match step() {
            Ok(next) if next.iter().all(|v| v.is_finite()) => y = next,
            Ok(_) => {
                return Err(Error::Integration {
                    last_good_time: t,
                    partial: out,
                    source: Box::new(Error::InvalidParams("non-finite state".into())),
                })
            }
            Err(e) => {
                return Err(Error::Integration {
                    last_good_time: t,
                    partial: out,
                    source: Box::new(e),
                })
            }
        }
        let t_next = if i + 1 == n { t1 } else { t0 + h * (i + 1) as f64 };
        out.push(Sample::new(t_next, PhaseState::from_array(y)));
    }
    Ok(out)
}

fn integrate<F>(rhs: F, frame: Frame, state: PhaseState, spec: IntegrateSpec) -> Result<Trajectory>
where
    F: Fn(f64, [f64; 4]) -> Result<[f64; 4]>,
{
    let n = spec.steps()?;
    let samples = rk4(&rhs, state.to_array(), spec.t0, spec.t1, n)?;
    let error_estimate = if spec.estimate_error {
        let fine = rk4(&rhs, state.to_array(), spec.t0, spec.t1, 2 * n)?;
        let diff = samples
            .iter()
            .zip(fine.iter().step_by(2))
            .map(|(a, b)| (a.q1 - b.q1).abs().max((a.q2 - b.q2).abs()))
            .fold(0.0, f64::max);
        Some(diff * 16.0 / 15.0)
    } else {
        None
    };
    let meta = IntegratorMeta {
        method: "rk4",
        step: (spec.t1 - spec.t0) / n as f64,
        error_estimate,
    };
    Trajectory::new(frame, samples, meta)
}

/// Integrates the Lorentz equations from `state` at `spec.t0`.
pub fn integrate_lab<F: EmField + ?Sized>(field: &F, state: PhaseState, spec: IntegrateSpec) -> Result<Trajectory> {
    let rhs = |t: f64, y: [f64; 4]| -> Result<[f64; 4]> {
        let f = field.eval(y[0], y[1], t)?;
        Ok([y[2], y[3], f.e1 + y[3] * f.b, f.e2 - y[2] * f.b])
    };
    integrate(rhs, Frame::Lab, state, spec)
}

/// Integrates the case A canonical equations; time runs over t̄.
pub fn integrate_canonical_case_a(
    free: &FreeFunctions,
    k: f64,
    state: PhaseState,
    spec: IntegrateSpec,
) -> Result<Trajectory> {
    let rhs = |_: f64, y: [f64; 4]| -> Result<[f64; 4]> {
        let [xb, yb, vx, vy] = y;
        let bb = free.bbar.value(xb, yb)?;
        let e1 = free.e1bar.value(xb, yb)?;
        let e2 = free.e2bar.value(xb, yb)?;
        Ok([
            vx,
            vy,
            e1 + (vy + k * yb) * bb - 2.0 * k * vx - k * k * xb,
            e2 - (vx + k * xb) * bb - 2.0 * k * vy - k * k * yb,
        ])
    };
    integrate(rhs, Frame::Canonical, state, spec)
}
