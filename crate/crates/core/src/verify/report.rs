use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use super::{determining_residual_with, faraday_residual_with, StepPolicy, DEFAULT_TOL};
use crate::fieldgen::{EmField, FieldValue};
use crate::output::fmt_f64;
use crate::symcore::SymmetryParams;
use crate::{Error, Result};

/// Uniformly spaced samples `min, …, max` (just `min` when `count == 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Axis> {
        if count == 0 || !min.is_finite() || !max.is_finite() || (count > 1 && !(max > min)) {
            return Err(Error::InvalidParams(format!(
                "invalid axis [{min}, {max}] with {count} points"
            )));
        }
        Ok(Axis { min, max, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.min
        } else if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }
}

/// Tensor grid over `(x, y, t)`; points are ordered with `t` varying
/// fastest, then `y`, then `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
    pub t: Axis,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.x.count * self.y.count * self.t.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, n: usize) -> (f64, f64, f64) {
        let k = n % self.t.count;
        let j = (n / self.t.count) % self.y.count;
        let i = n / (self.t.count * self.y.count);
        (self.x.value(i), self.y.value(j), self.t.value(k))
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.len()).map(|n| self.point(n))
    }
}

/// Residuals at one grid point. `error` is set (and the numbers are NaN)
/// when the point could not be evaluated, e.g. at a singular center.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResidual {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub field: FieldValue,
    pub r_b: f64,
    pub r_e1: f64,
    pub r_e2: f64,
    pub r_faraday: Option<f64>,
    pub scale: f64,
    pub error: Option<String>,
}

impl PointResidual {
    fn failed(x: f64, y: f64, t: f64, e: Error) -> Self {
        PointResidual {
            x,
            y,
            t,
            field: FieldValue {
                e1: f64::NAN,
                e2: f64::NAN,
                b: f64::NAN,
            },
            r_b: f64::NAN,
            r_e1: f64::NAN,
            r_e2: f64::NAN,
            r_faraday: None,
            scale: f64::NAN,
            error: Some(e.to_string()),
        }
    }
}

/// Max and RMS of the scaled residual `|R| / scale` over evaluated points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComponentSummary {
    pub max: f64,
    pub rms: f64,
    /// Index into the report's points of the maximum.
    pub worst: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub tol: f64,
    /// Also evaluate Faraday's law with this scaled tolerance.
    pub faraday_tol: Option<f64>,
    pub policy: StepPolicy,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tol: DEFAULT_TOL,
            faraday_tol: None,
            policy: StepPolicy::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub grid: GridSpec,
    pub options: ReportOptions,
    pub points: Vec<PointResidual>,
}

/// Evaluates all residuals on `grid` in parallel (on the current rayon
/// pool); the point order is the grid order regardless of scheduling.
pub fn residual_report<F: EmField + ?Sized>(
    field: &F,
    params: &SymmetryParams,
    grid: GridSpec,
    options: ReportOptions,
) -> ResidualReport {
    let points = (0..grid.len())
        .into_par_iter()
        .map(|n| {
            let (x, y, t) = grid.point(n);
            let eval = || -> Result<PointResidual> {
                let d = determining_residual_with(field, params, x, y, t, options.policy)?;
                let r_faraday = match options.faraday_tol {
                    Some(_) => Some(faraday_residual_with(field, x, y, t, options.policy)?),
                    None => None,
                };
                Ok(PointResidual {
                    x,
                    y,
                    t,
                    field: d.field,
                    r_b: d.r_b,
                    r_e1: d.r_e1,
                    r_e2: d.r_e2,
                    r_faraday,
                    scale: d.scale(),
                    error: None,
                })
            };
            eval().unwrap_or_else(|e| PointResidual::failed(x, y, t, e))
        })
        .collect();
    ResidualReport { grid, options, points }
}

impl ResidualReport {
    fn summarize(&self, pick: impl Fn(&PointResidual) -> Option<f64>) -> ComponentSummary {
        let mut s = ComponentSummary::default();
        let mut sum2 = 0.0;
        let mut n = 0usize;
        for (i, p) in self.points.iter().enumerate() {
            if p.error.is_some() {
                continue;
            }
            let Some(r) = pick(p) else { continue };
            let v = r.abs() / p.scale;
            sum2 += v * v;
            n += 1;
            if s.worst.is_none() || v > s.max || v.is_nan() {
                s.max = v;
                s.worst = Some(i);
            }
        }
        if n > 0 {
            s.rms = (sum2 / n as f64).sqrt();
        }
        s
    }

    pub fn summary_b(&self) -> ComponentSummary {
        self.summarize(|p| Some(p.r_b))
    }

    pub fn summary_e1(&self) -> ComponentSummary {
        self.summarize(|p| Some(p.r_e1))
    }

    pub fn summary_e2(&self) -> ComponentSummary {
        self.summarize(|p| Some(p.r_e2))
    }

    pub fn summary_faraday(&self) -> Option<ComponentSummary> {
        self.options.faraday_tol?;
        Some(self.summarize(|p| p.r_faraday))
    }

    /// Number of grid points that could not be evaluated.
    pub fn failed_points(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }

    pub fn determining_passes(&self) -> bool {
        let tol = self.options.tol;
        [self.summary_b(), self.summary_e1(), self.summary_e2()]
            .iter()
            .all(|s| s.max <= tol)
    }

    pub fn faraday_passes(&self) -> bool {
        match (self.options.faraday_tol, self.summary_faraday()) {
            (Some(tol), Some(s)) => s.max <= tol,
            _ => true,
        }
    }

    /// All requested checks pass and every grid point was evaluated.
    pub fn passes(&self) -> bool {
        self.failed_points() == 0 && self.determining_passes() && self.faraday_passes()
    }

    /// One row per grid point.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "x",
            "y",
            "t",
            "E1",
            "E2",
            "B",
            "R_B",
            "R_E1",
            "R_E2",
            "R_faraday",
            "scale",
            "error",
        ])?;
        for p in &self.points {
            let mut row: Vec<String> = [p.x, p.y, p.t, p.field.e1, p.field.e2, p.field.b, p.r_b, p.r_e1, p.r_e2]
                .into_iter()
                .map(fmt_f64)
                .collect();
            row.push(p.r_faraday.map(fmt_f64).unwrap_or_default());
            row.push(fmt_f64(p.scale));
            row.push(p.error.clone().unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable summary block.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "grid points: {}", self.points.len());
        let _ = writeln!(s, "failed points: {}", self.failed_points());
        let mut line = |name: &str, c: ComponentSummary, tol: f64| {
            let verdict = if c.max <= tol { "pass" } else { "FAIL" };
            let _ = write!(
                s,
                "{name:<10} max {:.3e}  rms {:.3e}  tol {:.1e}  {verdict}",
                c.max, c.rms, tol
            );
            if let Some(i) = c.worst {
                let p = &self.points[i];
                let _ = write!(s, "  worst at ({}, {}, {})", p.x, p.y, p.t);
            }
            s.push('\n');
        };
        let tol = self.options.tol;
        line("R_B", self.summary_b(), tol);
        line("R_E1", self.summary_e1(), tol);
        line("R_E2", self.summary_e2(), tol);
        if let (Some(ft), Some(c)) = (self.options.faraday_tol, self.summary_faraday()) {
            line("R_faraday", c, ft);
        }
        if let Some(p) = self.points.iter().find(|p| p.error.is_some()) {
            let _ = writeln!(
                s,
                "first failure at ({}, {}, {}): {}",
                p.x,
                p.y,
                p.t,
                p.error.as_deref().unwrap_or("")
            );
        }
        s
    }
}
