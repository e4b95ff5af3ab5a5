use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lielorentz::dynamics::{
    integrate_canonical_case_a, integrate_lab, transform_trajectory, Frame, IntegrateSpec, IntegratorMeta, PhaseState,
    Sample, Trajectory,
};
use lielorentz::fieldgen::{EmField, FieldFamily, FieldValue, FnField, LAB_VARS};
use lielorentz::interp::hermite;
use lielorentz::output::fmt_f64;
use lielorentz::symcore::{CanonicalPoint, LabPoint};
use lielorentz::verify::{orbit_symmetry_test, residual_report, OrbitSpec, ReportOptions, ResidualReport};
use lielorentz::{Error, Expression};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{CaseKind, Direction, FrameChoice, RunConfig};
use crate::CliError;

pub struct Ctx {
    pub config: RunConfig,
    pub config_path: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
}

impl Ctx {
    fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(BufWriter::new(f))
    }

    fn report(&self, name: &str) {
        println!("wrote {}", self.out.join(name).display());
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Run(Error::from(e))
}

pub fn build_eval(ctx: &Ctx) -> Result<(), CliError> {
    let fam = ctx.config.family(false)?;
    let grid = ctx.config.grid_spec()?;
    let rows: Vec<_> = (0..grid.len())
        .into_par_iter()
        .map(|n| {
            let (x, y, t) = grid.point(n);
            (x, y, t, fam.eval(x, y, t))
        })
        .collect();
    let mut w = csv_writer(ctx.create("field.csv")?);
    w.write_record(["x", "y", "t", "E1", "E2", "B", "error"])
        .map_err(csv_err)?;
    let mut singular = 0;
    for (x, y, t, r) in rows {
        let (v, err) = match r {
            Ok(v) => ([v.e1, v.e2, v.b].map(fmt_f64), String::new()),
            Err(e) => {
                singular += 1;
                (["nan", "nan", "nan"].map(String::from), e.to_string())
            }
        };
        let rec = [
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(t),
            v[0].clone(),
            v[1].clone(),
            v[2].clone(),
            err,
        ];
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(&ctx.out, e))?;
    ctx.report("field.csv");
    println!("{} grid points, {singular} singular", grid.len());
    Ok(())
}

/// Field under test: the family, optionally with an added E₂ term.
fn checked_field(ctx: &Ctx, fam: FieldFamily) -> Result<Arc<dyn EmField>, CliError> {
    let fam = Arc::new(fam);
    let Some(src) = &ctx.config.check.corrupt_e2 else {
        return Ok(fam);
    };
    let extra = Expression::parse(src, &LAB_VARS).map_err(|e| CliError::Config(format!("check.corrupt_e2: {e}")))?;
    Ok(Arc::new(FnField(move |x, y, t| {
        let v = fam.eval(x, y, t)?;
        Ok(FieldValue {
            e2: v.e2 + extra.eval(&[x, y, t])?,
            ..v
        })
    })))
}

pub fn check(ctx: &Ctx, tol_flag: Option<f64>) -> Result<(), CliError> {
    let chk = &ctx.config.check;
    let fam = ctx.config.family(false)?;
    let map = fam.map().clone();
    let field = checked_field(ctx, fam)?;
    let grid = ctx.config.grid_spec()?;
    let opts = ReportOptions {
        tol: tol_flag.unwrap_or(chk.tol),
        faraday_tol: chk.faraday.then_some(chk.faraday_tol),
        ..ReportOptions::default()
    };
    let rep = residual_report(field.as_ref(), map.params(), grid, opts);
    rep.write_csv(ctx.create("residuals.csv")?)?;
    ctx.report("residuals.csv");
    let mut summary = rep.summary();
    let mut ok = rep.passes();
    if !ok {
        summary.push_str(&worst_offenders(&rep));
    }
    if chk.orbit {
        let (orbit_ok, text) = orbit_check(ctx, field.as_ref(), &map)?;
        ok &= orbit_ok;
        summary.push_str(&text);
    }
    let mut s = ctx.create("summary.txt")?;
    s.write_all(summary.as_bytes()).map_err(|e| CliError::io(&ctx.out, e))?;
    s.flush().map_err(|e| CliError::io(&ctx.out, e))?;
    ctx.report("summary.txt");
    print!("{summary}");
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification("check failed".into()))
    }
}

fn worst_offenders(rep: &ResidualReport) -> String {
    let mut s = String::from("worst offenders:\n");
    let mut comps = vec![
        ("R_B", rep.summary_b(), rep.options.tol),
        ("R_E1", rep.summary_e1(), rep.options.tol),
        ("R_E2", rep.summary_e2(), rep.options.tol),
    ];
    if let (Some(c), Some(tol)) = (rep.summary_faraday(), rep.options.faraday_tol) {
        comps.push(("R_faraday", c, tol));
    }
    for (name, c, tol) in comps {
        if let (true, Some(i)) = (c.max > tol, c.worst) {
            let p = &rep.points[i];
            s.push_str(&format!(
                "  {name}: scaled {:.3e} at (x, y, t) = ({}, {}, {})\n",
                c.max, p.x, p.y, p.t
            ));
        }
    }
    for p in rep.points.iter().filter(|p| p.error.is_some()).take(5) {
        s.push_str(&format!(
            "  singular at ({}, {}, {}): {}\n",
            p.x,
            p.y,
            p.t,
            p.error.as_deref().unwrap_or("")
        ));
    }
    s
}

fn orbit_check(
    ctx: &Ctx,
    field: &dyn EmField,
    map: &lielorentz::symcore::CanonicalMap,
) -> Result<(bool, String), CliError> {
    let chk = &ctx.config.check;
    let params = map.params();
    let iv = params.interval();
    let [t0, t1] = chk
        .orbit_span
        .unwrap_or([iv.start + 0.1 * iv.len(), iv.start + 0.6 * iv.len()]);
    let grid = ctx.config.grid_spec()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut spec = OrbitSpec::new(t0, t1);
    spec.epsilon = chk.epsilon;
    spec.step = chk.orbit_step;
    let mut w = csv_writer(ctx.create("orbit.csv")?);
    w.write_record([
        "state",
        "x",
        "y",
        "vx",
        "vy",
        "residual_eps",
        "residual_half",
        "ratio",
        "pass",
    ])
    .map_err(csv_err)?;
    let (mut done, mut attempts, mut passed) = (0, 0, 0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let pick = |a: lielorentz::verify::Axis, rng: &mut ChaCha8Rng| {
        if a.max > a.min {
            rng.gen_range(a.min..a.max)
        } else {
            a.min
        }
    };
    while done < chk.orbit_states && attempts < 20 * chk.orbit_states {
        attempts += 1;
        let (x, y) = (pick(grid.x, &mut rng), pick(grid.y, &mut rng));
        let state = PhaseState::new(x, y, rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        // states whose orbits reach a singular set are redrawn
        let Ok(r) = orbit_symmetry_test(field, params, state, spec) else {
            continue;
        };
        let ok = r.quadratic();
        passed += ok as usize;
        lo = lo.min(r.ratio);
        hi = hi.max(r.ratio);
        let rec = [
            done.to_string(),
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(state.v1),
            fmt_f64(state.v2),
            fmt_f64(r.residual_eps),
            fmt_f64(r.residual_half),
            fmt_f64(r.ratio),
            ok.to_string(),
        ];
        w.write_record(&rec).map_err(csv_err)?;
        done += 1;
    }
    w.flush().map_err(|e| CliError::io(&ctx.out, e))?;
    ctx.report("orbit.csv");
    let ok = done == chk.orbit_states && passed == done;
    let verdict = if ok { "pass" } else { "FAIL" };
    let text = format!(
        "orbit eps-scaling: {passed} of {done} states with ratio in [3.5, 4.5] (observed [{lo:.4}, {hi:.4}], {} redrawn) {verdict}\n",
        attempts - done
    );
    Ok((ok, text))
}

pub fn integrate(ctx: &Ctx) -> Result<(), CliError> {
    let sec = ctx
        .config
        .integrate
        .clone()
        .ok_or_else(|| CliError::Config("integrate: section required".into()))?;
    let fam = ctx.config.family(false)?;
    let map = fam.map().clone();
    let [x, y, vx, vy] = sec.initial;
    let mut spec = IntegrateSpec::new(sec.t0, sec.t1, sec.step);
    spec.estimate_error = sec.estimate_error;
    let lab = match integrate_lab(&fam, PhaseState::new(x, y, vx, vy), spec) {
        Ok(t) => t,
        Err(Error::Integration {
            last_good_time,
            partial,
            source,
        }) => {
            if let Ok(tr) = Trajectory::new(Frame::Lab, partial, meta(sec.step)) {
                write_trajectory(ctx, "lab.csv", &tr, sec.plot)?;
            }
            return Err(CliError::Run(Error::Integration {
                last_good_time,
                partial: Vec::new(),
                source,
            }));
        }
        Err(e) => return Err(e.into()),
    };
    if sec.frame != FrameChoice::Canonical {
        write_trajectory(ctx, "lab.csv", &lab, sec.plot)?;
    }
    if let Some(e) = lab.meta().error_estimate {
        println!("estimated global error: {e:.3e}");
    }
    if sec.frame == FrameChoice::Lab {
        return Ok(());
    }
    let canon = transform_trajectory(&lab, &map, Frame::Canonical)?;
    write_trajectory(ctx, "canonical.csv", &canon, sec.plot)?;
    if ctx.config.case.kind == CaseKind::A {
        let worst = compare_frames(ctx, &fam, &canon, sec.step)?;
        println!("max deviation between transformed and direct canonical orbits: {worst:.3e}");
    }
    Ok(())
}

fn meta(step: f64) -> IntegratorMeta {
    IntegratorMeta {
        method: "rk4",
        step,
        error_estimate: None,
    }
}

/// Integrates the canonical equations directly from the transformed initial
/// state and writes both orbits side by side.
fn compare_frames(ctx: &Ctx, fam: &FieldFamily, moved: &Trajectory, step: f64) -> Result<f64, CliError> {
    let s0 = moved.first();
    let t1 = moved.last().t;
    let direct = integrate_canonical_case_a(
        fam.free(),
        fam.map().params().k(),
        s0.state(),
        IntegrateSpec::new(s0.t, t1, step).without_estimate(),
    )?;
    let d = direct.samples();
    let h = (t1 - s0.t) / (d.len() - 1) as f64;
    let mut w = csv_writer(ctx.create("frames.csv")?);
    w.write_record([
        "tb",
        "xb_transformed",
        "yb_transformed",
        "xb_direct",
        "yb_direct",
        "deviation",
    ])
    .map_err(csv_err)?;
    let mut worst: f64 = 0.0;
    for s in moved.samples() {
        let i = (((s.t - s0.t) / h).floor().max(0.0) as usize).min(d.len() - 2);
        let (a, b) = (&d[i], &d[i + 1]);
        let xb = hermite(a.t, b.t, a.q1, b.q1, a.v1, b.v1, s.t).0;
        let yb = hermite(a.t, b.t, a.q2, b.q2, a.v2, b.v2, s.t).0;
        let dev = (s.q1 - xb).hypot(s.q2 - yb);
        worst = worst.max(dev);
        w.write_record([s.t, s.q1, s.q2, xb, yb, dev].map(fmt_f64))
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(&ctx.out, e))?;
    ctx.report("frames.csv");
    Ok(worst)
}

fn write_trajectory(ctx: &Ctx, name: &str, tr: &Trajectory, plot: bool) -> Result<(), CliError> {
    tr.write_csv(ctx.create(name)?)?;
    ctx.report(name);
    if plot {
        let stem = name.trim_end_matches(".csv");
        type Column = fn(&Sample) -> (f64, f64);
        let pairs: [(&str, Column); 3] = [
            ("t_q1", |s| (s.t, s.q1)),
            ("t_q2", |s| (s.t, s.q2)),
            ("q1_q2", |s| (s.q1, s.q2)),
        ];
        for (suffix, get) in pairs {
            let file = format!("{stem}_{suffix}.dat");
            let mut w = ctx.create(&file)?;
            for s in tr.samples() {
                let (a, b) = get(s);
                writeln!(w, "{} {}", fmt_f64(a), fmt_f64(b)).map_err(|e| CliError::io(&ctx.out, e))?;
            }
            w.flush().map_err(|e| CliError::io(&ctx.out, e))?;
            ctx.report(&file);
        }
    }
    Ok(())
}

pub fn complete_faraday(ctx: &Ctx) -> Result<(), CliError> {
    let fam = ctx.config.family(true)?;
    let grid = ctx.config.grid_spec()?;
    let free = fam.free();
    let n = grid.x.count * grid.y.count;
    let rows: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (xb, yb) = (grid.x.value(i / grid.y.count), grid.y.value(i % grid.y.count));
            let v = (|| {
                Ok::<_, Error>([
                    free.bbar.value(xb, yb)?,
                    free.e1bar.value(xb, yb)?,
                    free.e2bar.value(xb, yb)?,
                ])
            })();
            (xb, yb, v)
        })
        .collect();
    let mut w = csv_writer(ctx.create("completed.csv")?);
    w.write_record(["xb", "yb", "B_bar", "E1_bar", "E2_bar", "error"])
        .map_err(csv_err)?;
    for (xb, yb, v) in rows {
        let (vals, err) = match v {
            Ok(v) => (v.map(fmt_f64), String::new()),
            Err(e) => (["nan", "nan", "nan"].map(String::from), e.to_string()),
        };
        let [b, e1, e2] = vals;
        w.write_record([fmt_f64(xb), fmt_f64(yb), b, e1, e2, err])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(&ctx.out, e))?;
    ctx.report("completed.csv");
    Ok(())
}

pub fn canon(ctx: &Ctx) -> Result<(), CliError> {
    let sec = ctx
        .config
        .canon
        .clone()
        .ok_or_else(|| CliError::Config("canon: section required".into()))?;
    let map = ctx.config.map()?;
    if !sec.points.is_empty() {
        let mut w = csv_writer(ctx.create("canon.csv")?);
        w.write_record(["x", "y", "t", "xb", "yb", "tb", "error"])
            .map_err(csv_err)?;
        for [a, b, c] in sec.points {
            let res = match sec.direction {
                Direction::ToCanonical => map
                    .to_canonical(LabPoint::new(a, b, c))
                    .map(|q| [a, b, c, q.xb, q.yb, q.tb]),
                Direction::FromCanonical => map
                    .from_canonical(CanonicalPoint::new(a, b, c))
                    .map(|p| [p.x, p.y, p.t, a, b, c]),
            };
            let rec = match res {
                Ok(v) => {
                    let mut r = v.map(fmt_f64).to_vec();
                    r.push(String::new());
                    r
                }
                Err(e) => {
                    let mut r = vec!["nan".to_string(); 6];
                    let at = if sec.direction == Direction::ToCanonical { 0 } else { 3 };
                    for (i, v) in [a, b, c].into_iter().enumerate() {
                        r[at + i] = fmt_f64(v);
                    }
                    r.push(e.to_string());
                    r
                }
            };
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::io(&ctx.out, e))?;
        ctx.report("canon.csv");
    }
    if let Some(p) = &sec.trajectory {
        let path = crate::config::relative_to(&ctx.config_path, p);
        let (from, to) = match sec.direction {
            Direction::ToCanonical => (Frame::Lab, Frame::Canonical),
            Direction::FromCanonical => (Frame::Canonical, Frame::Lab),
        };
        let tr = read_trajectory(&path, from)?;
        let moved = transform_trajectory(&tr, &map, to)?;
        write_trajectory(ctx, "canon_trajectory.csv", &moved, false)?;
    }
    Ok(())
}

fn read_trajectory(path: &Path, frame: Frame) -> Result<Trajectory, CliError> {
    let bad = |msg: String| CliError::Config(format!("canon.trajectory: {}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().take(5).collect::<Vec<_>>() != ["t", "q1", "q2", "v1", "v2"] {
        return Err(bad("expected header t,q1,q2,v1,v2".into()));
    }
    let mut samples = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let mut v = [0.0; 5];
        for (i, slot) in v.iter_mut().enumerate() {
            let field = rec.get(i).unwrap_or("");
            *slot = field.trim().parse().map_err(|_| bad(format!("bad number {field:?}")))?;
        }
        samples.push(Sample::new(v[0], PhaseState::new(v[1], v[2], v[3], v[4])));
    }
    let step = if samples.len() > 1 {
        samples[1].t - samples[0].t
    } else {
        0.0
    };
    Trajectory::new(frame, samples, meta(step)).map_err(|e| bad(e.to_string()))
}
