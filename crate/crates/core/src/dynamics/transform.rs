use super::{Frame, Sample, Trajectory};
use crate::symcore::{CanonicalMap, CanonicalPoint, LabPoint};
use crate::{Error, Result};

/// Maps a trajectory into the `target` frame. Positions go through the
/// canonical map, velocities through its analytic Jacobian, and the time
/// stamps become the target frame's time variable.
pub fn transform_trajectory(traj: &Trajectory, map: &CanonicalMap, target: Frame) -> Result<Trajectory> {
    if traj.frame() == target {
        return Ok(traj.clone());
    }
    let mut out = Vec::with_capacity(traj.samples().len());
    match target {
        Frame::Canonical => {
            let mut prev: Option<CanonicalPoint> = None;
            for s in traj.samples() {
                let p = LabPoint::new(s.q1, s.q2, s.t);
                let c = match &prev {
                    Some(h) => map.to_canonical_near(p, h)?,
                    None => map.to_canonical(p)?,
                };
                let [dx, dy, dt] = map.jacobian(p)?.apply([s.v1, s.v2, 1.0]);
                if dt == 0.0 {
                    return Err(Error::Singular {
                        x: s.q1,
                        y: s.q2,
                        t: s.t,
                        what: "canonical time is stationary along the trajectory",
                    });
                }
                out.push(Sample {
                    t: c.tb,
                    q1: c.xb,
                    q2: c.yb,
                    v1: dx / dt,
                    v2: dy / dt,
                });
                prev = Some(c);
            }
        }
        Frame::Lab => {
            for s in traj.samples() {
                let p = map.from_canonical(CanonicalPoint::new(s.q1, s.q2, s.t))?;
                let j = map.jacobian(p)?;
                let [dx, dy, dt] = j.solve([s.v1, s.v2, 1.0]).ok_or(Error::Singular {
                    x: p.x,
                    y: p.y,
                    t: p.t,
                    what: "canonical map Jacobian is singular",
                })?;
                if dt == 0.0 {
                    return Err(Error::Singular {
                        x: p.x,
                        y: p.y,
                        t: p.t,
                        what: "lab time is stationary along the trajectory",
                    });
                }
                out.push(Sample {
                    t: p.t,
                    q1: p.x,
                    q2: p.y,
                    v1: dx / dt,
                    v2: dy / dt,
                });
            }
        }
    }
    if let Some(w) = out.windows(2).find(|w| !(w[1].t > w[0].t)) {
        return Err(Error::NonMonotone(format!(
            "{target} time is not increasing along the trajectory (at {})",
            w[1].t
        )));
    }
    Trajectory::new(target, out, traj.meta().clone())
}
