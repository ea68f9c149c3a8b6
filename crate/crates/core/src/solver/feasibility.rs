use serde::{Deserialize, Serialize};

use super::{ProblemInstance, Trajectory};
use crate::geometry::ConvexSet;
use crate::linalg::{distance, norm, scale};

/// Largest violation per constraint family; `0` or negative means satisfied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TierResiduals {
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

impl TierResiduals {
    fn new() -> Self {
        TierResiduals {
            position: f64::NEG_INFINITY,
            velocity: f64::NEG_INFINITY,
            acceleration: f64::NEG_INFINITY,
        }
    }

    pub fn max(&self) -> f64 {
        self.position.max(self.velocity).max(self.acceleration)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub tol: f64,
    /// Segment count equals the number of safe sets.
    pub segment_count_ok: bool,
    /// Control points in `Q_i`, `V`, `A` (in physical units). Sufficient by the
    /// convex-hull property.
    pub certificate: TierResiduals,
    /// Dense samples of `q`, `q̇ / T_i`, `q̈ / T_i²`.
    pub sampling: TierResiduals,
    /// Largest gap between the trajectory ends and `q_init`, `q_term`, or zero velocity.
    pub boundary: f64,
    pub position_jump: f64,
    pub velocity_jump: f64,
}

impl FeasibilityReport {
    fn structure_ok(&self) -> bool {
        self.segment_count_ok
            && self.boundary <= self.tol
            && self.position_jump <= self.tol
            && self.velocity_jump <= self.tol
    }

    /// Control-point tier plus boundary and continuity conditions.
    pub fn certificate_ok(&self) -> bool {
        self.structure_ok() && self.certificate.passes(self.tol)
    }

    pub fn sampling_ok(&self) -> bool {
        self.structure_ok() && self.sampling.passes(self.tol)
    }
}

fn worst(acc: &mut f64, set: &ConvexSet, x: &[f64]) {
    let r = set.residual(x).unwrap_or(f64::INFINITY);
    *acc = acc.max(r);
}

/// Checks `trajectory` against the constraints of `problem`.
pub fn check_feasibility(
    trajectory: &Trajectory,
    problem: &ProblemInstance,
    samples_per_segment: usize,
    tol: f64,
) -> FeasibilityReport {
    let segment_count_ok =
        trajectory.num_segments() == problem.num_sets() && trajectory.dim() == problem.dim();
    let mut certificate = TierResiduals::new();
    let mut sampling = TierResiduals::new();
    let v_set = problem.velocity_set();
    let a_set = problem.acceleration_set();

    if segment_count_ok {
        for (seg, q_set) in trajectory.segments().iter().zip(problem.safe_sets()) {
            for p in seg.curve.control_points() {
                worst(&mut certificate.position, q_set, p);
            }
            for v in seg.velocity_points() {
                worst(&mut certificate.velocity, v_set, &v);
            }
            for a in seg.acceleration_points() {
                worst(&mut certificate.acceleration, a_set, &a);
            }

            let vel = seg.curve.derivative().ok();
            let acc = vel.as_ref().and_then(|d| d.derivative().ok());
            let t = seg.duration;
            let count = samples_per_segment.max(2);
            for j in 0..count {
                let s = j as f64 / (count - 1) as f64;
                worst(&mut sampling.position, q_set, &seg.curve.eval_unchecked(s));
                if let Some(d) = &vel {
                    worst(
                        &mut sampling.velocity,
                        v_set,
                        &scale(&d.eval_unchecked(s), 1.0 / t),
                    );
                }
                if let Some(dd) = &acc {
                    worst(
                        &mut sampling.acceleration,
                        a_set,
                        &scale(&dd.eval_unchecked(s), 1.0 / (t * t)),
                    );
                }
            }
        }
    } else {
        certificate = TierResiduals {
            position: f64::INFINITY,
            velocity: f64::INFINITY,
            acceleration: f64::INFINITY,
        };
        sampling = certificate;
    }

    let segments = trajectory.segments();
    let first = &segments[0];
    let last = &segments[segments.len() - 1];
    let boundary = if trajectory.dim() == problem.dim() {
        distance(first.curve.first_point(), problem.q_init())
            .max(distance(last.curve.last_point(), problem.q_term()))
            .max(norm(&first.boundary_velocities().0))
            .max(norm(&last.boundary_velocities().1))
    } else {
        f64::INFINITY
    };
    let (position_jump, velocity_jump) = trajectory.continuity_residuals();

    FeasibilityReport {
        tol,
        segment_count_ok,
        certificate,
        sampling,
        boundary,
        position_jump,
        velocity_jump,
    }
}
