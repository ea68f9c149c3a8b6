use serde::{Deserialize, Serialize};

use crate::bezier::BezierCurve;
use crate::linalg::{distance, scale};
use crate::subproblems::TransitionData;
use crate::{Error, Result};

/// One trajectory piece: a Bézier curve over `s ∈ [0, 1]` traversed in `duration` seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub curve: BezierCurve,
    pub duration: f64,
}

impl Segment {
    pub fn new(curve: BezierCurve, duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid(format!(
                "segment duration must be positive, got {duration}"
            )));
        }
        Ok(Segment { curve, duration })
    }

    /// Velocity control points in physical units: `K(γ_{k+1} − γ_k) / T`.
    pub fn velocity_points(&self) -> Vec<Vec<f64>> {
        match self.curve.derivative() {
            Ok(d) => d
                .control_points()
                .iter()
                .map(|p| scale(p, 1.0 / self.duration))
                .collect(),
            Err(_) => vec![vec![0.0; self.curve.dim()]],
        }
    }

    /// Acceleration control points in physical units (second hodograph over `T²`).
    pub fn acceleration_points(&self) -> Vec<Vec<f64>> {
        let second = self.curve.derivative().and_then(|d| d.derivative());
        match second {
            Ok(dd) => dd
                .control_points()
                .iter()
                .map(|p| scale(p, 1.0 / (self.duration * self.duration)))
                .collect(),
            Err(_) => vec![vec![0.0; self.curve.dim()]],
        }
    }

    /// Start and end velocity in physical units.
    pub fn boundary_velocities(&self) -> (Vec<f64>, Vec<f64>) {
        let v = self.velocity_points();
        (v[0].clone(), v[v.len() - 1].clone())
    }
}

/// Piecewise-Bézier trajectory, one segment per safe set.
///
/// Segment `i` covers `[t_{i−1}, t_i]` with `t_i = t_{i−1} + T_i`, and is evaluated at
/// `s = (t − t_{i−1}) / T_i`. At a knot `t = t_i` queries resolve to segment `i`
/// (the earlier one), so accelerations at knots are left limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    segments: Vec<Segment>,
}

impl Trajectory {
    /// Checks structure only (nonempty, common degree and dimension). See
    /// [`Trajectory::validate_continuity`] for the smoothness invariants.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::invalid("a trajectory needs at least one segment"));
        };
        let (k, n) = (first.curve.degree(), first.curve.dim());
        for seg in &segments {
            if seg.curve.degree() != k {
                return Err(Error::invalid("all segments must share one degree"));
            }
            if seg.curve.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: seg.curve.dim(),
                });
            }
        }
        Ok(Trajectory { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn degree(&self) -> usize {
        self.segments[0].curve.degree()
    }

    pub fn dim(&self) -> usize {
        self.segments[0].curve.dim()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.duration).collect()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// `t_0 = 0, t_1, …, t_I = T`.
    pub fn knots(&self) -> Vec<f64> {
        let mut knots = Vec::with_capacity(self.segments.len() + 1);
        let mut t = 0.0;
        knots.push(t);
        for seg in &self.segments {
            t += seg.duration;
            knots.push(t);
        }
        knots
    }

    /// Segment index and curve parameter for time `t`.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let total = self.total_duration();
        if !(0.0..=total).contains(&t) {
            return Err(Error::invalid(format!("time {t} outside [0, {total}]")));
        }
        let mut start = 0.0;
        let last = self.segments.len() - 1;
        for (i, seg) in self.segments.iter().enumerate() {
            let end = start + seg.duration;
            if t <= end || i == last {
                let s = ((t - start) / seg.duration).clamp(0.0, 1.0);
                return Ok((i, s));
            }
            start = end;
        }
        unreachable!("loop returns on the last segment")
    }

    pub fn position(&self, t: f64) -> Result<Vec<f64>> {
        let (i, s) = self.locate(t)?;
        Ok(self.segments[i].curve.eval_unchecked(s))
    }

    pub fn velocity(&self, t: f64) -> Result<Vec<f64>> {
        let (i, s) = self.locate(t)?;
        let seg = &self.segments[i];
        Ok(match seg.curve.derivative() {
            Ok(d) => scale(&d.eval_unchecked(s), 1.0 / seg.duration),
            Err(_) => vec![0.0; self.dim()],
        })
    }

    pub fn acceleration(&self, t: f64) -> Result<Vec<f64>> {
        let (i, s) = self.locate(t)?;
        let seg = &self.segments[i];
        Ok(match seg.curve.derivative().and_then(|d| d.derivative()) {
            Ok(dd) => scale(&dd.eval_unchecked(s), 1.0 / (seg.duration * seg.duration)),
            Err(_) => vec![0.0; self.dim()],
        })
    }

    /// Largest `(position, velocity)` jump over all junctions.
    pub fn continuity_residuals(&self) -> (f64, f64) {
        self.segments
            .windows(2)
            .fold((0.0f64, 0.0f64), |(p, v), w| {
                let dp = distance(w[0].curve.last_point(), w[1].curve.first_point());
                let dv = distance(&w[0].boundary_velocities().1, &w[1].boundary_velocities().0);
                (p.max(dp), v.max(dv))
            })
    }

    pub fn validate_continuity(&self, position_tol: f64, velocity_tol: f64) -> Result<()> {
        let (p, v) = self.continuity_residuals();
        if p > position_tol {
            return Err(Error::invalid(format!(
                "position jumps by {p:e} at a junction"
            )));
        }
        if v > velocity_tol {
            return Err(Error::invalid(format!(
                "velocity jumps by {v:e} at a junction"
            )));
        }
        Ok(())
    }

    /// Transition points `p_i = q_i(1)` and velocities `v_i = q̇_i(1) / T_i`.
    pub fn transition_data(&self) -> TransitionData {
        let junctions = &self.segments[..self.segments.len() - 1];
        TransitionData {
            points: junctions
                .iter()
                .map(|s| s.curve.last_point().to_vec())
                .collect(),
            velocities: junctions
                .iter()
                .map(|s| s.boundary_velocities().1)
                .collect(),
        }
    }

    /// Same path traversed `factor` times slower.
    pub fn slowed(&self, factor: f64) -> Result<Trajectory> {
        Trajectory::new(
            self.segments
                .iter()
                .map(|s| Segment::new(s.curve.clone(), s.duration * factor))
                .collect::<Result<_>>()?,
        )
    }
}
