//! Finite-dimensional convex programs used by the solver.
//!
//! Trajectory segments are degree-`K` Bézier curves. Velocity and acceleration
//! control points stay explicit variables, tied to the position control points
//! by zero-cone difference rows, so every block touches one segment (or one
//! junction) and the programs stay banded in the segment index.
//!
//! - [`build_polygonal`]: shortest polygonal path through the transition regions.
//! - [`solve_vertex_to_vertex`]: minimum-time straight-line segment, solved in 1D.
//! - [`build_fixed_velocity`]: transition velocities fixed, variables `q, q̇, q̈, T`.
//! - [`build_fixed_points`]: transition points fixed, variables `r, ṙ, r̈, S, u`
//!   with `r = q / T`, `S = 1 / T`, and `u ≥ 1 / S` through a rotated cone.

mod fixed_points;
mod fixed_velocity;
mod polygonal;
mod vertex;

use serde::{Deserialize, Serialize};

use crate::bezier::BezierCurve;
use crate::conic::{AffineExpr, ConeBlock, ConicProgram, Solution};
use crate::solver::{Segment, Trajectory};
use crate::{Error, Result};

pub use fixed_points::{build_fixed_points, encode_fixed_points};
pub use fixed_velocity::{build_fixed_velocity, encode_fixed_velocity};
pub use polygonal::{build_polygonal, decode_polygonal, select_vertices, PolygonalLayout};
pub use vertex::{solve_vertex_to_vertex, solve_vertex_to_vertex_nd, split_segment};

/// Lower bound standing in for the strict constraint `S_i > 0`.
pub const MIN_RECIPROCAL_TIME: f64 = 1e-9;

/// Decoded reciprocals below this are treated as a collapsed traversal time.
const DEGENERATE_RECIPROCAL: f64 = 1e-6;

/// Traversal times of the incumbent, used to linearize `T²` and `1/S`.
#[derive(Clone, Debug, PartialEq)]
pub struct NominalTimes(Vec<f64>);

impl NominalTimes {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("nominal times must not be empty"));
        }
        if let Some(t) = times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::invalid(format!(
                "nominal times must be positive, got {t}"
            )));
        }
        Ok(NominalTimes(times))
    }

    pub fn from_trajectory(trajectory: &Trajectory) -> Self {
        NominalTimes(trajectory.durations())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Positions and velocities at the `I − 1` junctions of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionData {
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubproblemKind {
    FixedPoints,
    FixedVelocity,
}

impl SubproblemKind {
    pub fn other(self) -> Self {
        match self {
            SubproblemKind::FixedPoints => SubproblemKind::FixedVelocity,
            SubproblemKind::FixedVelocity => SubproblemKind::FixedPoints,
        }
    }

    pub fn index(self) -> usize {
        match self {
            SubproblemKind::FixedPoints => 0,
            SubproblemKind::FixedVelocity => 1,
        }
    }
}

/// Optional rows shared by both restrictions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubproblemOptions {
    /// Pins the acceleration to zero on both sides of every junction.
    pub zero_transition_acceleration: bool,
    /// Lower bound on every traversal time; `0` disables it.
    pub min_traversal_time: f64,
}

impl SubproblemOptions {
    pub fn validate(&self, degree: usize) -> Result<()> {
        if !(self.min_traversal_time >= 0.0 && self.min_traversal_time.is_finite()) {
            return Err(Error::invalid(
                "minimum traversal time must be finite and nonnegative",
            ));
        }
        if self.zero_transition_acceleration && degree < 5 {
            return Err(Error::invalid(
                "zeroing transition accelerations needs degree ≥ 5 so rest-to-rest segments exist",
            ));
        }
        Ok(())
    }
}

/// First variable index of each family for one segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentVars {
    pub points: usize,
    pub velocities: usize,
    pub accelerations: usize,
    /// `T_i` for fixed-velocity programs, `S_i` for fixed-points programs.
    pub time: usize,
    /// `u_i ≥ 1 / S_i` (fixed-points only).
    pub epigraph: Option<usize>,
}

/// Where each segment's variables live; contiguous per segment.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableLayout {
    pub kind: SubproblemKind,
    pub dim: usize,
    pub degree: usize,
    pub segments: Vec<SegmentVars>,
    pub num_vars: usize,
}

impl VariableLayout {
    pub(crate) fn allocate(
        program: &mut ConicProgram,
        kind: SubproblemKind,
        num_segments: usize,
        degree: usize,
        dim: usize,
    ) -> Self {
        let segments = (0..num_segments)
            .map(|_| {
                let points = program.add_variables((degree + 1) * dim).start;
                let velocities = program.add_variables(degree * dim).start;
                let accelerations = program.add_variables((degree - 1) * dim).start;
                let time = program.add_variables(1).start;
                let epigraph = match kind {
                    SubproblemKind::FixedPoints => Some(program.add_variables(1).start),
                    SubproblemKind::FixedVelocity => None,
                };
                SegmentVars {
                    points,
                    velocities,
                    accelerations,
                    time,
                    epigraph,
                }
            })
            .collect();
        VariableLayout {
            kind,
            dim,
            degree,
            segments,
            num_vars: program.num_vars(),
        }
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    fn vector(&self, start: usize) -> Vec<AffineExpr> {
        (start..start + self.dim).map(AffineExpr::var).collect()
    }

    pub fn point_index(&self, i: usize, k: usize) -> usize {
        self.segments[i].points + k * self.dim
    }

    pub fn velocity_index(&self, i: usize, k: usize) -> usize {
        self.segments[i].velocities + k * self.dim
    }

    pub fn acceleration_index(&self, i: usize, k: usize) -> usize {
        self.segments[i].accelerations + k * self.dim
    }

    pub fn point(&self, i: usize, k: usize) -> Vec<AffineExpr> {
        self.vector(self.point_index(i, k))
    }

    pub fn velocity(&self, i: usize, k: usize) -> Vec<AffineExpr> {
        self.vector(self.velocity_index(i, k))
    }

    pub fn acceleration(&self, i: usize, k: usize) -> Vec<AffineExpr> {
        self.vector(self.acceleration_index(i, k))
    }

    pub fn time(&self, i: usize) -> AffineExpr {
        AffineExpr::var(self.segments[i].time)
    }

    fn read(&self, x: &[f64], start: usize) -> Vec<f64> {
        x[start..start + self.dim].to_vec()
    }

    fn write(&self, x: &mut [f64], start: usize, values: &[f64]) {
        x[start..start + self.dim].copy_from_slice(values);
    }
}

/// `a − b` elementwise for vectors of expressions.
fn diff(a: &[AffineExpr], b: &[AffineExpr]) -> Vec<AffineExpr> {
    a.iter().zip(b).map(|(x, y)| x.clone().minus(y)).collect()
}

/// `expr − value·coef` elementwise, i.e. rows for `expr = value·coef`.
fn equals_scaled(expr: &[AffineExpr], value: &[f64], coef: &AffineExpr) -> Vec<AffineExpr> {
    expr.iter()
        .zip(value)
        .map(|(e, &v)| e.clone().minus(&coef.scaled(v)))
        .collect()
}

fn equals_const(expr: &[AffineExpr], value: &[f64]) -> Vec<AffineExpr> {
    expr.iter()
        .zip(value)
        .map(|(e, &v)| e.clone().with_constant(-v))
        .collect()
}

/// Hodograph rows for segment `i`: `ẋ_k = K(x_{k+1} − x_k)`, `ẍ_k = (K−1)(ẋ_{k+1} − ẋ_k)`.
fn difference_rows(layout: &VariableLayout, i: usize) -> ConeBlock {
    let k_deg = layout.degree;
    let mut rows = Vec::with_capacity((2 * k_deg - 1) * layout.dim);
    for k in 0..k_deg {
        let (lo, hi, d) = (
            layout.point(i, k),
            layout.point(i, k + 1),
            layout.velocity(i, k),
        );
        for j in 0..layout.dim {
            rows.push(
                d[j].clone()
                    .minus(&hi[j].scaled(k_deg as f64))
                    .plus(&lo[j].scaled(k_deg as f64)),
            );
        }
    }
    for k in 0..k_deg - 1 {
        let (lo, hi, dd) = (
            layout.velocity(i, k),
            layout.velocity(i, k + 1),
            layout.acceleration(i, k),
        );
        let c = (k_deg - 1) as f64;
        for j in 0..layout.dim {
            rows.push(dd[j].clone().minus(&hi[j].scaled(c)).plus(&lo[j].scaled(c)));
        }
    }
    ConeBlock::zero(rows)
}

fn check_degree(degree: usize) -> Result<()> {
    if degree < 3 {
        return Err(Error::invalid(format!(
            "Bézier degree must be at least 3, got {degree}"
        )));
    }
    Ok(())
}

fn check_count<T>(what: &str, items: &[T], expected: usize) -> Result<()> {
    if items.len() != expected {
        return Err(Error::invalid(format!(
            "expected {expected} {what}, got {}",
            items.len()
        )));
    }
    Ok(())
}

/// Rebuilds the trajectory from an optimal solution.
///
/// Fixed-velocity programs give `q` and `T` directly. Fixed-points programs give
/// `T = 1/S` and `q = r / S`.
pub fn decode_trajectory(layout: &VariableLayout, solution: &Solution) -> Result<Trajectory> {
    if !solution.is_optimal() {
        return Err(Error::solver(
            solution.status,
            "decode of a non-optimal solution",
        ));
    }
    let x = &solution.primal;
    let segments = (0..layout.num_segments())
        .map(|i| {
            let raw_time = x[layout.segments[i].time];
            let (duration, factor) = match layout.kind {
                SubproblemKind::FixedVelocity => (raw_time, 1.0),
                SubproblemKind::FixedPoints => {
                    if !(raw_time >= DEGENERATE_RECIPROCAL) {
                        return Err(Error::DegenerateTime {
                            segment: i,
                            value: raw_time,
                        });
                    }
                    (1.0 / raw_time, 1.0 / raw_time)
                }
            };
            let points = (0..=layout.degree)
                .map(|k| {
                    layout
                        .read(x, layout.point_index(i, k))
                        .into_iter()
                        .map(|v| v * factor)
                        .collect()
                })
                .collect();
            Segment::new(BezierCurve::new(points)?, duration)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(segments)
}

#[cfg(test)]
mod tests;
