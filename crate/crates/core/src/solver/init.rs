use super::{ProblemInstance, Segment, SolverConfig, Trajectory};
use crate::conic::ConicBackend;
use crate::linalg::{axpy, distance, dot, norm, scale, sub};
use crate::subproblems::{
    build_polygonal, decode_polygonal, select_vertices, solve_vertex_to_vertex, split_segment,
};
use crate::{Error, Result};

/// Relative slack of the triangle-inequality test in vertex selection.
const COLLINEAR_TOL: f64 = 1e-6;
/// Control points of every initial piece must lie in their safe set to this tolerance.
const MEMBERSHIP_TOL: f64 = 1e-7;
/// Consecutive polygon points closer than this (relative) are treated as coincident.
const COINCIDENT_TOL: f64 = 1e-6;
/// Minimum relative spacing of projected split points along their line.
const SPACING_TOL: f64 = 1e-9;

/// Rest-to-rest initialization.
///
/// The shortest polygonal path through the transition regions is computed first.
/// Its vertices become full stops joined by minimum-time straight segments, which
/// are then split at the remaining (collinear) transition points. A collinear
/// point is projected onto its vertex line before splitting; if a resulting piece
/// leaves its safe set, that point is promoted to a vertex and the group is rebuilt.
pub(super) fn initialize_with(
    problem: &ProblemInstance,
    config: &SolverConfig,
    backend: &dyn ConicBackend,
) -> Result<Trajectory> {
    config.validate()?;
    let (program, layout) = build_polygonal(problem)?;
    let solution = backend.solve(&program, &config.backend);
    let points = decode_polygonal(problem, &layout, &solution)?;
    for i in 1..points.len() {
        let scale_ref = 1.0 + norm(&points[i]);
        if distance(&points[i], &points[i - 1]) <= COINCIDENT_TOL * scale_ref {
            return Err(Error::DegenerateInitialization { index: i });
        }
    }

    let mut is_vertex = vec![config.options.zero_transition_acceleration; points.len()];
    for v in select_vertices(&points, COLLINEAR_TOL) {
        is_vertex[v] = true;
    }

    loop {
        let vertices: Vec<usize> = (0..points.len()).filter(|&i| is_vertex[i]).collect();
        let mut segments = Vec::with_capacity(problem.num_sets());
        let mut promote = Vec::new();
        for w in vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            match build_group(problem, config, backend, &points, a, b)? {
                Ok(group) => segments.extend(group),
                Err(failed) => promote.extend(failed),
            }
        }
        if promote.is_empty() {
            return Trajectory::new(segments);
        }
        log::debug!("promoting transition points {promote:?} to vertices");
        for p in promote {
            is_vertex[p] = true;
        }
    }
}

/// Pieces for the vertex pair `(a, b)`, or the interior indices to promote.
fn build_group(
    problem: &ProblemInstance,
    config: &SolverConfig,
    backend: &dyn ConicBackend,
    points: &[Vec<f64>],
    a: usize,
    b: usize,
) -> Result<std::result::Result<Vec<Segment>, Vec<usize>>> {
    let segment = solve_vertex_to_vertex(
        &points[a],
        &points[b],
        problem.velocity_set(),
        problem.acceleration_set(),
        config.degree,
        config.options.zero_transition_acceleration,
        backend,
        &config.backend,
    )?;
    let interior: Vec<usize> = (a + 1..b).collect();
    let pieces = if interior.is_empty() {
        vec![segment]
    } else {
        let Some(projected) = project_onto_line(&points[a], &points[b], &interior, points) else {
            return Ok(Err(interior));
        };
        match split_segment(&segment, &projected, 1e-9) {
            Ok(pieces) => pieces,
            Err(Error::NotOnLine { index, .. }) => return Ok(Err(vec![interior[index]])),
            Err(Error::NonMonotoneProfile(_)) => return Ok(Err(interior)),
            Err(e) => return Err(e),
        }
    };

    let mut failed = Vec::new();
    for (j, piece) in pieces.iter().enumerate() {
        let set = problem.safe_set(a + j);
        let outside = piece
            .curve
            .control_points()
            .iter()
            .any(|p| set.residual(p).map_or(true, |r| r > MEMBERSHIP_TOL));
        if outside {
            failed.extend([a + j, a + j + 1].into_iter().filter(|&i| i > a && i < b));
        }
    }
    if !failed.is_empty() {
        failed.dedup();
        return Ok(Err(failed));
    }

    let t_min = config.options.min_traversal_time;
    let factor = pieces
        .iter()
        .map(|p| t_min / p.duration)
        .fold(1.0f64, f64::max);
    if factor > 1.0 {
        return Ok(Ok(pieces
            .into_iter()
            .map(|p| Segment::new(p.curve, p.duration * factor))
            .collect::<Result<_>>()?));
    }
    Ok(Ok(pieces))
}

/// Orthogonal projections of `points[interior]` on the line `start → end`, or `None`
/// if they are not strictly ordered inside the segment.
fn project_onto_line(
    start: &[f64],
    end: &[f64],
    interior: &[usize],
    points: &[Vec<f64>],
) -> Option<Vec<Vec<f64>>> {
    let offset = sub(end, start);
    let length = norm(&offset);
    let d = scale(&offset, 1.0 / length);
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(interior.len());
    for &i in interior {
        let along = dot(&sub(&points[i], start), &d);
        if !(along > prev + SPACING_TOL * length && along < length * (1.0 - SPACING_TOL)) {
            return None;
        }
        out.push(axpy(along, &d, start));
        prev = along;
    }
    Some(out)
}
