use super::{check_degree, equals_scaled, MIN_RECIPROCAL_TIME};
use crate::bezier::BezierCurve;
use crate::conic::{AffineExpr, BackendConfig, ConeBlock, ConicBackend, ConicProgram};
use crate::geometry::ConvexSet;
use crate::linalg::{axpy, dot, norm, scale, sub};
use crate::solver::Segment;
use crate::{Error, Result};

/// Control points of the scalar progress `ρ` (in `r`-space), its hodographs, `T` and `S`.
struct ProgressVars {
    rho: usize,
    rho_dot: usize,
    rho_ddot: usize,
    time: usize,
    recip: usize,
}

/// Minimum-time rest-to-rest motion along the straight line from `start` to `end`.
///
/// The motion is a scalar progress curve along `d = (end − start)/L`; velocity
/// control points are bounded by the extents of `V` along `±d` and acceleration
/// control points by `T` times the extents of `A`. `T·S ≥ 1` is a rotated cone.
/// The relaxation is lossless: rescaling `(ρ, S)` by `1/(T·S)` gives `T·S = 1`
/// without changing the position curve, which is what the decode relies on.
///
/// With `zero_end_acceleration`, the first and last acceleration control points are
/// pinned to zero as well.
#[allow(clippy::too_many_arguments)]
pub fn solve_vertex_to_vertex(
    start: &[f64],
    end: &[f64],
    velocity_set: &ConvexSet,
    acceleration_set: &ConvexSet,
    degree: usize,
    zero_end_acceleration: bool,
    backend: &dyn ConicBackend,
    config: &BackendConfig,
) -> Result<Segment> {
    check_degree(degree)?;
    let offset = sub(end, start);
    let length = norm(&offset);
    if !(length > 0.0) {
        return Err(Error::invalid("vertex-to-vertex endpoints coincide"));
    }
    let d = scale(&offset, 1.0 / length);
    let (v_fwd, v_back) = velocity_set.directional_extent(&d)?;
    let (a_fwd, a_back) = acceleration_set.directional_extent(&d)?;
    if !(a_fwd.is_finite() && a_back.is_finite()) {
        return Err(Error::InvalidSet(
            "acceleration set is unbounded along the segment; minimum time is zero".into(),
        ));
    }

    let mut program = ConicProgram::new();
    let vars = ProgressVars {
        rho: program.add_variables(degree + 1).start,
        rho_dot: program.add_variables(degree).start,
        rho_ddot: program.add_variables(degree - 1).start,
        time: program.add_variables(1).start,
        recip: program.add_variables(1).start,
    };
    let rho = |k| AffineExpr::var(vars.rho + k);
    let rho_dot = |k| AffineExpr::var(vars.rho_dot + k);
    let rho_ddot = |k| AffineExpr::var(vars.rho_ddot + k);
    let t = AffineExpr::var(vars.time);
    let s = AffineExpr::var(vars.recip);

    let kf = degree as f64;
    let mut eq = vec![
        rho(0),
        rho(degree).minus(&s.scaled(length)),
        rho_dot(0),
        rho_dot(degree - 1),
    ];
    if zero_end_acceleration {
        eq.push(rho_ddot(0));
        eq.push(rho_ddot(degree - 2));
    }
    for k in 0..degree {
        eq.push(
            rho_dot(k)
                .minus(&rho(k + 1).scaled(kf))
                .plus(&rho(k).scaled(kf)),
        );
    }
    for k in 0..degree - 1 {
        let c = kf - 1.0;
        eq.push(
            rho_ddot(k)
                .minus(&rho_dot(k + 1).scaled(c))
                .plus(&rho_dot(k).scaled(c)),
        );
    }
    program.add_block(ConeBlock::zero(eq))?;

    let mut bounds = Vec::new();
    for k in 0..degree {
        if v_fwd.is_finite() {
            bounds.push(rho_dot(k).scaled(-1.0).with_constant(v_fwd));
        }
        if v_back.is_finite() {
            bounds.push(rho_dot(k).with_constant(v_back));
        }
    }
    for k in 0..degree - 1 {
        bounds.push(t.scaled(a_fwd).minus(&rho_ddot(k)));
        bounds.push(t.scaled(a_back).plus(&rho_ddot(k)));
    }
    bounds.push(s.clone().with_constant(-MIN_RECIPROCAL_TIME));
    program.add_block(ConeBlock::nonneg(bounds))?;
    program.add_block(ConeBlock::rotated(vec![
        t.clone(),
        s.clone(),
        AffineExpr::constant(std::f64::consts::SQRT_2),
    ]))?;
    program.add_objective_term(vars.time, 1.0)?;

    let solution = backend
        .solve(&program, config)
        .into_optimal("vertex-to-vertex program")?;
    let x = &solution.primal;
    let duration = x[vars.time];
    let recip = x[vars.recip];
    if !(recip > 0.0) {
        return Err(Error::DegenerateTime {
            segment: 0,
            value: recip,
        });
    }
    // Position progress σ_k = ρ_k / S is invariant under the lossless rescaling.
    let points = (0..=degree)
        .map(|k| match k {
            0 => start.to_vec(),
            k if k == degree => end.to_vec(),
            k => axpy((x[vars.rho + k] / recip).clamp(0.0, length), &d, start),
        })
        .collect();
    Segment::new(BezierCurve::new(points)?, duration)
}

/// Full `n`-dimensional version of [`solve_vertex_to_vertex`], kept for cross-checks.
///
/// Variables are `r_k ∈ R^n` with `r_0 = S·start`, `r_K = S·end`, `ṙ_k ∈ V`,
/// `r̈_k ∈ T·A`, `ṙ_0 = ṙ_{K−1} = 0`, and `T·S ≥ 1`.
pub fn solve_vertex_to_vertex_nd(
    start: &[f64],
    end: &[f64],
    velocity_set: &ConvexSet,
    acceleration_set: &ConvexSet,
    degree: usize,
    backend: &dyn ConicBackend,
    config: &BackendConfig,
) -> Result<Segment> {
    check_degree(degree)?;
    let n = start.len();
    if norm(&sub(end, start)) == 0.0 {
        return Err(Error::invalid("vertex-to-vertex endpoints coincide"));
    }
    let mut program = ConicProgram::new();
    let r = program.add_variables((degree + 1) * n).start;
    let rd = program.add_variables(degree * n).start;
    let rdd = program.add_variables((degree - 1) * n).start;
    let time = program.add_variables(1).start;
    let recip = program.add_variables(1).start;
    let vec_at = |base: usize, k: usize| -> Vec<AffineExpr> {
        (base + k * n..base + (k + 1) * n)
            .map(AffineExpr::var)
            .collect()
    };
    let t = AffineExpr::var(time);
    let s = AffineExpr::var(recip);
    let kf = degree as f64;

    let mut eq = equals_scaled(&vec_at(r, 0), start, &s);
    eq.extend(equals_scaled(&vec_at(r, degree), end, &s));
    eq.extend(vec_at(rd, 0));
    eq.extend(vec_at(rd, degree - 1));
    for k in 0..degree {
        for ((dot_j, hi), lo) in vec_at(rd, k)
            .into_iter()
            .zip(vec_at(r, k + 1))
            .zip(vec_at(r, k))
        {
            eq.push(dot_j.minus(&hi.scaled(kf)).plus(&lo.scaled(kf)));
        }
    }
    for k in 0..degree - 1 {
        for ((dd, hi), lo) in vec_at(rdd, k)
            .into_iter()
            .zip(vec_at(rd, k + 1))
            .zip(vec_at(rd, k))
        {
            eq.push(dd.minus(&hi.scaled(kf - 1.0)).plus(&lo.scaled(kf - 1.0)));
        }
    }
    program.add_block(ConeBlock::zero(eq))?;
    let unit = AffineExpr::constant(1.0);
    for k in 0..degree {
        program.add_blocks(velocity_set.scaled_membership(&vec_at(rd, k), &unit)?)?;
    }
    for k in 0..degree - 1 {
        program.add_blocks(acceleration_set.scaled_membership(&vec_at(rdd, k), &t)?)?;
    }
    program.add_block(ConeBlock::nonneg(vec![s
        .clone()
        .with_constant(-MIN_RECIPROCAL_TIME)]))?;
    program.add_block(ConeBlock::rotated(vec![
        t,
        s,
        AffineExpr::constant(std::f64::consts::SQRT_2),
    ]))?;
    program.add_objective_term(time, 1.0)?;

    let solution = backend
        .solve(&program, config)
        .into_optimal("n-dimensional vertex-to-vertex program")?;
    let x = &solution.primal;
    let sv = x[recip];
    let points = (0..=degree)
        .map(|k| {
            x[r + k * n..r + (k + 1) * n]
                .iter()
                .map(|v| v / sv)
                .collect()
        })
        .collect();
    Segment::new(BezierCurve::new(points)?, x[time])
}

const MONOTONE_SLACK: f64 = 1e-9;
const BISECTION_STEPS: usize = 200;
const FALLBACK_GRID: usize = 1000;

/// Splits a straight-line segment at points lying on it, returning one piece per
/// interval. Parameter and time are affinely related, so piece `j` covering
/// `[s_{j−1}, s_j]` lasts `(s_j − s_{j−1})·T`.
///
/// Split parameters come from bisection on the scalar progress `σ(s)` along the
/// line. If the progress control points are not monotone (never the case for
/// minimum-time segments) the first crossing is located on a grid instead and a
/// warning is logged.
pub fn split_segment(segment: &Segment, interior: &[Vec<f64>], tol: f64) -> Result<Vec<Segment>> {
    if interior.is_empty() {
        return Ok(vec![segment.clone()]);
    }
    let start = segment.curve.first_point().to_vec();
    let end = segment.curve.last_point().to_vec();
    let offset = sub(&end, &start);
    let length = norm(&offset);
    if !(length > 0.0) {
        return Err(Error::invalid(
            "cannot split a segment with coincident endpoints",
        ));
    }
    let d = scale(&offset, 1.0 / length);
    let progress = segment.curve.project(&start, &d);

    let values: Vec<f64> = progress.control_points().iter().map(|p| p[0]).collect();
    let monotone = values
        .windows(2)
        .all(|w| w[1] - w[0] >= -MONOTONE_SLACK * length.max(1.0));
    if !monotone {
        log::warn!("progress profile is not monotone; locating split points on a grid");
    }

    let mut params = Vec::with_capacity(interior.len());
    let mut lower = 0.0;
    for (index, p) in interior.iter().enumerate() {
        let rel = sub(p, &start);
        let along = dot(&rel, &d);
        let off_line = norm(&axpy(-along, &d, &rel));
        if off_line > tol || along <= 0.0 || along >= length {
            return Err(Error::NotOnLine {
                index,
                distance: off_line.max((-along).max(along - length)),
            });
        }
        let s_star = if monotone {
            bisect(&progress, along, lower, 1.0)
        } else {
            first_crossing(&progress, along, lower)?
        };
        if s_star <= lower {
            return Err(Error::NonMonotoneProfile(format!(
                "split point {index} does not advance along the segment"
            )));
        }
        params.push(s_star);
        lower = s_star;
    }

    let mut pieces = Vec::with_capacity(params.len() + 1);
    let mut rest = segment.curve.clone();
    let mut consumed = 0.0;
    for &s in &params {
        let local = (s - consumed) / (1.0 - consumed);
        let (left, right) = rest.split(local)?;
        pieces.push(Segment::new(left, (s - consumed) * segment.duration)?);
        rest = right;
        consumed = s;
    }
    pieces.push(Segment::new(rest, (1.0 - consumed) * segment.duration)?);
    Ok(pieces)
}

fn progress_at(progress: &BezierCurve, s: f64) -> f64 {
    progress.eval_unchecked(s)[0]
}

fn bisect(progress: &BezierCurve, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if progress_at(progress, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn first_crossing(progress: &BezierCurve, target: f64, from: f64) -> Result<f64> {
    let mut prev = from;
    for j in 1..=FALLBACK_GRID {
        let s = from + (1.0 - from) * j as f64 / FALLBACK_GRID as f64;
        if progress_at(progress, s) >= target {
            return Ok(bisect(progress, target, prev, s));
        }
        prev = s;
    }
    Err(Error::NonMonotoneProfile(format!(
        "progress never reaches {target} after s = {from}"
    )))
}
