use super::{
    check_count, check_degree, diff, difference_rows, equals_scaled, NominalTimes, SubproblemKind,
    SubproblemOptions, VariableLayout, MIN_RECIPROCAL_TIME,
};
use crate::conic::{AffineExpr, ConeBlock, ConicProgram};
use crate::solver::{ProblemInstance, Trajectory};
use crate::{Error, Result};

/// Restriction with the transition points `p_i` fixed, in velocity-level variables.
///
/// With `r_i = q_i / T_i` and `S_i = 1 / T_i`, the rows per segment `i` are:
/// - `r_{i,k} ∈ S_i·Q_i`, `ṙ_{i,k} ∈ V`, `r̈_{i,k} ∈ T̄_i(2 − T̄_i S_i)·A`;
/// - `ε_S ≤ S_i ≤ 2 / T̄_i` (and `S_i ≤ 1 / t_min` when a minimum time is set);
/// - `2·u_i·S_i ≥ 2`, i.e. `u_i ≥ 1 / S_i`;
/// - hodograph difference rows;
/// - `r_{0,0} = S_0 q_init`, `r_{I−1,K} = S_{I−1} q_term`, `ṙ_{0,0} = ṙ_{I−1,K−1} = 0`;
/// - at junctions: `r_{i,K} = p_i S_i`, `r_{i+1,0} = p_i S_{i+1}`, `ṙ_{i,K−1} = ṙ_{i+1,0}`.
///
/// Objective `Σ u_i`.
pub fn build_fixed_points(
    problem: &ProblemInstance,
    degree: usize,
    points: &[Vec<f64>],
    nominal: &NominalTimes,
    options: &SubproblemOptions,
) -> Result<(ConicProgram, VariableLayout)> {
    check_degree(degree)?;
    options.validate(degree)?;
    let num = problem.num_sets();
    let n = problem.dim();
    check_count("transition points", points, num - 1)?;
    check_count("nominal times", nominal.as_slice(), num)?;
    if let Some(bad) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }

    let mut program = ConicProgram::new();
    let layout =
        VariableLayout::allocate(&mut program, SubproblemKind::FixedPoints, num, degree, n);
    let k_last = degree;
    let unit = AffineExpr::constant(1.0);

    for i in 0..num {
        let s = layout.time(i);
        let t_nom = nominal.as_slice()[i];
        let u = layout.segments[i]
            .epigraph
            .expect("fixed-points layout has epigraph vars");
        program.add_objective_term(u, 1.0)?;

        program.add_block(difference_rows(&layout, i))?;

        if i == 0 {
            let mut rows = equals_scaled(&layout.point(0, 0), problem.q_init(), &s);
            rows.extend(layout.velocity(0, 0));
            program.add_block(ConeBlock::zero(rows))?;
        }
        if i == num - 1 {
            let mut rows = equals_scaled(&layout.point(i, k_last), problem.q_term(), &s);
            rows.extend(layout.velocity(i, k_last - 1));
            program.add_block(ConeBlock::zero(rows))?;
        }

        for k in 0..=k_last {
            program.add_blocks(
                problem
                    .safe_set(i)
                    .scaled_membership(&layout.point(i, k), &s)?,
            )?;
        }
        for k in 0..k_last {
            program.add_blocks(
                problem
                    .velocity_set()
                    .scaled_membership(&layout.velocity(i, k), &unit)?,
            )?;
        }
        // T̄(2 − T̄S) underestimates 1/S, so this is conservative for r̈ ∈ (1/S)·A.
        let accel_scale = s.scaled(-t_nom * t_nom).with_constant(2.0 * t_nom);
        for k in 0..k_last - 1 {
            program.add_blocks(
                problem
                    .acceleration_set()
                    .scaled_membership(&layout.acceleration(i, k), &accel_scale)?,
            )?;
        }
        let mut bounds = vec![
            s.clone().with_constant(-MIN_RECIPROCAL_TIME),
            s.scaled(-1.0).with_constant(2.0 / t_nom),
        ];
        if options.min_traversal_time > 0.0 {
            bounds.push(
                s.scaled(-1.0)
                    .with_constant(1.0 / options.min_traversal_time),
            );
        }
        program.add_block(ConeBlock::nonneg(bounds))?;
        program.add_block(ConeBlock::rotated(vec![
            AffineExpr::var(u),
            s.clone(),
            AffineExpr::constant(std::f64::consts::SQRT_2),
        ]))?;

        if i + 1 < num {
            let p = &points[i];
            let next_s = layout.time(i + 1);
            let mut rows = equals_scaled(&layout.point(i, k_last), p, &s);
            rows.extend(equals_scaled(&layout.point(i + 1, 0), p, &next_s));
            rows.extend(diff(
                &layout.velocity(i, k_last - 1),
                &layout.velocity(i + 1, 0),
            ));
            if options.zero_transition_acceleration {
                rows.extend(layout.acceleration(i, k_last - 2));
                rows.extend(layout.acceleration(i + 1, 0));
            }
            program.add_block(ConeBlock::zero(rows))?;
        }
    }
    Ok((program, layout))
}

/// Variable vector reproducing `trajectory` in a fixed-points layout
/// (`r = q / T`, `S = 1 / T`, `u = T`).
pub fn encode_fixed_points(layout: &VariableLayout, trajectory: &Trajectory) -> Result<Vec<f64>> {
    check_count("segments", trajectory.segments(), layout.num_segments())?;
    let mut x = vec![0.0; layout.num_vars];
    for (i, seg) in trajectory.segments().iter().enumerate() {
        let recip = 1.0 / seg.duration;
        let r = seg
            .curve
            .map_points(|p| p.iter().map(|v| v * recip).collect())?;
        let vel = r.derivative()?;
        let acc = vel.derivative()?;
        for (k, p) in r.control_points().iter().enumerate() {
            layout.write(&mut x, layout.point_index(i, k), p);
        }
        for (k, p) in vel.control_points().iter().enumerate() {
            layout.write(&mut x, layout.velocity_index(i, k), p);
        }
        for (k, p) in acc.control_points().iter().enumerate() {
            layout.write(&mut x, layout.acceleration_index(i, k), p);
        }
        x[layout.segments[i].time] = recip;
        if let Some(u) = layout.segments[i].epigraph {
            x[u] = seg.duration;
        }
    }
    Ok(x)
}
