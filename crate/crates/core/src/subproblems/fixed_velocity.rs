use super::{
    check_count, check_degree, diff, difference_rows, equals_const, equals_scaled, NominalTimes,
    SubproblemKind, SubproblemOptions, VariableLayout,
};
use crate::conic::{AffineExpr, ConeBlock, ConicProgram};
use crate::solver::{ProblemInstance, Trajectory};
use crate::{Error, Result};

/// Restriction with the transition velocities `v_i` fixed.
///
/// Rows, per segment `i` (0-based here, `I` segments):
/// - `q_{i,k} ∈ Q_i`, `q̇_{i,k} ∈ T_i·V`, `q̈_{i,k} ∈ T̄_i(2T_i − T̄_i)·A`, `2T_i ≥ T̄_i`;
/// - hodograph difference rows;
/// - `q_{0,0} = q_init`, `q_{I−1,K} = q_term`, `q̇_{0,0} = q̇_{I−1,K−1} = 0`;
/// - at junctions: `q_{i,K} = q_{i+1,0}`, `q̇_{i,K−1} = v_i T_i`, `q̇_{i+1,0} = v_i T_{i+1}`.
///
/// Objective `Σ T_i`.
pub fn build_fixed_velocity(
    problem: &ProblemInstance,
    degree: usize,
    velocities: &[Vec<f64>],
    nominal: &NominalTimes,
    options: &SubproblemOptions,
) -> Result<(ConicProgram, VariableLayout)> {
    check_degree(degree)?;
    options.validate(degree)?;
    let num = problem.num_sets();
    let n = problem.dim();
    check_count("transition velocities", velocities, num - 1)?;
    check_count("nominal times", nominal.as_slice(), num)?;
    if let Some(bad) = velocities.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }

    let mut program = ConicProgram::new();
    let layout =
        VariableLayout::allocate(&mut program, SubproblemKind::FixedVelocity, num, degree, n);
    let k_last = degree;

    for i in 0..num {
        let t = layout.time(i);
        let t_nom = nominal.as_slice()[i];
        program.add_objective_term(layout.segments[i].time, 1.0)?;

        program.add_block(difference_rows(&layout, i))?;

        if i == 0 {
            program.add_block(ConeBlock::zero(equals_const(
                &layout.point(0, 0),
                problem.q_init(),
            )))?;
            program.add_block(ConeBlock::zero(layout.velocity(0, 0)))?;
        }
        if i == num - 1 {
            program.add_block(ConeBlock::zero(equals_const(
                &layout.point(i, k_last),
                problem.q_term(),
            )))?;
            program.add_block(ConeBlock::zero(layout.velocity(i, k_last - 1)))?;
        }

        let unit = AffineExpr::constant(1.0);
        for k in 0..=k_last {
            program.add_blocks(
                problem
                    .safe_set(i)
                    .scaled_membership(&layout.point(i, k), &unit)?,
            )?;
        }
        for k in 0..k_last {
            program.add_blocks(
                problem
                    .velocity_set()
                    .scaled_membership(&layout.velocity(i, k), &t)?,
            )?;
        }
        // T̄(2T − T̄) underestimates T², so this is conservative for q̈ ∈ T²·A.
        let accel_scale = t.scaled(2.0 * t_nom).with_constant(-t_nom * t_nom);
        for k in 0..k_last - 1 {
            program.add_blocks(
                problem
                    .acceleration_set()
                    .scaled_membership(&layout.acceleration(i, k), &accel_scale)?,
            )?;
        }
        let mut lower = vec![t.scaled(2.0).with_constant(-t_nom)];
        if options.min_traversal_time > 0.0 {
            lower.push(t.clone().with_constant(-options.min_traversal_time));
        }
        program.add_block(ConeBlock::nonneg(lower))?;

        if i + 1 < num {
            let v = &velocities[i];
            let next_t = layout.time(i + 1);
            program.add_block(ConeBlock::zero(diff(
                &layout.point(i, k_last),
                &layout.point(i + 1, 0),
            )))?;
            let mut rows = equals_scaled(&layout.velocity(i, k_last - 1), v, &t);
            rows.extend(equals_scaled(&layout.velocity(i + 1, 0), v, &next_t));
            if options.zero_transition_acceleration {
                rows.extend(layout.acceleration(i, k_last - 2));
                rows.extend(layout.acceleration(i + 1, 0));
            }
            program.add_block(ConeBlock::zero(rows))?;
        }
    }
    Ok((program, layout))
}

/// Variable vector reproducing `trajectory` in a fixed-velocity layout.
pub fn encode_fixed_velocity(layout: &VariableLayout, trajectory: &Trajectory) -> Result<Vec<f64>> {
    check_count("segments", trajectory.segments(), layout.num_segments())?;
    let mut x = vec![0.0; layout.num_vars];
    for (i, seg) in trajectory.segments().iter().enumerate() {
        let vel = seg.curve.derivative()?;
        let acc = vel.derivative()?;
        for (k, p) in seg.curve.control_points().iter().enumerate() {
            layout.write(&mut x, layout.point_index(i, k), p);
        }
        for (k, p) in vel.control_points().iter().enumerate() {
            layout.write(&mut x, layout.velocity_index(i, k), p);
        }
        for (k, p) in acc.control_points().iter().enumerate() {
            layout.write(&mut x, layout.acceleration_index(i, k), p);
        }
        x[layout.segments[i].time] = seg.duration;
    }
    Ok(x)
}
