use super::*;
use crate::bench::{staircase_instance, StaircaseSpec};
use crate::conic::{self, BackendConfig, ClarabelBackend};
use crate::geometry::ConvexSet;
use crate::linalg::distance;
use crate::solver::{self, check_feasibility, ProblemInstance, SolverConfig};

fn ball(n: usize, r: f64) -> ConvexSet {
    ConvexSet::ball(vec![0.0; n], r).unwrap()
}

fn cfg() -> BackendConfig {
    BackendConfig::default()
}

fn staircase(i: usize, m: usize, n: usize) -> ProblemInstance {
    staircase_instance(&StaircaseSpec::new(i, m, n)).unwrap()
}

/// A feasible incumbent with nonzero junction velocities: the first solver iterate.
fn moving_incumbent(problem: &ProblemInstance, degree: usize) -> Trajectory {
    let config = SolverConfig {
        max_subproblems: 1,
        ..SolverConfig::default().with_degree(degree)
    };
    solver::solve(problem, &config).unwrap().trajectory
}

fn build(
    kind: SubproblemKind,
    problem: &ProblemInstance,
    traj: &Trajectory,
    options: &SubproblemOptions,
) -> (ConicProgram, VariableLayout) {
    let data = traj.transition_data();
    let nominal = NominalTimes::from_trajectory(traj);
    match kind {
        SubproblemKind::FixedPoints => {
            build_fixed_points(problem, traj.degree(), &data.points, &nominal, options).unwrap()
        }
        SubproblemKind::FixedVelocity => {
            build_fixed_velocity(problem, traj.degree(), &data.velocities, &nominal, options)
                .unwrap()
        }
    }
}

fn encode(kind: SubproblemKind, layout: &VariableLayout, traj: &Trajectory) -> Vec<f64> {
    match kind {
        SubproblemKind::FixedPoints => encode_fixed_points(layout, traj).unwrap(),
        SubproblemKind::FixedVelocity => encode_fixed_velocity(layout, traj).unwrap(),
    }
}

const KINDS: [SubproblemKind; 2] = [SubproblemKind::FixedPoints, SubproblemKind::FixedVelocity];

#[test]
fn fixed_velocity_variable_count_matches_layout_families() {
    let problem = staircase(2, 4, 2);
    let nominal = NominalTimes::new(vec![1.0, 1.0]).unwrap();
    let (program, layout) = build_fixed_velocity(
        &problem,
        3,
        &[vec![0.0, 0.0]],
        &nominal,
        &SubproblemOptions::default(),
    )
    .unwrap();
    assert_eq!(program.num_vars(), 2 * 4 * 2 + 2 * 3 * 2 + 2 * 2 * 2 + 2);
    assert_eq!(layout.num_vars, 38);

    let (program, _) = build_fixed_points(
        &problem,
        3,
        &[vec![1.0, 0.0]],
        &nominal,
        &SubproblemOptions::default(),
    )
    .unwrap();
    assert_eq!(program.num_vars(), 38 + 2);
}

#[test]
fn layout_is_contiguous_per_segment() {
    let mut program = ConicProgram::new();
    let layout = VariableLayout::allocate(&mut program, SubproblemKind::FixedPoints, 3, 4, 2);
    let mut next = 0;
    for seg in &layout.segments {
        assert_eq!(seg.points, next);
        assert_eq!(seg.velocities, seg.points + 5 * 2);
        assert_eq!(seg.accelerations, seg.velocities + 4 * 2);
        assert_eq!(seg.time, seg.accelerations + 3 * 2);
        assert_eq!(seg.epigraph, Some(seg.time + 1));
        next = seg.time + 2;
    }
    assert_eq!(layout.num_vars, next);
}

#[test]
fn degree_below_three_is_rejected() {
    let problem = staircase(2, 4, 2);
    let nominal = NominalTimes::new(vec![1.0, 1.0]).unwrap();
    let opts = SubproblemOptions::default();
    assert!(build_fixed_velocity(&problem, 2, &[vec![0.0, 0.0]], &nominal, &opts).is_err());
    assert!(build_fixed_points(&problem, 2, &[vec![1.0, 0.0]], &nominal, &opts).is_err());
}

#[test]
fn nominal_times_must_be_positive() {
    assert!(NominalTimes::new(vec![]).is_err());
    assert!(NominalTimes::new(vec![1.0, 0.0]).is_err());
    assert!(NominalTimes::new(vec![1.0, f64::NAN]).is_err());
    assert_eq!(NominalTimes::new(vec![1.0, 2.5]).unwrap().total(), 3.5);
}

#[test]
fn zeroing_accelerations_needs_degree_five() {
    let opts = SubproblemOptions {
        zero_transition_acceleration: true,
        min_traversal_time: 0.0,
    };
    assert!(opts.validate(4).is_err());
    assert!(opts.validate(5).is_ok());
}

#[test]
fn restrictions_admit_the_incumbent() {
    let problem = staircase(4, 6, 2);
    let rest = solver::initialize(&problem, &SolverConfig::default()).unwrap();
    let moving = moving_incumbent(&problem, 5);
    for traj in [&rest, &moving] {
        for kind in KINDS {
            let (program, layout) = build(kind, &problem, traj, &SubproblemOptions::default());
            let x = encode(kind, &layout, traj);
            let residual = program.max_residual(&x);
            assert!(
                residual <= 1e-7,
                "{kind:?}: incumbent residual {residual:e}"
            );
        }
    }
}

#[test]
fn decode_inverts_encode() {
    let problem = staircase(3, 4, 2);
    let traj = moving_incumbent(&problem, 4);
    for kind in KINDS {
        let (program, layout) = build(kind, &problem, &traj, &SubproblemOptions::default());
        let x = encode(kind, &layout, &traj);
        let solution = conic::Solution {
            status: conic::SolveStatus::Optimal,
            objective_value: program.objective_value(&x),
            primal: x,
        };
        let back = decode_trajectory(&layout, &solution).unwrap();
        for (a, b) in back.segments().iter().zip(traj.segments()) {
            assert!((a.duration - b.duration).abs() <= 1e-9 * b.duration);
            for (p, q) in a
                .curve
                .control_points()
                .iter()
                .zip(b.curve.control_points())
            {
                assert!(distance(p, q) <= 1e-9, "{kind:?}");
            }
        }
    }
}

#[test]
fn decode_rejects_non_optimal_and_collapsed_times() {
    let problem = staircase(2, 4, 2);
    let traj = moving_incumbent(&problem, 3);
    let (program, layout) = build(
        SubproblemKind::FixedPoints,
        &problem,
        &traj,
        &SubproblemOptions::default(),
    );
    let failed = conic::Solution::failed(conic::SolveStatus::Infeasible, program.num_vars());
    assert!(matches!(
        decode_trajectory(&layout, &failed),
        Err(Error::Solver { .. })
    ));

    let mut x = encode_fixed_points(&layout, &traj).unwrap();
    x[layout.segments[1].time] = 1e-12;
    let collapsed = conic::Solution {
        status: conic::SolveStatus::Optimal,
        objective_value: 0.0,
        primal: x,
    };
    assert!(matches!(
        decode_trajectory(&layout, &collapsed),
        Err(Error::DegenerateTime { segment: 1, .. })
    ));
}

/// Solves one restriction seeded from `traj` and returns the decoded trajectory.
fn solve_kind(
    kind: SubproblemKind,
    problem: &ProblemInstance,
    traj: &Trajectory,
    options: &SubproblemOptions,
) -> (Trajectory, VariableLayout, conic::Solution) {
    let (program, layout) = build(kind, problem, traj, options);
    let solution = conic::solve(&program, &cfg());
    assert!(solution.is_optimal(), "{kind:?}: {:?}", solution.status);
    let decoded = decode_trajectory(&layout, &solution).unwrap();
    (decoded, layout, solution)
}

#[test]
fn optimal_restrictions_improve_and_stay_feasible() {
    let problem = staircase(5, 4, 2);
    let incumbent = solver::initialize(&problem, &SolverConfig::default()).unwrap();
    for kind in KINDS {
        let (decoded, _, _) = solve_kind(kind, &problem, &incumbent, &SubproblemOptions::default());
        assert!(decoded.total_duration() <= incumbent.total_duration() + 1e-7);
        let report = check_feasibility(&decoded, &problem, 50, 1e-6);
        assert!(report.certificate_ok(), "{kind:?}: {report:?}");
        assert!(report.velocity_jump <= 1e-6);
    }
}

#[test]
fn fixed_points_keeps_points_and_tightens_epigraphs() {
    let problem = staircase(4, 6, 2);
    let incumbent = moving_incumbent(&problem, 5);
    let (decoded, layout, solution) = solve_kind(
        SubproblemKind::FixedPoints,
        &problem,
        &incumbent,
        &SubproblemOptions::default(),
    );
    let fixed = incumbent.transition_data().points;
    for (p, q) in decoded.transition_data().points.iter().zip(&fixed) {
        assert!(distance(p, q) <= 1e-7);
    }
    for seg in &layout.segments {
        let u = solution.primal[seg.epigraph.unwrap()];
        let s = solution.primal[seg.time];
        assert!((u * s - 1.0).abs() <= 1e-6, "u·S = {}", u * s);
    }
    let objective: f64 = layout
        .segments
        .iter()
        .map(|s| 1.0 / solution.primal[s.time])
        .sum();
    assert!(objective <= incumbent.total_duration() + 1e-7);
}

#[test]
fn fixed_velocity_keeps_velocities() {
    let problem = staircase(4, 6, 2);
    let incumbent = moving_incumbent(&problem, 5);
    let (decoded, _, _) = solve_kind(
        SubproblemKind::FixedVelocity,
        &problem,
        &incumbent,
        &SubproblemOptions::default(),
    );
    let fixed = incumbent.transition_data().velocities;
    for (v, w) in decoded.transition_data().velocities.iter().zip(&fixed) {
        assert!(distance(v, w) <= 1e-7);
    }
}

#[test]
fn decoded_accelerations_respect_the_original_constraint() {
    let problem = staircase(5, 6, 2);
    let incumbent = moving_incumbent(&problem, 5);
    for kind in KINDS {
        let (decoded, _, _) = solve_kind(kind, &problem, &incumbent, &SubproblemOptions::default());
        for seg in decoded.segments() {
            for a in seg.acceleration_points() {
                assert!(problem.acceleration_set().contains(&a, 1e-6).unwrap());
            }
        }
    }
}

#[test]
fn resolving_from_own_output_is_admissible() {
    let problem = staircase(4, 4, 2);
    let incumbent = moving_incumbent(&problem, 5);
    for kind in KINDS {
        let opts = SubproblemOptions::default();
        let (first, _, _) = solve_kind(kind, &problem, &incumbent, &opts);
        let (program, layout) = build(kind, &problem, &first, &opts);
        let x = encode(kind, &layout, &first);
        assert!(program.max_residual(&x) <= 1e-7);
        let (second, _, _) = solve_kind(kind, &problem, &first, &opts);
        assert!(second.total_duration() <= first.total_duration() + 1e-7);
    }
}

#[test]
fn optional_rows_are_enforced() {
    let problem = staircase(3, 4, 2);
    let incumbent = moving_incumbent(&problem, 5);
    for kind in KINDS {
        let t_min = incumbent
            .durations()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            * 0.9;
        let opts = SubproblemOptions {
            zero_transition_acceleration: false,
            min_traversal_time: t_min,
        };
        let (decoded, _, _) = solve_kind(kind, &problem, &incumbent, &opts);
        for d in decoded.durations() {
            assert!(d >= t_min * (1.0 - 1e-7), "{kind:?}: {d} < {t_min}");
        }
    }

    let rest = solver::initialize(
        &problem,
        &SolverConfig {
            options: solver::SolverOptions {
                zero_transition_acceleration: true,
                ..Default::default()
            },
            ..SolverConfig::default()
        },
    )
    .unwrap();
    let opts = SubproblemOptions {
        zero_transition_acceleration: true,
        min_traversal_time: 0.0,
    };
    for kind in KINDS {
        let (program, layout) = build(kind, &problem, &rest, &opts);
        assert!(program.max_residual(&encode(kind, &layout, &rest)) <= 1e-7);
        let (decoded, _, _) = solve_kind(kind, &problem, &rest, &opts);
        for w in decoded.segments().windows(2) {
            let left = w[0].acceleration_points();
            assert!(crate::linalg::norm(&left[left.len() - 1]) <= 1e-6);
            assert!(crate::linalg::norm(&w[1].acceleration_points()[0]) <= 1e-6);
        }
    }
}

// Polygonal path.

fn solve_polygonal(problem: &ProblemInstance) -> (Vec<Vec<f64>>, f64) {
    let (program, layout) = build_polygonal(problem).unwrap();
    let solution = conic::solve(&program, &cfg());
    let points = decode_polygonal(problem, &layout, &solution).unwrap();
    (points, solution.objective_value)
}

#[test]
fn polygonal_single_set_is_the_straight_segment() {
    let problem = ProblemInstance::new(
        vec![ConvexSet::axis_box(&[-1.0, -1.0], &[3.0, 3.0]).unwrap()],
        vec![0.0, 0.0],
        vec![2.0, 1.0],
        ball(2, 10.0),
        ball(2, 1.0),
    )
    .unwrap();
    let (points, length) = solve_polygonal(&problem);
    assert_eq!(points, vec![vec![0.0, 0.0], vec![2.0, 1.0]]);
    assert!((length - 5f64.sqrt()).abs() <= 1e-6);
}

#[test]
fn polygonal_collinear_boxes_give_a_straight_line() {
    let problem = ProblemInstance::new(
        vec![
            ConvexSet::axis_box(&[-1.0, -1.0], &[2.0, 1.0]).unwrap(),
            ConvexSet::axis_box(&[1.0, -1.0], &[4.0, 1.0]).unwrap(),
        ],
        vec![0.0, 0.0],
        vec![3.0, 0.0],
        ball(2, 10.0),
        ball(2, 1.0),
    )
    .unwrap();
    let (points, length) = solve_polygonal(&problem);
    assert!((length - 3.0).abs() <= 1e-6);
    assert!(points[1][1].abs() <= 1e-4);
}

#[test]
fn polygonal_staircase_beats_the_corner_path() {
    let problem = staircase(2, 4, 2);
    let (program, layout) = build_polygonal(&problem).unwrap();
    let solution = conic::solve(&program, &cfg());
    let points = decode_polygonal(&problem, &layout, &solution).unwrap();
    assert!(solution.objective_value <= 2.0 + 1e-7);
    for set in [problem.safe_set(0), problem.safe_set(1)] {
        assert!(set.contains(&points[1], 1e-6).unwrap());
    }
    // Re-encoding the decoded points satisfies every row.
    let mut x = vec![0.0; program.num_vars()];
    for (i, p) in points.iter().enumerate() {
        x[layout.points[i]..layout.points[i] + 2].copy_from_slice(p);
    }
    for (i, &ell) in layout.lengths.iter().enumerate() {
        x[ell] = distance(&points[i + 1], &points[i]);
    }
    assert!(program.max_residual(&x) <= 1e-7);
}

#[test]
fn polygonal_decode_propagates_failure() {
    let problem = staircase(2, 4, 2);
    let (program, layout) = build_polygonal(&problem).unwrap();
    let failed = conic::Solution::failed(conic::SolveStatus::NumericalFailure, program.num_vars());
    assert!(decode_polygonal(&problem, &layout, &failed).is_err());
}

#[test]
fn vertex_selection_examples() {
    let collinear = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
    assert_eq!(select_vertices(&collinear, 1e-9), vec![0, 2]);
    let corner = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    assert_eq!(select_vertices(&corner, 1e-9), vec![0, 1, 2]);
    assert_eq!(select_vertices(&[vec![0.0], vec![1.0]], 1e-9), vec![0, 1]);
}

#[test]
fn vertex_selection_drops_a_pass_through_point() {
    // A corridor where the first transition region sits on the line from the start to
    // the corner of the L: only p_1 is not a vertex.
    let problem = ProblemInstance::new(
        vec![
            ConvexSet::axis_box(&[-0.5, -0.5], &[2.0, 0.5]).unwrap(),
            ConvexSet::axis_box(&[1.5, -0.5], &[3.0, 0.5]).unwrap(),
            ConvexSet::axis_box(&[2.5, -0.5], &[3.0, 3.0]).unwrap(),
        ],
        vec![0.0, 0.0],
        vec![2.75, 2.5],
        ball(2, 10.0),
        ball(2, 1.0),
    )
    .unwrap();
    let (points, _) = solve_polygonal(&problem);
    assert_eq!(select_vertices(&points, 1e-6), vec![0, 2, 3]);
}

// Vertex-to-vertex segments.

fn v2v(d: f64, a: f64, degree: usize) -> Segment {
    solve_vertex_to_vertex(
        &[0.0, 0.0],
        &[d, 0.0],
        &ball(2, 10.0),
        &ball(2, a),
        degree,
        false,
        &ClarabelBackend,
        &cfg(),
    )
    .unwrap()
}

#[test]
fn cubic_rest_to_rest_time_is_closed_form() {
    let seg = v2v(1.0, 1.0, 3);
    assert!((seg.duration - 6f64.sqrt()).abs() <= 1e-5 * 6f64.sqrt());
    let seg = v2v(1.0, 4.0, 3);
    assert!((seg.duration - 1.5f64.sqrt()).abs() <= 1e-5 * 1.5f64.sqrt());
    assert_eq!(seg.curve.first_point(), &[0.0, 0.0]);
    assert_eq!(seg.curve.last_point(), &[1.0, 0.0]);
}

#[test]
fn doubling_distance_scales_time_by_sqrt_two() {
    for degree in [3, 5] {
        let t1 = v2v(1.0, 1.0, degree).duration;
        let t2 = v2v(2.0, 1.0, degree).duration;
        assert!(
            (t2 / t1 - 2f64.sqrt()).abs() <= 1e-5,
            "K={degree}: {}",
            t2 / t1
        );
    }
}

#[test]
fn higher_degree_sits_between_bang_bang_and_cubic() {
    let (d, a) = (1.5, 2.0);
    let t = v2v(d, a, 5).duration;
    assert!(t >= 2.0 * (d / a).sqrt());
    assert!(t <= 1.25 * (6.0 * d / a).sqrt());
}

#[test]
fn velocity_limited_segments_respect_cruise_bound() {
    let seg = solve_vertex_to_vertex(
        &[0.0, 0.0],
        &[10.0, 0.0],
        &ball(2, 1.0),
        &ball(2, 1.0),
        5,
        false,
        &ClarabelBackend,
        &cfg(),
    )
    .unwrap();
    // Continuous-time bang-coast-bang: d/v + v/a.
    assert!(seg.duration >= 10.0 / 1.0 + 1.0 / 1.0 - 1e-9);
    for v in seg.velocity_points() {
        assert!(crate::linalg::norm(&v) <= 1.0 + 1e-6);
    }
}

#[test]
fn one_dimensional_and_full_formulations_agree() {
    // Centred balls: the full program's optimum is a straight line, so the two match.
    let (p, q) = ([0.5, -0.2], [2.0, 1.3]);
    for degree in [3, 5] {
        let (v, a) = (ball(2, 0.8), ball(2, 1.5));
        let fast = solve_vertex_to_vertex(&p, &q, &v, &a, degree, false, &ClarabelBackend, &cfg())
            .unwrap();
        let full =
            solve_vertex_to_vertex_nd(&p, &q, &v, &a, degree, &ClarabelBackend, &cfg()).unwrap();
        assert!(
            (fast.duration - full.duration).abs() <= 1e-5 * full.duration,
            "K={degree}: {} vs {}",
            fast.duration,
            full.duration
        );
    }
}

#[test]
fn full_formulation_never_loses_to_the_line_restriction() {
    // Asymmetric sets may reward leaving the line; the 1D program is a restriction.
    let v = ConvexSet::axis_box(&[-2.0, -1.0], &[1.5, 3.0]).unwrap();
    let a = ConvexSet::ball(vec![0.1, 0.0], 1.0).unwrap();
    let (p, q) = ([0.5, -0.2], [2.0, 1.3]);
    for degree in [3, 5] {
        let fast = solve_vertex_to_vertex(&p, &q, &v, &a, degree, false, &ClarabelBackend, &cfg())
            .unwrap();
        let full =
            solve_vertex_to_vertex_nd(&p, &q, &v, &a, degree, &ClarabelBackend, &cfg()).unwrap();
        assert!(full.duration <= fast.duration * (1.0 + 1e-6));
    }
}

#[test]
fn zero_end_acceleration_pins_the_hodograph() {
    let seg = solve_vertex_to_vertex(
        &[0.0, 0.0],
        &[1.0, 1.0],
        &ball(2, 10.0),
        &ball(2, 1.0),
        5,
        true,
        &ClarabelBackend,
        &cfg(),
    )
    .unwrap();
    let acc = seg.acceleration_points();
    assert!(crate::linalg::norm(&acc[0]) <= 1e-7);
    assert!(crate::linalg::norm(&acc[acc.len() - 1]) <= 1e-7);
}

#[test]
fn vertex_to_vertex_rejects_bad_input() {
    let v = ball(2, 1.0);
    let a = ball(2, 1.0);
    assert!(solve_vertex_to_vertex(
        &[1.0, 1.0],
        &[1.0, 1.0],
        &v,
        &a,
        3,
        false,
        &ClarabelBackend,
        &cfg()
    )
    .is_err());
    assert!(solve_vertex_to_vertex(
        &[0.0, 0.0],
        &[1.0, 1.0],
        &v,
        &a,
        2,
        false,
        &ClarabelBackend,
        &cfg()
    )
    .is_err());
}

// Splitting.

#[test]
fn split_without_points_is_identity() {
    let seg = v2v(1.0, 1.0, 3);
    assert_eq!(split_segment(&seg, &[], 1e-9).unwrap(), vec![seg]);
}

#[test]
fn symmetric_cubic_splits_at_half_time() {
    let seg = Segment::new(
        crate::bezier::BezierCurve::new(vec![
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![2.0, 0.0],
        ])
        .unwrap(),
        3.0,
    )
    .unwrap();
    let pieces = split_segment(&seg, &[vec![1.0, 0.0]], 1e-9).unwrap();
    assert_eq!(pieces.len(), 2);
    assert!((pieces[0].duration - 1.5).abs() <= 1e-12);
    assert!((pieces[1].duration - 1.5).abs() <= 1e-12);
}

#[test]
fn split_pieces_reproduce_the_original_in_time() {
    let seg = v2v(3.0, 1.0, 5);
    let pieces = split_segment(
        &seg,
        &[vec![0.4, 0.0], vec![1.1, 0.0], vec![2.9, 0.0]],
        1e-9,
    )
    .unwrap();
    assert_eq!(pieces.len(), 4);
    let whole = Trajectory::new(vec![seg.clone()]).unwrap();
    let split = Trajectory::new(pieces).unwrap();
    assert!((split.total_duration() - whole.total_duration()).abs() <= 1e-12);
    for j in 0..100 {
        let t = whole.total_duration() * j as f64 / 99.0;
        let t = t.min(split.total_duration());
        assert!(distance(&whole.position(t).unwrap(), &split.position(t).unwrap()) <= 1e-9);
    }
    split.validate_continuity(1e-9, 1e-9).unwrap();
}

#[test]
fn split_rejects_points_off_the_line() {
    let seg = v2v(1.0, 1.0, 3);
    assert!(matches!(
        split_segment(&seg, &[vec![0.5, 0.1]], 1e-6),
        Err(Error::NotOnLine { index: 0, .. })
    ));
    assert!(matches!(
        split_segment(&seg, &[vec![1.5, 0.0]], 1e-6),
        Err(Error::NotOnLine { .. })
    ));
}

#[test]
fn non_monotone_profile_falls_back_to_first_crossing() {
    let curve =
        crate::bezier::BezierCurve::new(vec![vec![0.0], vec![2.0], vec![-1.0], vec![1.0]]).unwrap();
    let seg = Segment::new(curve, 1.0).unwrap();
    let pieces = split_segment(&seg, &[vec![0.5]], 1e-9).unwrap();
    assert!((pieces[0].curve.last_point()[0] - 0.5).abs() <= 1e-9);
    assert!(pieces[0].duration > 0.0 && pieces[1].duration > 0.0);
}

#[test]
fn repeated_same_kind_solves_reach_a_fixed_point() {
    let problem = staircase(4, 4, 2);
    let opts = SubproblemOptions::default();
    for kind in KINDS {
        let mut traj = moving_incumbent(&problem, 5);
        let mut change = f64::INFINITY;
        for _ in 0..8 {
            let (next, _, _) = solve_kind(kind, &problem, &traj, &opts);
            change = traj.total_duration() - next.total_duration();
            assert!(change >= -1e-7, "{kind:?}: objective rose by {:e}", -change);
            traj = next;
        }
        assert!(change.abs() < 1e-7, "{kind:?}: still moving by {change:e}");
    }
}
