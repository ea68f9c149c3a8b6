use mintime::bezier::BezierCurve;
use mintime::conic::{self, AffineExpr, BackendConfig, ConeBlock, ConicProgram};
use mintime::geometry::{ellipsoid_tangent_points, ellipsoid_tangent_polytope, ConvexSet};
use proptest::prelude::*;

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (len > 1e-3).then(|| v.iter().map(|x| x / len).collect())
}

/// Bounded polytope containing the origin: the `±e_j` box facets plus random ones.
fn polytope_strategy() -> impl Strategy<Value = ConvexSet> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), 0..8),
            prop::collection::vec(0.2f64..3.0, 2 * n + 8),
        )
            .prop_map(move |(extra, offsets)| {
                let mut normals = Vec::new();
                for j in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut e = vec![0.0; n];
                        e[j] = sign;
                        normals.push(e);
                    }
                }
                normals.extend(extra.iter().filter_map(|v| unit(v)));
                let b = offsets[..normals.len()].to_vec();
                ConvexSet::polytope(normals, b).unwrap()
            })
    })
}

fn ball_strategy() -> impl Strategy<Value = ConvexSet> {
    (1usize..=4).prop_flat_map(|n| {
        (prop::collection::vec(-0.5f64..0.5, n), 0.1f64..3.0).prop_map(|(c, margin)| {
            let r = c.iter().map(|x| x * x).sum::<f64>().sqrt() + margin;
            ConvexSet::ball(c, r).unwrap()
        })
    })
}

fn set_strategy() -> impl Strategy<Value = ConvexSet> {
    prop_oneof![polytope_strategy(), ball_strategy()]
}

/// Pulls `x` towards the origin until it lies in `set` (which contains the origin strictly).
fn pull_inside(set: &ConvexSet, x: &[f64]) -> Vec<f64> {
    let mut t = 1.0;
    while set
        .residual(&x.iter().map(|v| v * t).collect::<Vec<_>>())
        .unwrap()
        > 0.0
    {
        t *= 0.9;
    }
    x.iter().map(|v| v * t).collect()
}

fn gram_schmidt(raw: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in raw {
        let mut w = v.clone();
        for b in &basis {
            let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        basis.push(unit(&w)?);
    }
    Some(basis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scaled_membership_rows_match_direct_membership(
        set in set_strategy(),
        raw in prop::collection::vec(-4.0f64..4.0, 4),
        lambda in 0.05f64..5.0,
    ) {
        let n = set.dim();
        let x = &raw[..n];
        let vars: Vec<AffineExpr> = (0..n).map(AffineExpr::var).collect();
        let blocks = set.scaled_membership(&vars, &AffineExpr::var(n)).unwrap();
        let mut point = x.to_vec();
        point.push(lambda);
        let emitted = blocks.iter().map(|b| b.residual(&point)).fold(f64::NEG_INFINITY, f64::max);
        let unscaled: Vec<f64> = x.iter().map(|v| v / lambda).collect();
        let direct = set.residual(&unscaled).unwrap();
        prop_assume!(direct.abs() > 1e-9);
        prop_assert_eq!(emitted <= 0.0, direct <= 0.0, "emitted {} direct {}", emitted, direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn control_points_in_a_set_keep_the_curve_inside(
        set in set_strategy(),
        raw in prop::collection::vec(prop::collection::vec(-4.0f64..4.0, 4), 2..12),
    ) {
        let n = set.dim();
        let points: Vec<Vec<f64>> = raw.iter().map(|p| pull_inside(&set, &p[..n])).collect();
        for p in &points {
            prop_assert!(set.contains(p, 0.0).unwrap());
        }
        let curve = BezierCurve::new(points).unwrap();
        for i in 0..1000 {
            let s = i as f64 / 999.0;
            prop_assert!(set.contains(&curve.evaluate(s).unwrap(), 1e-9).unwrap());
        }
    }

    #[test]
    fn tangent_polytope_contains_its_ellipsoid(
        n in 2usize..=4,
        extra in 0usize..6,
        center in prop::collection::vec(-3.0f64..3.0, 4),
        axes in prop::collection::vec(0.1f64..2.0, 4),
        raw_frame in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 4),
        samples in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 200),
        seed in any::<u64>(),
    ) {
        let frame_in: Vec<Vec<f64>> = raw_frame[..n].iter().map(|c| c[..n].to_vec()).collect();
        let frame = gram_schmidt(&frame_in);
        prop_assume!(frame.is_some());
        let frame = frame.unwrap();
        let (c, a) = (&center[..n], &axes[..n]);
        let facets = 2 * n + extra;
        let poly = ellipsoid_tangent_polytope(c, a, &frame, facets, seed).unwrap();

        for u in &samples {
            let u = &u[..n];
            let len = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            let radius = if len > 1.0 { 1.0 / len } else { 1.0 };
            let mut x = c.to_vec();
            for ((col, &uj), &aj) in frame.iter().zip(u).zip(a) {
                x.iter_mut().zip(col).for_each(|(xi, ci)| *xi += radius * aj * uj * ci);
            }
            prop_assert!(poly.contains(&x, 1e-9).unwrap());
        }

        let ConvexSet::Polytope { facet_normals, offsets } = &poly else {
            panic!("expected a polytope");
        };
        let touch = ellipsoid_tangent_points(c, a, &frame, facets, seed);
        prop_assert_eq!(touch.len(), facets);
        for ((normal, b), p) in facet_normals.iter().zip(offsets).zip(&touch) {
            let gap: f64 = normal.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() - b;
            prop_assert!(gap.abs() <= 1e-9, "tangency gap {}", gap);
        }
    }

    #[test]
    fn directional_extent_hits_the_boundary(
        set in set_strategy(),
        raw in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let d = unit(&raw[..set.dim()]);
        prop_assume!(d.is_some());
        let d = d.unwrap();
        let (fwd, back) = set.directional_extent(&d).unwrap();
        for (extent, sign) in [(fwd, 1.0), (back, -1.0)] {
            prop_assert!(extent.is_finite() && extent > 0.0);
            let at = |t: f64| d.iter().map(|v| sign * t * v).collect::<Vec<_>>();
            prop_assert!(set.residual(&at(extent)).unwrap().abs() <= 1e-7);
            prop_assert!(!set.contains(&at(extent + 1e-3), 0.0).unwrap());
        }
    }

    #[test]
    fn optimal_solutions_pass_the_independent_residual_check(
        n in 1usize..=5,
        cost in prop::collection::vec(-1.0f64..1.0, 5),
        center in prop::collection::vec(-2.0f64..2.0, 5),
        radius in 0.5f64..3.0,
        upper in prop::collection::vec(0.1f64..3.0, 5),
    ) {
        let mut program = ConicProgram::new();
        let x = program.add_variables(n);
        let t = program.add_variables(1).start;
        for (j, c) in x.clone().zip(&cost) {
            program.add_objective_term(j, *c).unwrap();
        }
        program.add_objective_term(t, 0.1).unwrap();
        let mut ball = vec![AffineExpr::constant(radius)];
        ball.extend(x.clone().zip(&center).map(|(j, c)| AffineExpr::var(j).with_constant(-c)));
        program.add_block(ConeBlock::soc(ball)).unwrap();
        let caps = x.clone().zip(&upper).map(|(j, u)| AffineExpr::term(j, -1.0).with_constant(u + center[j]));
        program.add_block(ConeBlock::nonneg(caps.collect())).unwrap();
        let mut epi = vec![AffineExpr::var(t)];
        epi.extend(x.clone().map(AffineExpr::var));
        program.add_block(ConeBlock::soc(epi)).unwrap();

        let config = BackendConfig::default();
        let solution = conic::solve(&program, &config);
        prop_assert!(solution.is_optimal(), "{:?}", solution.status);
        prop_assert!(program.max_residual(&solution.primal) <= 10.0 * config.feasibility_tol);
    }
}

#[test]
fn building_twice_gives_identical_programs() {
    use mintime::bench::{staircase_instance, StaircaseSpec};
    use mintime::solver::{initialize, SolverConfig};
    use mintime::subproblems::{
        build_fixed_points, build_fixed_velocity, NominalTimes, SubproblemOptions,
    };

    let problem = staircase_instance(&StaircaseSpec::new(4, 6, 3)).unwrap();
    let traj = initialize(&problem, &SolverConfig::default()).unwrap();
    let data = traj.transition_data();
    let nominal = NominalTimes::from_trajectory(&traj);
    let options = SubproblemOptions::default();
    let fp = || {
        build_fixed_points(&problem, 5, &data.points, &nominal, &options)
            .unwrap()
            .0
    };
    let fv = || {
        build_fixed_velocity(&problem, 5, &data.velocities, &nominal, &options)
            .unwrap()
            .0
    };
    assert_eq!(fp().dump_string(), fp().dump_string());
    assert_eq!(fv().dump_string(), fv().dump_string());
}
