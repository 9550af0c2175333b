//! Cross-checks of the iterative solver against independent references:
//! the closed-form tracking LQR on random linear-quadratic instances,
//! finite differences on every analytic derivative, and geometric safety
//! of obstacle-avoidance solutions.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cilqr::{
    plan_lane_follow, rollout_policy, solve, solve_tracking_lqr, BicycleDynamics, Constraint,
    ConstraintSpec, CostSpec, Dynamics, LinearDynamics, PlanTarget, PlannerSettings,
    SolverConfig,
};

fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

fn random_lq_instance(
    rng: &mut ChaCha8Rng,
) -> (LinearDynamics, CostSpec, DVector<f64>, usize) {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=3);
    let horizon = rng.gen_range(5..=50);
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0) / n as f64)
        + DMatrix::identity(n, n);
    let b = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
    let w = random_vector(rng, n, 0.1);
    let q = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.gen_range(0.1..2.0)));
    let r = DMatrix::from_diagonal(&DVector::from_fn(m, |_, _| rng.gen_range(0.1..1.0)));
    let qf = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.gen_range(0.1..5.0)));
    let reference = (0..=horizon).map(|_| random_vector(rng, n, 2.0)).collect();
    let cost = CostSpec::new(q, r, qf, reference);
    let s0 = random_vector(rng, n, 2.0);
    (LinearDynamics::with_offset(a, b, w), cost, s0, horizon)
}

/// On linear-quadratic problems one Gauss-Newton step is exact, so the
/// iterative solver must reproduce the closed-form optimum immediately.
#[test]
fn iterative_solver_matches_closed_form_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..20 {
        let (dynamics, cost, s0, horizon) = random_lq_instance(&mut rng);
        let policy = solve_tracking_lqr(&dynamics, &cost, horizon);
        let oracle = rollout_policy(&dynamics, &policy, s0.clone());
        let oracle_cost = cost.total(&oracle);

        let solution = solve(
            &dynamics,
            &cost,
            &ConstraintSpec::unconstrained(),
            s0,
            vec![DVector::zeros(dynamics.control_dim()); horizon],
            &SolverConfig::default(),
        )
        .unwrap();

        assert!(solution.diagnostics.converged, "case {case} not converged");
        assert!(
            solution.diagnostics.iterations <= 2,
            "case {case} took {} iterations",
            solution.diagnostics.iterations
        );
        let got = cost.total(&solution.trajectory);
        let rel = (got - oracle_cost).abs() / oracle_cost.abs().max(1.0);
        assert!(
            rel < 1e-6,
            "case {case}: iterative {got} vs closed-form {oracle_cost} (rel {rel:.2e})"
        );
    }
}

/// Stage cost gradients against central finite differences at random points.
#[test]
fn cost_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let eps = 1e-6;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let horizon = 3;
        let q = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.gen_range(0.0..2.0)));
        let r = DMatrix::from_diagonal(&DVector::from_fn(m, |_, _| rng.gen_range(0.1..1.0)));
        let qf = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.gen_range(0.0..5.0)));
        let reference = (0..=horizon)
            .map(|_| random_vector(&mut rng, n, 2.0))
            .collect();
        let cost = CostSpec::new(q, r, qf, reference);
        let s = random_vector(&mut rng, n, 3.0);
        let u = random_vector(&mut rng, m, 3.0);
        let k = rng.gen_range(0..horizon);

        let (gs, gu) = cost.stage_gradients(k, &s, &u);
        for i in 0..n {
            let mut sp = s.clone();
            let mut sm = s.clone();
            sp[i] += eps;
            sm[i] -= eps;
            let fd = (cost.stage(k, &sp, &u) - cost.stage(k, &sm, &u)) / (2.0 * eps);
            assert!((gs[i] - fd).abs() < 1e-5 * fd.abs().max(1.0));
        }
        for i in 0..m {
            let mut up = u.clone();
            let mut um = u.clone();
            up[i] += eps;
            um[i] -= eps;
            let fd = (cost.stage(k, &s, &up) - cost.stage(k, &s, &um)) / (2.0 * eps);
            assert!((gu[i] - fd).abs() < 1e-5 * fd.abs().max(1.0));
        }
        let gt = cost.terminal_gradient(&s);
        for i in 0..n {
            let mut sp = s.clone();
            let mut sm = s.clone();
            sp[i] += eps;
            sm[i] -= eps;
            let fd = (cost.terminal(&sp) - cost.terminal(&sm)) / (2.0 * eps);
            assert!((gt[i] - fd).abs() < 1e-5 * fd.abs().max(1.0));
        }
    }
}

/// Constraint gradients (state and control) against finite differences.
#[test]
fn constraint_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let eps = 1e-6;
    for _ in 0..100 {
        let constraint = match rng.gen_range(0..3) {
            0 => Constraint::MovingEllipse {
                x0: rng.gen_range(-50.0..50.0),
                y0: rng.gen_range(-5.0..5.0),
                vx: rng.gen_range(-30.0..30.0),
                vy: rng.gen_range(-2.0..2.0),
                semi_x: rng.gen_range(3.0..8.0),
                semi_y: rng.gen_range(1.5..4.0),
                dt: 0.1,
            },
            1 => Constraint::StateHalfPlane {
                normal: random_vector(&mut rng, 4, 1.0),
                offset: rng.gen_range(-5.0..5.0),
            },
            _ => Constraint::ControlBound {
                index: rng.gen_range(0..2),
                sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                bound: rng.gen_range(0.5..6.0),
            },
        };
        let s = random_vector(&mut rng, 4, 40.0);
        let u = random_vector(&mut rng, 2, 4.0);
        let k = rng.gen_range(0..20);

        let gs = constraint.grad_state(k, &s);
        for i in 0..4 {
            let mut sp = s.clone();
            let mut sm = s.clone();
            sp[i] += eps;
            sm[i] -= eps;
            let fd =
                (constraint.value(k, &sp, Some(&u)) - constraint.value(k, &sm, Some(&u)))
                    / (2.0 * eps);
            assert!(
                (gs[i] - fd).abs() < 1e-5 * fd.abs().max(1.0),
                "{constraint:?} state dim {i}"
            );
        }
        let gu = constraint.grad_control(2);
        for i in 0..2 {
            let mut up = u.clone();
            let mut um = u.clone();
            up[i] += eps;
            um[i] -= eps;
            let fd =
                (constraint.value(k, &s, Some(&up)) - constraint.value(k, &s, Some(&um)))
                    / (2.0 * eps);
            assert!(
                (gu[i] - fd).abs() < 1e-5 * fd.abs().max(1.0),
                "{constraint:?} control dim {i}"
            );
        }
    }
}

/// Vehicle-model Jacobians against finite differences at random operating
/// points.
#[test]
fn vehicle_jacobians_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let dynamics = BicycleDynamics::new(0.1, 10);
    let eps = 1e-6;
    for _ in 0..100 {
        let s = DVector::from_row_slice(&[
            rng.gen_range(-100.0..100.0),
            rng.gen_range(0.0..8.0),
            rng.gen_range(1.0..55.0),
            rng.gen_range(-0.5..0.5),
        ]);
        let u = DVector::from_row_slice(&[rng.gen_range(-5.0..5.0), rng.gen_range(-0.8..0.8)]);
        let (a, b) = dynamics.jacobians(&s, &u);
        for i in 0..4 {
            let mut sp = s.clone();
            let mut sm = s.clone();
            sp[i] += eps;
            sm[i] -= eps;
            let fd = (dynamics.step(&sp, &u) - dynamics.step(&sm, &u)) / (2.0 * eps);
            for row in 0..4 {
                assert!(
                    (a[(row, i)] - fd[row]).abs() < 1e-5 * fd[row].abs().max(1.0),
                    "A[{row},{i}]"
                );
            }
        }
        for i in 0..2 {
            let mut up = u.clone();
            let mut um = u.clone();
            up[i] += eps;
            um[i] -= eps;
            let fd = (dynamics.step(&s, &up) - dynamics.step(&s, &um)) / (2.0 * eps);
            for row in 0..4 {
                assert!(
                    (b[(row, i)] - fd[row]).abs() < 1e-5 * fd[row].abs().max(1.0),
                    "B[{row},{i}]"
                );
            }
        }
    }
}

/// Swerving around a parked obstacle: accepted costs decrease monotonically
/// and the optimized path never overlaps the obstacle's true footprint.
#[test]
fn obstacle_avoidance_is_geometrically_safe() {
    let dynamics = BicycleDynamics::new(0.1, 10);
    let n = 50;
    let reference: Vec<DVector<f64>> = (0..=n)
        .map(|_| DVector::from_row_slice(&[0.0, 2.0, 30.0, 0.0]))
        .collect();
    let q = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.0, 1.0, 0.5, 2.0]));
    let r = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.1, 1.0]));
    let cost = CostSpec::new(q.clone(), r, q, reference);

    // Parked car 80 m ahead, dead center in the reference lane. Half
    // extents 5.5 × 2.25 m combined, inflated by 1 m for the planner.
    let (true_x, true_y) = (5.5, 2.25);
    let constraints = ConstraintSpec::new(
        vec![
            Constraint::MovingEllipse {
                x0: 80.0,
                y0: 2.0,
                vx: 0.0,
                vy: 0.0,
                semi_x: true_x + 1.0,
                semi_y: true_y + 1.0,
                dt: 0.1,
            },
            Constraint::StateHalfPlane {
                normal: DVector::from_row_slice(&[0.0, -1.0, 0.0, 0.0]),
                offset: 1.5,
            },
            Constraint::StateHalfPlane {
                normal: DVector::from_row_slice(&[0.0, 1.0, 0.0, 0.0]),
                offset: -6.5,
            },
        ],
        1.0,
        5.0,
    );

    let s0 = DVector::from_row_slice(&[0.0, 2.0, 30.0, 0.0]);
    let solution = solve(
        &dynamics,
        &cost,
        &constraints,
        s0,
        vec![DVector::zeros(2); n],
        &SolverConfig::default(),
    )
    .unwrap();

    assert!(solution.diagnostics.converged);
    for pair in solution.diagnostics.costs.windows(2) {
        assert!(pair[1] < pair[0], "accepted cost increased");
    }
    // Soft barrier: grazing the 1 m inflation zone is allowed, entering the
    // true footprint is not.
    assert!(
        solution.diagnostics.max_constraint < 0.15,
        "max_g={}",
        solution.diagnostics.max_constraint
    );
    let mut swerved = false;
    for s in &solution.trajectory.states {
        let dx = (s[0] - 80.0) / true_x;
        let dy = (s[1] - 2.0) / true_y;
        assert!(
            dx * dx + dy * dy > 1.0,
            "path enters the obstacle footprint at ({}, {})",
            s[0],
            s[1]
        );
        if (s[1] - 2.0).abs() > 2.0 {
            swerved = true;
        }
    }
    assert!(swerved, "plan never left the blocked lane");
}

/// With an all-zero objective the seed is already optimal and must come
/// back untouched.
#[test]
fn zero_objective_returns_seed() {
    let dynamics = BicycleDynamics::new(0.1, 10);
    let n = 10;
    let reference: Vec<DVector<f64>> = (0..=n).map(|_| DVector::zeros(4)).collect();
    let cost = CostSpec::new(
        DMatrix::zeros(4, 4),
        DMatrix::from_diagonal(&DVector::from_row_slice(&[0.1, 0.1])),
        DMatrix::zeros(4, 4),
        reference,
    );
    let s0 = DVector::from_row_slice(&[0.0, 2.0, 20.0, 0.0]);
    let solution = solve(
        &dynamics,
        &cost,
        &ConstraintSpec::unconstrained(),
        s0,
        vec![DVector::zeros(2); n],
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(solution.diagnostics.converged);
    assert_eq!(solution.diagnostics.costs.len(), 1);
    for u in &solution.trajectory.controls {
        assert_eq!(u, &DVector::zeros(2));
    }
}

/// The lane-follow front end and the raw solver agree on the augmented
/// cost bookkeeping: re-solving a solved scene changes nothing.
#[test]
fn replanning_a_solved_scene_is_stable() {
    use highway_sim::{DriverKind, DriverProfile, Npc, ScenarioConfig, VehicleState, World};
    let profile = DriverProfile::preset(DriverKind::Truck);
    let truck = Npc::new(
        VehicleState {
            x: 150.0,
            y: 2.0,
            speed: 12.0,
            heading: 0.0,
            length: profile.length,
            width: profile.width,
            lane_id: 0,
            direction: 1,
        },
        profile,
        DriverKind::Truck,
    );
    let ego = VehicleState {
        x: 50.0,
        y: 2.0,
        speed: 45.0,
        heading: 0.0,
        length: 5.0,
        width: 2.0,
        lane_id: 0,
        direction: 1,
    };
    let world = World::from_parts(ScenarioConfig::default(), ego, vec![truck]);
    let target = PlanTarget {
        lane: 1,
        desired_speed: 45.0,
    };
    let settings = PlannerSettings::default();
    let first = plan_lane_follow(&world, &target, &settings, None).unwrap();
    assert!(first.feasible);
    let again =
        plan_lane_follow(&world, &target, &settings, Some(&first.trajectory.controls)).unwrap();
    assert!(again.feasible);
    // Costs agree to within the solver tolerance.
    let j1 = first.diagnostics.costs.last().unwrap();
    let j2 = again.diagnostics.costs.last().unwrap();
    assert!((j1 - j2).abs() / j1.abs().max(1.0) < 1e-3);
}
