//! Turns a traffic scene into a trajectory-optimization problem: track a
//! lane center at a desired speed while keeping clear of every vehicle
//! (predicted at constant velocity), the road edges, and the actuator box.

use nalgebra::{DMatrix, DVector};

use highway_sim::{World, MAX_ACCEL, MAX_SPEED, MAX_STEER};

use crate::constraint::{Constraint, ConstraintSpec};
use crate::cost::CostSpec;
use crate::dynamics::{BicycleDynamics, Dynamics};
use crate::error::CilqrError;
use crate::solver::{augmented_cost, solve, SolveDiagnostics, SolverConfig};
use crate::trajectory::Trajectory;

/// Which lane to track and how fast to go.
#[derive(Clone, Copy, Debug)]
pub struct PlanTarget {
    pub lane: usize,
    pub desired_speed: f64,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct PlannerSettings {
    /// Planner step length in seconds. Coarser than the simulation step:
    /// the horizon must cover a whole passing maneuver.
    pub step_dt: f64,
    /// Euler substeps per planner step.
    pub substeps: usize,
    /// Number of planner steps; step_dt · horizon is the lookahead window.
    pub horizon: usize,
    /// Extra clearance kept from the road edges beyond the half width.
    pub boundary_margin: f64,
    /// Padding added to vehicle half-extents when building keep-out
    /// ellipses.
    pub obstacle_margin: f64,
    /// Barrier scale and sharpness. Sharper barriers push the optimum
    /// strictly outside the keep-out zones instead of trading a small
    /// penetration against tracking cost.
    pub barrier_q1: f64,
    pub barrier_q2: f64,
    /// A converged solution with a worst violation inside this band is
    /// re-solved with a sharper barrier (continuation): a soft-barrier
    /// optimum often sits at a small positive violation even when a
    /// strictly feasible trajectory exists nearby. Violations beyond the
    /// band mean the scene is genuinely blocked and are returned as-is.
    pub anneal_band: f64,
    /// How many times the sharpness may double during continuation.
    pub anneal_doublings: u32,
    pub solver: SolverConfig,
}

impl Default for PlannerSettings {
    fn default() -> Self {
        Self {
            step_dt: 0.1,
            substeps: 10,
            horizon: 50,
            boundary_margin: 0.5,
            obstacle_margin: 1.0,
            barrier_q1: 1.0,
            barrier_q2: 5.0,
            anneal_band: 0.5,
            anneal_doublings: 4,
            solver: SolverConfig::default(),
        }
    }
}

/// A solved lane-tracking problem. `feasible` means the optimizer converged
/// with every constraint strictly satisfied; whether the plan actually
/// reaches the target lane and speed is for the caller to judge from the
/// trajectory.
#[derive(Clone, Debug)]
pub struct LaneFollowPlan {
    pub trajectory: Trajectory,
    pub feasible: bool,
    pub diagnostics: SolveDiagnostics,
}

impl LaneFollowPlan {
    /// Planned (acceleration, steering) at step i, clamped to the actuator
    /// box the barrier already steers away from.
    pub fn control(&self, i: usize) -> (f64, f64) {
        let u = &self.trajectory.controls[i.min(self.trajectory.horizon() - 1)];
        (
            u[0].clamp(-MAX_ACCEL, MAX_ACCEL),
            u[1].clamp(-MAX_STEER, MAX_STEER),
        )
    }

    pub fn first_control(&self) -> (f64, f64) {
        self.control(0)
    }

    pub fn terminal_state(&self) -> &DVector<f64> {
        self.trajectory
            .states
            .last()
            .expect("trajectory has a terminal state")
    }

    /// Planned lateral position at the end of the horizon.
    pub fn terminal_y(&self) -> f64 {
        self.terminal_state()[1]
    }

    pub fn terminal_speed(&self) -> f64 {
        self.terminal_state()[2]
    }

    pub fn max_constraint(&self) -> f64 {
        self.diagnostics.max_constraint
    }
}

/// A previous plan's controls advanced by one step (zero appended), for
/// seeding a re-plan after one planner step has been executed.
pub fn shifted_controls(prev: &Trajectory) -> Vec<DVector<f64>> {
    let m = prev.controls[0].len();
    let mut controls: Vec<DVector<f64>> = prev.controls[1..].to_vec();
    controls.push(DVector::zeros(m));
    controls
}

/// Solve the lane-tracking problem for the current scene. `seed_controls`
/// warm-starts the optimizer (e.g. with [`shifted_controls`] of the last
/// plan); a seed that rolls out worse than plain coasting is discarded.
pub fn plan_lane_follow(
    world: &World,
    target: &PlanTarget,
    settings: &PlannerSettings,
    seed_controls: Option<&[DVector<f64>]>,
) -> Result<LaneFollowPlan, CilqrError> {
    let ego = world.ego();
    let road = world.road();
    let n = settings.horizon;
    let horizon_seconds = settings.step_dt * n as f64;

    let dynamics = BicycleDynamics::new(settings.step_dt, settings.substeps);

    let lane_y = road.lane_center(target.lane);
    let mut reference = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        reference.push(DVector::from_row_slice(&[
            0.0,
            lane_y,
            target.desired_speed,
            0.0,
        ]));
    }
    let q = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.0, 1.0, 0.5, 2.0]));
    let r = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.1, 1.0]));
    let cost = CostSpec::new(q.clone(), r, q, reference);

    let mut constraints = Vec::new();

    // Keep-out ellipses around every vehicle that could come within reach
    // during the horizon, predicted at constant velocity.
    for npc in world.npcs() {
        let reach = (MAX_SPEED + npc.state.speed) * horizon_seconds + 50.0;
        if (npc.state.x - ego.x).abs() > reach {
            continue;
        }
        constraints.push(Constraint::MovingEllipse {
            x0: npc.state.x,
            y0: npc.state.y,
            vx: npc.state.speed * npc.state.heading.cos(),
            vy: npc.lateral_rate,
            semi_x: (npc.state.length + ego.length) * 0.5 + settings.obstacle_margin,
            semi_y: (npc.state.width + ego.width) * 0.5 + settings.obstacle_margin,
            dt: settings.step_dt,
        });
    }

    // Road edges: the center must keep half the body width plus a margin
    // from either boundary.
    let lateral_keep = ego.width * 0.5 + settings.boundary_margin;
    constraints.push(Constraint::StateHalfPlane {
        normal: DVector::from_row_slice(&[0.0, -1.0, 0.0, 0.0]),
        offset: lateral_keep,
    });
    constraints.push(Constraint::StateHalfPlane {
        normal: DVector::from_row_slice(&[0.0, 1.0, 0.0, 0.0]),
        offset: lateral_keep - road.total_width(),
    });

    // Speed window 0 < v < MAX_SPEED.
    constraints.push(Constraint::StateHalfPlane {
        normal: DVector::from_row_slice(&[0.0, 0.0, 1.0, 0.0]),
        offset: -MAX_SPEED,
    });
    constraints.push(Constraint::StateHalfPlane {
        normal: DVector::from_row_slice(&[0.0, 0.0, -1.0, 0.0]),
        offset: 0.0,
    });

    constraints.extend(ConstraintSpec::control_box(0, MAX_ACCEL));
    constraints.extend(ConstraintSpec::control_box(1, MAX_STEER));

    let spec = ConstraintSpec::new(constraints, settings.barrier_q1, settings.barrier_q2);

    let s0 = DVector::from_row_slice(&[ego.x, ego.y, ego.speed, ego.heading]);
    let zero_seed = vec![DVector::zeros(2); n];
    let seed = match seed_controls {
        Some(c) if c.len() == n => {
            // A stale or misaligned warm start can roll out into deeply
            // infeasible territory where the optimizer crawls; coasting is
            // always a benign fallback.
            let warm = Trajectory::new(dynamics.rollout(&s0, c), c.to_vec());
            let cold = Trajectory::new(dynamics.rollout(&s0, &zero_seed), zero_seed.clone());
            match (
                augmented_cost(&cost, &spec, &warm),
                augmented_cost(&cost, &spec, &cold),
            ) {
                (Some((jw, _)), Some((jc, _))) if jw < jc => warm.controls,
                _ => zero_seed,
            }
        }
        _ => zero_seed,
    };

    let mut solution = solve(&dynamics, &cost, &spec, s0.clone(), seed, &settings.solver)?;

    // Barrier continuation: a near-graze optimum is pushed strictly outside
    // by re-solving (warm) with progressively sharper barriers.
    let mut q2 = settings.barrier_q2;
    for _ in 0..settings.anneal_doublings {
        let d = &solution.diagnostics;
        if !(d.converged && d.max_constraint > 0.0 && d.max_constraint <= settings.anneal_band) {
            break;
        }
        q2 *= 2.0;
        let sharper = ConstraintSpec::new(spec.constraints.clone(), settings.barrier_q1, q2);
        solution = solve(
            &dynamics,
            &cost,
            &sharper,
            s0.clone(),
            solution.trajectory.controls.clone(),
            &settings.solver,
        )?;
    }

    let feasible =
        solution.diagnostics.converged && solution.diagnostics.max_constraint < 0.0;
    Ok(LaneFollowPlan {
        trajectory: solution.trajectory,
        feasible,
        diagnostics: solution.diagnostics,
    })
}
