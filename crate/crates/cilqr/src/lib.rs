//! Constrained trajectory optimization for planar vehicles: an iterative
//! LQR core with exponential-barrier inequality handling, a closed-form
//! tracking-LQR used as an independent cross-check, and a lane-following
//! front end that builds planning problems straight from a traffic scene.

pub mod constraint;
pub mod cost;
pub mod dynamics;
pub mod error;
pub mod lane_follow;
pub mod riccati;
pub mod solver;
pub mod trajectory;

pub use constraint::{
    barrier, barrier_capped, barrier_derivatives, Constraint, ConstraintSpec,
    BARRIER_EXPONENT_CAP,
};
pub use cost::CostSpec;
pub use dynamics::{BicycleDynamics, Dynamics, LinearDynamics};
pub use error::CilqrError;
pub use lane_follow::{
    plan_lane_follow, shifted_controls, LaneFollowPlan, PlanTarget, PlannerSettings,
};
pub use riccati::{rollout_policy, solve_tracking_lqr, LqrPolicy};
pub use solver::{augmented_cost, solve, Solution, SolveDiagnostics, SolverConfig};
pub use trajectory::Trajectory;
