//! A scripted overtaking driver. Every planning cycle it asks the
//! trajectory optimizer for a clean plan — first biased to its home lane,
//! then to the passing lane — and executes the plan's controls when one
//! exists. When neither lane admits a clean plan it falls back to simple
//! feedback behaviors: following the leader, or braking/accelerating out of
//! an abandoned pass and merging back.

use nalgebra::DVector;

use cilqr::{plan_lane_follow, shifted_controls, LaneFollowPlan, PlanTarget};
use highway_sim::{
    idm_acceleration, Action, DriverKind, DriverProfile, Npc, Observation, Policy, World,
};

use crate::config::ExpertConfig;
use crate::fsm::{next_mode, DrivingMode, ModeInputs};
use crate::pid::PidController;

/// Front-to-rear axle distance of the ego's kinematic model (m); fixes the
/// steering-angle → lateral-acceleration conversion.
const WHEELBASE: f64 = 5.0;

pub struct ExpertPolicy {
    config: ExpertConfig,
    /// Car-following law used as a protective floor under the gap PID when
    /// closing fast on a leader.
    guard_profile: DriverProfile,
    home_lane: Option<usize>,
    mode: DrivingMode,
    active_plan: Option<LaneFollowPlan>,
    seed_home: Option<Vec<DVector<f64>>>,
    seed_opposite: Option<Vec<DVector<f64>>>,
    steps_since_plan: usize,
    accel_pid: PidController,
}

impl ExpertPolicy {
    pub fn new(config: ExpertConfig) -> Self {
        let mut guard_profile = DriverProfile::preset(DriverKind::Normal);
        guard_profile.desired_speed = config.desired_speed;
        let (ap, ai, ad) = config.accel_gains;
        Self {
            guard_profile,
            home_lane: None,
            mode: DrivingMode::Rlf,
            active_plan: None,
            seed_home: None,
            seed_opposite: None,
            steps_since_plan: usize::MAX,
            accel_pid: PidController::new(ap, ai, ad),
            config,
        }
    }

    pub fn config(&self) -> &ExpertConfig {
        &self.config
    }

    pub fn mode(&self) -> DrivingMode {
        self.mode
    }

    fn opposite_lane(&self, world: &World, home: usize) -> usize {
        (home + 1) % world.road().lane_count()
    }

    /// Shared cleanliness: strictly feasible, settles near the target lane
    /// center, and does not give up too much speed.
    fn clean(&self, plan: &LaneFollowPlan, center_y: f64) -> bool {
        plan.feasible
            && (plan.terminal_y() - center_y).abs() <= self.config.lane_center_tolerance
            && plan.terminal_speed() >= self.config.desired_speed - self.config.max_speed_deficit
    }

    /// Home-lane cleanliness additionally requires that the plan treats the
    /// lane as a lane: once the path reaches the lane band it must stay
    /// there. A plan that swerves out and back (dodging around somebody) is
    /// not clean lane keeping even when it is strictly feasible.
    fn clean_home(&self, plan: &LaneFollowPlan, center_y: f64) -> bool {
        if !self.clean(plan, center_y) {
            return false;
        }
        let tol = self.config.in_lane_tolerance;
        let mut entered = false;
        for state in &plan.trajectory.states {
            let inside = (state[1] - center_y).abs() <= tol;
            if entered && !inside {
                return false;
            }
            entered |= inside;
        }
        entered
    }

    /// Nearest vehicle ahead of the ego in `lane`, driving the same way.
    fn leader_in<'w>(&self, world: &'w World, lane: usize) -> Option<&'w Npc> {
        let ego = world.ego();
        world
            .npcs()
            .iter()
            .filter(|n| {
                n.state.lane_id == lane && n.state.direction == ego.direction && n.state.x > ego.x
            })
            .min_by(|a, b| {
                (a.state.x - ego.x)
                    .partial_cmp(&(b.state.x - ego.x))
                    .unwrap()
            })
    }

    /// A home-lane vehicle rides alongside the ego: targeting the home lane
    /// now would mean cutting in right next to it, so the pass stays
    /// committed until the window is clear.
    fn alongside_in_home(&self, world: &World, home: usize) -> bool {
        let ego = world.ego();
        world.npcs().iter().any(|n| {
            n.state.lane_id == home
                && n.state.direction == ego.direction
                && (n.state.x - ego.x) > -self.config.alongside_behind
                && (n.state.x - ego.x) < self.config.alongside_ahead
        })
    }

    /// Is the vehicle being passed still ahead? True when the nearest
    /// same-direction home-lane leader sits inside the distance the ego
    /// needs to react and comfortably match its speed.
    fn behind_obstruction(&self, world: &World, home: usize) -> bool {
        let ego = world.ego();
        match self.leader_in(world, home) {
            Some(leader) => {
                let gap = leader.state.x - ego.x;
                let speed_gap = (ego.speed.powi(2) - leader.state.speed.powi(2)).max(0.0);
                let window = self.config.reaction_time * ego.speed
                    + speed_gap / (2.0 * self.config.comfortable_decel);
                gap <= window.max(60.0)
            }
            None => false,
        }
    }

    /// No vehicle occupies the merge window next to the ego in `lane`.
    fn lane_clear(&self, world: &World, lane: usize) -> bool {
        let ego = world.ego();
        !world.npcs().iter().any(|n| {
            n.state.lane_id == lane
                && (n.state.x - ego.x) > -self.config.merge_clear_behind
                && (n.state.x - ego.x) < self.config.merge_clear_ahead
        })
    }

    fn replan(&mut self, world: &World, home: usize) {
        let road = world.road();
        let home_center = road.lane_center(home);
        let opposite = self.opposite_lane(world, home);
        let opposite_center = road.lane_center(opposite);

        // The home lane is only a target when nobody rides alongside there.
        let mut active = if self.alongside_in_home(world, home) {
            None
        } else {
            let home_target = PlanTarget {
                lane: home,
                desired_speed: self.config.desired_speed,
            };
            let plan_home = plan_lane_follow(
                world,
                &home_target,
                &self.config.planner,
                self.seed_home.as_deref(),
            )
            .ok();
            self.seed_home = plan_home.as_ref().map(|p| shifted_controls(&p.trajectory));
            plan_home.filter(|p| self.clean_home(p, home_center))
        };

        // The passing lane is only consulted when the home lane is blocked.
        if active.is_none() {
            let opposite_target = PlanTarget {
                lane: opposite,
                desired_speed: self.config.desired_speed,
            };
            let plan_opposite = plan_lane_follow(
                world,
                &opposite_target,
                &self.config.planner,
                self.seed_opposite.as_deref(),
            )
            .ok();
            self.seed_opposite = plan_opposite
                .as_ref()
                .map(|p| shifted_controls(&p.trajectory));
            active = plan_opposite.filter(|p| self.clean(p, opposite_center));
        }

        let inputs = ModeInputs {
            plan_available: active.is_some(),
            on_opposite_lane: world.ego().lane_id != home,
            behind_obstruction: self.behind_obstruction(world, home),
        };
        let mode = next_mode(inputs);
        if mode != self.mode {
            self.accel_pid.reset();
        }
        self.mode = mode;
        self.active_plan = active;
        self.steps_since_plan = 0;
    }

    /// Heading-aware steering toward a lateral target: point the wheels to
    /// cancel the heading error plus a cross-track correction, capped to a
    /// lateral-acceleration budget.
    fn steer_toward(&self, target_y: f64, world: &World) -> f64 {
        let ego = world.ego();
        let speed = ego.speed.max(1.0);
        let correction = (self.config.cross_track_gain * (target_y - ego.y) / speed).atan();
        let raw = -ego.heading + correction;
        // Small-angle model: lateral acceleration ≈ v²·δ / wheelbase.
        let limit = (self.config.max_lateral_accel * WHEELBASE / speed.powi(2)).min(1.0);
        raw.clamp(-limit, limit)
    }

    /// Where the fallback modes steer: back home when the merge window is
    /// clear, otherwise hold the center of the current lane.
    fn merge_target(&self, world: &World, home: usize) -> f64 {
        if self.lane_clear(world, home) {
            world.road().lane_center(home)
        } else {
            world.road().lane_center(world.ego().lane_id)
        }
    }

    /// Gap-PID acceleration toward the leader, floored by a car-following
    /// law so a hot approach still brakes in time.
    fn follow_leader(&mut self, world: &World, home: usize) -> f64 {
        let ego = world.ego();
        match self.leader_in(world, home) {
            Some(leader) => {
                let gap = (leader.state.x - ego.x) - (leader.state.length + ego.length) * 0.5;
                let desired_gap = self.guard_profile.jam_distance
                    + self.guard_profile.desired_time_headway * ego.speed;
                let pid = self.accel_pid.update(gap - desired_gap, world.dt());
                let guard =
                    idm_acceleration(&self.guard_profile, ego.speed, leader.state.speed, gap);
                pid.min(guard)
            }
            None => 0.5 * (self.config.desired_speed - ego.speed),
        }
    }
}

impl Policy for ExpertPolicy {
    fn act(&mut self, world: &World, _observation: &Observation) -> Action {
        let home = *self.home_lane.get_or_insert(world.ego().lane_id);
        if self.steps_since_plan >= self.config.replan_period_steps {
            self.replan(world, home);
        }
        self.steps_since_plan += 1;

        match self.mode {
            DrivingMode::Rlf => {
                let (accel, steer) = self
                    .active_plan
                    .as_ref()
                    .expect("a clean plan backs this mode")
                    .first_control();
                Action::new(accel, steer)
            }
            DrivingMode::Flv => {
                let accel = self.follow_leader(world, home);
                let steer = self.steer_toward(world.road().lane_center(home), world);
                Action::new(accel, steer)
            }
            DrivingMode::Dmb => {
                let steer = self.steer_toward(self.merge_target(world, home), world);
                Action::new(self.config.merge_brake, steer)
            }
            DrivingMode::Amb => {
                let steer = self.steer_toward(self.merge_target(world, home), world);
                let accel = if world.ego().speed < self.config.desired_speed + 5.0 {
                    self.config.merge_boost
                } else {
                    0.0
                };
                Action::new(accel, steer)
            }
        }
    }

    fn mode_label(&self) -> Option<&'static str> {
        Some(self.mode.label())
    }

    fn reset(&mut self) {
        self.home_lane = None;
        self.mode = DrivingMode::Rlf;
        self.active_plan = None;
        self.seed_home = None;
        self.seed_opposite = None;
        self.steps_since_plan = usize::MAX;
        self.accel_pid.reset();
    }
}

impl Default for ExpertPolicy {
    fn default() -> Self {
        Self::new(ExpertConfig::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use highway_sim::{ScenarioConfig, VehicleState};

    fn ego(x: f64, lane: usize, speed: f64) -> VehicleState {
        VehicleState {
            x,
            y: if lane == 0 { 2.0 } else { 6.0 },
            speed,
            heading: 0.0,
            length: 5.0,
            width: 2.0,
            lane_id: lane,
            direction: 1,
        }
    }

    fn oncoming_npc(x: f64, speed: f64, kind: DriverKind) -> Npc {
        let profile = DriverProfile::preset(kind);
        Npc::new(
            VehicleState {
                x,
                y: 6.0,
                speed,
                heading: std::f64::consts::PI,
                length: profile.length,
                width: profile.width,
                lane_id: 1,
                direction: -1,
            },
            profile,
            kind,
        )
    }

    fn same_dir_npc(x: f64, lane: usize, speed: f64, kind: DriverKind) -> Npc {
        let profile = DriverProfile::preset(kind);
        Npc::new(
            VehicleState {
                x,
                y: if lane == 0 { 2.0 } else { 6.0 },
                speed,
                heading: 0.0,
                length: profile.length,
                width: profile.width,
                lane_id: lane,
                direction: 1,
            },
            profile,
            kind,
        )
    }

    #[test]
    fn open_road_plans_lane_keeping() {
        let world = World::from_parts(ScenarioConfig::default(), ego(50.0, 0, 45.0), vec![]);
        let mut expert = ExpertPolicy::default();
        let obs = world.observe();
        let action = expert.act(&world, &obs);
        assert_eq!(expert.mode(), DrivingMode::Rlf);
        assert!(action.is_finite());
        // Nothing to do: tiny corrections only.
        assert!(action.accel().abs() < 1.0);
        assert!(action.steer().abs() < 0.05);
    }

    #[test]
    fn slow_leader_triggers_a_passing_plan() {
        let world = World::from_parts(
            ScenarioConfig::default(),
            ego(50.0, 0, 45.0),
            vec![same_dir_npc(155.0, 0, 12.0, DriverKind::Truck)],
        );
        let mut expert = ExpertPolicy::default();
        let obs = world.observe();
        let action = expert.act(&world, &obs);
        assert_eq!(expert.mode(), DrivingMode::Rlf);
        // The active plan heads for the passing lane.
        assert!(expert.active_plan.as_ref().unwrap().terminal_y() > 5.0);
        assert!(action.is_finite());
    }

    #[test]
    fn blocked_both_lanes_falls_back_to_following() {
        // A stream of oncoming cars every 60 m leaves no usable window in
        // the passing lane (a single car would: the planner can time a
        // pass around it).
        let world = World::from_parts(
            ScenarioConfig::default(),
            ego(50.0, 0, 45.0),
            vec![
                same_dir_npc(130.0, 0, 12.0, DriverKind::Truck),
                oncoming_npc(260.0, 33.3, DriverKind::Normal),
                oncoming_npc(320.0, 33.3, DriverKind::Normal),
                oncoming_npc(380.0, 33.3, DriverKind::Normal),
                oncoming_npc(440.0, 33.3, DriverKind::Normal),
            ],
        );
        let mut expert = ExpertPolicy::default();
        let obs = world.observe();
        let action = expert.act(&world, &obs);
        assert_eq!(expert.mode(), DrivingMode::Flv);
        // Closing at 33 m/s on a truck 80 m out: the guard brakes hard.
        assert!(action.accel() < -2.0, "accel {}", action.accel());
    }

    #[test]
    fn no_cut_in_alongside_the_passed_vehicle() {
        // Ego on the passing lane, truck right beside it in the home lane,
        // both lanes otherwise free: the home lane must not be targeted.
        let mut ego_state = ego(200.0, 0, 45.0);
        ego_state.y = 6.0;
        ego_state.lane_id = 1;
        let world = World::from_parts(
            ScenarioConfig::default(),
            ego_state,
            vec![same_dir_npc(204.0, 0, 12.0, DriverKind::Truck)],
        );
        let mut expert = ExpertPolicy {
            home_lane: Some(0),
            ..ExpertPolicy::default()
        };
        let obs = world.observe();
        expert.act(&world, &obs);
        assert_eq!(expert.mode(), DrivingMode::Rlf);
        let plan = expert.active_plan.as_ref().unwrap();
        assert!(
            plan.terminal_y() > 5.0,
            "cut in alongside the truck: terminal_y={}",
            plan.terminal_y()
        );
    }

    #[test]
    fn obstruction_window_scales_with_closing_speed() {
        let expert = ExpertPolicy::default();
        // Truck 91 m ahead at 20 m/s, ego at 45: well inside the reaction +
        // braking distance, so the ego still counts as behind it.
        let world = World::from_parts(
            ScenarioConfig::default(),
            ego(300.0, 0, 45.0),
            vec![same_dir_npc(391.0, 0, 20.0, DriverKind::Truck)],
        );
        assert!(expert.behind_obstruction(&world, 0));
        // Same geometry with matched speeds: nothing to react to beyond
        // 60 m, so the ego is not "behind" anything.
        let world = World::from_parts(
            ScenarioConfig::default(),
            ego(300.0, 0, 20.0),
            vec![same_dir_npc(391.0, 0, 20.0, DriverKind::Truck)],
        );
        assert!(!expert.behind_obstruction(&world, 0));
    }

    #[test]
    fn fallback_steering_counteracts_a_dive() {
        // Ego diving toward the boundary with a large negative heading;
        // the steering command must point back up even though the ego is
        // still above the target.
        let mut state = ego(200.0, 0, 45.0);
        state.y = 3.0;
        state.heading = -0.25;
        let world = World::from_parts(ScenarioConfig::default(), state, vec![]);
        let expert = ExpertPolicy::default();
        let steer = expert.steer_toward(2.0, &world);
        assert!(steer > 0.0, "steer {steer} should arrest the dive");
    }

    #[test]
    fn replans_only_on_schedule() {
        let world = World::from_parts(ScenarioConfig::default(), ego(50.0, 0, 45.0), vec![]);
        let mut expert = ExpertPolicy::default();
        let obs = world.observe();
        expert.act(&world, &obs);
        let after_first = expert.steps_since_plan;
        expert.act(&world, &obs);
        assert_eq!(expert.steps_since_plan, after_first + 1);
    }

    #[test]
    fn reset_forgets_the_home_lane() {
        let world = World::from_parts(ScenarioConfig::default(), ego(50.0, 1, 45.0), vec![]);
        let mut expert = ExpertPolicy::default();
        let obs = world.observe();
        expert.act(&world, &obs);
        assert_eq!(expert.home_lane, Some(1));
        expert.reset();
        assert_eq!(expert.home_lane, None);
    }
}
