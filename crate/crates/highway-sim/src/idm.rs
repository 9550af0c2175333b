//! Intelligent Driver Model longitudinal control.

use crate::profile::DriverProfile;

/// Hard floor on commanded deceleration (m/s^2): no profile brakes harder.
pub const DECEL_FLOOR: f64 = -9.0;

/// IDM acceleration for a follower at `speed`, approaching a leader at
/// `leader_speed` with bumper-to-bumper `gap` (m). Pass `gap = f64::INFINITY`
/// for a free road; a non-positive gap with a leader present commands the
/// braking floor.
pub fn idm_acceleration(
    profile: &DriverProfile,
    speed: f64,
    leader_speed: f64,
    gap: f64,
) -> f64 {
    let free_term = (speed / profile.desired_speed).powi(4);
    let accel = if gap.is_infinite() {
        profile.max_accel * (1.0 - free_term)
    } else if gap <= 0.0 {
        DECEL_FLOOR
    } else {
        let closing = speed - leader_speed;
        let desired_gap = profile.jam_distance
            + speed * profile.desired_time_headway
            + speed * closing / (2.0 * (profile.max_accel * profile.desired_decel.abs()).sqrt());
        profile.max_accel * (1.0 - free_term - (desired_gap / gap).powi(2))
    };
    accel.clamp(DECEL_FLOOR, profile.max_accel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{DriverKind, DriverProfile};

    #[test]
    fn braking_when_closing_on_slow_leader() {
        // Normal profile, follower 20 m/s closing at 5 m/s, gap 30 m.
        // Desired gap: 2 + 20*1.5 + 20*5/(2*sqrt(1.4*2)) = 61.88071523335984,
        // raw accel = 1.4*(1 - (20/33.3)^4 - (61.88.../30)^2) = -4.738736561267428.
        let p = DriverProfile::preset(DriverKind::Normal);
        let a = idm_acceleration(&p, 20.0, 15.0, 30.0);
        assert!((a - (-4.738736561267428)).abs() < 1e-12, "a = {a}");
    }

    #[test]
    fn free_road_at_desired_speed_is_zero() {
        for kind in DriverKind::ALL {
            let p = DriverProfile::preset(kind);
            let a = idm_acceleration(&p, p.desired_speed, 0.0, f64::INFINITY);
            assert!(a.abs() < 1e-12, "{kind:?}: {a}");
        }
    }

    #[test]
    fn free_road_from_standstill_is_max_accel() {
        let p = DriverProfile::preset(DriverKind::Aggressive);
        let a = idm_acceleration(&p, 0.0, 0.0, f64::INFINITY);
        assert_eq!(a, p.max_accel);
    }

    #[test]
    fn above_desired_speed_decelerates() {
        let p = DriverProfile::preset(DriverKind::Timid);
        let a = idm_acceleration(&p, p.desired_speed * 1.2, 0.0, f64::INFINITY);
        assert!(a < 0.0);
    }

    #[test]
    fn nonpositive_gap_commands_floor() {
        let p = DriverProfile::preset(DriverKind::Normal);
        assert_eq!(idm_acceleration(&p, 10.0, 10.0, 0.0), DECEL_FLOOR);
        assert_eq!(idm_acceleration(&p, 10.0, 10.0, -3.0), DECEL_FLOOR);
    }

    #[test]
    fn output_respects_bounds() {
        let p = DriverProfile::preset(DriverKind::Normal);
        // Severe closing rate at short distance saturates at the floor.
        let a = idm_acceleration(&p, 35.0, 0.0, 2.0);
        assert_eq!(a, DECEL_FLOOR);
        // Huge gap never exceeds max accel.
        let a = idm_acceleration(&p, 0.0, 30.0, 1e9);
        assert!(a <= p.max_accel + 1e-15);
    }
}
