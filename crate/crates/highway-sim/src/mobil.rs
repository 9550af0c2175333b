//! MOBIL lane-change decision: safety check plus politeness-weighted incentive.

use crate::idm::idm_acceleration;
use crate::profile::DriverProfile;

/// Minimal view of a vehicle for gap computation along the travel axis.
/// Positions are center x projected onto the lane direction, so "ahead"
/// always means a larger `center`.
#[derive(Clone, Copy, Debug)]
pub struct MobilVehicle {
    pub center: f64,
    pub speed: f64,
    pub length: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct MobilFollower {
    pub vehicle: MobilVehicle,
    pub profile: DriverProfile,
}

/// Who the candidate would interact with in one lane.
#[derive(Clone, Copy, Debug, Default)]
pub struct LaneContext {
    pub leader: Option<MobilVehicle>,
    pub follower: Option<MobilFollower>,
}

/// Decision input: the candidate vehicle plus its current and target lanes.
#[derive(Clone, Debug)]
pub struct MobilContext {
    pub ego: MobilVehicle,
    pub ego_profile: DriverProfile,
    pub current: LaneContext,
    pub target: LaneContext,
}

fn gap_between(rear: &MobilVehicle, front: &MobilVehicle) -> f64 {
    (front.center - rear.center) - (front.length + rear.length) / 2.0
}

fn accel_toward(
    follower: &MobilVehicle,
    profile: &DriverProfile,
    leader: Option<&MobilVehicle>,
) -> f64 {
    match leader {
        Some(l) => idm_acceleration(profile, follower.speed, l.speed, gap_between(follower, l)),
        None => idm_acceleration(profile, follower.speed, 0.0, f64::INFINITY),
    }
}

/// Returns true when the candidate should change into the target lane:
/// the move must be safe for the new follower and the politeness-weighted
/// acceleration gain must clear the profile's threshold.
pub fn mobil_decision(ctx: &MobilContext) -> bool {
    // Never cut into an overlapping slot.
    if let Some(l) = &ctx.target.leader {
        if gap_between(&ctx.ego, l) <= 0.0 {
            return false;
        }
    }
    if let Some(f) = &ctx.target.follower {
        if gap_between(&f.vehicle, &ctx.ego) <= 0.0 {
            return false;
        }
    }

    // Safety: the new follower must not be forced to brake harder than the
    // candidate's own safe-braking limit tolerates.
    let new_follower_after = match &ctx.target.follower {
        Some(f) => {
            let a = accel_toward(&f.vehicle, &f.profile, Some(&ctx.ego));
            if a < -ctx.ego_profile.safe_braking {
                return false;
            }
            Some((f, a))
        }
        None => None,
    };

    // Incentive: ego gain plus politeness-weighted effect on both followers.
    let ego_now = accel_toward(&ctx.ego, &ctx.ego_profile, ctx.current.leader.as_ref());
    let ego_after = accel_toward(&ctx.ego, &ctx.ego_profile, ctx.target.leader.as_ref());

    let mut others = 0.0;
    if let Some((f, after)) = new_follower_after {
        let now = accel_toward(&f.vehicle, &f.profile, ctx.target.leader.as_ref());
        others += after - now;
    }
    if let Some(f) = &ctx.current.follower {
        let now = accel_toward(&f.vehicle, &f.profile, Some(&ctx.ego));
        let after = accel_toward(&f.vehicle, &f.profile, ctx.current.leader.as_ref());
        others += after - now;
    }

    (ego_after - ego_now) + ctx.ego_profile.politeness * others
        > ctx.ego_profile.accel_threshold
}
