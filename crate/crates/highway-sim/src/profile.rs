//! Driver behavior profiles for IDM/MOBIL traffic.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DriverKind {
    Timid,
    Normal,
    Aggressive,
    Truck,
}

impl DriverKind {
    pub const ALL: [DriverKind; 4] = [
        DriverKind::Timid,
        DriverKind::Normal,
        DriverKind::Aggressive,
        DriverKind::Truck,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            DriverKind::Timid => "timid",
            DriverKind::Normal => "normal",
            DriverKind::Aggressive => "aggressive",
            DriverKind::Truck => "truck",
        }
    }
}

/// IDM/MOBIL parameter set for one driver type.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverProfile {
    /// Free-flow target speed (m/s).
    pub desired_speed: f64,
    /// Desired time headway to the leader (s).
    pub desired_time_headway: f64,
    /// Minimum bumper-to-bumper distance at standstill (m).
    pub jam_distance: f64,
    /// Maximum acceleration (m/s^2).
    pub max_accel: f64,
    /// Comfortable deceleration (m/s^2, negative).
    pub desired_decel: f64,
    /// MOBIL politeness factor in [0, 1].
    pub politeness: f64,
    /// MOBIL safe braking limit imposed on the new follower (m/s^2, positive).
    pub safe_braking: f64,
    /// MOBIL lane-change incentive threshold (m/s^2).
    pub accel_threshold: f64,
    /// Body length (m).
    pub length: f64,
    /// Body width (m).
    pub width: f64,
}

impl DriverProfile {
    pub fn preset(kind: DriverKind) -> Self {
        match kind {
            DriverKind::Timid => Self {
                desired_speed: 27.8,
                desired_time_headway: 2.0,
                jam_distance: 4.0,
                max_accel: 0.8,
                desired_decel: -1.0,
                politeness: 1.0,
                safe_braking: 1.0,
                accel_threshold: 0.2,
                length: 5.0,
                width: 2.0,
            },
            DriverKind::Normal => Self {
                desired_speed: 33.3,
                desired_time_headway: 1.5,
                jam_distance: 2.0,
                max_accel: 1.4,
                desired_decel: -2.0,
                politeness: 0.5,
                safe_braking: 2.0,
                accel_threshold: 0.1,
                length: 5.0,
                width: 2.0,
            },
            DriverKind::Aggressive => Self {
                desired_speed: 38.9,
                desired_time_headway: 1.0,
                jam_distance: 0.0,
                max_accel: 2.0,
                desired_decel: -3.0,
                politeness: 0.0,
                safe_braking: 3.0,
                accel_threshold: 0.0,
                length: 5.0,
                width: 2.0,
            },
            DriverKind::Truck => Self {
                desired_speed: 23.6,
                desired_time_headway: 2.0,
                jam_distance: 4.0,
                max_accel: 0.7,
                desired_decel: -2.0,
                politeness: 1.0,
                safe_braking: 1.0,
                accel_threshold: 0.2,
                length: 6.0,
                width: 2.5,
            },
        }
    }

    pub fn validate(&self) -> bool {
        self.desired_speed >= 0.0
            && self.desired_time_headway >= 0.0
            && self.max_accel > 0.0
            && self.desired_decel < 0.0
            && (0.0..=1.0).contains(&self.politeness)
            && self.length > 0.0
            && self.width > 0.0
    }
}
