//! Driving modes and the transition rule that picks one each planning
//! cycle.

use serde::{Deserialize, Serialize};

/// What the driver is doing right now.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DrivingMode {
    /// A clean optimizer plan exists (lane keeping or an active pass);
    /// execute its controls directly.
    Rlf,
    /// No clean plan and still in the home lane: fall in behind the leader.
    Flv,
    /// Pass abandoned while still behind the obstructing vehicle: brake and
    /// merge back behind it.
    Dmb,
    /// Pass abandoned after drawing level: accelerate clear and merge back
    /// ahead.
    Amb,
}

impl DrivingMode {
    pub fn label(self) -> &'static str {
        match self {
            DrivingMode::Rlf => "rlf",
            DrivingMode::Flv => "flv",
            DrivingMode::Dmb => "dmb",
            DrivingMode::Amb => "amb",
        }
    }
}

/// Inputs to the transition rule, computed fresh each planning cycle.
#[derive(Clone, Copy, Debug)]
pub struct ModeInputs {
    /// A clean plan (for either lane) exists.
    pub plan_available: bool,
    /// The body has left the home lane.
    pub on_opposite_lane: bool,
    /// The vehicle being passed is still ahead of us (centers compared).
    pub behind_obstruction: bool,
}

/// Total and exclusive: every input combination maps to exactly one mode.
pub fn next_mode(inputs: ModeInputs) -> DrivingMode {
    if inputs.plan_available {
        DrivingMode::Rlf
    } else if !inputs.on_opposite_lane {
        DrivingMode::Flv
    } else if inputs.behind_obstruction {
        DrivingMode::Dmb
    } else {
        DrivingMode::Amb
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_combination_maps_to_exactly_one_mode() {
        let mut seen = Vec::new();
        for plan in [false, true] {
            for opposite in [false, true] {
                for behind in [false, true] {
                    let mode = next_mode(ModeInputs {
                        plan_available: plan,
                        on_opposite_lane: opposite,
                        behind_obstruction: behind,
                    });
                    seen.push(mode);
                }
            }
        }
        assert_eq!(seen.len(), 8);
        // A clean plan always wins.
        for (i, mode) in seen.iter().enumerate() {
            if i >= 4 {
                assert_eq!(*mode, DrivingMode::Rlf);
            }
        }
    }

    #[test]
    fn fallbacks_split_by_position() {
        let no_plan = |opposite, behind| {
            next_mode(ModeInputs {
                plan_available: false,
                on_opposite_lane: opposite,
                behind_obstruction: behind,
            })
        };
        assert_eq!(no_plan(false, false), DrivingMode::Flv);
        assert_eq!(no_plan(false, true), DrivingMode::Flv);
        assert_eq!(no_plan(true, true), DrivingMode::Dmb);
        assert_eq!(no_plan(true, false), DrivingMode::Amb);
    }

    #[test]
    fn labels_are_distinct() {
        let labels = [
            DrivingMode::Rlf.label(),
            DrivingMode::Flv.label(),
            DrivingMode::Dmb.label(),
            DrivingMode::Amb.label(),
        ];
        for i in 0..labels.len() {
            for j in (i + 1)..labels.len() {
                assert_ne!(labels[i], labels[j]);
            }
        }
    }
}
