//! State/control sequences over a fixed horizon.

use nalgebra::DVector;

/// A horizon-N trajectory: N+1 states and N controls.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    pub controls: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn new(states: Vec<DVector<f64>>, controls: Vec<DVector<f64>>) -> Self {
        assert_eq!(
            states.len(),
            controls.len() + 1,
            "need N+1 states for N controls"
        );
        Self { states, controls }
    }

    /// Horizon N (number of controls).
    pub fn horizon(&self) -> usize {
        self.controls.len()
    }

    pub fn is_finite(&self) -> bool {
        self.states.iter().all(|s| s.iter().all(|v| v.is_finite()))
            && self
                .controls
                .iter()
                .all(|u| u.iter().all(|v| v.is_finite()))
    }
}
