//! The guidance-weight schedule: an exponential decay from an initial
//! scale toward zero over the planned training horizon.

use serde::{Deserialize, Serialize};

/// β(t) = q1 / exp(q2·t/T): q1 sets the initial weight, q2 the decay rate,
/// and T the planned total number of optimizer updates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FadingSchedule {
    pub q1: f64,
    pub q2: f64,
    pub total_updates: u64,
}

impl FadingSchedule {
    pub fn new(q1: f64, q2: f64, total_updates: u64) -> Self {
        let s = Self {
            q1,
            q2,
            total_updates,
        };
        s.validate().expect("invalid fading schedule");
        s
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.q1.is_finite() && self.q1 >= 0.0) {
            return Err(format!("q1 must be finite and >= 0, got {}", self.q1));
        }
        if !(self.q2.is_finite() && self.q2 >= 0.0) {
            return Err(format!("q2 must be finite and >= 0, got {}", self.q2));
        }
        if self.total_updates == 0 {
            return Err("total_updates must be > 0".into());
        }
        Ok(())
    }

    /// Guidance weight at optimizer update `t` (0-based). β(0) = q1 exactly;
    /// strictly decreasing in t whenever q1 > 0 and q2 > 0.
    pub fn beta(&self, t: u64) -> f64 {
        self.q1 / (self.q2 * t as f64 / self.total_updates as f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn starts_exactly_at_q1() {
        for q1 in [0.0, 0.3, 1.0, 250.0] {
            let s = FadingSchedule::new(q1, 4.0, 1000);
            assert_eq!(s.beta(0), q1);
        }
    }

    #[test]
    fn matches_closed_form_oracles() {
        // Independently computed: e^-4 and e^-2.
        let s = FadingSchedule::new(1.0, 4.0, 10_000);
        assert!((s.beta(10_000) - 0.01831563888873418).abs() < 1e-12);
        assert!((s.beta(5_000) - 0.1353352832366127).abs() < 1e-12);
    }

    #[test]
    fn scales_linearly_in_q1() {
        let a = FadingSchedule::new(1.0, 4.0, 100);
        let b = FadingSchedule::new(7.0, 4.0, 100);
        for t in [0, 25, 50, 100] {
            assert!((b.beta(t) - 7.0 * a.beta(t)).abs() < 1e-12 * b.beta(t).abs().max(1.0));
        }
    }

    #[test]
    fn zero_decay_rate_keeps_constant_weight() {
        let s = FadingSchedule::new(3.0, 0.0, 100);
        for t in [0, 1, 50, 100] {
            assert_eq!(s.beta(t), 3.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FadingSchedule {
            q1: -1.0,
            q2: 4.0,
            total_updates: 10
        }
        .validate()
        .is_err());
        assert!(FadingSchedule {
            q1: 1.0,
            q2: f64::NAN,
            total_updates: 10
        }
        .validate()
        .is_err());
        assert!(FadingSchedule {
            q1: 1.0,
            q2: 4.0,
            total_updates: 0
        }
        .validate()
        .is_err());
    }

    proptest! {
        #[test]
        fn strictly_decreasing_for_positive_decay(
            q1 in 1e-6f64..1e3,
            q2 in 1e-3f64..20.0,
            total in 1u64..100_000,
            t1 in 0u64..100_000,
            dt in 1u64..10_000,
        ) {
            let s = FadingSchedule { q1, q2, total_updates: total };
            let t1 = t1 % (total + 1);
            let t2 = (t1 + dt).min(total);
            prop_assume!(t2 > t1);
            prop_assert!(s.beta(t2) < s.beta(t1));
            prop_assert!(s.beta(t1) <= q1);
            prop_assert!(s.beta(t2) > 0.0);
        }
    }
}
