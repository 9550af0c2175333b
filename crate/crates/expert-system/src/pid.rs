//! Textbook PID with integrator anti-windup, used for steering and
//! car-following acceleration in the fallback driving modes.

#[derive(Clone, Debug)]
pub struct PidController {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Clamp on the accumulated integral (anti-windup).
    pub integral_limit: f64,
    integral: f64,
    prev_error: f64,
}

impl PidController {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            integral_limit: 50.0,
            integral: 0.0,
            prev_error: 0.0,
        }
    }

    pub fn with_integral_limit(mut self, limit: f64) -> Self {
        self.integral_limit = limit;
        self
    }

    /// One controller step; `dt` must be positive.
    pub fn update(&mut self, error: f64, dt: f64) -> f64 {
        self.integral = (self.integral + error * dt).clamp(-self.integral_limit, self.integral_limit);
        let derivative = (error - self.prev_error) / dt;
        self.prev_error = error;
        self.kp * error + self.ki * self.integral + self.kd * derivative
    }

    /// Drop accumulated state, e.g. when the driving mode changes.
    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev_error = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_error_accumulates_integral() {
        let mut pid = PidController::new(1.0, 0.1, 0.05);
        pid.update(1.0, 0.1);
        pid.update(1.0, 0.1);
        let third = pid.update(1.0, 0.1);
        // p = 1, i = 0.1 · 0.3, d = 0.
        assert!((third - 1.03).abs() < 1e-12, "got {third}");
    }

    #[test]
    fn derivative_reacts_to_error_change() {
        let mut pid = PidController::new(0.0, 0.0, 0.5);
        pid.update(1.0, 0.1);
        let out = pid.update(2.0, 0.1);
        assert!((out - 5.0).abs() < 1e-12);
    }

    #[test]
    fn integral_saturates_at_the_windup_clamp() {
        let mut pid = PidController::new(0.0, 1.0, 0.0).with_integral_limit(2.0);
        for _ in 0..1000 {
            pid.update(10.0, 0.1);
        }
        let out = pid.update(0.0, 0.1);
        assert!((out - 2.0).abs() < 1e-12);
        // Winds back down symmetrically.
        for _ in 0..1000 {
            pid.update(-10.0, 0.1);
        }
        let out = pid.update(0.0, 0.1);
        assert!((out + 2.0).abs() < 1e-12);
    }

    #[test]
    fn reset_clears_state() {
        let mut pid = PidController::new(1.0, 1.0, 1.0);
        pid.update(3.0, 0.1);
        pid.reset();
        let out = pid.update(0.0, 0.1);
        assert_eq!(out, 0.0);
    }
}
