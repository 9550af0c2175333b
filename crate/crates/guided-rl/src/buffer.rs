//! Fixed-capacity ring replay buffer storing, alongside each transition,
//! the reference controller's action at the same observation (captured at
//! collection time, so replays never re-query the reference controller).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One environment step. Observations are stored raw (unnormalized);
/// actions are in normalized units, one value in [-1, 1] per actuator.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: [f64; 2],
    pub reward: f64,
    pub next_obs: Vec<f64>,
    /// True only for genuine terminal states (collision or arrival), where
    /// bootstrapping must stop. A step cap is not terminal.
    pub terminal: bool,
    pub reference_action: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    data: Vec<Transition>,
    capacity: usize,
    write: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        Self {
            data: Vec::with_capacity(capacity.min(1 << 20)),
            capacity,
            write: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Appends, overwriting the oldest transition once full.
    pub fn push(&mut self, t: Transition) {
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.write] = t;
        }
        self.write = (self.write + 1) % self.capacity;
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.data[index]
    }

    /// Uniform sample (with replacement) of `n` indices.
    pub fn sample_indices(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
        assert!(!self.data.is_empty(), "cannot sample an empty buffer");
        (0..n).map(|_| rng.gen_range(0..self.data.len())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn transition(tag: f64) -> Transition {
        Transition {
            obs: vec![tag; 3],
            action: [tag, -tag],
            reward: tag,
            next_obs: vec![tag + 0.5; 3],
            terminal: false,
            reference_action: [0.0, 0.0],
        }
    }

    #[test]
    fn fills_then_wraps_overwriting_oldest() {
        let mut buf = ReplayBuffer::new(3);
        for i in 0..5 {
            buf.push(transition(i as f64));
        }
        assert_eq!(buf.len(), 3);
        // Slots now hold 3, 4, 2 (0 and 1 were overwritten).
        let rewards: Vec<f64> = (0..3).map(|i| buf.get(i).reward).collect();
        assert_eq!(rewards, vec![3.0, 4.0, 2.0]);
    }

    #[test]
    fn sampling_is_deterministic_per_seed_and_in_range() {
        let mut buf = ReplayBuffer::new(10);
        for i in 0..7 {
            buf.push(transition(i as f64));
        }
        let a = buf.sample_indices(&mut ChaCha8Rng::seed_from_u64(5), 100);
        let b = buf.sample_indices(&mut ChaCha8Rng::seed_from_u64(5), 100);
        assert_eq!(a, b);
        assert!(a.iter().all(|&i| i < 7));
        // All stored transitions should be reachable.
        let mut seen = [false; 7];
        for &i in &a {
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s), "indices drawn: {a:?}");
    }
}
