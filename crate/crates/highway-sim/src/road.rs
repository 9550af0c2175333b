//! Road geometry: a straight two-lane segment with per-lane travel direction.

use serde::{Deserialize, Serialize};

/// Straight road running along +x. Lane 0 spans y in [0, lane_width),
/// lane 1 spans [lane_width, 2*lane_width), and so on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoadSpec {
    /// Segment length (m); the destination line sits at x = length.
    pub length: f64,
    /// Width of each lane (m).
    pub lane_width: f64,
    /// Travel direction per lane: +1 means toward +x, -1 toward -x.
    pub lane_directions: Vec<i8>,
}

impl Default for RoadSpec {
    fn default() -> Self {
        Self {
            length: 1000.0,
            lane_width: 4.0,
            lane_directions: vec![1, -1],
        }
    }
}

impl RoadSpec {
    pub fn lane_count(&self) -> usize {
        self.lane_directions.len()
    }

    /// Total paved width (m).
    pub fn total_width(&self) -> f64 {
        self.lane_width * self.lane_count() as f64
    }

    /// Centerline y of a lane.
    pub fn lane_center(&self, lane: usize) -> f64 {
        (lane as f64 + 0.5) * self.lane_width
    }

    /// Lane index containing the given y, clamped to the paved area.
    pub fn lane_at(&self, y: f64) -> usize {
        if y <= 0.0 {
            return 0;
        }
        let idx = (y / self.lane_width).floor() as usize;
        idx.min(self.lane_count() - 1)
    }

    pub fn direction_of(&self, lane: usize) -> i8 {
        self.lane_directions[lane]
    }

    /// Lanes adjacent to `lane` that carry the same travel direction.
    pub fn same_direction_neighbors(&self, lane: usize) -> Vec<usize> {
        let dir = self.lane_directions[lane];
        let mut out = Vec::new();
        if lane > 0 && self.lane_directions[lane - 1] == dir {
            out.push(lane - 1);
        }
        if lane + 1 < self.lane_count() && self.lane_directions[lane + 1] == dir {
            out.push(lane + 1);
        }
        out
    }

    pub fn validate(&self) -> bool {
        self.length > 0.0
            && self.lane_width > 0.0
            && !self.lane_directions.is_empty()
            && self.lane_directions.iter().all(|d| *d == 1 || *d == -1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry() {
        let road = RoadSpec::default();
        assert!(road.validate());
        assert_eq!(road.lane_count(), 2);
        assert_eq!(road.total_width(), 8.0);
        assert_eq!(road.lane_center(0), 2.0);
        assert_eq!(road.lane_center(1), 6.0);
        assert_eq!(road.direction_of(0), 1);
        assert_eq!(road.direction_of(1), -1);
    }

    #[test]
    fn lane_lookup() {
        let road = RoadSpec::default();
        assert_eq!(road.lane_at(0.5), 0);
        assert_eq!(road.lane_at(3.999), 0);
        assert_eq!(road.lane_at(4.0), 1);
        assert_eq!(road.lane_at(7.9), 1);
        // Out-of-pavement queries clamp instead of panicking.
        assert_eq!(road.lane_at(-1.0), 0);
        assert_eq!(road.lane_at(11.0), 1);
    }

    #[test]
    fn opposing_lanes_are_not_neighbors() {
        let road = RoadSpec::default();
        assert!(road.same_direction_neighbors(0).is_empty());
        assert!(road.same_direction_neighbors(1).is_empty());

        let three = RoadSpec {
            length: 500.0,
            lane_width: 4.0,
            lane_directions: vec![1, 1, -1],
        };
        assert_eq!(three.same_direction_neighbors(0), vec![1]);
        assert_eq!(three.same_direction_neighbors(1), vec![0]);
        assert!(three.same_direction_neighbors(2).is_empty());
    }
}
