//! Fixed-size kinematic observation: ego first, then nearest neighbors.

use serde::{Deserialize, Serialize};

use crate::world::World;

/// One observed vehicle in global coordinates. A `presence` of 0 marks a
/// padding row whose remaining entries are all zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObsRow {
    pub presence: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub heading: f64,
}

impl ObsRow {
    pub const WIDTH: usize = 6;

    pub fn to_array(&self) -> [f64; Self::WIDTH] {
        [self.presence, self.x, self.y, self.vx, self.vy, self.heading]
    }
}

/// M×6 observation matrix; row 0 is always the ego vehicle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub rows: Vec<ObsRow>,
}

impl Observation {
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Row-major flattening, the shape consumed by a policy network.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len() * ObsRow::WIDTH);
        for row in &self.rows {
            out.extend_from_slice(&row.to_array());
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().all(|r| r.to_array().iter().all(|v| v.is_finite()))
    }
}

/// Builds the M×6 observation: ego in row 0, then the nearest `m - 1`
/// neighbors by Euclidean distance (ties broken by spawn order), then
/// all-zero padding rows.
pub fn build_observation(world: &World, m: usize) -> Observation {
    let ego = world.ego();
    let (evx, evy) = ego.velocity();
    let mut rows = Vec::with_capacity(m);
    rows.push(ObsRow {
        presence: 1.0,
        x: ego.x,
        y: ego.y,
        vx: evx,
        vy: evy,
        heading: ego.heading,
    });

    let mut neighbors: Vec<(f64, usize)> = world
        .npcs()
        .iter()
        .enumerate()
        .map(|(i, npc)| {
            let dx = npc.state.x - ego.x;
            let dy = npc.state.y - ego.y;
            ((dx * dx + dy * dy).sqrt(), i)
        })
        .collect();
    neighbors.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    for &(_, i) in neighbors.iter().take(m.saturating_sub(1)) {
        let npc = &world.npcs()[i];
        rows.push(ObsRow {
            presence: 1.0,
            x: npc.state.x,
            y: npc.state.y,
            vx: npc.state.speed * npc.state.heading.cos(),
            vy: npc.lateral_rate,
            heading: npc.state.heading,
        });
    }
    while rows.len() < m {
        rows.push(ObsRow::default());
    }
    Observation { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;
    use crate::profile::{DriverKind, DriverProfile};
    use crate::vehicle::VehicleState;
    use crate::world::{Npc, World};

    fn ego_at(x: f64, y: f64, speed: f64) -> VehicleState {
        VehicleState {
            x,
            y,
            speed,
            heading: 0.0,
            length: 5.0,
            width: 2.0,
            lane_id: 0,
            direction: 1,
        }
    }

    fn npc_at(x: f64, y: f64, speed: f64, lane: usize, dir: i8) -> Npc {
        let heading = if dir == 1 { 0.0 } else { std::f64::consts::PI };
        Npc::new(
            VehicleState {
                x,
                y,
                speed,
                heading,
                length: 5.0,
                width: 2.0,
                lane_id: lane,
                direction: dir,
            },
            DriverProfile::preset(DriverKind::Normal),
            DriverKind::Normal,
        )
    }

    fn world_with(npcs: Vec<Npc>) -> World {
        World::from_parts(ScenarioConfig::default(), ego_at(100.0, 2.0, 30.0), npcs)
    }

    #[test]
    fn ego_only_pads_remaining_rows() {
        let world = world_with(vec![]);
        let obs = build_observation(&world, 7);
        assert_eq!(obs.m(), 7);
        assert_eq!(obs.rows[0].presence, 1.0);
        assert_eq!(obs.rows[0].x, 100.0);
        assert_eq!(obs.rows[0].vx, 30.0);
        for row in &obs.rows[1..] {
            assert_eq!(*row, ObsRow::default());
        }
    }

    #[test]
    fn single_npc_occupies_row_one() {
        let world = world_with(vec![npc_at(150.0, 2.0, 20.0, 0, 1)]);
        let obs = build_observation(&world, 7);
        assert_eq!(obs.rows[1].presence, 1.0);
        assert_eq!(obs.rows[1].x, 150.0);
        assert_eq!(obs.rows[1].vx, 20.0);
        for row in &obs.rows[2..] {
            assert_eq!(*row, ObsRow::default());
        }
    }

    #[test]
    fn ten_npcs_sorted_by_distance() {
        // Ego at x=100; NPC offsets chosen so distance order differs from
        // insertion order. Verified against an exhaustive sort of all offsets.
        let offsets = [47.0, -13.0, 88.0, 5.0, -60.0, 29.0, -95.0, 71.0, -22.0, 36.0];
        let npcs: Vec<Npc> = offsets
            .iter()
            .map(|dx| npc_at(100.0 + dx, 2.0, 20.0, 0, 1))
            .collect();
        let world = world_with(npcs);
        let obs = build_observation(&world, 7);

        let mut sorted = offsets.to_vec();
        sorted.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
        let expected_x: Vec<f64> = sorted.iter().take(6).map(|dx| 100.0 + dx).collect();
        let got_x: Vec<f64> = obs.rows[1..].iter().map(|r| r.x).collect();
        assert_eq!(got_x, expected_x);
        assert!(obs.rows.iter().all(|r| r.presence == 1.0));
    }

    #[test]
    fn oncoming_npc_has_negative_vx() {
        let world = world_with(vec![npc_at(200.0, 6.0, 25.0, 1, -1)]);
        let obs = build_observation(&world, 3);
        assert!((obs.rows[1].vx - (-25.0)).abs() < 1e-12);
        assert!((obs.rows[1].heading - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn flatten_is_row_major() {
        let world = world_with(vec![npc_at(110.0, 2.0, 20.0, 0, 1)]);
        let obs = build_observation(&world, 3);
        let flat = obs.flatten();
        assert_eq!(flat.len(), 18);
        assert_eq!(flat[0], 1.0); // ego presence
        assert_eq!(flat[1], 100.0); // ego x
        assert_eq!(flat[6], 1.0); // npc presence
        assert_eq!(flat[7], 110.0); // npc x
        assert_eq!(&flat[12..], &[0.0; 6]); // padding row
    }
}
