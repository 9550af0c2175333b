//! Collision checks: oriented-rectangle overlap and road-boundary departure.

use serde::{Deserialize, Serialize};

use crate::road::RoadSpec;
use crate::vehicle::VehicleState;
use crate::world::World;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollisionEvent {
    /// Ego body overlaps the indexed NPC's body.
    Vehicle { npc_index: usize },
    /// An ego corner left the paved area laterally.
    Boundary,
}

fn project(corners: &[(f64, f64); 4], axis: (f64, f64)) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(x, y) in corners {
        let d = x * axis.0 + y * axis.1;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

/// Separating-axis test for two oriented rectangles.
pub fn rectangles_overlap(a: &VehicleState, b: &VehicleState) -> bool {
    let ca = a.corners();
    let cb = b.corners();
    // Edge normals of both rectangles; for a rectangle two suffice.
    let axes = [
        (a.heading.cos(), a.heading.sin()),
        (-a.heading.sin(), a.heading.cos()),
        (b.heading.cos(), b.heading.sin()),
        (-b.heading.sin(), b.heading.cos()),
    ];
    for axis in axes {
        let (alo, ahi) = project(&ca, axis);
        let (blo, bhi) = project(&cb, axis);
        if ahi < blo || bhi < alo {
            return false;
        }
    }
    true
}

/// True when any corner of the body lies outside [0, total_width] laterally.
pub fn outside_boundary(state: &VehicleState, road: &RoadSpec) -> bool {
    let width = road.total_width();
    state
        .corners()
        .iter()
        .any(|&(_, y)| y < 0.0 || y > width)
}

/// All collision events involving the ego this step.
pub fn detect_collisions(world: &World) -> Vec<CollisionEvent> {
    let ego = world.ego();
    let mut events = Vec::new();
    for (i, npc) in world.npcs().iter().enumerate() {
        if rectangles_overlap(ego, &npc.state) {
            events.push(CollisionEvent::Vehicle { npc_index: i });
        }
    }
    if outside_boundary(ego, world.road()) {
        events.push(CollisionEvent::Boundary);
    }
    events
}
