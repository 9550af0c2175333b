//! Drive one full episode of the interrupted-overtake scenario with the
//! scripted driver and print what happened.
//!
//! ```text
//! cargo run --release -p expert-system --example overtake [seed]
//! ```

use expert_system::ExpertPolicy;
use highway_sim::{Policy, ScriptedScenario, TerminationReason};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(7);

    let mut world = ScriptedScenario::OvertakeAbort.build(seed);
    let mut expert = ExpertPolicy::default();
    let mut last_mode = "";
    let mut reason = TerminationReason::Running;
    let mut steps = 0;

    println!("seed {seed}: ego starts at x={:.1}", world.ego().x);
    for npc in world.npcs() {
        println!(
            "  npc lane {} dir {:+} at x={:.1} doing {:.1} m/s",
            npc.state.lane_id, npc.state.direction, npc.state.x, npc.state.speed
        );
    }

    for step in 0..world.config().max_steps {
        let obs = world.observe();
        let action = expert.act(&world, &obs);
        if let Some(mode) = expert.mode_label() {
            if mode != last_mode {
                println!(
                    "t={t:6.2}s  mode -> {mode:4}  x={x:6.1} y={y:4.2} v={v:4.1}",
                    t = step as f64 * world.dt(),
                    x = world.ego().x,
                    y = world.ego().y,
                    v = world.ego().speed
                );
                last_mode = mode;
            }
        }
        let out = world.step(action).expect("episode still running");
        reason = out.reason;
        steps = step + 1;
        if out.done {
            break;
        }
    }

    let ego = world.ego();
    println!(
        "finished: {} after {steps} steps ({:.1}s) at x={:.1}, v={:.1}",
        reason.label(),
        steps as f64 * world.dt(),
        ego.x,
        ego.speed
    );
    if reason != TerminationReason::Destination {
        std::process::exit(1);
    }
}
