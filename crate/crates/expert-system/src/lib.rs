//! A scripted overtaking driver for the two-lane highway simulator.
//!
//! The driver combines three layers:
//! - a receding-horizon trajectory optimizer (from the `cilqr` crate) that
//!   produces lane-keeping plans for the home lane and the passing lane,
//! - a four-mode supervisor that picks between executing a clean plan,
//!   following a slow leader, and braking or accelerating out of an
//!   abandoned pass,
//! - PID feedback loops that realize the fallback behaviors.

pub mod config;
pub mod expert;
pub mod fsm;
pub mod pid;

pub use config::ExpertConfig;
pub use expert::ExpertPolicy;
pub use fsm::{next_mode, DrivingMode, ModeInputs};
pub use pid::PidController;
