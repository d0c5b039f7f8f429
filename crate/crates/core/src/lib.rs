//! Gaze-driven museum mediation engine.
//!
//! A visitor's head gaze is cast onto a world mesh (the exhibit plus virtual additions).
//! Where it lands decides which region of interest (ROI) is being looked at; a two-phase
//! dwell selection turns sustained looking into content selections; and one of three
//! initiative modes decides what may be selected and what the system cues.
//!
//! Everything runs on a fixed tick, so a recorded gaze trace always reproduces the same
//! event log.

pub mod engine;
pub mod geometry;
pub mod ids;
pub mod interaction;
pub mod mediation;
pub mod scenario;
pub mod sim;
pub mod trace;

pub use ids::{RoiId, UnitId};
