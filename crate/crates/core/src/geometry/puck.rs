//! The sliding puck: a gaze cursor that sits on the nearest surface along the gaze ray.
//!
//! Smoothing is cosmetic. Selection consumes raw hits, never the smoothed display values.

use serde::{Deserialize, Serialize};

use super::raycast::SurfaceHit;
use super::vector::{Direction3, Point3, Vec3};

/// Default smoothing time constant in seconds.
pub const DEFAULT_PUCK_TAU: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuckState {
    pub current_hit: Option<SurfaceHit>,
    pub display_point: Point3,
    pub display_normal: Direction3,
}

impl Default for PuckState {
    fn default() -> Self {
        Self { current_hit: None, display_point: Vec3::ZERO, display_normal: Direction3::UP }
    }
}

/// Advances the puck by `dt` seconds toward `hit` with exponential smoothing.
///
/// Without a hit the display keeps the last surface contact.
pub fn puck_step(puck: &PuckState, hit: Option<&SurfaceHit>, dt: f64, tau: f64) -> PuckState {
    debug_assert!(dt > 0.0);
    let Some(hit) = hit else {
        return PuckState { current_hit: None, ..*puck };
    };
    let alpha = if tau <= 0.0 { 1.0 } else { 1.0 - (-dt / tau).exp() };
    if alpha >= 1.0 {
        return PuckState { current_hit: Some(*hit), display_point: hit.point, display_normal: hit.normal };
    }
    let display_point = puck.display_point.lerp(hit.point, alpha);
    let blended = puck.display_normal.get().lerp(hit.normal.get(), alpha);
    // Opposite normals blend through zero; fall back to the target.
    let display_normal = Direction3::new(blended).unwrap_or(hit.normal);
    PuckState { current_hit: Some(*hit), display_point, display_normal }
}
