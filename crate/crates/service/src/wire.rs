//! JSON messages exchanged on `/session`. Every message is an object with a `type` field.
//!
//! Client to server:
//! - `{"type":"Hello","scenario_id":"viktoria","mode":"guided"}`
//! - `{"type":"Gaze","t":0.016,"pose":{"position":[x,y,z],"orientation":[w,x,y,z]}}`
//! - `{"type":"Reset"}`
//!
//! Server to client:
//! - `{"type":"Ready","mode":..,"summary":{..}}`
//! - `{"type":"Frame","t":"12/60","puck":{..},"cue":3,"dwell_fraction":0.5,"events":[..]}`
//! - `{"type":"Error","code":"non_monotone_time","detail":".."}`

use gazeguide_core::engine::TickOutput;
use gazeguide_core::geometry::{Direction3, Point3, Pose6DoF, Quat, Vec3};
use gazeguide_core::interaction::{InteractionEvent, TickTime};
use gazeguide_core::mediation::ModeKind;
use gazeguide_core::scenario::ScenarioSummary;
use gazeguide_core::RoiId;
use serde::{Deserialize, Serialize};

/// Largest quaternion norm error the server repairs by renormalizing. Files are stricter.
pub const WIRE_QUAT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ClientMessage {
    Hello { scenario_id: String, mode: ModeKind },
    Gaze { t: f64, pose: WirePose },
    Reset,
}

/// A pose as sent by clients. Browsers accumulate rounding in quaternions, so the norm is
/// checked against [`WIRE_QUAT_TOLERANCE`] rather than the file tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WirePose {
    pub position: [f64; 3],
    pub orientation: [f64; 4],
}

impl WirePose {
    pub fn to_pose(&self) -> Result<Pose6DoF, String> {
        let [x, y, z] = self.position;
        let position = Vec3::new(x, y, z);
        if !position.is_finite() {
            return Err("position must be finite".into());
        }
        let [w, qx, qy, qz] = self.orientation;
        let orientation = match Quat::new(w, qx, qy, qz) {
            Ok(q) => q,
            Err(_) => {
                let raw = Quat { w, x: qx, y: qy, z: qz };
                let n = raw.to_array().iter().map(|c| c * c).sum::<f64>().sqrt();
                if !((n - 1.0).abs() <= WIRE_QUAT_TOLERANCE) {
                    return Err(format!("orientation norm {n} is not 1"));
                }
                raw.renormalized().map_err(|e| e.to_string())?
            }
        };
        Ok(Pose6DoF::new(position, orientation))
    }
}

impl From<Pose6DoF> for WirePose {
    fn from(p: Pose6DoF) -> Self {
        Self { position: p.position.to_array(), orientation: p.orientation.to_array() }
    }
}

/// Where to draw the gaze puck.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuckView {
    pub point: Point3,
    pub normal: Direction3,
    /// Whether the gaze ray hit the exhibit this tick; without a hit the puck stays put.
    pub on_surface: bool,
}

/// Output of one engine tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: TickTime,
    pub puck: PuckView,
    /// Cue in force after this tick.
    pub cue: Option<RoiId>,
    /// Present exactly on ticks that reported dwell progress.
    pub dwell_fraction: Option<f64>,
    pub events: Vec<InteractionEvent>,
}

impl From<TickOutput> for Frame {
    fn from(out: TickOutput) -> Self {
        Self {
            t: out.t,
            puck: PuckView {
                point: out.puck.display_point,
                normal: out.puck.display_normal,
                on_surface: out.puck.current_hit.is_some(),
            },
            cue: out.cue,
            dwell_fraction: out.dwell_fraction,
            events: out.events,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Malformed JSON, unknown message type, or a message the session cannot accept now.
    Protocol,
    ScenarioNotFound,
    NonMonotoneTime,
    InvalidTime,
    InvalidPose,
    /// The engine rejected a step. Indicates a bug or a broken scenario.
    Engine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ServerMessage {
    Ready { mode: ModeKind, summary: Box<ScenarioSummary> },
    Frame(Frame),
    Error { code: ErrorCode, detail: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn client_messages_parse() {
        let hello: ClientMessage = serde_json::from_str(r#"{"type":"Hello","scenario_id":"viktoria","mode":"self"}"#).unwrap();
        assert_eq!(hello, ClientMessage::Hello { scenario_id: "viktoria".into(), mode: ModeKind::SelfGuided });
        let reset: ClientMessage = serde_json::from_str(r#"{"type":"Reset"}"#).unwrap();
        assert_eq!(reset, ClientMessage::Reset);
        let gaze: ClientMessage =
            serde_json::from_str(r#"{"type":"Gaze","t":0.5,"pose":{"position":[0,1.7,2],"orientation":[1,0,0,0]}}"#).unwrap();
        assert!(matches!(gaze, ClientMessage::Gaze { t, .. } if t == 0.5));
        assert!(serde_json::from_str::<ClientMessage>(r#"{"type":"Bye"}"#).is_err());
    }

    #[test]
    fn near_unit_orientation_is_repaired() {
        let s = 1.0 + 5e-7;
        let p = WirePose { position: [0.0; 3], orientation: [s, 0.0, 0.0, 0.0] };
        assert_eq!(p.to_pose().unwrap().orientation, Quat::IDENTITY);
        let exact = WirePose { position: [0.0; 3], orientation: [0.6, 0.8, 0.0, 0.0] };
        assert_eq!(exact.to_pose().unwrap().orientation.to_array(), [0.6, 0.8, 0.0, 0.0]);
        let bad = WirePose { position: [0.0; 3], orientation: [1.1, 0.0, 0.0, 0.0] };
        assert!(bad.to_pose().is_err());
        let nan = WirePose { position: [f64::NAN, 0.0, 0.0], orientation: [1.0, 0.0, 0.0, 0.0] };
        assert!(nan.to_pose().is_err());
    }

    #[test]
    fn server_message_shapes() {
        let e = ServerMessage::Error { code: ErrorCode::NonMonotoneTime, detail: "x".into() };
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"type":"Error","code":"non_monotone_time","detail":"x"}"#);
        let f = ServerMessage::Frame(Frame {
            t: TickTime { tick: 3, hz: 60 },
            puck: PuckView { point: Vec3::ZERO, normal: Direction3::UP, on_surface: false },
            cue: Some(RoiId(4)),
            dwell_fraction: None,
            events: vec![InteractionEvent::SystemCueShown { roi: RoiId(4) }],
        });
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.starts_with(r#"{"type":"Frame","t":"3/60","#), "{text}");
        assert!(text.contains(r#""events":[{"type":"SystemCueShown","payload":{"roi":4}}]"#), "{text}");
        assert_eq!(serde_json::from_str::<ServerMessage>(&text).unwrap(), f);
    }
}
