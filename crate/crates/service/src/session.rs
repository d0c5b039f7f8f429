//! Per-connection protocol state.
//!
//! A [`Connection`] starts out waiting for `Hello`. After it, `Gaze` samples go through a
//! [`Resampler`] into a private [`Engine`], exactly as in headless replay, so a session fed
//! the samples of a trace produces the frames whose events make up that trace's event log.
//! Any protocol error is answered with one `Error` message, after which the connection closes.

use std::sync::Arc;

use gazeguide_core::engine::{Engine, EngineError};
use gazeguide_core::geometry::Pose6DoF;
use gazeguide_core::mediation::ModeKind;
use gazeguide_core::scenario::Exhibit;
use gazeguide_core::sim::{Resampler, TimeError};
use thiserror::Error;

use crate::registry::ScenarioRegistry;
use crate::wire::{ClientMessage, ErrorCode, Frame, ServerMessage};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl SessionError {
    pub fn code(&self) -> ErrorCode {
        match self {
            SessionError::Time(TimeError::NonMonotone { .. }) => ErrorCode::NonMonotoneTime,
            SessionError::Time(TimeError::Invalid(_)) => ErrorCode::InvalidTime,
            SessionError::Engine(_) => ErrorCode::Engine,
        }
    }
}

/// One visitor session on one scenario.
#[derive(Debug, Clone)]
pub struct Session {
    exhibit: Arc<Exhibit>,
    engine: Engine,
    clock: Resampler,
}

impl Session {
    pub fn new(exhibit: Arc<Exhibit>, mode: ModeKind) -> Self {
        let clock = Resampler::new(exhibit.tick_hz());
        let engine = Engine::new(exhibit.clone(), mode);
        Self { exhibit, engine, clock }
    }

    pub fn mode(&self) -> ModeKind {
        self.engine.mode()
    }

    pub fn exhibit(&self) -> &Arc<Exhibit> {
        &self.exhibit
    }

    pub fn ready(&self) -> ServerMessage {
        ServerMessage::Ready { mode: self.mode(), summary: Box::new(self.exhibit.summary()) }
    }

    /// Fresh engine and clock, same scenario and mode.
    pub fn reset(&mut self) {
        *self = Session::new(self.exhibit.clone(), self.mode());
    }

    /// Feeds one client sample and returns a frame for every tick that became due.
    pub fn gaze(&mut self, t: f64, pose: Pose6DoF) -> Result<Vec<Frame>, SessionError> {
        let due = self.clock.push(t, pose)?;
        let mut frames = Vec::with_capacity(due.len());
        for (tick, pose) in due {
            debug_assert_eq!(tick, self.engine.next_tick());
            frames.push(Frame::from(self.engine.step(pose.as_ref())?));
        }
        Ok(frames)
    }
}

/// Messages to send back, and whether to close the connection afterwards.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Reply {
    pub messages: Vec<ServerMessage>,
    pub close: bool,
}

impl Reply {
    fn send(messages: Vec<ServerMessage>) -> Self {
        Self { messages, close: false }
    }

    fn fail(code: ErrorCode, detail: impl Into<String>) -> Self {
        Self { messages: vec![ServerMessage::Error { code, detail: detail.into() }], close: true }
    }
}

/// Protocol state of one socket.
#[derive(Debug)]
pub struct Connection {
    registry: Arc<ScenarioRegistry>,
    session: Option<Session>,
    closed: bool,
}

impl Connection {
    pub fn new(registry: Arc<ScenarioRegistry>) -> Self {
        Self { registry, session: None, closed: false }
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Parses and handles one text message.
    pub fn handle_text(&mut self, text: &str) -> Reply {
        match serde_json::from_str::<ClientMessage>(text) {
            Ok(msg) => self.handle(msg),
            Err(e) => self.fail(ErrorCode::Protocol, format!("unreadable message: {e}")),
        }
    }

    /// Reports a transport-level protocol violation, such as a binary frame.
    pub fn protocol_error(&mut self, detail: impl Into<String>) -> Reply {
        self.fail(ErrorCode::Protocol, detail)
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Reply {
        if self.closed {
            return Reply { messages: Vec::new(), close: true };
        }
        match (msg, self.session.as_mut()) {
            (ClientMessage::Hello { scenario_id, mode }, None) => match self.registry.get(&scenario_id) {
                Some(exhibit) => {
                    let session = Session::new(exhibit, mode);
                    let ready = session.ready();
                    self.session = Some(session);
                    Reply::send(vec![ready])
                }
                None => self.fail(ErrorCode::ScenarioNotFound, format!("no scenario named {scenario_id:?}")),
            },
            (ClientMessage::Hello { .. }, Some(_)) => {
                self.fail(ErrorCode::Protocol, "Hello is only allowed once; use Reset to restart")
            }
            (_, None) => self.fail(ErrorCode::Protocol, "the first message must be Hello"),
            (ClientMessage::Reset, Some(session)) => {
                session.reset();
                Reply::send(vec![session.ready()])
            }
            (ClientMessage::Gaze { t, pose }, Some(session)) => {
                let pose = match pose.to_pose() {
                    Ok(p) => p,
                    Err(detail) => return self.fail(ErrorCode::InvalidPose, detail),
                };
                match session.gaze(t, pose) {
                    Ok(frames) => Reply::send(frames.into_iter().map(ServerMessage::Frame).collect()),
                    Err(e) => self.fail(e.code(), e.to_string()),
                }
            }
        }
    }

    fn fail(&mut self, code: ErrorCode, detail: impl Into<String>) -> Reply {
        self.closed = true;
        self.session = None;
        Reply::fail(code, detail)
    }
}
