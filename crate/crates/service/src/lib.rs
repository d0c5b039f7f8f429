//! Real-time session server for the gaze engine.
//!
//! A client opens `/session`, sends `Hello`, then streams timestamped head poses. The server
//! resamples them onto the engine tick exactly like headless replay does and answers with
//! one `Frame` per tick. All mediation happens here; a client only renders frames.
//!
//! Endpoints:
//! - `GET /session`: WebSocket, JSON text messages (see [`wire`]).
//! - `GET /scenarios`: summaries of every loaded scenario.
//! - `GET /scenarios/{id}`: one summary.
//! - `GET /scenarios/{id}/world.obj`: the merged world mesh the highlight indices refer to.
//! - anything else: files from the optional static directory (the UI bundle).

pub mod registry;
pub mod server;
pub mod session;
pub mod wire;

pub use registry::{RegistryError, ScenarioRegistry};
pub use server::{router, serve, ServerConfig};
pub use session::{Connection, Reply, Session, SessionError};
pub use wire::{ClientMessage, ErrorCode, Frame, PuckView, ServerMessage, WirePose};
