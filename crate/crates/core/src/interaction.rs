//! Two-phase gaze selection: hover, then highlight plus dwell, then confirm.
//!
//! [`selection_step`] is a pure per-tick transition. All durations are converted to whole
//! ticks up front, so timers advance by exactly one tick per step and runs are reproducible
//! bit for bit.
//!
//! The state has two orthogonal parts: the targeting phase (`Idle`, `Hovering`, `Dwelling`)
//! and an optional content delivery in progress. Whether a new selection may start while
//! content plays is decided by the caller through the `enabled` set.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{RoiId, UnitId};

pub type Tick = u64;

/// Timing knobs for dwell selection, in seconds except for the tick rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub hover_duration: f64,
    pub dwell_duration: f64,
    pub exit_grace: f64,
    /// Engine tick rate. The tick length is `1 / tick_hz` seconds.
    pub tick_hz: u32,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { hover_duration: 2.0, dwell_duration: 2.0, exit_grace: 0.3, tick_hz: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("invalid selection config: {0}")]
    InvalidConfig(String),
    #[error("cue ROI {0} is not in the enabled set")]
    CueNotEnabled(RoiId),
    #[error("no content unit is linked to ROI {0}")]
    NoContentForRoi(RoiId),
    #[error("unknown content unit {0}")]
    UnknownUnit(UnitId),
}

impl SelectionConfig {
    pub fn tick_seconds(&self) -> f64 {
        1.0 / f64::from(self.tick_hz)
    }

    pub fn validate(&self) -> Result<(), SelectionError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.hover_duration) || !positive(self.dwell_duration) || !positive(self.exit_grace) {
            return Err(SelectionError::InvalidConfig("durations must be positive".into()));
        }
        if self.tick_hz == 0 {
            return Err(SelectionError::InvalidConfig("tick_hz must be positive".into()));
        }
        if self.exit_grace >= self.hover_duration {
            return Err(SelectionError::InvalidConfig("exit_grace must be shorter than hover_duration".into()));
        }
        Ok(())
    }

    /// Number of whole ticks closest to `seconds`.
    pub fn ticks(&self, seconds: f64) -> Tick {
        (seconds * f64::from(self.tick_hz)).round().max(0.0) as Tick
    }

    pub fn timing(&self) -> Result<SelectionTiming, SelectionError> {
        self.validate()?;
        Ok(SelectionTiming {
            hover_ticks: self.ticks(self.hover_duration).max(1),
            dwell_ticks: self.ticks(self.dwell_duration).max(1),
            grace_ticks: self.ticks(self.exit_grace),
        })
    }
}

/// [`SelectionConfig`] resolved to tick counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionTiming {
    pub hover_ticks: Tick,
    pub dwell_ticks: Tick,
    pub grace_ticks: Tick,
}

/// Which party holds the initiative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initiative {
    User,
    System,
}

impl Initiative {
    pub fn other(self) -> Self {
        match self {
            Initiative::User => Initiative::System,
            Initiative::System => Initiative::User,
        }
    }
}

/// Events emitted by selection and mediation. Serialized as `{"type": .., "payload": {..}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", deny_unknown_fields)]
pub enum InteractionEvent {
    GazeEnteredRoi { roi: RoiId },
    GazeExitedRoi { roi: RoiId },
    RoiHighlighted { roi: RoiId },
    DwellStarted { roi: RoiId },
    DwellProgress { roi: RoiId, fraction: f64 },
    SelectionConfirmed { roi: RoiId },
    ParticlesCleared {},
    ContentStarted { unit: UnitId },
    ContentFinished { unit: UnitId },
    SystemCueShown { roi: RoiId },
    SystemCueWithdrawn { roi: RoiId },
    InitiativeSwitched { holder: Initiative },
    ConclusionStarted {},
    SessionCompleted {},
}

impl InteractionEvent {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GazeEnteredRoi { .. } => "GazeEnteredRoi",
            Self::GazeExitedRoi { .. } => "GazeExitedRoi",
            Self::RoiHighlighted { .. } => "RoiHighlighted",
            Self::DwellStarted { .. } => "DwellStarted",
            Self::DwellProgress { .. } => "DwellProgress",
            Self::SelectionConfirmed { .. } => "SelectionConfirmed",
            Self::ParticlesCleared {} => "ParticlesCleared",
            Self::ContentStarted { .. } => "ContentStarted",
            Self::ContentFinished { .. } => "ContentFinished",
            Self::SystemCueShown { .. } => "SystemCueShown",
            Self::SystemCueWithdrawn { .. } => "SystemCueWithdrawn",
            Self::InitiativeSwitched { .. } => "InitiativeSwitched",
            Self::ConclusionStarted {} => "ConclusionStarted",
            Self::SessionCompleted {} => "SessionCompleted",
        }
    }
}

/// A tick count at a given rate. Serialized as the exact rational `"ticks/hz"` so logs carry
/// no float formatting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TickTime {
    pub tick: Tick,
    pub hz: u32,
}

impl TickTime {
    pub fn seconds(self) -> f64 {
        self.tick as f64 / f64::from(self.hz)
    }
}

impl fmt::Display for TickTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.tick, self.hz)
    }
}

impl std::str::FromStr for TickTime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (t, hz) = s.split_once('/').ok_or_else(|| format!("expected ticks/hz, got {s:?}"))?;
        let tick = t.parse().map_err(|_| format!("bad tick count {t:?}"))?;
        let hz: u32 = hz.parse().map_err(|_| format!("bad rate {hz:?}"))?;
        if hz == 0 {
            return Err("rate must be positive".into());
        }
        Ok(TickTime { tick, hz })
    }
}

impl Serialize for TickTime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TickTime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An event stamped with the tick on which it was emitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedEvent {
    pub t: TickTime,
    #[serde(flatten)]
    pub event: InteractionEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SelectionPhase {
    Idle,
    Hovering { roi: RoiId, elapsed: Tick, grace_elapsed: Tick },
    Dwelling { roi: RoiId, elapsed: Tick, grace_elapsed: Tick },
}

impl SelectionPhase {
    pub fn roi(&self) -> Option<RoiId> {
        match *self {
            SelectionPhase::Idle => None,
            SelectionPhase::Hovering { roi, .. } | SelectionPhase::Dwelling { roi, .. } => Some(roi),
        }
    }
}

/// Content currently being delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delivery {
    pub unit: UnitId,
    pub elapsed: Tick,
    pub duration: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionState {
    pub phase: SelectionPhase,
    pub delivery: Option<Delivery>,
    /// ROI just confirmed; it cannot be re-entered until the gaze has left it once.
    pub suppressed: Option<RoiId>,
}

impl Default for SelectionState {
    fn default() -> Self {
        Self { phase: SelectionPhase::Idle, delivery: None, suppressed: None }
    }
}

/// Maps ROIs to their content and content to its duration in ticks.
pub trait ContentCatalog {
    fn unit_for_roi(&self, roi: RoiId) -> Option<UnitId>;
    fn duration_ticks(&self, unit: UnitId) -> Option<Tick>;
}

/// Per-tick inputs supplied by the engine.
#[derive(Debug, Clone, Copy)]
pub struct SelectionInput<'a> {
    /// ROI whose collider contains the raw gaze hit this tick.
    pub gazed_roi: Option<RoiId>,
    /// System cue; when present it is the only selectable ROI and hovering is skipped.
    pub cue: Option<RoiId>,
    pub enabled: &'a BTreeSet<RoiId>,
}

impl SelectionInput<'_> {
    fn selectable(&self, roi: RoiId) -> bool {
        self.enabled.contains(&roi) && self.cue.map_or(true, |c| c == roi)
    }
}

/// Advances the selection state by one tick.
pub fn selection_step(
    state: &SelectionState,
    input: &SelectionInput<'_>,
    catalog: &impl ContentCatalog,
    timing: &SelectionTiming,
) -> Result<(SelectionState, Vec<InteractionEvent>), SelectionError> {
    use InteractionEvent as E;
    use SelectionPhase as P;

    if let Some(cue) = input.cue {
        if !input.enabled.contains(&cue) {
            return Err(SelectionError::CueNotEnabled(cue));
        }
    }

    let mut next = *state;
    let mut events = Vec::new();

    if let Some(d) = next.delivery.as_mut() {
        d.elapsed += 1;
        if d.elapsed >= d.duration {
            events.push(E::ContentFinished { unit: d.unit });
            next.delivery = None;
        }
    }

    if next.suppressed.is_some() && input.gazed_roi != next.suppressed {
        next.suppressed = None;
    }

    // Targets that stopped being selectable are dropped.
    if let Some(roi) = next.phase.roi() {
        if !input.selectable(roi) {
            next.phase = P::Idle;
            events.push(E::GazeExitedRoi { roi });
        }
    }

    let dwell_fraction = |elapsed: Tick| elapsed as f64 / timing.dwell_ticks as f64;
    let gazing_at = |roi: RoiId| input.gazed_roi == Some(roi);

    match next.phase {
        P::Idle => {}
        P::Hovering { roi, .. } if input.cue == Some(roi) => {
            next.phase = P::Dwelling { roi, elapsed: 0, grace_elapsed: 0 };
            events.push(E::DwellStarted { roi });
            events.push(E::DwellProgress { roi, fraction: 0.0 });
            return Ok((next, events));
        }
        P::Hovering { roi, elapsed, grace_elapsed } => {
            if gazing_at(roi) {
                let elapsed = elapsed + 1;
                if elapsed >= timing.hover_ticks {
                    next.phase = P::Dwelling { roi, elapsed: 0, grace_elapsed: 0 };
                    events.push(E::RoiHighlighted { roi });
                    events.push(E::DwellStarted { roi });
                    events.push(E::DwellProgress { roi, fraction: 0.0 });
                } else {
                    next.phase = P::Hovering { roi, elapsed, grace_elapsed: 0 };
                }
                return Ok((next, events));
            }
            if grace_elapsed < timing.grace_ticks {
                next.phase = P::Hovering { roi, elapsed, grace_elapsed: grace_elapsed + 1 };
                return Ok((next, events));
            }
            next.phase = P::Idle;
            events.push(E::GazeExitedRoi { roi });
        }
        P::Dwelling { roi, elapsed, grace_elapsed } => {
            if gazing_at(roi) {
                let elapsed = elapsed + 1;
                events.push(E::DwellProgress { roi, fraction: dwell_fraction(elapsed) });
                if elapsed >= timing.dwell_ticks {
                    confirm(&mut next, &mut events, roi, catalog)?;
                } else {
                    next.phase = P::Dwelling { roi, elapsed, grace_elapsed: 0 };
                }
                return Ok((next, events));
            }
            if grace_elapsed < timing.grace_ticks {
                next.phase = P::Dwelling { roi, elapsed, grace_elapsed: grace_elapsed + 1 };
                events.push(E::DwellProgress { roi, fraction: dwell_fraction(elapsed) });
                return Ok((next, events));
            }
            next.phase = P::Idle;
            events.push(E::GazeExitedRoi { roi });
        }
    }

    // Idle: a fresh entry into a selectable ROI.
    if let Some(roi) = input.gazed_roi {
        if input.selectable(roi) && next.suppressed != Some(roi) {
            events.push(E::GazeEnteredRoi { roi });
            if input.cue.is_some() {
                next.phase = P::Dwelling { roi, elapsed: 0, grace_elapsed: 0 };
                events.push(E::DwellStarted { roi });
                events.push(E::DwellProgress { roi, fraction: 0.0 });
            } else {
                next.phase = P::Hovering { roi, elapsed: 0, grace_elapsed: 0 };
            }
        }
    }
    Ok((next, events))
}

fn confirm(
    next: &mut SelectionState,
    events: &mut Vec<InteractionEvent>,
    roi: RoiId,
    catalog: &impl ContentCatalog,
) -> Result<(), SelectionError> {
    let unit = catalog.unit_for_roi(roi).ok_or(SelectionError::NoContentForRoi(roi))?;
    let duration = catalog.duration_ticks(unit).ok_or(SelectionError::UnknownUnit(unit))?;
    events.push(InteractionEvent::SelectionConfirmed { roi });
    events.push(InteractionEvent::ParticlesCleared {});
    events.push(InteractionEvent::ContentStarted { unit });
    next.phase = SelectionPhase::Idle;
    next.delivery = Some(Delivery { unit, elapsed: 0, duration: duration.max(1) });
    next.suppressed = Some(roi);
    Ok(())
}

/// Starts a unit chosen by the mediation layer (introduction, conclusion). Any targeting in
/// progress is dropped and a running delivery is replaced.
pub fn begin_delivery(
    state: &SelectionState,
    unit: UnitId,
    catalog: &impl ContentCatalog,
) -> Result<(SelectionState, Vec<InteractionEvent>), SelectionError> {
    let duration = catalog.duration_ticks(unit).ok_or(SelectionError::UnknownUnit(unit))?;
    let mut events = Vec::new();
    if let Some(roi) = state.phase.roi() {
        events.push(InteractionEvent::GazeExitedRoi { roi });
    }
    events.push(InteractionEvent::ContentStarted { unit });
    let next = SelectionState {
        phase: SelectionPhase::Idle,
        delivery: Some(Delivery { unit, elapsed: 0, duration: duration.max(1) }),
        suppressed: state.suppressed,
    };
    Ok((next, events))
}
