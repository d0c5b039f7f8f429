//! Initiative-mode controllers.
//!
//! A controller consumes the interaction events of one tick and answers with directives for
//! the next: which ROI the system cues, which ROIs are selectable, and which unit (if any) to
//! start on its own. Controllers hold no content, only a reference to the shared script, so
//! all three modes deliver exactly the same units.
//!
//! Deliveries are counted when content starts. The conclusion is held back until the unit
//! that completed the required coverage has finished playing; in between nothing is
//! selectable.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{RoiId, UnitId};
use crate::interaction::{Initiative, InteractionEvent, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    /// System initiative: cues one ROI at a time in a fixed order.
    Guided,
    /// User initiative: any ROI, any order, repeats allowed.
    #[serde(alias = "self")]
    SelfGuided,
    /// Initiative alternates after every selection; the system cues core units.
    Mixed,
}

impl ModeKind {
    pub const ALL: [ModeKind; 3] = [ModeKind::Guided, ModeKind::SelfGuided, ModeKind::Mixed];
}

impl std::str::FromStr for ModeKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "guided" => Ok(ModeKind::Guided),
            "self" | "self_guided" | "self-guided" => Ok(ModeKind::SelfGuided),
            "mixed" => Ok(ModeKind::Mixed),
            other => Err(format!("unknown mode {other:?} (expected guided, self or mixed)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentKind {
    Audio,
    ImageSet,
    Timeline,
    Reconstruction,
    Augmentation,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentUnit {
    pub unit_id: UnitId,
    pub kind: ContentKind,
    /// Seconds.
    pub duration: f64,
    pub transcript: String,
    pub asset_refs: Vec<String>,
    pub linked_roi: Option<RoiId>,
    pub is_core: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionScript {
    pub intro: UnitId,
    pub conclusion: UnitId,
    pub roi_units: BTreeMap<RoiId, UnitId>,
    pub guided_order: Vec<RoiId>,
    pub core_set: BTreeSet<RoiId>,
}

impl SessionScript {
    pub fn rois(&self) -> BTreeSet<RoiId> {
        self.roi_units.keys().copied().collect()
    }

    pub fn roi_of(&self, unit: UnitId) -> Option<RoiId> {
        self.roi_units.iter().find(|(_, &u)| u == unit).map(|(&r, _)| r)
    }

    pub fn unit_of(&self, roi: RoiId) -> Option<UnitId> {
        self.roi_units.get(&roi).copied()
    }

    /// Structural checks that do not need the unit list.
    pub fn validate(&self) -> Result<(), String> {
        let rois = self.rois();
        let order: BTreeSet<RoiId> = self.guided_order.iter().copied().collect();
        if order.len() != self.guided_order.len() || order != rois {
            return Err("guided_order must be a permutation of the ROI ids".into());
        }
        if self.core_set.is_empty() {
            return Err("core_set must not be empty".into());
        }
        if !self.core_set.is_subset(&rois) {
            return Err("core_set must be a subset of the ROI ids".into());
        }
        let units: BTreeSet<UnitId> = self.roi_units.values().copied().collect();
        if units.len() != self.roi_units.len() {
            return Err("two ROIs share a content unit".into());
        }
        if units.contains(&self.intro) || units.contains(&self.conclusion) || self.intro == self.conclusion {
            return Err("intro and conclusion must be distinct units not linked to an ROI".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionPhase {
    Intro,
    Exploring,
    Conclusion,
    Done,
}

/// What the controller hands to the selection layer for the next tick.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Directives {
    pub cue: Option<RoiId>,
    pub enabled: BTreeSet<RoiId>,
    pub start_unit: Option<UnitId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediationState {
    pub phase: SessionPhase,
    /// Every unit started so far, in order, including introduction and conclusion.
    pub delivered: Vec<UnitId>,
    pub initiative: Initiative,
    pub guided_cursor: usize,
    /// Unit currently playing, if any.
    pub playing: Option<UnitId>,
    /// Cue currently shown to the visitor.
    pub shown_cue: Option<RoiId>,
    shown_since: Tick,
    /// Directives handed out on the previous step.
    pub handed: Directives,
}

impl MediationState {
    pub fn new(mode: ModeKind) -> Self {
        let initiative = match mode {
            ModeKind::Guided => Initiative::System,
            ModeKind::SelfGuided | ModeKind::Mixed => Initiative::User,
        };
        Self {
            phase: SessionPhase::Intro,
            delivered: Vec::new(),
            initiative,
            guided_cursor: 0,
            playing: None,
            shown_cue: None,
            shown_since: 0,
            handed: Directives::default(),
        }
    }

    /// Units started through ROI selections (introduction and conclusion excluded).
    pub fn roi_deliveries<'a>(&'a self, script: &'a SessionScript) -> impl Iterator<Item = UnitId> + 'a {
        self.delivered.iter().copied().filter(move |&u| u != script.intro && u != script.conclusion)
    }

    fn has_delivered(&self, unit: UnitId) -> bool {
        self.delivered.contains(&unit)
    }
}

/// Read-only context of a controller.
#[derive(Debug, Clone, Copy)]
pub struct MediationContext<'a> {
    pub script: &'a SessionScript,
    pub mode: ModeKind,
    /// Re-show an unanswered cue every this many ticks. `None` disables re-cueing.
    pub recue_after: Option<Tick>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MediationOutput {
    pub directives: Directives,
    pub events: Vec<InteractionEvent>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MediationError {
    #[error("event out of protocol: {0}")]
    EventOutOfProtocol(String),
    #[error("no ROI is eligible for a system cue")]
    NoEligibleRoi,
}

fn out_of_protocol(msg: impl Into<String>) -> MediationError {
    MediationError::EventOutOfProtocol(msg.into())
}

/// The ROI the system cues next: the lowest undelivered core ROI in mixed mode, the guided
/// cursor position in guided mode.
pub fn pick_system_cue(state: &MediationState, script: &SessionScript, mode: ModeKind) -> Result<RoiId, MediationError> {
    match mode {
        ModeKind::Mixed => script
            .core_set
            .iter()
            .copied()
            .find(|&roi| script.unit_of(roi).map_or(false, |u| !state.has_delivered(u)))
            .ok_or(MediationError::NoEligibleRoi),
        ModeKind::Guided => script.guided_order.get(state.guided_cursor).copied().ok_or(MediationError::NoEligibleRoi),
        ModeKind::SelfGuided => Err(MediationError::NoEligibleRoi),
    }
}

/// Whether the deliveries so far satisfy the mode's conclusion condition.
fn coverage_met(state: &MediationState, script: &SessionScript, mode: ModeKind) -> bool {
    let covered = |&roi: &RoiId| script.unit_of(roi).map_or(false, |u| state.has_delivered(u));
    match mode {
        ModeKind::Guided | ModeKind::SelfGuided => script.guided_order.iter().all(covered),
        ModeKind::Mixed => script.core_set.iter().all(covered),
    }
}

/// Selectable ROIs for the current state.
pub fn enabled_set(state: &MediationState, script: &SessionScript, mode: ModeKind) -> BTreeSet<RoiId> {
    if state.phase != SessionPhase::Exploring || coverage_met(state, script, mode) {
        return BTreeSet::new();
    }
    match mode {
        ModeKind::Guided if state.playing.is_some() => BTreeSet::new(),
        ModeKind::Guided => pick_system_cue(state, script, mode).into_iter().collect(),
        ModeKind::SelfGuided => script.rois(),
        ModeKind::Mixed => match state.initiative {
            Initiative::User => script.rois(),
            Initiative::System => pick_system_cue(state, script, mode).into_iter().collect(),
        },
    }
}

fn current_cue(state: &MediationState, script: &SessionScript, mode: ModeKind) -> Option<RoiId> {
    if state.phase != SessionPhase::Exploring || coverage_met(state, script, mode) {
        return None;
    }
    match mode {
        ModeKind::Guided if state.playing.is_none() => pick_system_cue(state, script, mode).ok(),
        ModeKind::Mixed if state.initiative == Initiative::System => pick_system_cue(state, script, mode).ok(),
        _ => None,
    }
}

/// Consumes one tick of events and produces the next directives.
pub fn mediation_step(
    state: &MediationState,
    tick: Tick,
    events: &[InteractionEvent],
    ctx: &MediationContext<'_>,
) -> Result<(MediationState, MediationOutput), MediationError> {
    use InteractionEvent as E;
    let script = ctx.script;
    let mode = ctx.mode;
    let mut s = state.clone();
    let mut out = Vec::new();
    let mut start_unit = None;

    for ev in events {
        match *ev {
            E::SelectionConfirmed { roi } => {
                if !s.handed.enabled.contains(&roi) {
                    return Err(out_of_protocol(format!("selection of ROI {roi}, which was not enabled")));
                }
            }
            E::ContentStarted { unit } => {
                if s.phase != SessionPhase::Exploring {
                    return Err(out_of_protocol(format!("unit {unit} started outside exploration")));
                }
                if script.roi_of(unit).is_none() {
                    return Err(out_of_protocol(format!("unit {unit} is not linked to an ROI")));
                }
                if mode == ModeKind::Guided && s.has_delivered(unit) {
                    return Err(out_of_protocol(format!("unit {unit} delivered twice in guided mode")));
                }
                s.delivered.push(unit);
                s.playing = Some(unit);
                if mode == ModeKind::Mixed {
                    s.initiative = s.initiative.other();
                    out.push(E::InitiativeSwitched { holder: s.initiative });
                }
            }
            E::ContentFinished { unit } => {
                if s.playing == Some(unit) {
                    s.playing = None;
                }
                match s.phase {
                    SessionPhase::Intro if unit == script.intro => s.phase = SessionPhase::Exploring,
                    SessionPhase::Conclusion if unit == script.conclusion => {
                        s.phase = SessionPhase::Done;
                        out.push(E::SessionCompleted {});
                    }
                    SessionPhase::Exploring if script.roi_of(unit).is_some() => {
                        if mode == ModeKind::Guided {
                            s.guided_cursor += 1;
                        }
                        if coverage_met(&s, script, mode) {
                            s.phase = SessionPhase::Conclusion;
                            out.push(E::ConclusionStarted {});
                            start_unit = Some(script.conclusion);
                        }
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }

    if s.phase == SessionPhase::Intro && s.delivered.is_empty() {
        start_unit = Some(script.intro);
    }
    if let Some(unit) = start_unit {
        s.delivered.push(unit);
        s.playing = Some(unit);
    }

    let cue = current_cue(&s, script, mode);
    if cue != s.shown_cue {
        if let Some(old) = s.shown_cue {
            out.push(E::SystemCueWithdrawn { roi: old });
        }
        if let Some(new) = cue {
            out.push(E::SystemCueShown { roi: new });
        }
        s.shown_cue = cue;
        s.shown_since = tick;
    } else if let (Some(roi), Some(every)) = (cue, ctx.recue_after) {
        if every > 0 && tick - s.shown_since >= every {
            out.push(E::SystemCueWithdrawn { roi });
            out.push(E::SystemCueShown { roi });
            s.shown_since = tick;
        }
    }

    let enabled = enabled_set(&s, script, mode);
    s.handed = Directives { cue, enabled: enabled.clone(), start_unit: None };
    Ok((s, MediationOutput { directives: Directives { cue, enabled, start_unit }, events: out }))
}
