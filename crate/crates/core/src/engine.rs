//! One visitor session: ray cast, puck, containment, selection and mediation, stepped once
//! per tick.
//!
//! Per tick, in order:
//! 1. cast the gaze ray against the world mesh, update the puck, find the gazed ROI;
//! 2. run selection with the directives handed out on the previous tick;
//! 3. feed the selection events to the mode controller, which returns new directives;
//! 4. start the unit the controller asked for, if any.
//!
//! Events are reported in that order. The puck is cosmetic: selection sees the raw hit.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{containment, puck_step, Pose6DoF, PuckState, SurfaceHit, DEFAULT_PUCK_TAU};
use crate::ids::RoiId;
use crate::interaction::{
    begin_delivery, selection_step, InteractionEvent, SelectionError, SelectionInput, SelectionPhase, SelectionState,
    Tick, TickTime, TimedEvent,
};
use crate::mediation::{mediation_step, Directives, MediationContext, MediationError, MediationState, ModeKind, SessionPhase};
use crate::scenario::Exhibit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Puck smoothing time constant in seconds.
    pub puck_tau: f64,
    /// Re-show an unanswered system cue every this many seconds. Off by default.
    pub recue_after: Option<f64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { puck_tau: DEFAULT_PUCK_TAU, recue_after: None }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Mediation(#[from] MediationError),
}

/// Everything one tick produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub t: TickTime,
    pub hit: Option<SurfaceHit>,
    pub gazed_roi: Option<RoiId>,
    pub events: Vec<InteractionEvent>,
    /// Dwell progress reported this tick; present exactly when a `DwellProgress` event was
    /// emitted, which happens on every tick that ends in the dwelling phase and on the
    /// confirming tick.
    pub dwell_fraction: Option<f64>,
    /// Cue in force for the next tick.
    pub cue: Option<RoiId>,
    pub puck: PuckState,
}

impl TickOutput {
    pub fn timed_events(&self) -> impl Iterator<Item = TimedEvent> + '_ {
        self.events.iter().map(|e| TimedEvent { t: self.t, event: e.clone() })
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    exhibit: Arc<Exhibit>,
    mode: ModeKind,
    options: EngineOptions,
    tick: Tick,
    selection: SelectionState,
    mediation: MediationState,
    directives: Directives,
    puck: PuckState,
}

impl Engine {
    pub fn new(exhibit: Arc<Exhibit>, mode: ModeKind) -> Self {
        Self::with_options(exhibit, mode, EngineOptions::default())
    }

    pub fn with_options(exhibit: Arc<Exhibit>, mode: ModeKind, options: EngineOptions) -> Self {
        Self {
            exhibit,
            mode,
            options,
            tick: 0,
            selection: SelectionState::default(),
            mediation: MediationState::new(mode),
            directives: Directives::default(),
            puck: PuckState::default(),
        }
    }

    /// Back to tick 0 with the same exhibit, mode and options.
    pub fn reset(&mut self) {
        *self = Self::with_options(self.exhibit.clone(), self.mode, self.options);
    }

    pub fn exhibit(&self) -> &Arc<Exhibit> {
        &self.exhibit
    }

    pub fn mode(&self) -> ModeKind {
        self.mode
    }

    /// The tick the next call to [`Engine::step`] will run.
    pub fn next_tick(&self) -> Tick {
        self.tick
    }

    pub fn selection(&self) -> &SelectionState {
        &self.selection
    }

    pub fn mediation(&self) -> &MediationState {
        &self.mediation
    }

    /// Directives in force for the next tick.
    pub fn directives(&self) -> &Directives {
        &self.directives
    }

    pub fn enabled(&self) -> &BTreeSet<RoiId> {
        &self.directives.enabled
    }

    pub fn is_complete(&self) -> bool {
        self.mediation.phase == SessionPhase::Done
    }

    /// Runs one tick. `pose` is the head pose for this tick, `None` when no gaze is tracked.
    pub fn step(&mut self, pose: Option<&Pose6DoF>) -> Result<TickOutput, EngineError> {
        let ex = &*self.exhibit;
        let cfg = ex.selection_config();
        let tick = self.tick;

        let hit = pose.and_then(|p| ex.world.ray_cast(&p.gaze_ray()));
        self.puck = puck_step(&self.puck, hit.as_ref(), cfg.tick_seconds(), self.options.puck_tau);
        let gazed_roi = hit.as_ref().and_then(|h| containment(h.point, &ex.colliders));

        let input = SelectionInput { gazed_roi, cue: self.directives.cue, enabled: &self.directives.enabled };
        let (mut selection, mut events) = selection_step(&self.selection, &input, ex, ex.timing())?;

        let ctx = MediationContext {
            script: ex.script(),
            mode: self.mode,
            recue_after: self.options.recue_after.map(|s| cfg.ticks(s)),
        };
        let (mediation, out) = mediation_step(&self.mediation, tick, &events, &ctx)?;
        events.extend(out.events);
        if let Some(unit) = out.directives.start_unit {
            let (next, started) = begin_delivery(&selection, unit, ex)?;
            selection = next;
            events.extend(started);
        }

        let dwell_fraction = events.iter().rev().find_map(|e| match *e {
            InteractionEvent::DwellProgress { fraction, .. } => Some(fraction),
            _ => None,
        });
        debug_assert!(!matches!(selection.phase, SelectionPhase::Dwelling { .. }) || dwell_fraction.is_some());

        self.selection = selection;
        self.mediation = mediation;
        self.directives = out.directives;
        self.tick += 1;
        Ok(TickOutput {
            t: TickTime { tick, hz: cfg.tick_hz },
            hit,
            gazed_roi,
            events,
            dwell_fraction,
            cue: self.directives.cue,
            puck: self.puck,
        })
    }
}
