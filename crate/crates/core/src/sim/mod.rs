//! Synthetic gaze and headless end-to-end runs.
//!
//! Generators produce [`GazeTrace`]s at the exhibit's tick rate from a seeded ChaCha8
//! stream (`ChaCha8Rng::seed_from_u64`), so traces are identical on every platform. The
//! runners push traces, or closed-loop agents, through an [`Engine`] and collect the event
//! log and a report.

mod agent;
mod generator;
mod resample;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Engine, EngineError, EngineOptions};
use crate::ids::{RoiId, UnitId};
use crate::interaction::{InteractionEvent, Tick, TickTime, TimedEvent};
use crate::mediation::ModeKind;
use crate::scenario::Exhibit;
use crate::trace::{roi_stats, roi_stats_from_labels, DirectiveLog, EventLog, GazeTrace, RoiStats};

pub use agent::{
    run_agent, AgentRun, CueChaser, Explorer, GazeAgent, Observation, RandomAgent, RandomAgentConfig, TurnAgent, ViewBook,
};
pub use generator::{
    orbit_generator, plan_view, scripted_generator, OrbitSpec, Target, View, Waypoint, EYE_HEIGHT, ORBIT_RADIUS,
};
pub use resample::{tick_of, Resampler, TimeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("unknown ROI {0}")]
    UnknownRoi(RoiId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub t: TickTime,
    pub unit: UnitId,
    pub linked_roi: Option<RoiId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub mode: ModeKind,
    /// Every unit started, introduction and conclusion included.
    pub deliveries: Vec<DeliveryRecord>,
    /// Units started through ROI selections.
    pub roi_deliveries: usize,
    pub conclusion_started: bool,
    /// True iff the session emitted `SessionCompleted`.
    pub completion: bool,
    pub ticks_run: Tick,
    /// Seconds covered by the ticks run.
    pub total_time: f64,
    pub roi_stats: RoiStats,
}

/// Event log, directive log and report of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadlessRun {
    pub log: EventLog,
    pub directives: DirectiveLog,
    pub report: RunReport,
}

/// Collects engine output tick by tick.
pub(crate) struct Recorder {
    events: Vec<TimedEvent>,
    directives: DirectiveLog,
    ticks: Tick,
    /// Tick time and gazed ROI of every tick.
    labels: Vec<(f64, Option<RoiId>)>,
}

impl Recorder {
    pub(crate) fn new() -> Self {
        Self { events: Vec::new(), directives: DirectiveLog::default(), ticks: 0, labels: Vec::new() }
    }

    pub(crate) fn step(&mut self, engine: &mut Engine, pose: Option<&crate::geometry::Pose6DoF>) -> Result<(), EngineError> {
        let out = engine.step(pose)?;
        self.events.extend(out.timed_events());
        self.labels.push((out.t.seconds(), out.gazed_roi));
        self.directives.record(out.t, engine.directives());
        self.ticks += 1;
        Ok(())
    }

    /// Finishes a run whose trace has exactly one sample per tick, so the labels the engine
    /// computed are the sample labels.
    pub(crate) fn finish_ticked(self, exhibit: &Exhibit, mode: ModeKind) -> HeadlessRun {
        let stats = roi_stats_from_labels(&self.labels, &exhibit.roi_ids());
        self.finish_with(exhibit, mode, stats)
    }

    pub(crate) fn finish(self, exhibit: &Exhibit, mode: ModeKind, trace: &GazeTrace) -> HeadlessRun {
        let stats = roi_stats(&trace.samples, &exhibit.world, &exhibit.colliders);
        self.finish_with(exhibit, mode, stats)
    }

    fn finish_with(self, exhibit: &Exhibit, mode: ModeKind, stats: RoiStats) -> HeadlessRun {
        let hz = exhibit.tick_hz();
        let script = exhibit.script();
        let deliveries: Vec<DeliveryRecord> = self
            .events
            .iter()
            .filter_map(|e| match e.event {
                InteractionEvent::ContentStarted { unit } => {
                    Some(DeliveryRecord { t: e.t, unit, linked_roi: script.roi_of(unit) })
                }
                _ => None,
            })
            .collect();
        let has = |f: fn(&InteractionEvent) -> bool| self.events.iter().any(|e| f(&e.event));
        let report = RunReport {
            scenario: exhibit.id.clone(),
            mode,
            roi_deliveries: deliveries.iter().filter(|d| d.linked_roi.is_some()).count(),
            deliveries,
            conclusion_started: has(|e| matches!(e, InteractionEvent::ConclusionStarted {})),
            completion: has(|e| matches!(e, InteractionEvent::SessionCompleted {})),
            ticks_run: self.ticks,
            total_time: self.ticks as f64 / f64::from(hz),
            roi_stats: stats,
        };
        let log = EventLog { scenario: exhibit.id.clone(), mode, tick_hz: hz, events: self.events };
        HeadlessRun { log, directives: self.directives, report }
    }
}

/// Replays `trace` through a fresh engine. Ticks run from 0 through the tick of the last
/// sample, each using the most recent pose by sample-and-hold; an empty trace runs tick 0
/// only, with no gaze.
pub fn run_headless(
    exhibit: &Arc<Exhibit>,
    mode: ModeKind,
    trace: &GazeTrace,
    options: EngineOptions,
) -> Result<HeadlessRun, SimError> {
    let mut engine = Engine::with_options(exhibit.clone(), mode, options);
    let mut rec = Recorder::new();
    if trace.samples.is_empty() {
        rec.step(&mut engine, None)?;
    }
    let mut clock = Resampler::new(exhibit.tick_hz());
    for s in &trace.samples {
        for (tick, pose) in clock.push(s.t, s.pose)? {
            debug_assert_eq!(tick, engine.next_tick());
            rec.step(&mut engine, pose.as_ref())?;
        }
    }
    Ok(rec.finish(exhibit, mode, trace))
}
