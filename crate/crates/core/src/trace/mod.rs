//! Gaze traces and event logs on disk, plus the offline analysis of traces: fixations,
//! per-ROI dwell statistics and ROI candidates derived from fixations.
//!
//! All files are JSON lines. The first line is a header naming the format and version;
//! every following line is one record. Floats are written in shortest round-trip form, so
//! `serialize(parse(x)) == x` byte for byte.

mod derive;
mod fixation;
mod stats;

use std::collections::BTreeSet;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Pose6DoF;
use crate::ids::{RoiId, UnitId};
use crate::interaction::{TickTime, TimedEvent};
use crate::mediation::{Directives, ModeKind};

pub use derive::derive_rois;
pub use fixation::{fixation_detect, fixation_detect_exhaustive, hit_points, Fixation, HitPoint, FIXATION_MIN_DURATION, FIXATION_RADIUS};
pub use stats::{label_samples, roi_stats, roi_stats_from_labels, RoiStats, RoiTotals};

pub const FORMAT_VERSION: u32 = 1;
pub const TRACE_FORMAT: &str = "gazeguide-trace";
pub const EVENTS_FORMAT: &str = "gazeguide-events";
pub const DIRECTIVES_FORMAT: &str = "gazeguide-directives";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("empty file: header line missing")]
    MissingHeader,
    #[error("expected a {expected} file, found {found:?}")]
    WrongFormat { expected: &'static str, found: String },
    #[error("format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
}

/// First line of every file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tick_hz: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Header {
    fn new(format: &str) -> Self {
        Self { format: format.into(), version: FORMAT_VERSION, scenario: None, mode: None, tick_hz: None, seed: None }
    }
}

/// One head pose at time `t` (seconds from session start).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GazeSample {
    pub t: f64,
    pub pose: Pose6DoF,
}

/// Head poses with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GazeTrace {
    pub scenario: Option<String>,
    pub mode: Option<ModeKind>,
    pub seed: Option<u64>,
    pub samples: Vec<GazeSample>,
}

impl GazeTrace {
    pub fn new(samples: Vec<GazeSample>) -> Self {
        Self { samples, ..Self::default() }
    }

    /// Time from first to last sample.
    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut h = Header::new(TRACE_FORMAT);
        h.scenario = self.scenario.clone();
        h.mode = self.mode;
        h.seed = self.seed;
        write_lines(&h, &self.samples)
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        let (h, samples): (Header, Vec<GazeSample>) = read_lines(text, TRACE_FORMAT)?;
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].t > w[0].t) {
                return Err(TraceError::MalformedRecord { line: i + 3, reason: "timestamps must strictly increase".into() });
            }
        }
        if let Some((i, _)) = samples.iter().enumerate().find(|(_, s)| !s.t.is_finite() || s.t < 0.0) {
            return Err(TraceError::MalformedRecord { line: i + 2, reason: "time must be finite and non-negative".into() });
        }
        Ok(Self { scenario: h.scenario, mode: h.mode, seed: h.seed, samples })
    }
}

/// The events of one session, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub scenario: String,
    pub mode: ModeKind,
    pub tick_hz: u32,
    pub events: Vec<TimedEvent>,
}

impl EventLog {
    pub fn to_jsonl(&self) -> String {
        let mut h = Header::new(EVENTS_FORMAT);
        h.scenario = Some(self.scenario.clone());
        h.mode = Some(self.mode);
        h.tick_hz = Some(self.tick_hz);
        write_lines(&h, &self.events)
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        let (h, events): (Header, Vec<TimedEvent>) = read_lines(text, EVENTS_FORMAT)?;
        let missing = |field: &str| TraceError::MalformedRecord { line: 1, reason: format!("header lacks {field}") };
        let tick_hz = h.tick_hz.ok_or_else(|| missing("tick_hz"))?;
        check_times(events.iter().map(|e| e.t), tick_hz)?;
        Ok(Self { scenario: h.scenario.ok_or_else(|| missing("scenario"))?, mode: h.mode.ok_or_else(|| missing("mode"))?, tick_hz, events })
    }
}

/// Directives as handed to the selection layer, recorded whenever they change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectiveRecord {
    pub t: TickTime,
    pub cue: Option<RoiId>,
    pub enabled: BTreeSet<RoiId>,
    pub start_unit: Option<UnitId>,
}

impl DirectiveRecord {
    pub fn new(t: TickTime, d: &Directives) -> Self {
        Self { t, cue: d.cue, enabled: d.enabled.clone(), start_unit: d.start_unit }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirectiveLog {
    pub records: Vec<DirectiveRecord>,
}

impl DirectiveLog {
    /// Appends `d` unless it repeats the last record (ignoring time).
    pub fn record(&mut self, t: TickTime, d: &Directives) {
        let changed = self.records.last().map_or(true, |last| {
            last.cue != d.cue || last.enabled != d.enabled || last.start_unit != d.start_unit
        });
        if changed {
            self.records.push(DirectiveRecord::new(t, d));
        }
    }

    pub fn to_jsonl(&self, scenario: &str, mode: ModeKind, tick_hz: u32) -> String {
        let mut h = Header::new(DIRECTIVES_FORMAT);
        h.scenario = Some(scenario.into());
        h.mode = Some(mode);
        h.tick_hz = Some(tick_hz);
        write_lines(&h, &self.records)
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        let (h, records): (Header, Vec<DirectiveRecord>) = read_lines(text, DIRECTIVES_FORMAT)?;
        if let Some(hz) = h.tick_hz {
            check_times(records.iter().map(|r| r.t), hz)?;
        }
        Ok(Self { records })
    }
}

fn check_times(times: impl Iterator<Item = TickTime>, hz: u32) -> Result<(), TraceError> {
    let mut last = 0;
    for (i, t) in times.enumerate() {
        if t.hz != hz || t.tick < last {
            return Err(TraceError::MalformedRecord { line: i + 2, reason: format!("time {t} out of order or off rate") });
        }
        last = t.tick;
    }
    Ok(())
}

fn write_lines<T: Serialize>(header: &Header, records: &[T]) -> String {
    let mut out = serde_json::to_string(header).expect("header serializes");
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

fn read_lines<T: DeserializeOwned>(text: &str, format: &'static str) -> Result<(Header, Vec<T>), TraceError> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or(TraceError::MissingHeader)?;
    // Peek at the format and version before demanding the full header shape, so an unknown
    // version is reported as such.
    let raw: serde_json::Value =
        serde_json::from_str(first).map_err(|e| TraceError::MalformedRecord { line: 1, reason: e.to_string() })?;
    let found = raw.get("format").and_then(|v| v.as_str()).unwrap_or_default();
    if found != format {
        return Err(TraceError::WrongFormat { expected: format, found: found.to_string() });
    }
    match raw.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(FORMAT_VERSION) => {}
        other => return Err(TraceError::VersionMismatch { expected: FORMAT_VERSION, found: other.unwrap_or(0) as u32 }),
    }
    let header: Header =
        serde_json::from_value(raw).map_err(|e| TraceError::MalformedRecord { line: 1, reason: e.to_string() })?;
    let mut records = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(line).map_err(|e| TraceError::MalformedRecord { line: i + 1, reason: e.to_string() })?;
        records.push(r);
    }
    Ok((header, records))
}
