//! Mapping timestamped samples onto engine ticks.
//!
//! Tick `k` happens at `k / hz` seconds and sees the latest pose sampled at or before that
//! instant. A tick is evaluated as soon as its first sample arrives, so later samples that
//! fall inside an already evaluated tick only take effect from the next tick on. Headless
//! replay and the session server both go through [`Resampler`], which keeps them in step.

use thiserror::Error;

use crate::geometry::Pose6DoF;
use crate::interaction::Tick;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimeError {
    #[error("sample time {t} is not after the previous sample at {previous}")]
    NonMonotone { t: f64, previous: f64 },
    #[error("sample time {0} must be finite and non-negative")]
    Invalid(f64),
}

/// The tick a sample at `t` seconds is first visible to. The small slack absorbs rounding in
/// timestamps computed as `k / hz`.
pub fn tick_of(t: f64, hz: u32) -> Tick {
    (t * f64::from(hz) - 1e-6).ceil().max(0.0) as Tick
}

#[derive(Debug, Clone)]
pub struct Resampler {
    hz: u32,
    next: Tick,
    held: Option<Pose6DoF>,
    last_t: Option<f64>,
}

impl Resampler {
    pub fn new(hz: u32) -> Self {
        Self { hz, next: 0, held: None, last_t: None }
    }

    /// The next tick that has not been handed out yet.
    pub fn next_tick(&self) -> Tick {
        self.next
    }

    /// Accepts one sample and returns the ticks that are now due, each with its pose.
    pub fn push(&mut self, t: f64, pose: Pose6DoF) -> Result<Vec<(Tick, Option<Pose6DoF>)>, TimeError> {
        if !t.is_finite() || t < 0.0 {
            return Err(TimeError::Invalid(t));
        }
        if let Some(previous) = self.last_t {
            if t <= previous {
                return Err(TimeError::NonMonotone { t, previous });
            }
        }
        self.last_t = Some(t);
        let due = tick_of(t, self.hz);
        let mut out = Vec::new();
        if due >= self.next {
            out.extend((self.next..due).map(|k| (k, self.held)));
            out.push((due, Some(pose)));
            self.next = due + 1;
        }
        self.held = Some(pose);
        Ok(out)
    }
}
