//! Closed-loop agents: simulated visitors that see what the exhibit shows (the current cue)
//! and decide where to look on every tick. Runs record the poses as a trace, so any agent
//! run can be replayed headless.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Engine, EngineOptions};
use crate::geometry::{Pose6DoF, Vec3};
use crate::ids::RoiId;
use crate::interaction::{Initiative, SelectionState, Tick};
use crate::mediation::{MediationState, ModeKind, SessionScript};
use crate::scenario::Exhibit;
use crate::trace::{GazeSample, GazeTrace};

use super::generator::{plan_view, Target, EYE_HEIGHT, ORBIT_RADIUS};
use super::{HeadlessRun, Recorder, SimError};

/// What an agent can see before a tick.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub tick: Tick,
    pub cue: Option<RoiId>,
    pub enabled: &'a BTreeSet<RoiId>,
    pub mediation: &'a MediationState,
    pub selection: &'a SelectionState,
}

pub trait GazeAgent {
    fn pose(&mut self, obs: &Observation<'_>) -> Pose6DoF;
}

/// Precomputed poses: one per ROI, one resting on the statue outside every collider, and one
/// looking away from it.
#[derive(Debug, Clone)]
pub struct ViewBook {
    rois: BTreeMap<RoiId, Pose6DoF>,
    idle: Pose6DoF,
    away: Pose6DoF,
}

impl ViewBook {
    pub fn new(exhibit: &Exhibit) -> Result<Self, SimError> {
        let mut rois = BTreeMap::new();
        for roi in exhibit.roi_ids() {
            rois.insert(roi, plan_view(exhibit, Target::Roi(roi))?.pose());
        }
        let eye = Vec3::new(0.0, EYE_HEIGHT, ORBIT_RADIUS);
        let idle = (1..40)
            .map(|i| Pose6DoF::looking_at(eye, Vec3::new(0.0, i as f64 * 0.1, 0.0)).expect("eye off axis"))
            .find(|p| {
                exhibit.world.ray_cast(&p.gaze_ray()).map_or(false, |h| !exhibit.colliders.iter().any(|c| c.contains(h.point)))
            })
            .ok_or_else(|| SimError::InvalidArgument("no resting view outside every collider".into()))?;
        let away = Pose6DoF::looking_at(eye, eye + Vec3::Z).expect("distinct points");
        Ok(Self { rois, idle, away })
    }

    pub fn roi(&self, roi: RoiId) -> Option<Pose6DoF> {
        self.rois.get(&roi).copied()
    }

    pub fn idle(&self) -> Pose6DoF {
        self.idle
    }

    pub fn away(&self) -> Pose6DoF {
        self.away
    }

    pub fn rois(&self) -> impl Iterator<Item = RoiId> + '_ {
        self.rois.keys().copied()
    }
}

/// Looks at the cued ROI whenever there is one, otherwise rests on the statue.
#[derive(Debug, Clone)]
pub struct CueChaser {
    views: ViewBook,
}

impl CueChaser {
    pub fn new(views: ViewBook) -> Self {
        Self { views }
    }
}

impl GazeAgent for CueChaser {
    fn pose(&mut self, obs: &Observation<'_>) -> Pose6DoF {
        obs.cue.and_then(|r| self.views.roi(r)).unwrap_or(self.views.idle())
    }
}

/// Follows the cue on system turns; on user turns keeps returning to one favourite ROI.
#[derive(Debug, Clone)]
pub struct TurnAgent {
    views: ViewBook,
    favourite: RoiId,
}

impl TurnAgent {
    pub fn new(views: ViewBook, favourite: RoiId) -> Self {
        Self { views, favourite }
    }
}

impl GazeAgent for TurnAgent {
    fn pose(&mut self, obs: &Observation<'_>) -> Pose6DoF {
        if let Some(cue) = obs.cue {
            return self.views.roi(cue).unwrap_or(self.views.idle());
        }
        match obs.mediation.initiative {
            Initiative::User if !obs.enabled.is_empty() => self.views.roi(self.favourite).unwrap_or(self.views.idle()),
            _ => self.views.idle(),
        }
    }
}

/// Follows the cue when there is one; otherwise looks at the first enabled ROI whose unit has
/// not been delivered yet, falling back to the first enabled ROI. Completes every mode.
#[derive(Debug, Clone)]
pub struct Explorer {
    views: ViewBook,
    script: SessionScript,
}

impl Explorer {
    pub fn new(views: ViewBook, script: SessionScript) -> Self {
        Self { views, script }
    }
}

impl GazeAgent for Explorer {
    fn pose(&mut self, obs: &Observation<'_>) -> Pose6DoF {
        if let Some(cue) = obs.cue {
            return self.views.roi(cue).unwrap_or(self.views.idle());
        }
        let seen = |r: &RoiId| self.script.unit_of(*r).map_or(false, |u| obs.mediation.delivered.contains(&u));
        obs.enabled
            .iter()
            .find(|r| !seen(r))
            .or_else(|| obs.enabled.iter().next())
            .and_then(|&r| self.views.roi(r))
            .unwrap_or(self.views.idle())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomAgentConfig {
    /// Probability of picking the cued ROI, when one is shown, at each new glance.
    pub cue_bias: f64,
    pub min_hold: f64,
    pub max_hold: f64,
}

impl Default for RandomAgentConfig {
    fn default() -> Self {
        Self { cue_bias: 0.4, min_hold: 0.05, max_hold: 6.0 }
    }
}

/// A sequence of glances of random length at random ROIs, random points on the statue, the
/// resting view or away from the statue.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    views: ViewBook,
    cfg: RandomAgentConfig,
    rng: ChaCha8Rng,
    hz: u32,
    current: Pose6DoF,
    until: Tick,
}

impl RandomAgent {
    pub fn new(views: ViewBook, cfg: RandomAgentConfig, seed: u64, hz: u32) -> Self {
        let current = views.away();
        Self { views, cfg, rng: ChaCha8Rng::seed_from_u64(seed), hz, current, until: 0 }
    }

    fn glance(&mut self, cue: Option<RoiId>) -> Pose6DoF {
        if let Some(c) = cue {
            if self.rng.gen_bool(self.cfg.cue_bias) {
                return self.views.roi(c).unwrap_or(self.views.idle());
            }
        }
        let rois: Vec<RoiId> = self.views.rois().collect();
        match self.rng.gen_range(0..10) {
            0..=5 => self.views.roi(rois[self.rng.gen_range(0..rois.len())]).expect("listed ROI"),
            6 | 7 => {
                let a: f64 = self.rng.gen_range(0.0..std::f64::consts::TAU);
                let eye = Vec3::new(ORBIT_RADIUS * a.sin(), EYE_HEIGHT, ORBIT_RADIUS * a.cos());
                let aim = Vec3::new(self.rng.gen_range(-0.5..0.5), self.rng.gen_range(0.1..3.9), self.rng.gen_range(-0.5..0.5));
                Pose6DoF::looking_at(eye, aim).expect("eye off the statue")
            }
            8 => self.views.idle(),
            _ => self.views.away(),
        }
    }
}

impl GazeAgent for RandomAgent {
    fn pose(&mut self, obs: &Observation<'_>) -> Pose6DoF {
        if obs.tick >= self.until {
            self.current = self.glance(obs.cue);
            let hold = self.rng.gen_range(self.cfg.min_hold..=self.cfg.max_hold);
            self.until = obs.tick + ((hold * f64::from(self.hz)).round() as Tick).max(1);
        }
        self.current
    }
}

/// A recorded agent run: its trace replays to exactly `run.log` through `run_headless`.
#[derive(Debug, Clone)]
pub struct AgentRun {
    pub trace: GazeTrace,
    pub run: HeadlessRun,
}

/// Runs `agent` until the session completes or `max_seconds` have passed.
pub fn run_agent(
    exhibit: &Arc<Exhibit>,
    mode: ModeKind,
    agent: &mut dyn GazeAgent,
    max_seconds: f64,
    options: EngineOptions,
) -> Result<AgentRun, SimError> {
    let hz = exhibit.tick_hz();
    let max_ticks = (max_seconds * f64::from(hz)).ceil().max(1.0) as Tick;
    let mut engine = Engine::with_options(exhibit.clone(), mode, options);
    let mut rec = Recorder::new();
    let mut samples = Vec::new();
    for tick in 0..max_ticks {
        let pose = {
            let obs = Observation {
                tick,
                cue: engine.directives().cue,
                enabled: engine.enabled(),
                mediation: engine.mediation(),
                selection: engine.selection(),
            };
            agent.pose(&obs)
        };
        samples.push(GazeSample { t: tick as f64 / f64::from(hz), pose });
        rec.step(&mut engine, Some(&pose))?;
        if engine.is_complete() {
            break;
        }
    }
    let trace = GazeTrace { scenario: Some(exhibit.id.clone()), mode: Some(mode), ..GazeTrace::new(samples) };
    let run = rec.finish_ticked(exhibit, mode);
    Ok(AgentRun { trace, run })
}
