//! Open-loop gaze generators: scripted waypoint tours and orbits around the exhibit.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::{containment, Direction3, Point3, Pose6DoF, Quat, Ray, Vec3};
use crate::ids::RoiId;
use crate::scenario::Exhibit;
use crate::trace::{GazeSample, GazeTrace};

use super::SimError;

/// Visitors are placed on a circle of this radius (m) around the vertical axis through the
/// world origin.
pub const ORBIT_RADIUS: f64 = 2.0;
pub const EYE_HEIGHT: f64 = 1.7;

const VIEW_CANDIDATES: usize = 72;
/// Offset of the probe rays used to rank candidate views (rad).
const PROBE_ANGLE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Aim at the collider centroid.
    Roi(RoiId),
    Point(Point3),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub target: Target,
    /// Seconds spent aiming at the target.
    pub hold: f64,
    /// Seconds spent moving from the previous view to this one.
    pub transit: f64,
}

/// Where to stand and what to look at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub eye: Point3,
    pub aim: Point3,
}

impl View {
    pub fn pose(&self) -> Pose6DoF {
        Pose6DoF::looking_at(self.eye, self.aim).expect("eye and aim differ")
    }

    fn angle(&self) -> f64 {
        self.eye.x.atan2(self.eye.z)
    }
}

fn eye_at(angle: f64) -> Point3 {
    Vec3::new(ORBIT_RADIUS * angle.sin(), EYE_HEIGHT, ORBIT_RADIUS * angle.cos())
}

/// Small rotation of `pose` about its own right and up axes.
fn perturb(pose: &Pose6DoF, pitch: f64, yaw: f64) -> Pose6DoF {
    let q = pose.orientation
        * Quat::from_axis_angle(Direction3::new(Vec3::X).expect("unit"), pitch)
        * Quat::from_axis_angle(Direction3::UP, yaw);
    Pose6DoF::new(pose.position, q.renormalized().expect("product of unit quaternions"))
}

/// Best place on the visitor circle to look at `target` from. A view qualifies when its
/// central ray lands on the target (inside the ROI's collider, or within 5 cm of a point).
/// Among qualifying views the one whose probe rays, offset slightly in eight directions,
/// most often still qualify wins; ties go to the more head-on view, then the smaller angle
/// from the front.
pub fn plan_view(exhibit: &Exhibit, target: Target) -> Result<View, SimError> {
    let aim = match target {
        Target::Roi(roi) => exhibit.collider(roi).ok_or(SimError::UnknownRoi(roi))?.centroid(),
        Target::Point(p) => p,
    };
    let lands = |ray: &Ray| -> Option<f64> {
        let hit = exhibit.world.ray_cast(ray)?;
        let ok = match target {
            Target::Roi(roi) => containment(hit.point, &exhibit.colliders) == Some(roi),
            Target::Point(p) => hit.point.distance(p) <= 0.05,
        };
        ok.then(|| hit.normal.get().dot(ray.direction.get()).abs())
    };

    let mut best: Option<(usize, f64, View)> = None;
    for k in 0..VIEW_CANDIDATES {
        // Alternate around the front: 0, +5°, -5°, +10°, ...
        let step = (k + 1) / 2;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let angle = sign * step as f64 * TAU / VIEW_CANDIDATES as f64;
        let view = View { eye: eye_at(angle), aim };
        let pose = view.pose();
        let Some(incidence) = lands(&pose.gaze_ray()) else { continue };
        let robust = (0..8)
            .filter(|&i| {
                let a = i as f64 * PI / 4.0;
                lands(&perturb(&pose, PROBE_ANGLE * a.sin(), PROBE_ANGLE * a.cos()).gaze_ray()).is_some()
            })
            .count();
        let better = match &best {
            None => true,
            Some((r, inc, _)) => robust > *r || (robust == *r && incidence > *inc + 1e-9),
        };
        if better {
            best = Some((robust, incidence, view));
        }
    }
    best.map(|(_, _, v)| v)
        .ok_or_else(|| SimError::InvalidArgument(format!("no view on the visitor circle reaches {target:?}")))
}

/// Seeded angular noise applied to every generated pose.
struct Jitter {
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl Jitter {
    fn new(sigma: f64, seed: u64) -> Result<Self, SimError> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(SimError::InvalidArgument(format!("noise sigma {sigma} must be non-negative")));
        }
        let normal = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("valid sigma"));
        Ok(Self { rng: ChaCha8Rng::seed_from_u64(seed), normal })
    }

    fn apply(&mut self, pose: Pose6DoF) -> Pose6DoF {
        match &self.normal {
            Some(n) => {
                let pitch = n.sample(&mut self.rng);
                let yaw = n.sample(&mut self.rng);
                perturb(&pose, pitch, yaw)
            }
            None => pose,
        }
    }
}

fn sample_count(duration: f64, hz: u32) -> usize {
    (duration * f64::from(hz)).round().max(0.0) as usize
}

/// A tour of waypoints sampled at the exhibit's tick rate. Each waypoint first moves from
/// the previous view (eye along the visitor circle, orientation by slerp), then holds on the
/// target. The first waypoint's transit is spent at its own view. With `noise_sigma > 0`
/// every pose is rotated by independent N(0, σ) angles about its right and up axes.
pub fn scripted_generator(
    exhibit: &Exhibit,
    waypoints: &[Waypoint],
    noise_sigma: f64,
    seed: u64,
) -> Result<GazeTrace, SimError> {
    let mut jitter = Jitter::new(noise_sigma, seed)?;
    let hz = exhibit.tick_hz();
    let mut views = Vec::with_capacity(waypoints.len());
    for w in waypoints {
        if !(w.hold >= 0.0 && w.transit >= 0.0) {
            return Err(SimError::InvalidArgument("hold and transit must be non-negative".into()));
        }
        views.push(plan_view(exhibit, w.target)?);
    }

    // Segment boundaries in seconds: (start, end, from view, to view).
    let mut segments = Vec::new();
    let mut clock = 0.0;
    for (i, w) in waypoints.iter().enumerate() {
        let from = if i == 0 { views[0] } else { views[i - 1] };
        segments.push((clock, clock + w.transit, from, views[i]));
        clock += w.transit;
        segments.push((clock, clock + w.hold, views[i], views[i]));
        clock += w.hold;
    }

    let mut samples = Vec::new();
    let mut seg = 0;
    for k in 0..sample_count(clock, hz) {
        let t = k as f64 / f64::from(hz);
        while seg + 1 < segments.len() && t >= segments[seg].1 {
            seg += 1;
        }
        let (start, end, from, to) = segments[seg];
        let pose = if from == to || end <= start {
            to.pose()
        } else {
            let f = ((t - start) / (end - start)).clamp(0.0, 1.0);
            blend(&from, &to, f)
        };
        samples.push(GazeSample { t, pose: jitter.apply(pose) });
    }
    Ok(GazeTrace { scenario: Some(exhibit.id.clone()), seed: Some(seed), ..GazeTrace::new(samples) })
}

/// Eye moves along the cylinder (shortest arc, radius and height interpolated linearly);
/// orientation slerps between the two look rotations.
fn blend(from: &View, to: &View, f: f64) -> Pose6DoF {
    let (a0, a1) = (from.angle(), to.angle());
    let mut delta = (a1 - a0) % TAU;
    if delta > PI {
        delta -= TAU;
    } else if delta < -PI {
        delta += TAU;
    }
    let radius = |p: Point3| (p.x * p.x + p.z * p.z).sqrt();
    let a = a0 + delta * f;
    let r = radius(from.eye) + (radius(to.eye) - radius(from.eye)) * f;
    let y = from.eye.y + (to.eye.y - from.eye.y) * f;
    let eye = Vec3::new(r * a.sin(), y, r * a.cos());
    let q = from.pose().orientation.slerp(to.pose().orientation, f);
    Pose6DoF::new(eye, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    /// Distance from the vertical axis (m).
    pub radius: f64,
    /// rad/s; positive is counter-clockwise seen from above.
    pub angular_speed: f64,
    /// Eye height (m).
    pub height: f64,
    /// Height of the aim point on the axis; defaults to the eye height.
    pub aim_height: Option<f64>,
    pub duration: f64,
    pub start_angle: f64,
    pub noise_sigma: f64,
}

impl Default for OrbitSpec {
    fn default() -> Self {
        Self {
            radius: ORBIT_RADIUS,
            angular_speed: TAU / 20.0,
            height: EYE_HEIGHT,
            aim_height: None,
            duration: 20.0,
            start_angle: 0.0,
            noise_sigma: 0.0,
        }
    }
}

/// Walks a circle around the exhibit while looking at its vertical axis.
pub fn orbit_generator(spec: &OrbitSpec, hz: u32, seed: u64) -> Result<GazeTrace, SimError> {
    if !(spec.radius > 0.0) {
        return Err(SimError::InvalidArgument(format!("orbit radius {} must be positive", spec.radius)));
    }
    if !(spec.duration >= 0.0) {
        return Err(SimError::InvalidArgument("duration must be non-negative".into()));
    }
    let mut jitter = Jitter::new(spec.noise_sigma, seed)?;
    let aim_y = spec.aim_height.unwrap_or(spec.height);
    let samples = (0..sample_count(spec.duration, hz))
        .map(|k| {
            let t = k as f64 / f64::from(hz);
            let a = spec.start_angle + spec.angular_speed * t;
            let eye = Vec3::new(spec.radius * a.sin(), spec.height, spec.radius * a.cos());
            let pose = Pose6DoF::looking_at(eye, Vec3::new(0.0, aim_y, 0.0)).expect("eye is off the axis");
            GazeSample { t, pose: jitter.apply(pose) }
        })
        .collect();
    Ok(GazeTrace { seed: Some(seed), ..GazeTrace::new(samples) })
}
