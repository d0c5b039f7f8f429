//! Dispersion-threshold fixation detection on 3-D surface hit points.
//!
//! A window of consecutive hits *fits* when every point lies within the dispersion radius of
//! the window's mean. Scanning left to right, each window grows while it keeps fitting; it is
//! a fixation if it spans at least the minimum duration, after which the scan resumes past
//! it. Otherwise the scan moves one sample on.

use serde::{Deserialize, Serialize};

use crate::geometry::{IndexedMesh, Point3, Vec3};

use super::GazeTrace;

pub const FIXATION_RADIUS: f64 = 0.10;
pub const FIXATION_MIN_DURATION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitPoint {
    pub t: f64,
    pub point: Point3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fixation {
    pub start: f64,
    pub end: f64,
    pub centroid: Point3,
    pub sample_count: usize,
}

impl Fixation {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Surface hits of a trace. Samples whose ray misses the mesh are dropped.
pub fn hit_points(trace: &GazeTrace, world: &IndexedMesh) -> Vec<HitPoint> {
    trace
        .samples
        .iter()
        .filter_map(|s| world.ray_cast(&s.pose.gaze_ray()).map(|h| HitPoint { t: s.t, point: h.point }))
        .collect()
}

fn mean(points: &[HitPoint]) -> Point3 {
    points.iter().fold(Vec3::ZERO, |acc, h| acc + h.point) / points.len() as f64
}

fn fits_exactly(points: &[HitPoint], radius: f64) -> bool {
    let m = mean(points);
    points.iter().all(|h| h.point.distance(m) <= radius)
}

fn fixation(points: &[HitPoint]) -> Fixation {
    Fixation {
        start: points[0].t,
        end: points[points.len() - 1].t,
        centroid: mean(points),
        sample_count: points.len(),
    }
}

/// Greedy left-to-right fixation detection.
pub fn fixation_detect(hits: &[HitPoint], radius: f64, min_duration: f64) -> Vec<Fixation> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < hits.len() {
        let (mut lo, mut hi) = (hits[i].point, hits[i].point);
        let mut j = i;
        while j + 1 < hits.len() {
            let p = hits[j + 1].point;
            let (nlo, nhi) = (lo.min(p), hi.max(p));
            let extent = nhi - nlo;
            // Two points further apart than the diameter can never share a ball.
            if extent.x > 2.0 * radius || extent.y > 2.0 * radius || extent.z > 2.0 * radius {
                break;
            }
            // Mean and points all sit in the box, so a small box always fits. The margin
            // keeps this shortcut from disagreeing with the exact test through rounding.
            let inside_box = extent.norm() <= radius * (1.0 - 1e-9);
            if !inside_box && !fits_exactly(&hits[i..=j + 1], radius) {
                break;
            }
            lo = nlo;
            hi = nhi;
            j += 1;
        }
        if hits[j].t - hits[i].t >= min_duration {
            out.push(fixation(&hits[i..=j]));
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Reference implementation: for every start, test each window on its own from scratch.
/// Quadratic in the window count; meant for checking [`fixation_detect`].
pub fn fixation_detect_exhaustive(hits: &[HitPoint], radius: f64, min_duration: f64) -> Vec<Fixation> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < hits.len() {
        let grows: Vec<bool> = (i..hits.len()).map(|k| fits_exactly(&hits[i..=k], radius)).collect();
        let len = grows.iter().take_while(|&&f| f).count();
        let j = i + len - 1;
        if hits[j].t - hits[i].t >= min_duration {
            out.push(fixation(&hits[i..=j]));
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}
