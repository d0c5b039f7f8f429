//! Candidate ROIs from fixations: greedy clustering of fixation centroids, weighted by
//! fixation duration.

use std::collections::BTreeSet;

use crate::geometry::{ColliderSpec, Point3, Sphere, Vec3};
use crate::ids::RoiId;

use super::Fixation;

struct Cluster {
    weighted: Vec3,
    weight: f64,
}

impl Cluster {
    fn center(&self) -> Point3 {
        self.weighted / self.weight
    }
}

/// Longest fixations seed clusters first; each fixation joins the nearest cluster whose
/// center is within `cluster_radius`, or starts a new one. Clusters holding less than
/// `min_total_duration` seconds are dropped. Survivors become one-sphere colliders numbered
/// from 1 by decreasing total duration.
pub fn derive_rois(fixations: &[Fixation], cluster_radius: f64, min_total_duration: f64) -> Vec<ColliderSpec> {
    let mut order: Vec<&Fixation> = fixations.iter().collect();
    order.sort_by(|a, b| b.duration().total_cmp(&a.duration()).then(a.start.total_cmp(&b.start)));

    let mut clusters: Vec<Cluster> = Vec::new();
    for f in order {
        let w = f.duration();
        let nearest = clusters
            .iter_mut()
            .map(|c| (c.center().distance(f.centroid), c))
            .filter(|(d, _)| *d <= cluster_radius)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match nearest {
            Some((_, c)) => {
                c.weighted += f.centroid * w;
                c.weight += w;
            }
            None if w > 0.0 => clusters.push(Cluster { weighted: f.centroid * w, weight: w }),
            None => {}
        }
    }

    clusters.retain(|c| c.weight >= min_total_duration);
    clusters.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    clusters
        .iter()
        .enumerate()
        .map(|(i, c)| ColliderSpec {
            roi_id: RoiId(i as u32 + 1),
            volumes: vec![Sphere { center: c.center(), radius: cluster_radius }],
            highlight_triangles: BTreeSet::new(),
        })
        .collect()
}
