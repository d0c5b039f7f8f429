//! Per-ROI gaze statistics of a trace.
//!
//! Each sample is labelled with the ROI its gaze hit falls in (or none), and holds that label
//! until the next sample. The last sample contributes no time.

use serde::{Deserialize, Serialize};

use crate::geometry::{containment, ColliderSpec, IndexedMesh};
use crate::ids::RoiId;

use super::GazeSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiTotals {
    pub roi_id: RoiId,
    /// Seconds of gaze inside the collider.
    pub seconds: f64,
    /// Time of the first sample inside the collider.
    pub first_look: Option<f64>,
    /// Number of times gaze moved into the collider from elsewhere.
    pub entries: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiStats {
    pub per_roi: Vec<RoiTotals>,
    /// Seconds with gaze off every collider, including misses.
    pub off_roi_seconds: f64,
    pub duration: f64,
}

impl RoiStats {
    pub fn get(&self, roi: RoiId) -> Option<&RoiTotals> {
        self.per_roi.iter().find(|r| r.roi_id == roi)
    }

    /// `roi_id,seconds,first_look,entries`, one row per ROI, then an `off` row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["roi_id", "seconds", "first_look", "entries"]).expect("in-memory write");
        for r in &self.per_roi {
            let first = r.first_look.map(|t| t.to_string()).unwrap_or_default();
            w.write_record([r.roi_id.to_string(), r.seconds.to_string(), first, r.entries.to_string()])
                .expect("in-memory write");
        }
        w.write_record(["off".to_string(), self.off_roi_seconds.to_string(), String::new(), String::new()])
            .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }
}

/// ROI label of each sample's gaze hit.
pub fn label_samples(samples: &[GazeSample], world: &IndexedMesh, colliders: &[ColliderSpec]) -> Vec<(f64, Option<RoiId>)> {
    samples
        .iter()
        .map(|s| (s.t, world.ray_cast(&s.pose.gaze_ray()).and_then(|h| containment(h.point, colliders))))
        .collect()
}

pub fn roi_stats(samples: &[GazeSample], world: &IndexedMesh, colliders: &[ColliderSpec]) -> RoiStats {
    let rois: Vec<RoiId> = colliders.iter().map(|c| c.roi_id).collect();
    roi_stats_from_labels(&label_samples(samples, world, colliders), &rois)
}

/// Sample-and-hold integration of labelled samples. `rois` fixes the rows of the result.
pub fn roi_stats_from_labels(labels: &[(f64, Option<RoiId>)], rois: &[RoiId]) -> RoiStats {
    let mut rows: Vec<RoiTotals> = rois.iter().map(|&roi_id| RoiTotals { roi_id, seconds: 0.0, first_look: None, entries: 0 }).collect();
    rows.sort_by_key(|r| r.roi_id);
    let mut off = 0.0;
    let mut previous = None;
    for (k, &(t, label)) in labels.iter().enumerate() {
        let held = labels.get(k + 1).map_or(0.0, |next| next.0 - t);
        match label.and_then(|roi| rows.iter_mut().find(|r| r.roi_id == roi)) {
            Some(row) => {
                row.seconds += held;
                row.first_look.get_or_insert(t);
                if previous != label {
                    row.entries += 1;
                }
            }
            None => off += held,
        }
        previous = label;
    }
    let duration = match (labels.first(), labels.last()) {
        (Some(a), Some(b)) => b.0 - a.0,
        _ => 0.0,
    };
    RoiStats { per_roi: rows, off_roi_seconds: off, duration }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hold_integration() {
        let r = |i| Some(RoiId(i));
        let labels = [(0.0, r(1)), (1.0, r(1)), (2.0, None), (2.5, r(2)), (3.0, r(1)), (4.0, r(1))];
        let s = roi_stats_from_labels(&labels, &[RoiId(2), RoiId(1)]);
        assert_eq!(s.get(RoiId(1)).unwrap(), &RoiTotals { roi_id: RoiId(1), seconds: 3.0, first_look: Some(0.0), entries: 2 });
        assert_eq!(s.get(RoiId(2)).unwrap().seconds, 0.5);
        assert_eq!(s.off_roi_seconds, 0.5);
        assert_eq!(s.duration, 4.0);
        assert_eq!(s.per_roi[0].roi_id, RoiId(1));
    }

    #[test]
    fn csv_shape() {
        let s = roi_stats_from_labels(&[(0.0, Some(RoiId(4))), (0.5, None)], &[RoiId(4)]);
        assert_eq!(s.to_csv(), "roi_id,seconds,first_look,entries\n4,0.5,0,1\noff,0,,\n");
    }

    #[test]
    fn empty_labels() {
        let s = roi_stats_from_labels(&[], &[RoiId(1)]);
        assert_eq!((s.duration, s.off_roi_seconds, s.per_roi[0].seconds), (0.0, 0.0, 0.0));
    }
}
