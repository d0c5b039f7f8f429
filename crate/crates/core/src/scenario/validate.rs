//! Semantic checks of a scenario against its world mesh. These produce findings for the
//! author, not parse errors: a scenario with findings still runs.

use std::fmt;

use serde::Serialize;

use crate::geometry::{closest_point_on_triangle, Sphere, TriangleMesh};
use crate::ids::RoiId;

use super::ScenarioFile;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    /// No collider sphere touches the mesh surface, so gaze can never land in it.
    UnreachableRoi { roi: RoiId },
    /// Highlight triangles that lie entirely outside every sphere of the collider.
    HighlightOutsideCollider { roi: RoiId, triangles: Vec<u32> },
    /// Highlight indices past the end of the mesh.
    InvalidHighlight { roi: RoiId, triangles: Vec<u32> },
    OverlapWarning { first: RoiId, second: RoiId },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::UnreachableRoi { roi } => write!(f, "ROI {roi}: collider does not touch the mesh surface"),
            Finding::HighlightOutsideCollider { roi, triangles } => {
                write!(f, "ROI {roi}: {} highlight triangle(s) outside the collider, e.g. {}", triangles.len(), triangles[0])
            }
            Finding::InvalidHighlight { roi, triangles } => {
                write!(f, "ROI {roi}: highlight triangle(s) {triangles:?} do not exist")
            }
            Finding::OverlapWarning { first, second } => write!(f, "colliders of ROI {first} and ROI {second} overlap"),
        }
    }
}

/// Checks `s` against `mesh`, which must be the merged world mesh (physical triangles then
/// each virtual mesh in file order) since highlight ids index into it.
pub fn validate_scenario(s: &ScenarioFile, mesh: &TriangleMesh) -> Vec<Finding> {
    let mut findings = Vec::new();
    let n = mesh.triangle_count();
    let touches = |sphere: &Sphere, t: usize| {
        let [a, b, c] = mesh.corners(t);
        closest_point_on_triangle(sphere.center, a, b, c).distance_squared(sphere.center) <= sphere.radius * sphere.radius
    };

    for c in &s.colliders {
        if !c.volumes.iter().any(|sp| (0..n).any(|t| touches(sp, t))) {
            findings.push(Finding::UnreachableRoi { roi: c.roi_id });
        }
        let (valid, invalid): (Vec<u32>, Vec<u32>) = c.highlight_triangles.iter().partition(|&&t| (t as usize) < n);
        if !invalid.is_empty() {
            findings.push(Finding::InvalidHighlight { roi: c.roi_id, triangles: invalid });
        }
        let outside: Vec<u32> =
            valid.into_iter().filter(|&t| !c.volumes.iter().any(|sp| touches(sp, t as usize))).collect();
        if !outside.is_empty() {
            findings.push(Finding::HighlightOutsideCollider { roi: c.roi_id, triangles: outside });
        }
    }

    // Overlaps matter when both ROIs are core (one may shadow a learning goal) or when two
    // colliders are indistinguishable.
    let core = &s.script.core_set;
    for (i, a) in s.colliders.iter().enumerate() {
        for b in &s.colliders[i + 1..] {
            let identical = a.volumes == b.volumes;
            let both_core = core.contains(&a.roi_id) && core.contains(&b.roi_id);
            let overlap = a.volumes.iter().any(|p| {
                b.volumes.iter().any(|q| p.center.distance(q.center) < p.radius + q.radius)
            });
            if identical || (both_core && overlap) {
                let (first, second) = if a.roi_id < b.roi_id { (a.roi_id, b.roi_id) } else { (b.roi_id, a.roi_id) };
                findings.push(Finding::OverlapWarning { first, second });
            }
        }
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::scenario::make_viktoria_demo;
    use crate::scenario::Exhibit;

    fn demo() -> (ScenarioFile, TriangleMesh) {
        let ex = Exhibit::viktoria();
        (ex.file.clone(), ex.world.mesh().clone())
    }

    #[test]
    fn demo_is_clean() {
        let (s, mesh) = demo();
        assert_eq!(validate_scenario(&s, &mesh), vec![]);
    }

    #[test]
    fn far_collider_is_unreachable() {
        let (mut s, mesh) = demo();
        s.colliders[2].volumes = vec![Sphere { center: Vec3::new(100.0, 0.0, 0.0), radius: 0.3 }];
        let f = validate_scenario(&s, &mesh);
        assert!(f.contains(&Finding::UnreachableRoi { roi: s.colliders[2].roi_id }), "{f:?}");
        assert!(f.iter().any(|x| matches!(x, Finding::HighlightOutsideCollider { .. })));
    }

    #[test]
    fn identical_colliders_warn() {
        let (mut s, mesh) = demo();
        s.colliders[6].volumes = s.colliders[4].volumes.clone();
        let f = validate_scenario(&s, &mesh);
        assert!(f.contains(&Finding::OverlapWarning { first: RoiId(5), second: RoiId(7) }), "{f:?}");
    }

    #[test]
    fn out_of_range_highlight() {
        let (mut s, mesh) = demo();
        s.colliders[0].highlight_triangles.insert(u32::MAX);
        let f = validate_scenario(&s, &mesh);
        assert!(f.contains(&Finding::InvalidHighlight { roi: RoiId(1), triangles: vec![u32::MAX] }));
    }

    #[test]
    fn physical_mesh_alone_misses_virtual_highlights() {
        let bundle = make_viktoria_demo();
        let f = validate_scenario(&bundle.scenario, &bundle.mesh);
        assert!(f.iter().any(|x| matches!(x, Finding::InvalidHighlight { roi: RoiId(1), .. })));
    }
}
