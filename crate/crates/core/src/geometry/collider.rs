//! ROI collider areas (sphere unions) and their highlight triangle sets.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ids::RoiId;

use super::vector::Point3;
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Point3,
    pub radius: f64,
}

impl Sphere {
    pub fn contains(&self, p: Point3) -> bool {
        p.distance_squared(self.center) <= self.radius * self.radius
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }
}

/// The selectable volume around an ROI plus the triangles highlighted when it is cued.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColliderSpec {
    pub roi_id: RoiId,
    pub volumes: Vec<Sphere>,
    pub highlight_triangles: BTreeSet<u32>,
}

impl ColliderSpec {
    pub fn validate(&self, triangle_count: usize) -> Result<(), GeometryError> {
        if self.volumes.is_empty() {
            return Err(GeometryError::EmptyCollider(self.roi_id));
        }
        if let Some(s) = self.volumes.iter().find(|s| !(s.radius > 0.0) || !s.center.is_finite()) {
            return Err(GeometryError::BadSphere { roi: self.roi_id, radius: s.radius });
        }
        if let Some(&t) = self.highlight_triangles.iter().find(|&&t| t as usize >= triangle_count) {
            return Err(GeometryError::HighlightOutOfRange { roi: self.roi_id, triangle: t });
        }
        Ok(())
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.volumes.iter().any(|s| s.contains(p))
    }

    /// Sum of the sphere volumes, used to rank overlapping colliders.
    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().map(Sphere::volume).sum()
    }

    /// Mean of the sphere centers.
    pub fn centroid(&self) -> Point3 {
        let sum = self.volumes.iter().fold(Point3::ZERO, |acc, s| acc + s.center);
        sum / self.volumes.len() as f64
    }
}

/// Closest point to `p` on triangle `abc` (Ericson's region test).
pub fn closest_point_on_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// The ROI whose collider contains `p`. Overlaps go to the smallest total volume, then the
/// lowest ROI id.
pub fn containment(p: Point3, colliders: &[ColliderSpec]) -> Option<RoiId> {
    colliders
        .iter()
        .filter(|c| c.contains(p))
        .min_by(|a, b| a.total_volume().total_cmp(&b.total_volume()).then(a.roi_id.cmp(&b.roi_id)))
        .map(|c| c.roi_id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vector::Vec3;

    fn ball(roi: u32, center: Vec3, radius: f64) -> ColliderSpec {
        ColliderSpec { roi_id: RoiId(roi), volumes: vec![Sphere { center, radius }], highlight_triangles: BTreeSet::new() }
    }

    #[test]
    fn center_and_outside() {
        let cs = [ball(1, Vec3::new(0.0, 1.0, 0.0), 0.2), ball(2, Vec3::new(3.0, 0.0, 0.0), 0.5)];
        assert_eq!(containment(Vec3::new(0.0, 1.0, 0.0), &cs), Some(RoiId(1)));
        assert_eq!(containment(Vec3::new(9.0, 9.0, 9.0), &cs), None);
    }

    #[test]
    fn overlap_prefers_smaller_volume() {
        // Radii chosen so the spheres hold exactly 1 m³ and 2 m³.
        let r1 = (3.0 / (4.0 * PI)).cbrt();
        let r2 = (6.0 / (4.0 * PI)).cbrt();
        let big = ball(1, Vec3::ZERO, r2);
        let small = ball(7, Vec3::new(0.1, 0.0, 0.0), r1);
        assert!((big.total_volume() - 2.0).abs() < 1e-12);
        assert!((small.total_volume() - 1.0).abs() < 1e-12);
        assert_eq!(containment(Vec3::new(0.05, 0.0, 0.0), &[big.clone(), small.clone()]), Some(RoiId(7)));
        assert_eq!(containment(Vec3::new(0.05, 0.0, 0.0), &[small, big]), Some(RoiId(7)));
    }

    #[test]
    fn equal_volume_prefers_lower_id() {
        let cs = [ball(5, Vec3::ZERO, 1.0), ball(3, Vec3::ZERO, 1.0)];
        assert_eq!(containment(Vec3::ZERO, &cs), Some(RoiId(3)));
    }

    #[test]
    fn closest_point_regions() {
        let (a, b, c) = (Vec3::ZERO, Vec3::X, Vec3::Y);
        let f = closest_point_on_triangle(Vec3::new(0.2, 0.2, 1.0), a, b, c);
        assert!(f.distance(Vec3::new(0.2, 0.2, 0.0)) < 1e-15);
        assert_eq!(closest_point_on_triangle(Vec3::new(-1.0, -1.0, 0.0), a, b, c), a);
        assert_eq!(closest_point_on_triangle(Vec3::new(2.0, -0.5, 0.0), a, b, c), b);
        let e = closest_point_on_triangle(Vec3::new(0.5, -3.0, 2.0), a, b, c);
        assert!(e.distance(Vec3::new(0.5, 0.0, 0.0)) < 1e-15);
        let h = closest_point_on_triangle(Vec3::new(1.0, 1.0, 0.0), a, b, c);
        assert!(h.distance(Vec3::new(0.5, 0.5, 0.0)) < 1e-15);
    }

    #[test]
    fn validation() {
        let mut c = ball(1, Vec3::ZERO, 1.0);
        c.highlight_triangles.insert(10);
        assert!(matches!(c.validate(5), Err(GeometryError::HighlightOutOfRange { .. })));
        assert!(c.validate(11).is_ok());
        c.volumes.clear();
        assert!(matches!(c.validate(11), Err(GeometryError::EmptyCollider(_))));
        let zero = ball(2, Vec3::ZERO, 0.0);
        assert!(matches!(zero.validate(1), Err(GeometryError::BadSphere { .. })));
    }
}
