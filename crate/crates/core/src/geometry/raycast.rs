//! Gaze-ray to surface projection.
//!
//! Both the exhaustive loop and the BVH traversal run the same per-triangle test and the same
//! `(distance, triangle_id)` ordering, so they return bit-identical hits.

use serde::{Deserialize, Serialize};

use super::mesh::TriangleMesh;
use super::vector::{Direction3, Point3, Ray, Vec3};

/// Where a gaze ray meets the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceHit {
    pub triangle_id: u32,
    pub point: Point3,
    /// Weights of the triangle's three corners, in index order.
    pub barycentric: [f64; 3],
    /// Unit normal, oriented against the incoming ray.
    pub normal: Direction3,
    pub distance: f64,
}

/// Raw Möller–Trumbore result: ray parameter and the weights of corners 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RawHit {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

/// Two-sided ray/triangle test. Edges and corners count as inside.
#[inline]
pub(crate) fn intersect_triangle(ray: &Ray, a: Point3, b: Point3, c: Point3) -> Option<RawHit> {
    let d = ray.direction.get();
    let e1 = b - a;
    let e2 = c - a;
    let p = d.cross(e2);
    let det = e1.dot(p);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin - a;
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = d.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv;
    if !(t >= 0.0) || !t.is_finite() {
        return None;
    }
    Some(RawHit { t, u, v })
}

/// True when `(t, id)` should replace the current best `(best_t, best_id)`.
#[inline]
pub(crate) fn closer(t: f64, id: u32, best: Option<(RawHit, u32)>) -> bool {
    match best {
        None => true,
        Some((b, bid)) => t < b.t || (t == b.t && id < bid),
    }
}

pub(crate) fn finish_hit(mesh: &TriangleMesh, ray: &Ray, raw: RawHit, id: u32) -> SurfaceHit {
    let [a, b, c] = mesh.corners(id as usize);
    let w = (1.0 - raw.u - raw.v).max(0.0);
    let point = a * w + b * raw.u + c * raw.v;
    let n = (b - a).cross(c - a);
    let n = if n.dot(ray.direction.get()) > 0.0 { -n } else { n };
    // Area > 1e-12 m² guarantees a non-zero cross product.
    let normal = Direction3::new(n).unwrap_or(Direction3::UP);
    SurfaceHit { triangle_id: id, point, barycentric: [w, raw.u, raw.v], normal, distance: raw.t }
}

/// Reference implementation: tests every triangle.
pub fn ray_cast_exhaustive(mesh: &TriangleMesh, ray: &Ray) -> Option<SurfaceHit> {
    let mut best: Option<(RawHit, u32)> = None;
    for id in 0..mesh.triangle_count() {
        let [a, b, c] = mesh.corners(id);
        if let Some(raw) = intersect_triangle(ray, a, b, c) {
            if closer(raw.t, id as u32, best) {
                best = Some((raw, id as u32));
            }
        }
    }
    best.map(|(raw, id)| finish_hit(mesh, ray, raw, id))
}

/// Reconstructs the hit point from its barycentric weights; used by invariant checks.
pub fn barycentric_point(mesh: &TriangleMesh, hit: &SurfaceHit) -> Vec3 {
    let [a, b, c] = mesh.corners(hit.triangle_id as usize);
    a * hit.barycentric[0] + b * hit.barycentric[1] + c * hit.barycentric[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::SurfaceSource;

    fn floor_triangle() -> TriangleMesh {
        TriangleMesh::new(
            vec![Vec3::new(-1.0, -1.0, 0.0), Vec3::new(1.0, -1.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
            SurfaceSource::Physical,
        )
        .unwrap()
    }

    #[test]
    fn axis_aligned_hit() {
        let ray = Ray::new(Vec3::new(0.0, 0.0, 1.0), (-Vec3::Z).normalized().unwrap());
        let hit = ray_cast_exhaustive(&floor_triangle(), &ray).unwrap();
        assert_eq!(hit.triangle_id, 0);
        assert_eq!(hit.distance, 1.0);
        assert!(hit.point.distance(Vec3::ZERO) < 1e-12);
        assert_eq!(hit.normal.get(), Vec3::Z);
        let sum: f64 = hit.barycentric.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn back_face_is_hit_with_flipped_normal() {
        let ray = Ray::new(Vec3::new(0.0, 0.0, -2.0), Vec3::Z.normalized().unwrap());
        let hit = ray_cast_exhaustive(&floor_triangle(), &ray).unwrap();
        assert_eq!(hit.distance, 2.0);
        assert_eq!(hit.normal.get(), -Vec3::Z);
    }

    #[test]
    fn miss_pointing_away() {
        let ray = Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::Z.normalized().unwrap());
        assert_eq!(ray_cast_exhaustive(&floor_triangle(), &ray), None);
    }

    #[test]
    fn tie_goes_to_lower_id() {
        let v = vec![Vec3::new(-1.0, -1.0, 0.0), Vec3::new(1.0, -1.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let mesh = TriangleMesh::new(v, vec![[0, 1, 2], [2, 1, 0]], SurfaceSource::Physical).unwrap();
        let ray = Ray::new(Vec3::new(0.0, 0.0, 1.0), (-Vec3::Z).normalized().unwrap());
        assert_eq!(ray_cast_exhaustive(&mesh, &ray).unwrap().triangle_id, 0);
    }
}
