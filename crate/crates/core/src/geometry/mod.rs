//! World geometry: mesh loading and merging, gaze ray casting, the sliding puck and ROI
//! colliders. Everything here is immutable after construction.

mod bvh;
mod collider;
mod mesh;
mod obj;
mod puck;
mod raycast;
mod vector;

use thiserror::Error;

use crate::ids::RoiId;

pub use bvh::{Bvh, IndexedMesh};
pub use collider::{closest_point_on_triangle, containment, ColliderSpec, Sphere};
pub use mesh::{merge_virtual, triangle_area, Placement, SurfaceSource, TriangleMesh, MIN_TRIANGLE_AREA};
pub use obj::{load_mesh, write_obj, ObjError};
pub use puck::{puck_step, PuckState, DEFAULT_PUCK_TAU};
pub use raycast::{barycentric_point, ray_cast_exhaustive, SurfaceHit};
pub use vector::{Direction3, Point3, Pose6DoF, Quat, Ray, Vec3, UNIT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("direction has zero or non-finite length")]
    DegenerateDirection,
    #[error("quaternion norm {0} is not 1")]
    NonUnitQuaternion(f64),
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("per-triangle source tags do not match triangle count")]
    SourceCountMismatch,
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("triangle {triangle} references vertex {index} of {vertex_count}")]
    IndexOutOfRange { triangle: usize, index: usize, vertex_count: usize },
    #[error("triangle {triangle} is degenerate (area {area:e} m²)")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("scale must be positive, got {0}")]
    ScaleNonPositive(f64),
    #[error("mesh exceeds 2^32 vertices")]
    TooLarge,
    #[error("collider for ROI {0} has no volumes")]
    EmptyCollider(RoiId),
    #[error("collider for ROI {roi} has an invalid sphere (radius {radius})")]
    BadSphere { roi: RoiId, radius: f64 },
    #[error("collider for ROI {roi} highlights unknown triangle {triangle}")]
    HighlightOutOfRange { roi: RoiId, triangle: u32 },
}
