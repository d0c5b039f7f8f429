//! The world mesh: physical surfaces plus merged virtual augmentations.

use serde::{Deserialize, Serialize};

use super::vector::{Point3, Pose6DoF, Vec3};
use super::GeometryError;

/// Triangles smaller than this (m²) are rejected as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Whether a triangle comes from the scanned physical object or a virtual addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceSource {
    Physical,
    Virtual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
    sources: Vec<SurfaceSource>,
}

impl TriangleMesh {
    /// Builds a mesh where every triangle has the same source tag.
    pub fn new(
        vertices: Vec<Point3>,
        triangles: Vec<[u32; 3]>,
        source: SurfaceSource,
    ) -> Result<Self, GeometryError> {
        let sources = vec![source; triangles.len()];
        Self::with_sources(vertices, triangles, sources)
    }

    pub fn with_sources(
        vertices: Vec<Point3>,
        triangles: Vec<[u32; 3]>,
        sources: Vec<SurfaceSource>,
    ) -> Result<Self, GeometryError> {
        if triangles.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        if sources.len() != triangles.len() {
            return Err(GeometryError::SourceCountMismatch);
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFiniteVertex(i));
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i as usize >= vertices.len() {
                    return Err(GeometryError::IndexOutOfRange {
                        triangle: t,
                        index: i as usize,
                        vertex_count: vertices.len(),
                    });
                }
            }
            let area = triangle_area(vertices[tri[0] as usize], vertices[tri[1] as usize], vertices[tri[2] as usize]);
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(GeometryError::DegenerateTriangle { triangle: t, area });
            }
        }
        Ok(Self { vertices, triangles, sources })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn sources(&self) -> &[SurfaceSource] {
        &self.sources
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn source(&self, triangle: usize) -> SurfaceSource {
        self.sources[triangle]
    }

    pub fn corners(&self, triangle: usize) -> [Point3; 3] {
        let [a, b, c] = self.triangles[triangle];
        [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]]
    }

    /// Axis-aligned bounds as (min, max).
    pub fn bounds(&self) -> (Point3, Point3) {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for tri in &self.triangles {
            for &i in tri {
                let v = self.vertices[i as usize];
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Returns a copy with all vertices moved by `pose` after uniform `scale`.
    pub fn transformed(&self, placement: &Placement) -> Result<TriangleMesh, GeometryError> {
        if !(placement.scale > 0.0) || !placement.scale.is_finite() {
            return Err(GeometryError::ScaleNonPositive(placement.scale));
        }
        let vertices = self.vertices.iter().map(|&v| placement.apply(v)).collect();
        TriangleMesh::with_sources(vertices, self.triangles.clone(), self.sources.clone())
    }
}

pub fn triangle_area(a: Point3, b: Point3, c: Point3) -> f64 {
    (b - a).cross(c - a).norm() * 0.5
}

/// Rigid transform plus uniform scale, applied as `pose(scale * p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub pose: Pose6DoF,
    pub scale: f64,
}

impl Placement {
    pub fn identity() -> Self {
        Self { pose: Pose6DoF::default(), scale: 1.0 }
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        self.pose.transform_point(p * self.scale)
    }
}

/// Appends `addition`, placed by `placement`, to `world`. Added triangles are tagged virtual;
/// the original triangles keep their ids and tags.
pub fn merge_virtual(
    world: &TriangleMesh,
    addition: &TriangleMesh,
    placement: &Placement,
) -> Result<TriangleMesh, GeometryError> {
    let placed = addition.transformed(placement)?;
    let offset = u32::try_from(world.vertices.len()).map_err(|_| GeometryError::TooLarge)?;
    let mut vertices = world.vertices.clone();
    vertices.extend_from_slice(&placed.vertices);
    let mut triangles = world.triangles.clone();
    triangles.extend(placed.triangles.iter().map(|t| t.map(|i| i + offset)));
    let mut sources = world.sources.clone();
    sources.extend(std::iter::repeat(SurfaceSource::Virtual).take(placed.triangles.len()));
    TriangleMesh::with_sources(vertices, triangles, sources)
}
