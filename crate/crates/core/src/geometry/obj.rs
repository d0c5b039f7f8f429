//! Reader and writer for the OBJ subset used for mesh assets.
//!
//! Accepted lines: `v x y z`, `f a b c` (1-based vertex indices), `#` comments and blank
//! lines. Anything else is rejected with its line number.

use std::fmt::Write as _;

use thiserror::Error;

use super::mesh::{triangle_area, SurfaceSource, TriangleMesh, MIN_TRIANGLE_AREA};
use super::vector::Vec3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjError {
    #[error("file is not valid UTF-8")]
    NotUtf8,
    #[error("line {line}: malformed: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: vertex index {index} out of range (1..={vertex_count})")]
    IndexOutOfRange { line: usize, index: i64, vertex_count: usize },
    #[error("line {line}: degenerate triangle (area {area:e} m²)")]
    DegenerateTriangle { line: usize, area: f64 },
    #[error("mesh has no faces")]
    NoFaces,
}

fn malformed(line: usize, reason: impl Into<String>) -> ObjError {
    ObjError::MalformedLine { line, reason: reason.into() }
}

/// Parses an OBJ-subset file into a physical mesh.
///
/// Faces may reference only vertices declared on earlier lines; that keeps every error
/// attributable to a single line.
pub fn load_mesh(bytes: &[u8]) -> Result<TriangleMesh, ObjError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ObjError::NotUtf8)?;
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();
        match tag {
            "v" => {
                if rest.len() != 3 {
                    return Err(malformed(line_no, format!("expected 3 coordinates, got {}", rest.len())));
                }
                let mut c = [0.0; 3];
                for (slot, s) in c.iter_mut().zip(&rest) {
                    *slot = s
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| malformed(line_no, format!("bad coordinate {s:?}")))?;
                }
                vertices.push(Vec3::from(c));
            }
            "f" => {
                if rest.len() != 3 {
                    return Err(malformed(line_no, format!("expected 3 indices, got {}", rest.len())));
                }
                let mut tri = [0u32; 3];
                for (slot, s) in tri.iter_mut().zip(&rest) {
                    let idx: i64 = s.parse().map_err(|_| malformed(line_no, format!("bad index {s:?}")))?;
                    if idx < 1 || idx as usize > vertices.len() {
                        return Err(ObjError::IndexOutOfRange {
                            line: line_no,
                            index: idx,
                            vertex_count: vertices.len(),
                        });
                    }
                    *slot = (idx - 1) as u32;
                }
                let area = triangle_area(
                    vertices[tri[0] as usize],
                    vertices[tri[1] as usize],
                    vertices[tri[2] as usize],
                );
                if !(area > MIN_TRIANGLE_AREA) {
                    return Err(ObjError::DegenerateTriangle { line: line_no, area });
                }
                triangles.push(tri);
            }
            other => return Err(malformed(line_no, format!("unsupported statement {other:?}"))),
        }
    }

    if triangles.is_empty() {
        return Err(ObjError::NoFaces);
    }
    TriangleMesh::new(vertices, triangles, SurfaceSource::Physical)
        .map_err(|e| malformed(0, e.to_string()))
}

/// Writes a mesh in the same subset. Coordinates use the shortest round-trip float form,
/// so `load_mesh(write_obj(m))` reproduces the vertices exactly.
pub fn write_obj(mesh: &TriangleMesh, header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}
