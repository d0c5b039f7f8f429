//! The bundled "Viktoria" demo: a placeholder statue assembled from primitives, a virtual
//! arm with laurel wreath, seven ROIs and nine content units.
//!
//! Layout: +Y up, the figure faces +Z, so its right hand side is -X. The base spans
//! x ∈ [-0.6, 0.6], z ∈ [-0.5, 0.5], y ∈ [0, 0.8]; the wing tips reach y = 3.90.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use crate::geometry::{
    merge_virtual, Placement, Point3, Pose6DoF, Quat, Sphere, SurfaceSource, TriangleMesh, Vec3,
};
use crate::ids::{RoiId, UnitId};
use crate::interaction::SelectionConfig;
use crate::mediation::{ContentKind, ContentUnit, SessionScript};

use super::{RoiDefinition, ScenarioFile, TimelineData, TimelineEntry, TimelineRow, VirtualMeshRef, SCHEMA_VERSION};

pub const DEMO_SCENARIO_ID: &str = "viktoria";
pub const DEMO_MESH_REF: &str = "viktoria.obj";
pub const DEMO_ARM_REF: &str = "viktoria_arm.obj";

/// Everything `demo` writes to disk.
#[derive(Debug, Clone)]
pub struct DemoBundle {
    pub mesh: TriangleMesh,
    /// `(mesh_ref, mesh)` in the order of `scenario.virtual_meshes`.
    pub virtual_meshes: Vec<(String, TriangleMesh)>,
    pub scenario: ScenarioFile,
}

/// Triangle soup builder. Primitives do not share vertices.
#[derive(Default)]
struct Builder {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
}

impl Builder {
    fn vertex(&mut self, p: Point3) -> u32 {
        self.vertices.push(p);
        (self.vertices.len() - 1) as u32
    }

    fn quad(&mut self, a: Point3, b: Point3, c: Point3, d: Point3) {
        let i = [a, b, c, d].map(|p| self.vertex(p));
        self.triangles.push([i[0], i[1], i[2]]);
        self.triangles.push([i[0], i[2], i[3]]);
    }

    /// Axis-aligned box whose faces are split into cells no larger than `cell`.
    fn grid_box(&mut self, min: Point3, max: Point3, cell: f64) {
        let size = max - min;
        let steps = |len: f64| (len / cell).ceil().max(1.0) as usize;
        for axis in 0..3 {
            let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
            let (nu, nv) = (steps(size.axis(u)), steps(size.axis(v)));
            for side in [0.0, 1.0] {
                let point = |i: usize, j: usize| {
                    let mut c = [0.0; 3];
                    c[axis] = min.axis(axis) + side * size.axis(axis);
                    c[u] = min.axis(u) + size.axis(u) * i as f64 / nu as f64;
                    c[v] = min.axis(v) + size.axis(v) * j as f64 / nv as f64;
                    Vec3::from(c)
                };
                for i in 0..nu {
                    for j in 0..nv {
                        let (a, b, c, d) = (point(i, j), point(i + 1, j), point(i + 1, j + 1), point(i, j + 1));
                        if side == 0.0 {
                            self.quad(a, d, c, b);
                        } else {
                            self.quad(a, b, c, d);
                        }
                    }
                }
            }
        }
    }

    /// Truncated cone from `start` to `end`, radius `r0` to `r1`, with end caps.
    fn frustum(&mut self, start: Point3, end: Point3, r0: f64, r1: f64, segments: usize, rings: usize) {
        let axis = end - start;
        let (u, v) = basis(axis);
        let ring = |k: usize, s: f64| {
            let a = TAU * k as f64 / segments as f64;
            let r = r0 + (r1 - r0) * s;
            start + axis * s + (u * a.cos() + v * a.sin()) * r
        };
        for j in 0..rings {
            let (s0, s1) = (j as f64 / rings as f64, (j + 1) as f64 / rings as f64);
            for k in 0..segments {
                self.quad(ring(k, s0), ring(k + 1, s0), ring(k + 1, s1), ring(k, s1));
            }
        }
        for (s, center) in [(0.0, start), (1.0, end)] {
            for k in 0..segments {
                let (a, b) = (ring(k, s), ring(k + 1, s));
                let tri = if s == 0.0 { [center, b, a] } else { [center, a, b] };
                let i = tri.map(|p| self.vertex(p));
                self.triangles.push(i);
            }
        }
    }

    fn sphere(&mut self, center: Point3, radius: f64, stacks: usize, slices: usize) {
        let point = |i: usize, k: usize| {
            let theta = PI * i as f64 / stacks as f64;
            let phi = TAU * k as f64 / slices as f64;
            center + Vec3::new(theta.sin() * phi.cos(), theta.cos(), theta.sin() * phi.sin()) * radius
        };
        for i in 0..stacks {
            for k in 0..slices {
                let (a, b, c, d) = (point(i, k), point(i + 1, k), point(i + 1, k + 1), point(i, k + 1));
                if i == 0 {
                    let t = [a, b, c].map(|p| self.vertex(p));
                    self.triangles.push(t);
                } else if i + 1 == stacks {
                    let t = [a, b, d].map(|p| self.vertex(p));
                    self.triangles.push(t);
                } else {
                    self.quad(a, b, c, d);
                }
            }
        }
    }

    /// Ring torus around `normal` through `center`.
    fn torus(&mut self, center: Point3, normal: Vec3, major: f64, minor: f64, segments: usize, sides: usize) {
        let (u, v) = basis(normal);
        let n = normal.normalized().expect("torus normal").get();
        let point = |k: usize, m: usize| {
            let a = TAU * k as f64 / segments as f64;
            let b = TAU * m as f64 / sides as f64;
            let radial = u * a.cos() + v * a.sin();
            center + radial * (major + minor * b.cos()) + n * (minor * b.sin())
        };
        for k in 0..segments {
            for m in 0..sides {
                self.quad(point(k, m), point(k + 1, m), point(k + 1, m + 1), point(k, m + 1));
            }
        }
    }

    fn finish(self, source: SurfaceSource) -> TriangleMesh {
        TriangleMesh::new(self.vertices, self.triangles, source).expect("demo primitives are well formed")
    }
}

/// Two unit vectors perpendicular to `axis` and to each other.
fn basis(axis: Vec3) -> (Vec3, Vec3) {
    let n = axis.normalized().expect("non-zero axis").get();
    let helper = if n.x.abs() < 0.9 { Vec3::X } else { Vec3::Z };
    let u = n.cross(helper).normalized().expect("independent helper").get();
    (u, n.cross(u))
}

const SHOULDER_RIGHT: Point3 = Vec3::new(-0.35, 2.75, 0.0);
/// Where the lost right hand held the wreath up.
const HAND_RIGHT: Point3 = Vec3::new(-0.6, 3.55, 0.1);

fn statue_mesh() -> TriangleMesh {
    let mut b = Builder::default();
    // Pedestal.
    b.grid_box(Vec3::new(-0.6, 0.0, -0.5), Vec3::new(0.6, 0.8, 0.5), 0.1);
    // Draped body, neck and head.
    b.frustum(Vec3::new(0.0, 0.8, 0.0), Vec3::new(0.0, 2.9, 0.0), 0.45, 0.3, 40, 21);
    b.frustum(Vec3::new(0.0, 2.9, 0.0), Vec3::new(0.0, 3.3, 0.0), 0.3, 0.12, 40, 4);
    b.frustum(Vec3::new(0.0, 3.28, 0.0), Vec3::new(0.0, 3.4, 0.0), 0.1, 0.1, 24, 1);
    b.sphere(Vec3::new(0.0, 3.55, 0.0), 0.2, 16, 24);
    // Wings, spread behind the shoulders.
    b.grid_box(Vec3::new(0.15, 2.3, -0.45), Vec3::new(0.95, 3.9, -0.3), 0.1);
    b.grid_box(Vec3::new(-0.95, 2.3, -0.45), Vec3::new(-0.15, 3.9, -0.3), 0.1);
    // Left arm lowered, holding the palm branch in front of the body.
    b.frustum(Vec3::new(0.33, 2.75, 0.0), Vec3::new(0.5, 2.05, 0.4), 0.06, 0.05, 16, 6);
    b.frustum(Vec3::new(0.5, 1.85, 0.42), Vec3::new(0.56, 2.8, 0.46), 0.02, 0.015, 12, 8);
    b.grid_box(Vec3::new(0.43, 2.1, 0.425), Vec3::new(0.61, 2.55, 0.455), 0.05);
    // Stump of the lost right arm.
    b.frustum(SHOULDER_RIGHT + Vec3::new(0.02, 0.0, 0.0), Vec3::new(-0.38, 2.92, 0.02), 0.07, 0.065, 16, 2);
    b.finish(SurfaceSource::Physical)
}

/// Raised right arm with wreath, modelled along local +Y from the shoulder.
fn arm_mesh() -> (TriangleMesh, Placement) {
    let reach = HAND_RIGHT - SHOULDER_RIGHT;
    let len = reach.norm();
    let mut b = Builder::default();
    b.frustum(Vec3::ZERO, Vec3::new(0.0, len, 0.0), 0.065, 0.05, 16, 8);
    b.torus(Vec3::new(0.0, len + 0.08, 0.0), Vec3::Z, 0.1, 0.025, 24, 8);
    let dir = reach.normalized().expect("arm direction");
    let axis = Vec3::Y.cross(dir.get()).normalized().expect("arm is not vertical");
    let angle = Vec3::Y.dot(dir.get()).clamp(-1.0, 1.0).acos();
    let pose = Pose6DoF::new(SHOULDER_RIGHT, Quat::from_axis_angle(axis, angle));
    (b.finish(SurfaceSource::Physical), Placement { pose, scale: 1.0 })
}

fn unit(id: u32, kind: ContentKind, duration: f64, transcript: &str, assets: &[&str], roi: Option<u32>, core: bool) -> ContentUnit {
    ContentUnit {
        unit_id: UnitId(id),
        kind,
        duration,
        transcript: transcript.to_string(),
        asset_refs: assets.iter().map(|s| s.to_string()).collect(),
        linked_roi: roi.map(RoiId),
        is_core: core,
    }
}

fn units() -> Vec<ContentUnit> {
    use ContentKind::*;
    vec![
        unit(0, Audio, 30.0, "[placeholder] Welcome. This figure of Victoria was completed in 1885. Look around her and \
            let your gaze rest where something catches your eye.", &["audio/intro"], None, false),
        unit(1, Augmentation, 35.0, "[placeholder] Her right arm once reached upwards holding a laurel wreath, the sign of \
            fame and victory. It was lost in the Second World War; the socket at the armpit is still visible.",
            &[DEMO_ARM_REF, "audio/roi1"], Some(1), true),
        unit(2, ImageSet, 30.0, "[placeholder] The palm branch in her left arm stands for victory, triumph and peace. \
            Compare palm branches from several epochs.", &["img/palm-1", "img/palm-2", "img/palm-3"], Some(2), true),
        unit(3, Audio, 25.0, "[placeholder] Wings and attributes together identify the goddess of victory.",
            &["audio/roi3"], Some(3), false),
        unit(4, Augmentation, 40.0, "[placeholder] Size and weight of the figure, shown on the object, and how it was \
            produced and assembled in the museum.", &["overlay/dimensions", "img/assembly-1", "audio/roi4"], Some(4), true),
        unit(5, Audio, 25.0, "[placeholder] Unlike the polished front, the backs of the wings keep the traces of the \
            chisel.", &["audio/roi5"], Some(5), false),
        unit(6, Timeline, 45.0, "[placeholder] The inscription gives the year 1885 and the sculptor's name. A timeline \
            unrolls behind the figure with related Victorias and Nikes.", &["timeline"], Some(6), true),
        unit(7, Audio, 30.0, "[placeholder] Follow the folds of the garment and walk around the figure to trace its \
            movement.", &["audio/roi7"], Some(7), false),
        unit(8, Reconstruction, 45.0, "[placeholder] The figure in its original setting: a 2.5-D reconstruction of the \
            hall of fame, with the floor lowered so she stands on her pedestal again.",
            &["reconstruction/hall", "audio/conclusion"], None, false),
    ]
}

fn timeline() -> TimelineData {
    let entry = |year: i32, image: &str, caption: &str| TimelineEntry {
        year,
        image_ref: image.to_string(),
        caption: format!("[placeholder] {caption}"),
    };
    TimelineData {
        rows: vec![
            TimelineRow {
                name: "Prussian Classicism".into(),
                entries: vec![
                    entry(1885, "img/timeline/viktoria", "This figure, inscription dated 1885"),
                    entry(1873, "img/timeline/prussian-1", "Related victory figure"),
                    entry(1821, "img/timeline/prussian-2", "Related victory figure"),
                ],
            },
            TimelineRow {
                name: "Roman".into(),
                entries: vec![
                    entry(1755, "img/timeline/roman-1", "Roman Victoria, year of excavation"),
                    entry(1820, "img/timeline/roman-2", "Roman Victoria, year of excavation"),
                ],
            },
            TimelineRow {
                name: "Greek".into(),
                entries: vec![
                    entry(1863, "img/timeline/greek-1", "Greek Nike, year of excavation"),
                    entry(1875, "img/timeline/greek-2", "Greek Nike, year of excavation"),
                ],
            },
        ],
    }
}

fn roi(id: u32, label: &str, aliases: &[&str], center: Point3, radius: f64) -> RoiDefinition {
    RoiDefinition {
        roi_id: RoiId(id),
        label: label.to_string(),
        aliases: aliases.iter().map(|s| s.to_string()).collect(),
        volumes: vec![Sphere { center, radius }],
        highlight_triangles: BTreeSet::new(),
    }
}

/// Builds the demo bundle. Highlight sets are the world triangles whose centroid lies in
/// the collider.
pub fn make_viktoria_demo() -> DemoBundle {
    let mesh = statue_mesh();
    let (arm, placement) = arm_mesh();
    let world = merge_virtual(&mesh, &arm, &placement).expect("demo arm merges");

    let arm_dir = (HAND_RIGHT - SHOULDER_RIGHT).normalized().expect("arm direction").get();
    let on_arm = SHOULDER_RIGHT + arm_dir * ((HAND_RIGHT - SHOULDER_RIGHT).norm() * 0.8);
    let mut colliders = vec![
        roi(1, "missing arm", &["laurel wreath"], on_arm, 0.35),
        roi(2, "palm branch", &[], Vec3::new(0.52, 2.3, 0.44), 0.3),
        roi(3, "front of the wings", &[], Vec3::new(0.7, 3.2, -0.3), 0.3),
        roi(4, "head", &[], Vec3::new(0.0, 3.55, 0.2), 0.22),
        roi(5, "back of the wings", &[], Vec3::new(-0.6, 2.8, -0.45), 0.3),
        roi(6, "inscription on the base", &[], Vec3::new(-0.6, 0.35, 0.2), 0.25),
        roi(7, "garment", &["fold of the garment"], Vec3::new(0.0, 1.5, -0.4), 0.3),
    ];
    for c in &mut colliders {
        let spec = c.collider();
        c.highlight_triangles = (0..world.triangle_count())
            .filter(|&t| {
                let [a, b, cc] = world.corners(t);
                spec.contains((a + b + cc) / 3.0)
            })
            .map(|t| t as u32)
            .collect();
    }

    let script = SessionScript {
        intro: UnitId(0),
        conclusion: UnitId(8),
        roi_units: (1..=7).map(|r| (RoiId(r), UnitId(r))).collect(),
        guided_order: (1..=7).map(RoiId).collect(),
        core_set: [1, 2, 4, 6].into_iter().map(RoiId).collect(),
    };
    let scenario = ScenarioFile {
        schema_version: SCHEMA_VERSION,
        name: "Viktoria (placeholder statue)".into(),
        mesh_ref: DEMO_MESH_REF.into(),
        virtual_meshes: vec![VirtualMeshRef { mesh_ref: DEMO_ARM_REF.into(), transform: placement, unit_id: UnitId(1) }],
        colliders,
        script,
        units: units(),
        selection_config: SelectionConfig::default(),
        timeline_data: Some(timeline()),
    };
    DemoBundle { mesh, virtual_meshes: vec![(DEMO_ARM_REF.into(), arm)], scenario }
}

impl DemoBundle {
    /// Writes the scenario and its meshes into `dir`; returns the scenario path.
    pub fn write_to(&self, dir: &std::path::Path) -> std::io::Result<std::path::PathBuf> {
        use crate::geometry::write_obj;
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(&self.scenario.mesh_ref), write_obj(&self.mesh, "placeholder Viktoria statue"))?;
        for (name, m) in &self.virtual_meshes {
            std::fs::write(dir.join(name), write_obj(m, "virtual reconstruction of the missing arm"))?;
        }
        let path = dir.join(format!("{DEMO_SCENARIO_ID}.scenario.json"));
        std::fs::write(&path, super::serialize_scenario(&self.scenario))?;
        Ok(path)
    }
}
