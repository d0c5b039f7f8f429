//! Scenario files: the exhibit's mesh references, ROI colliders, content units and session
//! script, plus the resolved in-memory [`Exhibit`] the engine runs against.
//!
//! The on-disk form is `*.scenario.json`, documented in `docs/scenario-schema.md`.
//! Serialization is canonical: fields in declaration order, sets and maps sorted, shortest
//! round-trip floats, two-space indentation and a trailing newline.

mod demo;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, merge_virtual, ColliderSpec, IndexedMesh, ObjError, Placement, Sphere, TriangleMesh};
use crate::ids::{RoiId, UnitId};
use crate::interaction::{ContentCatalog, SelectionConfig, SelectionTiming, Tick};
use crate::mediation::{ContentKind, ContentUnit, SessionScript};

pub use demo::{make_viktoria_demo, DemoBundle, DEMO_ARM_REF, DEMO_MESH_REF, DEMO_SCENARIO_ID};
pub use validate::{validate_scenario, Finding};

pub const SCHEMA_VERSION: u32 = 1;

/// One ROI: its collider area, highlight triangles and display names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoiDefinition {
    pub roi_id: RoiId,
    pub label: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub volumes: Vec<Sphere>,
    /// Triangle ids in the merged world mesh (physical mesh followed by virtual meshes in
    /// file order).
    pub highlight_triangles: BTreeSet<u32>,
}

impl RoiDefinition {
    pub fn collider(&self) -> ColliderSpec {
        ColliderSpec {
            roi_id: self.roi_id,
            volumes: self.volumes.clone(),
            highlight_triangles: self.highlight_triangles.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirtualMeshRef {
    pub mesh_ref: String,
    pub transform: Placement,
    pub unit_id: UnitId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineEntry {
    pub year: i32,
    pub image_ref: String,
    pub caption: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineRow {
    pub name: String,
    pub entries: Vec<TimelineEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineData {
    pub rows: Vec<TimelineRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub mesh_ref: String,
    pub virtual_meshes: Vec<VirtualMeshRef>,
    pub colliders: Vec<RoiDefinition>,
    pub script: SessionScript,
    pub units: Vec<ContentUnit>,
    pub selection_config: SelectionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeline_data: Option<TimelineData>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    SchemaViolation { path: String, reason: String },
    DanglingReference { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SchemaViolation { path, reason } => write!(f, "{path}: {reason}"),
            Violation::DanglingReference { name } => write!(f, "dangling reference: {name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario:{}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("mesh {name}: {source}")]
    Mesh { name: String, source: ObjError },
    #[error("mesh {name}: {reason}")]
    MeshIo { name: String, reason: String },
    #[error("geometry: {0}")]
    Geometry(#[from] geometry::GeometryError),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("\n  - {x}")).collect()
}

fn schema(path: impl Into<String>, reason: impl Into<String>) -> Violation {
    Violation::SchemaViolation { path: path.into(), reason: reason.into() }
}

fn dangling(name: impl Into<String>) -> Violation {
    Violation::DanglingReference { name: name.into() }
}

/// Parses and cross-checks a scenario document.
pub fn parse_scenario(bytes: &[u8]) -> Result<ScenarioFile, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ScenarioError::Invalid(vec![schema(if path.is_empty() { ".".into() } else { path }, e.inner().to_string())])
    })?;
    let violations = check_references(&file);
    if violations.is_empty() {
        Ok(file)
    } else {
        Err(ScenarioError::Invalid(violations))
    }
}

/// Canonical JSON form of a scenario.
pub fn serialize_scenario(file: &ScenarioFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("scenario serializes");
    s.push('\n');
    s
}

fn check_references(f: &ScenarioFile) -> Vec<Violation> {
    let mut v = Vec::new();
    if f.schema_version != SCHEMA_VERSION {
        v.push(schema("schema_version", format!("expected {SCHEMA_VERSION}, found {}", f.schema_version)));
    }
    if let Err(e) = f.selection_config.validate() {
        v.push(schema("selection_config", e.to_string()));
    }

    let mut rois = BTreeSet::new();
    for (i, c) in f.colliders.iter().enumerate() {
        if !rois.insert(c.roi_id) {
            v.push(schema(format!("colliders[{i}].roi_id"), format!("duplicate ROI {}", c.roi_id)));
        }
        if c.volumes.is_empty() {
            v.push(schema(format!("colliders[{i}].volumes"), "at least one sphere required"));
        }
        for (j, s) in c.volumes.iter().enumerate() {
            if !(s.radius > 0.0) || !s.radius.is_finite() {
                v.push(schema(format!("colliders[{i}].volumes[{j}].radius"), "must be positive"));
            }
        }
    }

    let mut units: BTreeMap<UnitId, &ContentUnit> = BTreeMap::new();
    for (i, u) in f.units.iter().enumerate() {
        if units.insert(u.unit_id, u).is_some() {
            v.push(schema(format!("units[{i}].unit_id"), format!("duplicate unit {}", u.unit_id)));
        }
        if !(u.duration > 0.0) || !u.duration.is_finite() {
            v.push(schema(format!("units[{i}].duration"), "must be positive"));
        }
        if let Some(r) = u.linked_roi {
            if !rois.contains(&r) {
                v.push(dangling(format!("units[{i}].linked_roi = {r}")));
            }
        }
    }

    let sc = &f.script;
    for (name, id) in [("script.intro", sc.intro), ("script.conclusion", sc.conclusion)] {
        match units.get(&id) {
            None => v.push(dangling(format!("{name} = {id}"))),
            Some(u) if u.linked_roi.is_some() => v.push(schema(name, "intro/conclusion must not link an ROI")),
            Some(_) => {}
        }
    }
    let unlinked: BTreeSet<UnitId> = f.units.iter().filter(|u| u.linked_roi.is_none()).map(|u| u.unit_id).collect();
    if unlinked != [sc.intro, sc.conclusion].into() {
        v.push(schema("units", "exactly the intro and conclusion units may be unlinked"));
    }
    for (&roi, &unit) in &sc.roi_units {
        if !rois.contains(&roi) {
            v.push(dangling(format!("script.roi_units[{roi}]")));
        }
        match units.get(&unit) {
            None => v.push(dangling(format!("script.roi_units[{roi}] = unit {unit}"))),
            Some(u) if u.linked_roi != Some(roi) => {
                v.push(schema(format!("script.roi_units[{roi}]"), format!("unit {unit} links a different ROI")))
            }
            Some(u) if u.is_core != sc.core_set.contains(&roi) => {
                v.push(schema(format!("units (unit {unit}).is_core"), "must match membership in script.core_set"))
            }
            Some(_) => {}
        }
    }
    for &roi in &rois {
        if !sc.roi_units.contains_key(&roi) {
            v.push(schema("script.roi_units", format!("ROI {roi} has no content unit")));
        }
    }
    for u in f.units.iter().filter(|u| u.linked_roi.is_some()) {
        if sc.unit_of(u.linked_roi.unwrap()) != Some(u.unit_id) {
            v.push(schema(format!("units (unit {})", u.unit_id), "linked ROI does not map back to this unit"));
        }
    }
    for r in sc.guided_order.iter().chain(&sc.core_set) {
        if !rois.contains(r) {
            v.push(dangling(format!("script ROI {r}")));
        }
    }
    if let Err(e) = sc.validate() {
        v.push(schema("script", e));
    }
    for (i, vm) in f.virtual_meshes.iter().enumerate() {
        if !units.contains_key(&vm.unit_id) {
            v.push(dangling(format!("virtual_meshes[{i}].unit_id = {}", vm.unit_id)));
        }
        if !(vm.transform.scale > 0.0) {
            v.push(schema(format!("virtual_meshes[{i}].transform.scale"), "must be positive"));
        }
    }
    if let Some(t) = &f.timeline_data {
        if t.rows.len() != 3 {
            v.push(schema("timeline_data.rows", format!("expected 3 rows, found {}", t.rows.len())));
        }
        if !f.units.iter().any(|u| u.kind == ContentKind::Timeline) {
            v.push(schema("timeline_data", "no timeline unit presents this data"));
        }
    }
    v
}

/// A resolved scenario: merged world mesh with its index, colliders, and content lookup.
/// Immutable; share it between sessions behind an `Arc`.
#[derive(Debug, Clone)]
pub struct Exhibit {
    pub id: String,
    pub file: ScenarioFile,
    pub world: IndexedMesh,
    pub colliders: Vec<ColliderSpec>,
    units: BTreeMap<UnitId, ContentUnit>,
    durations: BTreeMap<UnitId, Tick>,
    timing: SelectionTiming,
}

/// Merges the physical mesh with the virtual meshes placed as `file.virtual_meshes` says.
/// `virtual_meshes` must be in the order of `file.virtual_meshes`.
pub fn build_world(
    file: &ScenarioFile,
    physical: TriangleMesh,
    virtual_meshes: &[TriangleMesh],
) -> Result<TriangleMesh, ScenarioError> {
    if virtual_meshes.len() != file.virtual_meshes.len() {
        return Err(ScenarioError::Invalid(vec![schema("virtual_meshes", "mesh count mismatch")]));
    }
    let mut world = physical;
    for (m, r) in virtual_meshes.iter().zip(&file.virtual_meshes) {
        world = merge_virtual(&world, m, &r.transform)?;
    }
    Ok(world)
}

/// Reads `*.scenario.json` and the meshes it references (paths relative to the file) and
/// returns the parsed file with its merged world mesh.
pub fn read_scenario(path: &Path) -> Result<(ScenarioFile, TriangleMesh), ScenarioError> {
    let io = |name: &Path, e: std::io::Error| ScenarioError::MeshIo { name: name.display().to_string(), reason: e.to_string() };
    let bytes = std::fs::read(path).map_err(|e| io(path, e))?;
    let file = parse_scenario(&bytes)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let read_mesh = |name: &str| -> Result<TriangleMesh, ScenarioError> {
        let p = dir.join(name);
        let b = std::fs::read(&p).map_err(|e| io(&p, e))?;
        geometry::load_mesh(&b).map_err(|source| ScenarioError::Mesh { name: name.to_string(), source })
    };
    let physical = read_mesh(&file.mesh_ref)?;
    let virtuals = file.virtual_meshes.iter().map(|v| read_mesh(&v.mesh_ref)).collect::<Result<Vec<_>, _>>()?;
    let world = build_world(&file, physical, &virtuals)?;
    Ok((file, world))
}

impl Exhibit {
    /// Builds from an already parsed file and its meshes. `virtual_meshes` must be in the
    /// order of `file.virtual_meshes`.
    pub fn from_parts(
        id: impl Into<String>,
        file: ScenarioFile,
        physical: TriangleMesh,
        virtual_meshes: &[TriangleMesh],
    ) -> Result<Self, ScenarioError> {
        let world = build_world(&file, physical, virtual_meshes)?;
        Self::from_world(id, file, world)
    }

    /// Builds from a parsed file and its already merged world mesh.
    pub fn from_world(id: impl Into<String>, file: ScenarioFile, world: TriangleMesh) -> Result<Self, ScenarioError> {
        let colliders: Vec<ColliderSpec> = file.colliders.iter().map(RoiDefinition::collider).collect();
        for c in &colliders {
            c.validate(world.triangle_count())?;
        }
        let cfg = &file.selection_config;
        let timing = cfg.timing().map_err(|e| ScenarioError::Invalid(vec![schema("selection_config", e.to_string())]))?;
        let durations = file.units.iter().map(|u| (u.unit_id, cfg.ticks(u.duration).max(1))).collect();
        let units = file.units.iter().map(|u| (u.unit_id, u.clone())).collect();
        Ok(Self { id: id.into(), file, world: IndexedMesh::new(world), colliders, units, durations, timing })
    }

    /// Loads `*.scenario.json` and the meshes it references (paths relative to the file).
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let (file, world) = read_scenario(path)?;
        Self::from_world(scenario_id_from_path(path), file, world)
    }

    /// The bundled demo, built in memory.
    pub fn viktoria() -> Self {
        let demo = make_viktoria_demo();
        let virtuals: Vec<TriangleMesh> = demo.virtual_meshes.iter().map(|(_, m)| m.clone()).collect();
        Self::from_parts(DEMO_SCENARIO_ID, demo.scenario, demo.mesh, &virtuals).expect("demo scenario is valid")
    }

    pub fn script(&self) -> &SessionScript {
        &self.file.script
    }

    pub fn selection_config(&self) -> &SelectionConfig {
        &self.file.selection_config
    }

    pub fn timing(&self) -> &SelectionTiming {
        &self.timing
    }

    pub fn tick_hz(&self) -> u32 {
        self.file.selection_config.tick_hz
    }

    pub fn unit(&self, id: UnitId) -> Option<&ContentUnit> {
        self.units.get(&id)
    }

    pub fn units(&self) -> impl Iterator<Item = &ContentUnit> {
        self.units.values()
    }

    pub fn collider(&self, roi: RoiId) -> Option<&ColliderSpec> {
        self.colliders.iter().find(|c| c.roi_id == roi)
    }

    pub fn roi_ids(&self) -> Vec<RoiId> {
        self.colliders.iter().map(|c| c.roi_id).collect()
    }

    pub fn summary(&self) -> ScenarioSummary {
        ScenarioSummary {
            scenario_id: self.id.clone(),
            name: self.file.name.clone(),
            tick_hz: self.tick_hz(),
            rois: self
                .file
                .colliders
                .iter()
                .map(|c| RoiSummary {
                    roi_id: c.roi_id,
                    label: c.label.clone(),
                    aliases: c.aliases.clone(),
                    centroid: c.collider().centroid(),
                    highlight_triangles: c.highlight_triangles.clone(),
                })
                .collect(),
            units: self.file.units.clone(),
            core_set: self.file.script.core_set.clone(),
            guided_order: self.file.script.guided_order.clone(),
            timeline_data: self.file.timeline_data.clone(),
        }
    }
}

impl ContentCatalog for Exhibit {
    fn unit_for_roi(&self, roi: RoiId) -> Option<UnitId> {
        self.file.script.unit_of(roi)
    }

    fn duration_ticks(&self, unit: UnitId) -> Option<Tick> {
        self.durations.get(&unit).copied()
    }
}

/// `viktoria.scenario.json` -> `viktoria`.
pub fn scenario_id_from_path(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("scenario");
    name.strip_suffix(".scenario.json").or_else(|| name.strip_suffix(".json")).unwrap_or(name).to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiSummary {
    pub roi_id: RoiId,
    pub label: String,
    pub aliases: Vec<String>,
    pub centroid: geometry::Point3,
    pub highlight_triangles: BTreeSet<u32>,
}

/// What a client needs to render a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario_id: String,
    pub name: String,
    pub tick_hz: u32,
    pub rois: Vec<RoiSummary>,
    pub units: Vec<ContentUnit>,
    pub core_set: BTreeSet<RoiId>,
    pub guided_order: Vec<RoiId>,
    pub timeline_data: Option<TimelineData>,
}
