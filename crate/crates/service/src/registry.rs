//! Scenarios a server can run, keyed by id.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gazeguide_core::scenario::{Exhibit, ScenarioError, ScenarioSummary};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read scenario directory {path}: {source}")]
    Dir { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Scenario { path: PathBuf, source: ScenarioError },
}

/// Read-only once the server starts; sessions share the exhibits through `Arc`.
#[derive(Debug, Default)]
pub struct ScenarioRegistry {
    scenarios: BTreeMap<String, Arc<Exhibit>>,
}

impl ScenarioRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The bundled demo scenario only.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.insert(Exhibit::viktoria());
        r
    }

    /// Adds or replaces a scenario under its id.
    pub fn insert(&mut self, exhibit: Exhibit) {
        self.scenarios.insert(exhibit.id.clone(), Arc::new(exhibit));
    }

    /// Loads every `*.scenario.json` in `dir` (not recursive) and returns the ids, sorted.
    pub fn load_dir(&mut self, dir: &Path) -> Result<Vec<String>, RegistryError> {
        let entries = std::fs::read_dir(dir).map_err(|source| RegistryError::Dir { path: dir.into(), source })?;
        let mut paths = Vec::new();
        for entry in entries {
            let path = entry.map_err(|source| RegistryError::Dir { path: dir.into(), source })?.path();
            if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".scenario.json")) {
                paths.push(path);
            }
        }
        paths.sort();
        let mut ids = Vec::new();
        for path in paths {
            let exhibit = Exhibit::load(&path).map_err(|source| RegistryError::Scenario { path: path.clone(), source })?;
            ids.push(exhibit.id.clone());
            self.insert(exhibit);
        }
        Ok(ids)
    }

    pub fn get(&self, id: &str) -> Option<Arc<Exhibit>> {
        self.scenarios.get(id).cloned()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.scenarios.keys().map(String::as_str)
    }

    pub fn summaries(&self) -> Vec<ScenarioSummary> {
        self.scenarios.values().map(|e| e.summary()).collect()
    }
}
