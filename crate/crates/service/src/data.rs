//! Data directory layout and loading.
//!
//! ```text
//! <data_dir>/persons.jsonl     person file (required)
//! <data_dir>/descriptors.bin   visual descriptors (optional)
//! <data_dir>/sessions/         one event log per session
//! <data_dir>/exports/          exported lineup manifests
//! ```

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::Context;
use lineup_core::catalog::ingest_persons;
use lineup_core::recommenders::{load_descriptors, DescriptorMatrix};
use lineup_core::{Catalog, Engine};

use crate::config::ServiceConfig;

pub fn load_catalog(path: &Path) -> anyhow::Result<Catalog> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    ingest_persons(BufReader::new(file)).with_context(|| format!("cannot load {}", path.display()))
}

pub fn load_descriptor_matrix(path: &Path, catalog: &Catalog) -> anyhow::Result<DescriptorMatrix> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let (matrix, report) = load_descriptors(BufReader::new(file), catalog)
        .with_context(|| format!("cannot load {}", path.display()))?;
    if !report.unknown_ids.is_empty() || report.missing > 0 {
        log::warn!(
            "{}: {} unknown id(s), {} person(s) without a descriptor",
            path.display(),
            report.unknown_ids.len(),
            report.missing
        );
    }
    Ok(matrix)
}

/// Catalog plus descriptors when `descriptors.bin` exists.
pub fn load_engine(config: &ServiceConfig) -> anyhow::Result<Engine> {
    let catalog = load_catalog(&config.persons_path())?;
    let path = config.descriptors_path();
    let visual = if path.exists() {
        Some(load_descriptor_matrix(&path, &catalog)?)
    } else {
        log::info!("{} not found; visual strategy disabled", path.display());
        None
    };
    Ok(Engine::new(catalog, visual))
}
