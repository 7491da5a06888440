//! Lineup manifest export.

use std::path::Path;

use anyhow::Context;
use lineup_core::fairness::FairnessReport;
use lineup_core::session::{Completeness, LineupRecord};
use lineup_core::{Catalog, Provenance};
use serde::{Deserialize, Serialize};

pub const MANIFEST_FORMAT: &str = "lineup-manifest/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ManifestMember {
    pub person_id: String,
    pub photo_ref: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ManifestFiller {
    pub person_id: String,
    pub photo_ref: String,
    pub provenance: Provenance,
    pub round: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineupManifest {
    pub format: String,
    pub suspect: ManifestMember,
    pub fillers: Vec<ManifestFiller>,
    pub completeness: Completeness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fairness: Option<FairnessReport>,
}

impl LineupManifest {
    pub fn new(
        lineup: &LineupRecord,
        catalog: &Catalog,
        fairness: Option<FairnessReport>,
    ) -> lineup_core::Result<Self> {
        let photo = |id: &str| catalog.require(id).map(|p| p.photo_ref.clone());
        Ok(LineupManifest {
            format: MANIFEST_FORMAT.into(),
            suspect: ManifestMember {
                person_id: lineup.suspect_id.clone(),
                photo_ref: photo(&lineup.suspect_id)?,
            },
            fillers: lineup
                .fillers
                .iter()
                .map(|f| {
                    Ok(ManifestFiller {
                        person_id: f.person_id.clone(),
                        photo_ref: photo(&f.person_id)?,
                        provenance: f.provenance,
                        round: f.round,
                    })
                })
                .collect::<lineup_core::Result<_>>()?,
            completeness: lineup.completeness,
            fairness,
        })
    }

    /// Pretty JSON with a trailing newline; identical manifests give identical bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("manifest serializes");
        out.push(b'\n');
        out
    }
}

/// Writes the manifest to `destination`, creating parent directories.
pub fn export_lineup_file(manifest: &LineupManifest, destination: &Path) -> anyhow::Result<()> {
    if let Some(parent) = destination.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(destination, manifest.to_bytes())
        .with_context(|| format!("cannot write {}", destination.display()))
}
