//! On-disk model bundle: `manifest.json` plus one CPD export per chain.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::TileAlphabet;
use crate::approach::{Approach, TrainedApproach};
use crate::grid::ChunkSize;
use crate::hierarchical::HierarchicalBaseline;
use crate::room_model::{RoomEnsemble, RoomModel};
use crate::sequence::RoomTypeChain;
use crate::table::{CpdExport, CpdImportError};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Import(#[from] CpdImportError),
    #[error("manifest has no chain named {0:?}")]
    MissingChain(String),
    #[error("manifest for {approach} is missing grid dimensions")]
    MissingGridDims { approach: Approach },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub name: String,
    pub file: String,
    /// Whether the chain conditions on travel direction.
    pub uses_direction: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub approach: Approach,
    pub chunk: ChunkSize,
    pub trained_on: Vec<String>,
    pub withheld: Option<String>,
    pub chains: Vec<ChainEntry>,
    /// Room-grid dimensions `(cols, rows)` for the grid-level baseline.
    pub grid_dims: Option<(usize, usize)>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BundleError + '_ {
    move |source| BundleError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), BundleError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| BundleError::Json {
        path: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, BundleError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| BundleError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Named CPD exports making up a trained approach.
pub fn chain_exports(model: &TrainedApproach) -> Vec<(CpdExport, bool)> {
    match model {
        TrainedApproach::Ensemble { chain, rooms } => vec![
            (chain.export(), false),
            (rooms.horizontal.export("rooms-horizontal"), true),
            (rooms.vertical.export("rooms-vertical"), true),
        ],
        TrainedApproach::Simplified { chain, rooms } => {
            vec![(chain.export(), false), (rooms.export("rooms"), true)]
        }
        TrainedApproach::Hierarchical(base) => vec![
            (base.export_layout(), false),
            (base.room_model().export("rooms"), false),
        ],
    }
}

/// Write `model` into `dir`, returning the manifest path.
pub fn save(
    dir: &Path,
    model: &TrainedApproach,
    chunk: ChunkSize,
    trained_on: Vec<String>,
    withheld: Option<String>,
) -> Result<PathBuf, BundleError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut chains = Vec::new();
    for (export, uses_direction) in chain_exports(model) {
        let file = format!("{}.json", export.chain);
        write_json(&dir.join(&file), &export)?;
        chains.push(ChainEntry {
            name: export.chain.clone(),
            file,
            uses_direction,
        });
    }
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        approach: model.approach(),
        chunk,
        trained_on,
        withheld,
        chains,
        grid_dims: match model {
            TrainedApproach::Hierarchical(base) => Some(base.grid_dims()),
            _ => None,
        },
    };
    let path = dir.join(MANIFEST_FILE);
    write_json(&path, &manifest)?;
    Ok(path)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, BundleError> {
    read_json(&dir.join(MANIFEST_FILE))
}

/// Load a bundle written by [`save`].
pub fn load(dir: &Path, alphabet: &TileAlphabet) -> Result<(Manifest, TrainedApproach), BundleError> {
    let manifest = read_manifest(dir)?;
    let export = |name: &str| -> Result<(CpdExport, bool), BundleError> {
        let entry = manifest
            .chains
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| BundleError::MissingChain(name.to_string()))?;
        Ok((read_json(&dir.join(&entry.file))?, entry.uses_direction))
    };
    let rooms = |name: &str| -> Result<RoomModel, BundleError> {
        let (e, uses_direction) = export(name)?;
        Ok(RoomModel::from_export(&e, uses_direction, manifest.chunk, alphabet)?)
    };
    let model = match manifest.approach {
        Approach::Ensemble => TrainedApproach::Ensemble {
            chain: RoomTypeChain::from_export(&export("room-sequence")?.0)?,
            rooms: RoomEnsemble {
                horizontal: rooms("rooms-horizontal")?,
                vertical: rooms("rooms-vertical")?,
            },
        },
        Approach::Simplified => TrainedApproach::Simplified {
            chain: RoomTypeChain::from_export(&export("room-sequence")?.0)?,
            rooms: rooms("rooms")?,
        },
        Approach::Hierarchical => {
            let (cols, rows) = manifest.grid_dims.ok_or(BundleError::MissingGridDims {
                approach: manifest.approach,
            })?;
            let layout = HierarchicalBaseline::layout_from_export(&export("room-type-grid")?.0)?;
            TrainedApproach::Hierarchical(HierarchicalBaseline::from_parts(layout, rooms("rooms")?, cols, rows))
        }
    };
    Ok((manifest, model))
}
