//! The three generators compared in evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alphabet::TileAlphabet;
use crate::assembler::{assemble, build_level, GeneratedLevel};
use crate::corpus::{AnnotatedLevel, RoomType, TravelDirection};
use crate::error::ChainError;
use crate::grid::ChunkSize;
use crate::hierarchical::{label_grid, plan_from_labels, HierarchicalBaseline};
use crate::room_model::{room_cpd_difference, CpdDifference, RoomEnsemble, RoomModel};
use crate::seeds;
use crate::sequence::RoomTypeChain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    /// Room-type chain plus one direction-aware room model per room type.
    Ensemble,
    /// Room-type chain plus one direction-aware room model for all rooms.
    Simplified,
    /// Room-type grid chain plus one direction-free room model.
    Hierarchical,
}

impl Approach {
    pub const ALL: [Approach; 3] = [Approach::Hierarchical, Approach::Simplified, Approach::Ensemble];

    pub fn name(self) -> &'static str {
        match self {
            Approach::Ensemble => "ensemble",
            Approach::Simplified => "simplified",
            Approach::Hierarchical => "hierarchical",
        }
    }

    /// Column heading used in comparison tables.
    pub fn title(self) -> &'static str {
        match self {
            Approach::Ensemble => "Ensemble",
            Approach::Simplified => "Simplified",
            Approach::Hierarchical => "Hierarchical MC",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ensemble" => Ok(Approach::Ensemble),
            "simplified" => Ok(Approach::Simplified),
            "hierarchical" => Ok(Approach::Hierarchical),
            other => Err(format!("unknown approach {other:?}")),
        }
    }
}

/// Playable rooms of `levels` as `(grid, type, direction)` triples.
pub fn playable_rooms<'a>(
    levels: &'a [&'a AnnotatedLevel],
) -> impl Iterator<Item = (&'a crate::grid::TileGrid, RoomType, TravelDirection)> + 'a {
    levels.iter().flat_map(|l| {
        l.sequence
            .rooms
            .iter()
            .map(|(_, r)| (&r.grid, r.room_type, r.direction.unwrap_or(TravelDirection::Right)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrainedApproach {
    Ensemble { chain: RoomTypeChain, rooms: RoomEnsemble },
    Simplified { chain: RoomTypeChain, rooms: RoomModel },
    Hierarchical(HierarchicalBaseline),
}

impl TrainedApproach {
    pub fn train(
        approach: Approach,
        levels: &[&AnnotatedLevel],
        chunk: ChunkSize,
        alphabet: &TileAlphabet,
    ) -> Result<Self, ChainError> {
        if levels.is_empty() {
            return Err(ChainError::EmptyTraining);
        }
        let sequences = || -> Vec<Vec<RoomType>> { levels.iter().map(|l| l.sequence.types()).collect() };
        Ok(match approach {
            Approach::Ensemble => TrainedApproach::Ensemble {
                chain: RoomTypeChain::train(&sequences())?,
                rooms: RoomEnsemble::train(playable_rooms(levels), chunk, alphabet)?,
            },
            Approach::Simplified => TrainedApproach::Simplified {
                chain: RoomTypeChain::train(&sequences())?,
                rooms: RoomModel::train(
                    playable_rooms(levels).map(|(g, _, d)| (g, d)),
                    true,
                    chunk,
                    alphabet,
                )?,
            },
            Approach::Hierarchical => {
                TrainedApproach::Hierarchical(HierarchicalBaseline::train(levels, chunk, alphabet)?)
            }
        })
    }

    pub fn approach(&self) -> Approach {
        match self {
            TrainedApproach::Ensemble { .. } => Approach::Ensemble,
            TrainedApproach::Simplified { .. } => Approach::Simplified,
            TrainedApproach::Hierarchical(_) => Approach::Hierarchical,
        }
    }

    pub fn chain(&self) -> Option<&RoomTypeChain> {
        match self {
            TrainedApproach::Ensemble { chain, .. } | TrainedApproach::Simplified { chain, .. } => Some(chain),
            TrainedApproach::Hierarchical(_) => None,
        }
    }

    /// Generate one level from `seed`.
    ///
    /// `forced` replaces the sampled room-type sequence (sequence approaches
    /// only). The hierarchical baseline aims for `rooms` playable rooms.
    pub fn generate(
        &self,
        seed: u64,
        rooms: usize,
        resample_cap: u32,
        alphabet: &TileAlphabet,
        forced: Option<&[RoomType]>,
    ) -> Result<GeneratedLevel, ChainError> {
        let sequence = |chain: &RoomTypeChain| -> Result<Vec<RoomType>, ChainError> {
            match forced {
                Some(types) if types.is_empty() => Err(ChainError::ZeroLength),
                Some(types) => Ok(types.to_vec()),
                None => chain.generate(rooms, &mut seeds::stream(seed, seeds::SEQUENCE_STREAM)),
            }
        };
        Ok(match self {
            TrainedApproach::Ensemble { chain, rooms } => {
                build_level(&sequence(chain)?, rooms, seed, resample_cap, alphabet)
            }
            TrainedApproach::Simplified { chain, rooms } => {
                build_level(&sequence(chain)?, rooms, seed, resample_cap, alphabet)
            }
            TrainedApproach::Hierarchical(base) => {
                let mut rng = seeds::stream(seed, seeds::LAYOUT_STREAM);
                let (labels, _) = base.generate_labels(rooms, &mut rng);
                assemble(plan_from_labels(&labels), base.room_model(), seed, resample_cap, alphabet)
            }
        })
    }

    /// Probability of the layout model generating the test level's layout.
    pub fn layout_similarity(&self, test: &AnnotatedLevel) -> f64 {
        match self {
            TrainedApproach::Ensemble { chain, .. } | TrainedApproach::Simplified { chain, .. } => {
                chain.sequence_probability(&test.sequence.types())
            }
            TrainedApproach::Hierarchical(base) => base.grid_probability(&label_grid(test)),
        }
    }

    /// CPD distance between the room models and the same models retrained on
    /// the test level alone. `None` for the hierarchical baseline.
    pub fn inverse_content_similarity(
        &self,
        test: &AnnotatedLevel,
        alphabet: &TileAlphabet,
    ) -> Result<Option<CpdDifference>, ChainError> {
        let test_levels = [test];
        let chunk = test.chunk;
        match self {
            TrainedApproach::Ensemble { rooms, .. } => {
                let mut combined: Option<CpdDifference> = None;
                for (room_type, model) in [
                    (RoomType::Horizontal, &rooms.horizontal),
                    (RoomType::Vertical, &rooms.vertical),
                ] {
                    let reference = RoomModel::train(
                        playable_rooms(&test_levels)
                            .filter(|(_, t, _)| *t == room_type)
                            .map(|(g, _, d)| (g, d)),
                        true,
                        chunk,
                        alphabet,
                    );
                    // A test level without rooms of this type contributes nothing.
                    let Ok(reference) = reference else { continue };
                    let d = room_cpd_difference(model, &reference)?;
                    combined = Some(combined.map_or(d, |c| c.combine(d)));
                }
                combined.map(Some).ok_or(ChainError::NoSharedStructure)
            }
            TrainedApproach::Simplified { rooms, .. } => {
                let reference = RoomModel::train(
                    playable_rooms(&test_levels).map(|(g, _, d)| (g, d)),
                    true,
                    chunk,
                    alphabet,
                )?;
                room_cpd_difference(rooms, &reference).map(Some)
            }
            TrainedApproach::Hierarchical(_) => Ok(None),
        }
    }
}
