//! First-order Markov chain over room types along the game path.

use rand::Rng;

use crate::corpus::RoomType;
use crate::error::ChainError;
use crate::table::{ConditionalTable, CpdExport, CpdImportError, CpdKey};

impl CpdKey for RoomType {
    fn fields(&self) -> Vec<String> {
        vec![self.letter().to_string()]
    }

    fn from_fields(fields: &[String]) -> Option<Self> {
        match fields {
            [s] => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => RoomType::from_letter(c),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

/// `P(type_i | type_{i-1})` over Horizontal and Vertical rooms, with a
/// uniform choice for the first room.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomTypeChain {
    table: ConditionalTable<RoomType, RoomType>,
}

const INITIAL_PROBABILITY: f64 = 0.5;

impl RoomTypeChain {
    /// One observation per adjacent pair of every training sequence.
    pub fn train<S: AsRef<[RoomType]>>(sequences: &[S]) -> Result<Self, ChainError> {
        if sequences.is_empty() {
            return Err(ChainError::EmptyTraining);
        }
        let mut table = ConditionalTable::new();
        for (index, seq) in sequences.iter().enumerate() {
            let seq = seq.as_ref();
            if seq.len() < 2 {
                return Err(ChainError::ShortSequence {
                    index,
                    len: seq.len(),
                });
            }
            if seq.contains(&RoomType::Null) {
                return Err(ChainError::NullInSequence);
            }
            for pair in seq.windows(2) {
                table.observe(pair[0], pair[1]);
            }
        }
        Ok(Self { table })
    }

    pub fn table(&self) -> &ConditionalTable<RoomType, RoomType> {
        &self.table
    }

    pub fn transition(&self, from: RoomType, to: RoomType) -> f64 {
        self.table.probability(&from, &to)
    }

    pub fn generate<R: Rng + ?Sized>(&self, length: usize, rng: &mut R) -> Result<Vec<RoomType>, ChainError> {
        if length == 0 {
            return Err(ChainError::ZeroLength);
        }
        let first = if rng.gen_bool(INITIAL_PROBABILITY) {
            RoomType::Horizontal
        } else {
            RoomType::Vertical
        };
        let mut out = Vec::with_capacity(length);
        out.push(first);
        while out.len() < length {
            let prev = *out.last().expect("non-empty");
            let next = self
                .table
                .sample(&prev, rng)
                .ok_or_else(|| ChainError::DeadEnd(prev.to_string()))?;
            out.push(*next);
        }
        Ok(out)
    }

    /// Probability that [`RoomTypeChain::generate`] emits exactly `types`:
    /// one half for the first room times every transition probability.
    pub fn sequence_probability(&self, types: &[RoomType]) -> f64 {
        match types.first() {
            None => 0.0,
            Some(RoomType::Null) => 0.0,
            Some(_) => types
                .windows(2)
                .map(|w| self.transition(w[0], w[1]))
                .product::<f64>()
                * INITIAL_PROBABILITY,
        }
    }

    pub fn export(&self) -> CpdExport {
        self.table.export("room-sequence", &["previous"])
    }

    pub fn from_export(export: &CpdExport) -> Result<Self, CpdImportError> {
        Ok(Self {
            table: ConditionalTable::from_export(export)?,
        })
    }
}

/// Render a sequence as `H`/`V` letters, e.g. `HHHVV`.
pub fn format_sequence(types: &[RoomType]) -> String {
    types.iter().map(|t| t.letter()).collect()
}

pub fn parse_sequence(text: &str) -> Result<Vec<RoomType>, ChainError> {
    text.trim()
        .chars()
        .map(|c| match RoomType::from_letter(c) {
            Some(t @ (RoomType::Horizontal | RoomType::Vertical)) => Ok(t),
            _ => Err(ChainError::BadSequenceChar(c)),
        })
        .collect()
}
