//! L-shaped multidimensional Markov chains over room tiles.
//!
//! Each tile is conditioned on its left, below and below-left neighbours,
//! optionally extended with the travel direction out of the room. Neighbours
//! outside the grid read as the alphabet's border symbol, so the bottom row
//! and left column are trained and generated like any other cell.

use rand::Rng;

use crate::alphabet::TileAlphabet;
use crate::corpus::{RoomType, TravelDirection};
use crate::error::ChainError;
use crate::grid::{ChunkSize, TileGrid};
use crate::table::{ConditionalTable, CpdExport, CpdImportError, CpdKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LContext {
    pub left: u8,
    pub below: u8,
    pub below_left: u8,
    pub direction: Option<TravelDirection>,
}

pub const CONTEXT_FIELDS: [&str; 4] = ["left", "below", "below_left", "direction"];

impl CpdKey for LContext {
    fn fields(&self) -> Vec<String> {
        vec![
            (self.left as char).to_string(),
            (self.below as char).to_string(),
            (self.below_left as char).to_string(),
            self.direction.map_or('-', TravelDirection::letter).to_string(),
        ]
    }

    fn from_fields(fields: &[String]) -> Option<Self> {
        let byte = |s: &String| match s.as_bytes() {
            [b] => Some(*b),
            _ => None,
        };
        match fields {
            [l, b, bl, d] => Some(Self {
                left: byte(l)?,
                below: byte(b)?,
                below_left: byte(bl)?,
                direction: match byte(d)? {
                    b'-' => None,
                    c => Some(TravelDirection::from_letter(c as char)?),
                },
            }),
            _ => None,
        }
    }
}

/// Context of cell (`col`, `row`) in a top-row-first grid.
#[inline]
pub fn l_context(
    grid: &TileGrid,
    col: usize,
    row: usize,
    border: u8,
    direction: Option<TravelDirection>,
) -> LContext {
    let (c, r) = (col as isize, row as isize);
    LContext {
        left: grid.try_get(c - 1, r).unwrap_or(border),
        below: grid.try_get(c, r + 1).unwrap_or(border),
        below_left: grid.try_get(c - 1, r + 1).unwrap_or(border),
        direction,
    }
}

/// Add one observation per cell of `grid` to `table`.
pub fn observe_grid(
    table: &mut ConditionalTable<LContext, u8>,
    grid: &TileGrid,
    border: u8,
    direction: Option<TravelDirection>,
) {
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            table.observe(l_context(grid, col, row, border, direction), grid.get(col, row));
        }
    }
}

/// Fill a `width` x `height` grid from the bottom-left corner, row by row
/// upward, each row left to right. Cells whose context was never observed
/// get `fallback`.
pub fn sample_grid<R: Rng + ?Sized>(
    table: &ConditionalTable<LContext, u8>,
    width: usize,
    height: usize,
    border: u8,
    direction: Option<TravelDirection>,
    fallback: u8,
    rng: &mut R,
) -> TileGrid {
    let mut grid = TileGrid::filled(width, height, fallback);
    for row in (0..height).rev() {
        for col in 0..width {
            let ctx = l_context(&grid, col, row, border, direction);
            let tile = table.sample(&ctx, rng).copied().unwrap_or(fallback);
            grid.set(col, row, tile);
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomModel {
    table: ConditionalTable<LContext, u8>,
    uses_direction: bool,
    chunk: ChunkSize,
    border: u8,
    empty: u8,
}

impl RoomModel {
    /// Train on `(room grid, travel direction)` pairs.
    pub fn train<'a, I>(
        rooms: I,
        use_direction: bool,
        chunk: ChunkSize,
        alphabet: &TileAlphabet,
    ) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (&'a TileGrid, TravelDirection)>,
    {
        let mut table = ConditionalTable::new();
        let mut any = false;
        for (grid, direction) in rooms {
            if grid.width() != chunk.width || grid.height() != chunk.height {
                return Err(ChainError::RoomSize {
                    width: chunk.width,
                    height: chunk.height,
                    found_width: grid.width(),
                    found_height: grid.height(),
                });
            }
            let d = use_direction.then_some(direction);
            observe_grid(&mut table, grid, alphabet.border_symbol(), d);
            any = true;
        }
        if !any {
            return Err(ChainError::EmptyTraining);
        }
        Ok(Self {
            table,
            uses_direction: use_direction,
            chunk,
            border: alphabet.border_symbol(),
            empty: alphabet.empty_symbol(),
        })
    }

    pub fn table(&self) -> &ConditionalTable<LContext, u8> {
        &self.table
    }

    pub fn uses_direction(&self) -> bool {
        self.uses_direction
    }

    pub fn chunk(&self) -> ChunkSize {
        self.chunk
    }

    /// Synthesize one room. `direction` is ignored by direction-free models.
    pub fn generate<R: Rng + ?Sized>(&self, direction: TravelDirection, rng: &mut R) -> TileGrid {
        sample_grid(
            &self.table,
            self.chunk.width,
            self.chunk.height,
            self.border,
            self.uses_direction.then_some(direction),
            self.empty,
            rng,
        )
    }

    pub fn export(&self, chain: &str) -> CpdExport {
        self.table.export(chain, &CONTEXT_FIELDS)
    }

    pub fn from_export(
        export: &CpdExport,
        uses_direction: bool,
        chunk: ChunkSize,
        alphabet: &TileAlphabet,
    ) -> Result<Self, CpdImportError> {
        Ok(Self {
            table: ConditionalTable::from_export(export)?,
            uses_direction,
            chunk,
            border: alphabet.border_symbol(),
            empty: alphabet.empty_symbol(),
        })
    }
}

/// One direction-aware room model per playable room type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomEnsemble {
    pub horizontal: RoomModel,
    pub vertical: RoomModel,
}

impl RoomEnsemble {
    pub fn train<'a, I>(rooms: I, chunk: ChunkSize, alphabet: &TileAlphabet) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (&'a TileGrid, RoomType, TravelDirection)>,
    {
        let (mut h, mut v) = (Vec::new(), Vec::new());
        for (grid, room_type, dir) in rooms {
            match room_type {
                RoomType::Horizontal => h.push((grid, dir)),
                RoomType::Vertical => v.push((grid, dir)),
                RoomType::Null => {}
            }
        }
        Ok(Self {
            horizontal: RoomModel::train(h, true, chunk, alphabet)?,
            vertical: RoomModel::train(v, true, chunk, alphabet)?,
        })
    }

    pub fn model_for(&self, room_type: RoomType) -> &RoomModel {
        match room_type {
            RoomType::Vertical => &self.vertical,
            _ => &self.horizontal,
        }
    }
}

/// Squared-difference comparison of two CPDs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CpdDifference {
    pub total: f64,
    pub mean: f64,
    pub entries: usize,
}

impl CpdDifference {
    /// Pool two comparisons: totals and entry counts add, the mean is recomputed.
    pub fn combine(self, other: CpdDifference) -> CpdDifference {
        let total = self.total + other.total;
        let entries = self.entries + other.entries;
        CpdDifference {
            total,
            mean: if entries == 0 { 0.0 } else { total / entries as f64 },
            entries,
        }
    }
}

/// Sum of `(P_a - P_b)^2` over every context of the reference model `b`
/// and every outcome seen under that context in either model.
pub fn room_cpd_difference(a: &RoomModel, b: &RoomModel) -> Result<CpdDifference, ChainError> {
    if a.uses_direction != b.uses_direction {
        return Err(ChainError::IncompatibleModels);
    }
    table_difference(&a.table, &b.table)
}

pub fn table_difference(
    a: &ConditionalTable<LContext, u8>,
    b: &ConditionalTable<LContext, u8>,
) -> Result<CpdDifference, ChainError> {
    if b.is_empty() {
        return Err(ChainError::NoSharedStructure);
    }
    let mut total = 0.0;
    let mut entries = 0usize;
    for ctx in b.contexts() {
        let mut outcomes: Vec<u8> = b.outcomes(ctx).map(|(o, _)| *o).collect();
        outcomes.extend(a.outcomes(ctx).map(|(o, _)| *o));
        outcomes.sort_unstable();
        outcomes.dedup();
        for o in outcomes {
            let d = a.probability(ctx, &o) - b.probability(ctx, &o);
            total += d * d;
            entries += 1;
        }
    }
    Ok(CpdDifference {
        total,
        mean: total / entries as f64,
        entries,
    })
}
