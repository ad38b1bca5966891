//! Grid-level baseline: an L-shaped chain over room-type labels decides the
//! whole room grid (including null rooms), and a single direction-free room
//! model fills the playable rooms.

use std::collections::VecDeque;

use rand::Rng;

use crate::alphabet::TileAlphabet;
use crate::assembler::{Adjacency, AssemblyPlan, PlannedRoom};
use crate::corpus::{AnnotatedLevel, RoomCoord, RoomType, TravelDirection};
use crate::error::ChainError;
use crate::grid::{ChunkSize, TileGrid};
use crate::room_model::{l_context, observe_grid, sample_grid, LContext, RoomModel};
use crate::table::{ConditionalTable, CpdExport, CpdImportError};

/// Border label for the room-type grid chain.
pub const LABEL_BORDER: u8 = b'~';

/// Attempts at hitting the requested playable-room count.
pub const LAYOUT_ATTEMPTS: usize = 70;

fn label_type(b: u8) -> RoomType {
    RoomType::from_letter(b as char).unwrap_or(RoomType::Null)
}

/// Room-type labels of a level as a grid of `H`/`V`/`N` bytes.
pub fn label_grid(level: &AnnotatedLevel) -> TileGrid {
    let rows: Vec<String> = level
        .label_grid()
        .iter()
        .map(|row| row.iter().map(|t| t.letter()).collect())
        .collect();
    TileGrid::from_rows(&rows).expect("room grid is rectangular and non-empty")
}

pub fn playable_count(labels: &TileGrid) -> usize {
    labels.cells().iter().filter(|&&b| label_type(b).is_playable()).count()
}

fn median(mut values: Vec<usize>) -> usize {
    values.sort_unstable();
    values[(values.len() - 1) / 2]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchicalBaseline {
    layout: ConditionalTable<LContext, u8>,
    rooms: RoomModel,
    cols: usize,
    rows: usize,
}

impl HierarchicalBaseline {
    pub fn train(levels: &[&AnnotatedLevel], chunk: ChunkSize, alphabet: &TileAlphabet) -> Result<Self, ChainError> {
        if levels.is_empty() {
            return Err(ChainError::EmptyTraining);
        }
        let mut layout = ConditionalTable::new();
        for level in levels {
            observe_grid(&mut layout, &label_grid(level), LABEL_BORDER, None);
        }
        let rooms = RoomModel::train(
            levels.iter().flat_map(|l| {
                l.sequence
                    .rooms
                    .iter()
                    .map(|(_, r)| (&r.grid, r.direction.unwrap_or(TravelDirection::Right)))
            }),
            false,
            chunk,
            alphabet,
        )?;
        Ok(Self {
            layout,
            rooms,
            cols: median(levels.iter().map(|l| l.room_cols()).collect()),
            rows: median(levels.iter().map(|l| l.room_rows()).collect()),
        })
    }

    pub fn from_parts(
        layout: ConditionalTable<LContext, u8>,
        rooms: RoomModel,
        cols: usize,
        rows: usize,
    ) -> Self {
        Self {
            layout,
            rooms,
            cols,
            rows,
        }
    }

    pub fn layout_table(&self) -> &ConditionalTable<LContext, u8> {
        &self.layout
    }

    pub fn room_model(&self) -> &RoomModel {
        &self.rooms
    }

    pub fn grid_dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    pub fn export_layout(&self) -> CpdExport {
        self.layout.export("room-type-grid", &crate::room_model::CONTEXT_FIELDS)
    }

    pub fn layout_from_export(export: &CpdExport) -> Result<ConditionalTable<LContext, u8>, CpdImportError> {
        ConditionalTable::from_export(export)
    }

    /// Sample label grids until one has exactly `target` playable rooms, or
    /// return the closest of [`LAYOUT_ATTEMPTS`] tries. The flag reports
    /// whether the target was met.
    pub fn generate_labels<R: Rng + ?Sized>(&self, target: usize, rng: &mut R) -> (TileGrid, bool) {
        let mut best: Option<(usize, TileGrid)> = None;
        for _ in 0..LAYOUT_ATTEMPTS {
            let labels = sample_grid(&self.layout, self.cols, self.rows, LABEL_BORDER, None, b'N', rng);
            let miss = playable_count(&labels).abs_diff(target);
            if miss == 0 {
                return (labels, true);
            }
            if best.as_ref().is_none_or(|(m, _)| miss < *m) {
                best = Some((miss, labels));
            }
        }
        (best.expect("at least one attempt").1, false)
    }

    /// Probability that the label chain generates exactly `labels`.
    pub fn grid_probability(&self, labels: &TileGrid) -> f64 {
        let mut p = 1.0;
        for row in (0..labels.height()).rev() {
            for col in 0..labels.width() {
                let ctx = l_context(labels, col, row, LABEL_BORDER, None);
                p *= self.layout.probability(&ctx, &labels.get(col, row));
            }
        }
        p
    }
}

/// Leftmost and rightmost occupied columns' playable rooms.
pub fn edge_rooms(labels: &TileGrid) -> (Vec<RoomCoord>, Vec<RoomCoord>) {
    let occupied = |c: usize| {
        (0..labels.height())
            .filter(|&r| label_type(labels.get(c, r)).is_playable())
            .map(move |r| RoomCoord::new(c, r))
            .collect::<Vec<_>>()
    };
    let cols: Vec<usize> = (0..labels.width()).filter(|&c| !occupied(c).is_empty()).collect();
    match (cols.first(), cols.last()) {
        (Some(&l), Some(&r)) => (occupied(l), occupied(r)),
        _ => (Vec::new(), Vec::new()),
    }
}

/// Generation order for a label grid: breadth-first from the lowest leftmost
/// room, then any rooms that search never reached (with no parent).
pub fn plan_from_labels(labels: &TileGrid) -> AssemblyPlan {
    let (cols, rows) = (labels.width(), labels.height());
    let playable = |c: usize, r: usize| label_type(labels.get(c, r)).is_playable();
    let (starts, goals) = edge_rooms(labels);
    let start = starts.iter().max_by_key(|c| c.row).copied();

    let mut index = vec![vec![None::<usize>; cols]; rows];
    let mut planned: Vec<PlannedRoom> = Vec::new();
    let mut push = |coord: RoomCoord, parent, index: &mut Vec<Vec<Option<usize>>>| {
        index[coord.row][coord.col] = Some(planned.len());
        planned.push(PlannedRoom {
            coord,
            room_type: label_type(labels.get(coord.col, coord.row)),
            direction: TravelDirection::Right,
            parent,
        });
    };

    if let Some(start) = start {
        let mut queue = VecDeque::from([start]);
        push(start, None, &mut index);
        while let Some(cur) = queue.pop_front() {
            let me = index[cur.row][cur.col].expect("queued rooms are indexed");
            let neighbours = [
                (cur.col + 1 < cols).then(|| (RoomCoord::new(cur.col + 1, cur.row), Adjacency::Right)),
                (cur.row > 0).then(|| (RoomCoord::new(cur.col, cur.row - 1), Adjacency::Up)),
                (cur.row + 1 < rows).then(|| (RoomCoord::new(cur.col, cur.row + 1), Adjacency::Down)),
                (cur.col > 0).then(|| (RoomCoord::new(cur.col - 1, cur.row), Adjacency::Left)),
            ];
            for (next, rel) in neighbours.into_iter().flatten() {
                if playable(next.col, next.row) && index[next.row][next.col].is_none() {
                    push(next, Some((me, rel)), &mut index);
                    queue.push_back(next);
                }
            }
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            if playable(c, r) && index[r][c].is_none() {
                push(RoomCoord::new(c, r), None, &mut index);
            }
        }
    }
    AssemblyPlan {
        cols,
        rows,
        rooms: planned,
        start,
        goals,
    }
}
