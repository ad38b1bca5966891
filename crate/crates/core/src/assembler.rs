//! Turning room-type sequences into levels.
//!
//! A sequence is first laid out on a coordinate plane (x to the right, y
//! up, first room at the origin), then each room is synthesized in path
//! order. Whenever a fresh room's seam with its predecessor is closed the
//! room is regenerated, up to a per-level resampling cap.

use std::collections::HashSet;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::alphabet::TileAlphabet;
use crate::corpus::{RoomCoord, RoomType, TravelDirection};
use crate::grid::{ChunkSize, TileGrid};
use crate::room_model::{RoomEnsemble, RoomModel};
use crate::seeds;

/// Resampling cap used when none is configured.
pub const DEFAULT_RESAMPLE_CAP: u32 = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaneCoord {
    pub x: i32,
    pub y: i32,
}

impl PlaneCoord {
    pub const ORIGIN: PlaneCoord = PlaneCoord { x: 0, y: 0 };

    pub fn step(self, direction: TravelDirection) -> PlaneCoord {
        match direction {
            TravelDirection::Up => PlaneCoord { x: self.x, y: self.y + 1 },
            TravelDirection::Down => PlaneCoord { x: self.x, y: self.y - 1 },
            TravelDirection::Right => PlaneCoord { x: self.x + 1, y: self.y },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub coord: PlaneCoord,
    pub room_type: RoomType,
    /// Toward the next placement; `Right` for the last one.
    pub direction: TravelDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLayout {
    pub placements: Vec<Placement>,
}

/// Inclusive bounds of the occupied plane cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: PlaneCoord,
    pub max: PlaneCoord,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        (self.max.x - self.min.x + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.max.y - self.min.y + 1) as usize
    }

    /// Room-grid coordinate (row 0 on top) of a plane coordinate.
    pub fn to_room(&self, p: PlaneCoord) -> RoomCoord {
        RoomCoord::new((p.x - self.min.x) as usize, (self.max.y - p.y) as usize)
    }
}

impl LevelLayout {
    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let xs = self.placements.iter().map(|p| p.coord.x);
        let ys = self.placements.iter().map(|p| p.coord.y);
        BoundingBox {
            min: PlaneCoord {
                x: xs.clone().min().unwrap_or(0),
                y: ys.clone().min().unwrap_or(0),
            },
            max: PlaneCoord {
                x: xs.max().unwrap_or(0),
                y: ys.max().unwrap_or(0),
            },
        }
    }

    pub fn occupancy(&self) -> HashSet<PlaneCoord> {
        self.placements.iter().map(|p| p.coord).collect()
    }

    /// Check adjacency, uniqueness and direction consistency.
    pub fn is_consistent(&self) -> bool {
        let unique = self.occupancy().len() == self.placements.len();
        let linked = self.placements.windows(2).all(|w| w[0].coord.step(w[0].direction) == w[1].coord);
        let last_right = self
            .placements
            .last()
            .is_none_or(|p| p.direction == TravelDirection::Right);
        unique && linked && last_right
    }
}

/// A sequence whose layout ran out of free cells for the next room.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfCollision {
    /// Rooms placed before the collision.
    pub partial: LevelLayout,
    pub failed_index: usize,
}

/// Candidate directions from the previous room for a new room of `room_type`.
pub fn placement_candidates(room_type: RoomType) -> &'static [TravelDirection] {
    match room_type {
        RoomType::Vertical => &TravelDirection::ALL,
        _ => &[TravelDirection::Right],
    }
}

/// Lay `types` out on the plane, choosing among free candidate cells with `choose`.
///
/// `choose` receives the free candidate directions (never empty) and returns
/// an index into them.
pub fn plan_layout_with<F>(types: &[RoomType], mut choose: F) -> Result<LevelLayout, SelfCollision>
where
    F: FnMut(&[TravelDirection]) -> usize,
{
    assert!(!types.is_empty(), "layout needs at least one room");
    let mut placements = vec![Placement {
        coord: PlaneCoord::ORIGIN,
        room_type: types[0],
        direction: TravelDirection::Right,
    }];
    let mut occupied: HashSet<PlaneCoord> = HashSet::from([PlaneCoord::ORIGIN]);
    for (i, &room_type) in types.iter().enumerate().skip(1) {
        let prev = placements[i - 1].coord;
        let free: Vec<TravelDirection> = placement_candidates(room_type)
            .iter()
            .copied()
            .filter(|&d| !occupied.contains(&prev.step(d)))
            .collect();
        if free.is_empty() {
            return Err(SelfCollision {
                partial: LevelLayout { placements },
                failed_index: i,
            });
        }
        let direction = free[choose(&free)];
        let coord = prev.step(direction);
        placements[i - 1].direction = direction;
        occupied.insert(coord);
        placements.push(Placement {
            coord,
            room_type,
            direction: TravelDirection::Right,
        });
    }
    Ok(LevelLayout { placements })
}

/// [`plan_layout_with`] choosing uniformly at random.
pub fn plan_layout<R: Rng + ?Sized>(types: &[RoomType], rng: &mut R) -> Result<LevelLayout, SelfCollision> {
    plan_layout_with(types, |free| rng.gen_range(0..free.len()))
}

/// Side of room `a` on which room `b` sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Adjacency {
    Right,
    Left,
    Up,
    Down,
}

impl From<TravelDirection> for Adjacency {
    fn from(d: TravelDirection) -> Self {
        match d {
            TravelDirection::Up => Adjacency::Up,
            TravelDirection::Down => Adjacency::Down,
            TravelDirection::Right => Adjacency::Right,
        }
    }
}

/// Whether the player can cross from room `a` into the neighbouring room `b`.
///
/// Side-by-side rooms need a two-tile-tall opening at the same rows on both
/// sides of the seam; stacked rooms need one open column shared by the
/// touching rows. Open means passable or climbable.
pub fn seam_open(a: &TileGrid, b: &TileGrid, relation: Adjacency, alphabet: &TileAlphabet) -> bool {
    match relation {
        Adjacency::Left => seam_open(b, a, Adjacency::Right, alphabet),
        Adjacency::Right => {
            let (ac, bc) = (a.width() - 1, 0);
            let open = |r: usize| alphabet.is_open(a.get(ac, r)) && alphabet.is_open(b.get(bc, r));
            let rows = a.height().min(b.height());
            (0..rows.saturating_sub(1)).any(|r| open(r) && open(r + 1))
        }
        Adjacency::Up => {
            let (ar, br) = (0, b.height() - 1);
            (0..a.width().min(b.width()))
                .any(|c| alphabet.is_open(a.get(c, ar)) && alphabet.is_open(b.get(c, br)))
        }
        Adjacency::Down => seam_open(b, a, Adjacency::Up, alphabet),
    }
}

/// Anything that can synthesize a room interior.
pub trait RoomSource {
    fn chunk(&self) -> ChunkSize;
    fn generate_room(&self, room_type: RoomType, direction: TravelDirection, rng: &mut dyn RngCore) -> TileGrid;
}

impl RoomSource for RoomModel {
    fn chunk(&self) -> ChunkSize {
        RoomModel::chunk(self)
    }

    fn generate_room(&self, _room_type: RoomType, direction: TravelDirection, rng: &mut dyn RngCore) -> TileGrid {
        self.generate(direction, rng)
    }
}

impl RoomSource for RoomEnsemble {
    fn chunk(&self) -> ChunkSize {
        self.horizontal.chunk()
    }

    fn generate_room(&self, room_type: RoomType, direction: TravelDirection, rng: &mut dyn RngCore) -> TileGrid {
        self.model_for(room_type).generate(direction, rng)
    }
}

/// One room to be synthesized during assembly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedRoom {
    pub coord: RoomCoord,
    pub room_type: RoomType,
    /// Direction handed to the room model.
    pub direction: TravelDirection,
    /// Earlier room whose seam this room must open onto, and where this room
    /// lies relative to it. `None` for the start room, or for a room that no
    /// earlier room reaches (its seam can never open).
    pub parent: Option<(usize, Adjacency)>,
}

/// Rooms in generation order on a `cols` x `rows` room grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyPlan {
    pub cols: usize,
    pub rows: usize,
    pub rooms: Vec<PlannedRoom>,
    pub start: Option<RoomCoord>,
    pub goals: Vec<RoomCoord>,
}

impl AssemblyPlan {
    /// Plan for a path layout. Horizontal rooms are always generated with
    /// direction Right, vertical rooms with their layout direction.
    pub fn from_layout(layout: &LevelLayout) -> Self {
        let bbox = layout.bounding_box();
        let rooms = layout
            .placements
            .iter()
            .enumerate()
            .map(|(i, p)| PlannedRoom {
                coord: bbox.to_room(p.coord),
                room_type: p.room_type,
                direction: match p.room_type {
                    RoomType::Vertical => p.direction,
                    _ => TravelDirection::Right,
                },
                parent: (i > 0).then(|| (i - 1, layout.placements[i - 1].direction.into())),
            })
            .collect::<Vec<_>>();
        Self {
            cols: bbox.width(),
            rows: bbox.height(),
            start: rooms.first().map(|r| r.coord),
            goals: rooms.last().map(|r| r.coord).into_iter().collect(),
            rooms,
        }
    }

    /// Playable/null labels of the room grid, `grid[row][col]`.
    pub fn occupancy(&self) -> Vec<Vec<bool>> {
        let mut grid = vec![vec![false; self.cols]; self.rows];
        for r in &self.rooms {
            grid[r.coord.row][r.coord.col] = true;
        }
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedLevel {
    pub plan: AssemblyPlan,
    /// Present for levels built from a room sequence.
    pub layout: Option<LevelLayout>,
    pub grid: TileGrid,
    pub chunk: ChunkSize,
    pub resample_count: u32,
    /// Some seam was still closed when the resampling cap ran out.
    pub cap_exhausted: bool,
    /// The type sequence could not be laid out in full.
    pub self_collision: bool,
    pub seed: u64,
}

impl GeneratedLevel {
    pub fn room_grid(&self, coord: RoomCoord) -> TileGrid {
        self.grid.window(
            coord.col * self.chunk.width,
            coord.row * self.chunk.height,
            self.chunk.width,
            self.chunk.height,
        )
    }
}

/// Synthesize every planned room, resampling closed seams.
///
/// Room `i` draws from its own stream of `seed`; resamples continue that
/// stream. Rooms that already passed their seam check are never touched
/// again. The cap bounds the total number of resamples for the level.
pub fn assemble(
    plan: AssemblyPlan,
    source: &dyn RoomSource,
    seed: u64,
    resample_cap: u32,
    alphabet: &TileAlphabet,
) -> GeneratedLevel {
    let chunk = source.chunk();
    let mut grid = TileGrid::filled(
        (plan.cols * chunk.width).max(chunk.width),
        (plan.rows * chunk.height).max(chunk.height),
        alphabet.null_symbol(),
    );
    let mut rooms: Vec<TileGrid> = Vec::with_capacity(plan.rooms.len());
    let mut resample_count = 0;
    let mut cap_exhausted = false;
    for (i, planned) in plan.rooms.iter().enumerate() {
        let mut rng = seeds::room_stream(seed, i);
        let mut room = source.generate_room(planned.room_type, planned.direction, &mut rng);
        if i > 0 {
            loop {
                let open = planned
                    .parent
                    .is_some_and(|(p, rel)| seam_open(&rooms[p], &room, rel, alphabet));
                if open {
                    break;
                }
                if resample_count >= resample_cap {
                    cap_exhausted = true;
                    break;
                }
                room = source.generate_room(planned.room_type, planned.direction, &mut rng);
                resample_count += 1;
            }
        }
        grid.blit(planned.coord.col * chunk.width, planned.coord.row * chunk.height, &room);
        rooms.push(room);
    }
    GeneratedLevel {
        plan,
        layout: None,
        grid,
        chunk,
        resample_count,
        cap_exhausted,
        self_collision: false,
        seed,
    }
}

/// Lay out and assemble a room-type sequence.
pub fn build_level(
    types: &[RoomType],
    source: &dyn RoomSource,
    seed: u64,
    resample_cap: u32,
    alphabet: &TileAlphabet,
) -> GeneratedLevel {
    let mut layout_rng = seeds::stream(seed, seeds::LAYOUT_STREAM);
    let (layout, collided) = match plan_layout(types, &mut layout_rng) {
        Ok(layout) => (layout, false),
        Err(collision) => (collision.partial, true),
    };
    let plan = AssemblyPlan::from_layout(&layout);
    let mut level = assemble(plan, source, seed, resample_cap, alphabet);
    level.layout = Some(layout);
    level.self_collision = collided;
    level
}

/// Serialized companion of a generated level file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub seed: u64,
    pub resample_count: u32,
    pub cap_exhausted: bool,
    pub self_collision: bool,
    pub chunk: ChunkSize,
    pub room_cols: usize,
    pub room_rows: usize,
    pub sequence: Option<String>,
    pub placements: Vec<LayoutEntry>,
    pub start: Option<RoomCoord>,
    pub goals: Vec<RoomCoord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutEntry {
    /// Plane coordinate, present for sequence layouts.
    pub plane: Option<PlaneCoord>,
    pub room: RoomCoord,
    pub room_type: RoomType,
    pub direction: Option<TravelDirection>,
}

impl LayoutFile {
    pub fn from_level(level: &GeneratedLevel) -> Self {
        let placements = match &level.layout {
            Some(layout) => layout
                .placements
                .iter()
                .zip(&level.plan.rooms)
                .map(|(p, r)| LayoutEntry {
                    plane: Some(p.coord),
                    room: r.coord,
                    room_type: p.room_type,
                    direction: Some(p.direction),
                })
                .collect(),
            None => level
                .plan
                .rooms
                .iter()
                .map(|r| LayoutEntry {
                    plane: None,
                    room: r.coord,
                    room_type: r.room_type,
                    direction: None,
                })
                .collect(),
        };
        Self {
            seed: level.seed,
            resample_count: level.resample_count,
            cap_exhausted: level.cap_exhausted,
            self_collision: level.self_collision,
            chunk: level.chunk,
            room_cols: level.plan.cols,
            room_rows: level.plan.rows,
            sequence: level.layout.as_ref().map(|l| {
                l.placements.iter().map(|p| p.room_type.letter()).collect()
            }),
            placements,
            start: level.plan.start,
            goals: level.plan.goals.clone(),
        }
    }
}
