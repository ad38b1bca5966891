//! Tile-scale A* playability check.
//!
//! The agent is one tile wide and two tiles tall; its position is the tile
//! holding its feet. It walks along solid ground or ladder tops, climbs
//! ladders, falls without limit and jumps with a budgeted rise and
//! horizontal reach. Every move shifts the agent by exactly one tile along
//! one axis at unit cost, so Manhattan distance to the goal region is a
//! consistent heuristic. Hazard and null tiles are never entered.
//!
//! Movable objects are not simulated, so a negative verdict is only a lower
//! bound on what a human player could complete.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{TileAlphabet, TileClass};
use crate::assembler::GeneratedLevel;
use crate::corpus::{AnnotatedLevel, RoomCoord};
use crate::grid::{ChunkSize, TileGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JumpModel {
    /// Highest a jump can lift the feet, in tiles.
    pub max_rise: u8,
    /// Horizontal tiles available per airborne phase.
    pub max_horizontal: u8,
}

impl Default for JumpModel {
    fn default() -> Self {
        Self {
            max_rise: 4,
            max_horizontal: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Support {
    Grounded,
    OnLadder,
    Airborne { rise: u8, horizontal: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentState {
    pub col: usize,
    pub row: usize,
    pub support: Support,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayabilityVerdict {
    pub playable: bool,
    pub path: Option<Vec<AgentState>>,
    pub nodes_expanded: usize,
}

impl PlayabilityVerdict {
    /// Number of moves on the found path.
    pub fn path_length(&self) -> Option<usize> {
        self.path.as_ref().map(|p| p.len() - 1)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgentError {
    #[error("jump model budgets must be at least 1")]
    InvalidJumpModel,
    #[error("first room has no standable tile with solid ground beneath")]
    NoStartTile,
    #[error("level has no start room")]
    NoStartRoom,
}

/// Where the agent starts and what counts as finishing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub chunk: ChunkSize,
    pub start_room: RoomCoord,
    pub goal_rooms: Vec<RoomCoord>,
}

impl Objective {
    pub fn for_annotated(level: &AnnotatedLevel) -> Option<Self> {
        let rooms = &level.sequence.rooms;
        Some(Self {
            chunk: level.chunk,
            start_room: rooms.first()?.0,
            goal_rooms: vec![rooms.last()?.0],
        })
    }

    pub fn for_generated(level: &GeneratedLevel) -> Option<Self> {
        Some(Self {
            chunk: level.chunk,
            start_room: level.plan.start?,
            goal_rooms: level.plan.goals.clone(),
        })
    }

    /// Whole grid as a single room: start on the left, finish anywhere in it.
    pub fn single_room(grid: &TileGrid) -> Self {
        Self {
            chunk: ChunkSize::new(grid.width(), grid.height()),
            start_room: RoomCoord::new(0, 0),
            goal_rooms: vec![RoomCoord::new(0, 0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rect {
    col0: usize,
    row0: usize,
    col1: usize,
    row1: usize,
}

impl Rect {
    fn of_room(room: RoomCoord, chunk: ChunkSize) -> Self {
        Self {
            col0: room.col * chunk.width,
            row0: room.row * chunk.height,
            col1: (room.col + 1) * chunk.width - 1,
            row1: (room.row + 1) * chunk.height - 1,
        }
    }

    fn contains(&self, col: usize, row: usize) -> bool {
        (self.col0..=self.col1).contains(&col) && (self.row0..=self.row1).contains(&row)
    }

    fn distance(&self, col: usize, row: usize) -> usize {
        let dx = if col < self.col0 {
            self.col0 - col
        } else {
            col.saturating_sub(self.col1)
        };
        let dy = if row < self.row0 {
            self.row0 - row
        } else {
            row.saturating_sub(self.row1)
        };
        dx + dy
    }
}

/// Per-tile movement classes of a level, plus the jump budgets.
pub struct MoveRules {
    width: usize,
    height: usize,
    open: Vec<bool>,
    solid: Vec<bool>,
    climbable: Vec<bool>,
    jump: JumpModel,
}

impl MoveRules {
    pub fn new(grid: &TileGrid, alphabet: &TileAlphabet, jump: JumpModel) -> Result<Self, AgentError> {
        if jump.max_rise == 0 || jump.max_horizontal == 0 {
            return Err(AgentError::InvalidJumpModel);
        }
        let class = |b: u8| alphabet.class_of(b);
        Ok(Self {
            width: grid.width(),
            height: grid.height(),
            open: grid
                .cells()
                .iter()
                .map(|&b| matches!(class(b), Some(TileClass::Passable | TileClass::Climbable)))
                .collect(),
            solid: grid.cells().iter().map(|&b| class(b) == Some(TileClass::Solid)).collect(),
            climbable: grid
                .cells()
                .iter()
                .map(|&b| class(b) == Some(TileClass::Climbable))
                .collect(),
            jump,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn jump(&self) -> JumpModel {
        self.jump
    }

    fn idx(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }

    fn is_open(&self, col: usize, row: usize) -> bool {
        self.open[self.idx(col, row)]
    }

    fn is_solid(&self, col: usize, row: usize) -> bool {
        self.solid[self.idx(col, row)]
    }

    fn is_climbable(&self, col: usize, row: usize) -> bool {
        self.climbable[self.idx(col, row)]
    }

    /// Both the feet tile and the head tile above it are enterable.
    pub fn fits(&self, col: isize, row: isize) -> bool {
        if col < 0 || row < 1 || col as usize >= self.width || row as usize >= self.height {
            return false;
        }
        let (c, r) = (col as usize, row as usize);
        self.is_open(c, r) && self.is_open(c, r - 1)
    }

    /// Something to stand on directly below the feet.
    pub fn supported(&self, col: usize, row: usize) -> bool {
        row + 1 < self.height && (self.is_solid(col, row + 1) || self.is_climbable(col, row + 1))
    }

    fn solid_below(&self, col: usize, row: usize) -> bool {
        row + 1 < self.height && self.is_solid(col, row + 1)
    }

    /// State after stepping onto (`col`, `row`) from the ground or a ladder.
    fn settle(&self, col: usize, row: usize) -> Support {
        if self.is_climbable(col, row) {
            Support::OnLadder
        } else if self.supported(col, row) {
            Support::Grounded
        } else {
            Support::Airborne {
                rise: 0,
                horizontal: self.jump.max_horizontal,
            }
        }
    }

    /// State after an airborne move onto (`col`, `row`).
    fn settle_air(&self, col: usize, row: usize, rise: u8, horizontal: u8, rising: bool) -> Support {
        if self.is_climbable(col, row) {
            Support::OnLadder
        } else if !rising && self.supported(col, row) {
            Support::Grounded
        } else {
            Support::Airborne { rise, horizontal }
        }
    }

    fn jump_from(&self, s: AgentState, out: &mut Vec<AgentState>) {
        let (c, r) = (s.col as isize, s.row as isize);
        if self.fits(c, r - 1) {
            out.push(AgentState {
                col: s.col,
                row: s.row - 1,
                support: self.settle_air(s.col, s.row - 1, self.jump.max_rise - 1, self.jump.max_horizontal, true),
            });
        }
    }

    fn step_sideways(&self, s: AgentState, out: &mut Vec<AgentState>) {
        for dc in [-1isize, 1] {
            let c = s.col as isize + dc;
            if self.fits(c, s.row as isize) {
                let c = c as usize;
                out.push(AgentState {
                    col: c,
                    row: s.row,
                    support: self.settle(c, s.row),
                });
            }
        }
    }

    /// Every state reachable from `s` in one move.
    pub fn successors(&self, s: AgentState, out: &mut Vec<AgentState>) {
        out.clear();
        let (c, r) = (s.col as isize, s.row as isize);
        match s.support {
            Support::Grounded => {
                self.step_sideways(s, out);
                self.jump_from(s, out);
                if s.row + 1 < self.height && self.is_climbable(s.col, s.row + 1) && self.fits(c, r + 1) {
                    out.push(AgentState {
                        col: s.col,
                        row: s.row + 1,
                        support: Support::OnLadder,
                    });
                }
            }
            Support::OnLadder => {
                for dr in [-1isize, 1] {
                    if self.fits(c, r + dr) {
                        let row = (r + dr) as usize;
                        out.push(AgentState {
                            col: s.col,
                            row,
                            support: self.settle(s.col, row),
                        });
                    }
                }
                self.step_sideways(s, out);
                self.jump_from(s, out);
            }
            Support::Airborne { rise, horizontal } => {
                if rise > 0 && self.fits(c, r - 1) {
                    let row = s.row - 1;
                    out.push(AgentState {
                        col: s.col,
                        row,
                        support: self.settle_air(s.col, row, rise - 1, horizontal, true),
                    });
                }
                if horizontal > 0 {
                    for dc in [-1isize, 1] {
                        if self.fits(c + dc, r) {
                            let col = (c + dc) as usize;
                            out.push(AgentState {
                                col,
                                row: s.row,
                                support: self.settle_air(col, s.row, rise, horizontal - 1, false),
                            });
                        }
                    }
                }
                if self.fits(c, r + 1) {
                    let row = s.row + 1;
                    out.push(AgentState {
                        col: s.col,
                        row,
                        support: self.settle_air(s.col, row, 0, horizontal, false),
                    });
                }
            }
        }
    }

    /// Number of distinct support values per tile.
    pub fn supports_per_tile(&self) -> usize {
        2 + (self.jump.max_rise as usize + 1) * (self.jump.max_horizontal as usize + 1)
    }

    /// Dense index of a state, in `0..width * height * supports_per_tile()`.
    pub fn state_index(&self, s: AgentState) -> usize {
        let support = match s.support {
            Support::Grounded => 0,
            Support::OnLadder => 1,
            Support::Airborne { rise, horizontal } => {
                2 + rise as usize * (self.jump.max_horizontal as usize + 1) + horizontal as usize
            }
        };
        self.idx(s.col, s.row) * self.supports_per_tile() + support
    }

    /// Start state: in the leftmost column of `room` that has one, the lowest
    /// tile the agent fits on with solid ground beneath.
    pub fn start_state(&self, room: RoomCoord, chunk: ChunkSize) -> Option<AgentState> {
        let rect = Rect::of_room(room, chunk);
        (rect.col0..=rect.col1.min(self.width - 1)).find_map(|col| {
            (rect.row0..=rect.row1.min(self.height - 1))
                .rev()
                .find(|&row| self.fits(col as isize, row as isize) && self.solid_below(col, row))
                .map(|row| AgentState {
                    col,
                    row,
                    support: Support::Grounded,
                })
        })
    }
}

/// Goal test and heuristic for a set of goal rooms.
pub struct GoalRegion {
    rects: Vec<Rect>,
}

impl GoalRegion {
    pub fn new(rooms: &[RoomCoord], chunk: ChunkSize) -> Self {
        Self {
            rects: rooms.iter().map(|&r| Rect::of_room(r, chunk)).collect(),
        }
    }

    pub fn contains(&self, s: &AgentState) -> bool {
        self.rects.iter().any(|r| r.contains(s.col, s.row))
    }

    pub fn distance(&self, s: &AgentState) -> usize {
        self.rects
            .iter()
            .map(|r| r.distance(s.col, s.row))
            .min()
            .unwrap_or(usize::MAX)
    }
}

/// A* search from the start state to any state whose feet are in a goal room.
pub fn check_playable(
    grid: &TileGrid,
    objective: &Objective,
    jump: JumpModel,
    alphabet: &TileAlphabet,
) -> Result<PlayabilityVerdict, AgentError> {
    let rules = MoveRules::new(grid, alphabet, jump)?;
    let start = rules
        .start_state(objective.start_room, objective.chunk)
        .ok_or(AgentError::NoStartTile)?;
    let goal = GoalRegion::new(&objective.goal_rooms, objective.chunk);
    Ok(search(&rules, start, &goal))
}

/// Like [`check_playable`] but a missing start tile counts as unplayable.
pub fn is_playable(grid: &TileGrid, objective: &Objective, jump: JumpModel, alphabet: &TileAlphabet) -> bool {
    check_playable(grid, objective, jump, alphabet).is_ok_and(|v| v.playable)
}

pub fn search(rules: &MoveRules, start: AgentState, goal: &GoalRegion) -> PlayabilityVerdict {
    const UNSEEN: u32 = u32::MAX;
    let n = rules.width * rules.height * rules.supports_per_tile();
    let mut best = vec![UNSEEN; n];
    let mut parent: Vec<u32> = vec![UNSEEN; n];
    let mut states: Vec<Option<AgentState>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut buf = Vec::with_capacity(8);
    let mut expanded = 0;

    let si = rules.state_index(start);
    best[si] = 0;
    states[si] = Some(start);
    // Ties on f prefer larger g (deeper nodes).
    heap.push(Reverse((goal.distance(&start), Reverse(0u32), si)));

    while let Some(Reverse((_, Reverse(g), idx))) = heap.pop() {
        if closed[idx] || g != best[idx] {
            continue;
        }
        closed[idx] = true;
        expanded += 1;
        let state = states[idx].expect("queued states are recorded");
        if goal.contains(&state) {
            let mut path = vec![state];
            let mut cur = idx;
            while parent[cur] != UNSEEN {
                cur = parent[cur] as usize;
                path.push(states[cur].expect("recorded"));
            }
            path.reverse();
            return PlayabilityVerdict {
                playable: true,
                path: Some(path),
                nodes_expanded: expanded,
            };
        }
        rules.successors(state, &mut buf);
        for &next in &buf {
            let ni = rules.state_index(next);
            let ng = g + 1;
            if !closed[ni] && ng < best[ni] {
                best[ni] = ng;
                parent[ni] = idx as u32;
                states[ni] = Some(next);
                heap.push(Reverse((ng as usize + goal.distance(&next), Reverse(ng), ni)));
            }
        }
    }
    PlayabilityVerdict {
        playable: false,
        path: None,
        nodes_expanded: expanded,
    }
}

/// Render a path as `col,row` lines.
pub fn format_path_dump(path: &[AgentState]) -> String {
    path.iter().map(|s| format!("{},{}\n", s.col, s.row)).collect()
}
