//! Brute-force reference implementations shared by the oracle suites.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use mmlevel::agent::{JumpModel, Support};
use mmlevel::{TileAlphabet, TileGrid};
use rand::Rng;

/// Recount `(count, total)` for one context/outcome pair from raw observations.
pub fn recount(observations: &[(u8, u8, u64)], ctx: u8, outcome: u8) -> (u64, u64) {
    let mut count = 0;
    let mut total = 0;
    for &(c, o, n) in observations {
        if c == ctx {
            total += n;
            if o == outcome {
                count += n;
            }
        }
    }
    (count, total)
}

/// Agent state as the oracle sees it: column, feet row, support.
pub type State = (usize, usize, Support);

/// Straight transcription of the movement rules, evaluated per call from
/// the tile classes.
pub struct Oracle<'a> {
    pub grid: &'a TileGrid,
    pub alphabet: &'a TileAlphabet,
    pub jump: JumpModel,
}

impl Oracle<'_> {
    fn open(&self, c: usize, r: usize) -> bool {
        self.alphabet.is_passable(self.grid.get(c, r)) || self.alphabet.is_climbable(self.grid.get(c, r))
    }

    pub fn fits(&self, c: isize, r: isize) -> bool {
        c >= 0
            && r >= 1
            && (c as usize) < self.grid.width()
            && (r as usize) < self.grid.height()
            && self.open(c as usize, r as usize)
            && self.open(c as usize, r as usize - 1)
    }

    fn ladder(&self, c: usize, r: usize) -> bool {
        r < self.grid.height() && self.alphabet.is_climbable(self.grid.get(c, r))
    }

    fn solid(&self, c: usize, r: usize) -> bool {
        r < self.grid.height() && self.alphabet.is_solid(self.grid.get(c, r))
    }

    fn standable(&self, c: usize, r: usize) -> bool {
        self.solid(c, r + 1) || self.ladder(c, r + 1)
    }

    fn land(&self, c: usize, r: usize) -> Support {
        if self.ladder(c, r) {
            Support::OnLadder
        } else if self.standable(c, r) {
            Support::Grounded
        } else {
            Support::Airborne {
                rise: 0,
                horizontal: self.jump.max_horizontal,
            }
        }
    }

    fn land_air(&self, c: usize, r: usize, rise: u8, horizontal: u8, rising: bool) -> Support {
        if self.ladder(c, r) {
            Support::OnLadder
        } else if !rising && self.standable(c, r) {
            Support::Grounded
        } else {
            Support::Airborne { rise, horizontal }
        }
    }

    pub fn moves(&self, (c, r, support): State) -> Vec<State> {
        let (ci, ri) = (c as isize, r as isize);
        let mut out = Vec::new();
        let sideways = |out: &mut Vec<State>| {
            for nc in [ci - 1, ci + 1] {
                if self.fits(nc, ri) {
                    out.push((nc as usize, r, self.land(nc as usize, r)));
                }
            }
        };
        let jump = |out: &mut Vec<State>| {
            if self.fits(ci, ri - 1) {
                let s = self.land_air(c, r - 1, self.jump.max_rise - 1, self.jump.max_horizontal, true);
                out.push((c, r - 1, s));
            }
        };
        match support {
            Support::Grounded => {
                sideways(&mut out);
                jump(&mut out);
                if self.ladder(c, r + 1) && self.fits(ci, ri + 1) {
                    out.push((c, r + 1, Support::OnLadder));
                }
            }
            Support::OnLadder => {
                for nr in [ri - 1, ri + 1] {
                    if self.fits(ci, nr) {
                        out.push((c, nr as usize, self.land(c, nr as usize)));
                    }
                }
                sideways(&mut out);
                jump(&mut out);
            }
            Support::Airborne { rise, horizontal } => {
                if rise > 0 && self.fits(ci, ri - 1) {
                    out.push((c, r - 1, self.land_air(c, r - 1, rise - 1, horizontal, true)));
                }
                if horizontal > 0 {
                    for nc in [ci - 1, ci + 1] {
                        if self.fits(nc, ri) {
                            let s = self.land_air(nc as usize, r, rise, horizontal - 1, false);
                            out.push((nc as usize, r, s));
                        }
                    }
                }
                if self.fits(ci, ri + 1) {
                    out.push((c, r + 1, self.land_air(c, r + 1, 0, horizontal, false)));
                }
            }
        }
        out
    }

    /// Lowest standing spot with solid ground in the leftmost column of the
    /// column range that has one.
    pub fn start(&self, cols: std::ops::Range<usize>) -> Option<State> {
        cols.into_iter().find_map(|c| {
            (0..self.grid.height())
                .rev()
                .find(|&r| self.fits(c as isize, r as isize) && self.solid(c, r + 1))
                .map(|r| (c, r, Support::Grounded))
        })
    }

    /// BFS distance (in moves) from `start` to any state whose column is in
    /// `goal_cols`.
    pub fn distance(&self, start: State, goal_cols: std::ops::Range<usize>) -> Option<usize> {
        let mut dist: HashMap<State, usize> = HashMap::from([(start, 0)]);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            let d = dist[&s];
            if goal_cols.contains(&s.0) {
                return Some(d);
            }
            for n in self.moves(s) {
                if !dist.contains_key(&n) {
                    dist.insert(n, d + 1);
                    queue.push_back(n);
                }
            }
        }
        None
    }
}

/// Random room with floor-ish structure: solid tiles get likelier lower down,
/// with ladders and hazards sprinkled in.
pub fn random_room<R: Rng>(rng: &mut R, width: usize, height: usize) -> TileGrid {
    let mut g = TileGrid::filled(width, height, b'-');
    let ladder_col = rng.gen_range(0..width);
    let (ladder_top, ladder_bottom) = {
        let a = rng.gen_range(0..height);
        let b = rng.gen_range(0..height);
        (a.min(b), a.max(b))
    };
    for r in 0..height {
        let solid_p = 0.08 + 0.3 * r as f64 / height as f64;
        for c in 0..width {
            let x: f64 = rng.gen();
            let tile = if x < solid_p {
                b'#'
            } else if x < solid_p + 0.03 {
                b'H'
            } else if x < solid_p + 0.06 {
                b'l'
            } else {
                b'-'
            };
            g.set(c, r, tile);
        }
    }
    for r in ladder_top..=ladder_bottom {
        g.set(ladder_col, r, b'l');
    }
    let floor = rng.gen_range(height / 2..height);
    for c in 0..width {
        if rng.gen_bool(0.8) {
            g.set(c, floor, b'#');
        }
    }
    g
}

/// Exhaustive simple-path search over occupied rooms: true when some path
/// of distinct 4-adjacent occupied cells joins a start to a goal.
pub fn any_simple_path(occupied: &[Vec<bool>], starts: &[(usize, usize)], goals: &[(usize, usize)]) -> bool {
    fn walk(
        occupied: &[Vec<bool>],
        at: (usize, usize),
        goals: &[(usize, usize)],
        on_path: &mut Vec<Vec<bool>>,
    ) -> bool {
        if goals.contains(&at) {
            return true;
        }
        let (c, r) = at;
        on_path[r][c] = true;
        let rows = occupied.len() as isize;
        let cols = occupied[0].len() as isize;
        for (dc, dr) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let (nc, nr) = (c as isize + dc, r as isize + dr);
            if nc < 0 || nr < 0 || nc >= cols || nr >= rows {
                continue;
            }
            let (nc, nr) = (nc as usize, nr as usize);
            if occupied[nr][nc] && !on_path[nr][nc] && walk(occupied, (nc, nr), goals, on_path) {
                on_path[r][c] = false;
                return true;
            }
        }
        on_path[r][c] = false;
        false
    }
    let mut on_path = vec![vec![false; occupied[0].len()]; occupied.len()];
    starts
        .iter()
        .filter(|&&(c, r)| occupied[r][c])
        .any(|&s| walk(occupied, s, goals, &mut on_path))
}

/// Leftmost and rightmost occupied columns' cells, found by scanning.
pub fn edge_cells(occupied: &[Vec<bool>]) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let cols = occupied[0].len();
    let column = |c: usize| -> Vec<(usize, usize)> {
        (0..occupied.len()).filter(|&r| occupied[r][c]).map(|r| (c, r)).collect()
    };
    let left = (0..cols).map(column).find(|v| !v.is_empty()).unwrap_or_default();
    let right = (0..cols).rev().map(column).find(|v| !v.is_empty()).unwrap_or_default();
    (left, right)
}

/// Outcome of an oracle comparison run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Tally {
    pub cases: usize,
    pub disagreements: usize,
    /// Cases where the property held positively (e.g. playable rooms).
    pub positives: usize,
}

/// Random observation lists checked against a brute-force recount.
pub fn counting_suite(lists: usize, seed: u64) -> Tally {
    use mmlevel::ConditionalTable;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..lists {
        let len = rng.gen_range(1..60);
        let obs: Vec<(u8, u8, u64)> = (0..len)
            .map(|_| (rng.gen_range(0..4), rng.gen_range(0..5), rng.gen_range(0..4)))
            .collect();
        let mut table: ConditionalTable<u8, u8> = ConditionalTable::new();
        for &(c, o, n) in &obs {
            table.observe_n(c, o, n);
        }
        tally.cases += 1;
        let mut ok = true;
        for c in 0..4 {
            for o in 0..5 {
                let (count, total) = recount(&obs, c, o);
                let expected = if total == 0 { 0.0 } else { count as f64 / total as f64 };
                ok &= table.ratio(&c, &o) == (count, total);
                ok &= (table.probability(&c, &o) - expected).abs() <= 1e-12;
            }
        }
        if !ok {
            tally.disagreements += 1;
        }
    }
    tally
}

/// Every null pattern on every grid up to 4x4, BFS against simple-path
/// enumeration, for both edge-to-edge and corner-to-corner objectives.
pub fn layout_suite() -> Tally {
    use mmlevel::metrics::{grid_layout_playable, rooms_connected};
    use mmlevel::RoomCoord;

    let mut tally = Tally::default();
    for rows in 1..=4usize {
        for cols in 1..=4usize {
            for mask in 0u32..(1 << (rows * cols)) {
                let occupied: Vec<Vec<bool>> = (0..rows)
                    .map(|r| (0..cols).map(|c| mask >> (r * cols + c) & 1 == 1).collect())
                    .collect();
                let text: Vec<String> = occupied
                    .iter()
                    .map(|row| row.iter().map(|&o| if o { 'V' } else { 'N' }).collect())
                    .collect();
                let labels = TileGrid::from_rows(&text).unwrap();

                let (left, right) = edge_cells(&occupied);
                let expected = any_simple_path(&occupied, &left, &right);
                let got = grid_layout_playable(&labels);
                tally.cases += 1;
                tally.positives += usize::from(expected);
                tally.disagreements += usize::from(expected != got);

                let corner = [(0, rows - 1)];
                let far = [(cols - 1, 0)];
                let expected = any_simple_path(&occupied, &corner, &far);
                let got = rooms_connected(
                    &occupied,
                    &[RoomCoord::new(0, rows - 1)],
                    &[RoomCoord::new(cols - 1, 0)],
                );
                tally.cases += 1;
                tally.disagreements += usize::from(expected != got);
            }
        }
    }
    tally
}

/// Random 16x15 rooms with random jump budgets: A* verdicts and path
/// lengths against BFS over the transcribed move rules. The left half is
/// the start room, the right half the goal room.
pub fn astar_suite(rooms: usize, seed: u64) -> Tally {
    use mmlevel::agent::{check_playable, AgentError, Objective};
    use mmlevel::{ChunkSize, RoomCoord};
    use rand::SeedableRng;

    let alphabet = TileAlphabet::mega_man();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let objective = Objective {
        chunk: ChunkSize::new(8, 15),
        start_room: RoomCoord::new(0, 0),
        goal_rooms: vec![RoomCoord::new(1, 0)],
    };
    for _ in 0..rooms {
        let grid = random_room(&mut rng, 16, 15);
        let jump = JumpModel {
            max_rise: rng.gen_range(1..6),
            max_horizontal: rng.gen_range(1..7),
        };
        let oracle = Oracle {
            grid: &grid,
            alphabet: &alphabet,
            jump,
        };
        let expected = oracle.start(0..8).and_then(|s| oracle.distance(s, 8..16));
        let agrees = match check_playable(&grid, &objective, jump, &alphabet) {
            Err(AgentError::NoStartTile) => oracle.start(0..8).is_none(),
            Err(_) => false,
            Ok(v) => {
                let path_ok = v.path.as_ref().is_none_or(|p| {
                    p.windows(2).all(|w| {
                        oracle
                            .moves((w[0].col, w[0].row, w[0].support))
                            .contains(&(w[1].col, w[1].row, w[1].support))
                    })
                });
                v.playable == expected.is_some() && v.path_length() == expected && path_ok
            }
        };
        tally.cases += 1;
        tally.positives += usize::from(expected.is_some());
        tally.disagreements += usize::from(!agrees);
    }
    tally
}
