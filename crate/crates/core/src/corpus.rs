//! Level corpus: parsing, room segmentation and game-path annotation.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{AlphabetError, TileAlphabet};
use crate::grid::{pad_to_chunks, parse_level, segment, Axis, ChunkSize, TileGrid};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("level text is empty")]
    EmptyInput,
    #[error("row {line} has {found} tiles, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {line} contains non-ASCII characters")]
    NonAsciiRow { line: usize },
    #[error("level {axis} {size} is not divisible by chunk {axis} {chunk}")]
    NonDivisibleDimensions { axis: Axis, size: usize, chunk: usize },
    #[error("game path is empty")]
    EmptyPath,
    #[error("game path breaks between step {index} and {}", index + 1)]
    BrokenPath { index: usize },
    #[error("game path revisits room {0}")]
    RevisitedRoom(RoomCoord),
    #[error("room {coord} lies outside the {cols}x{rows} room grid")]
    OutOfBounds {
        coord: RoomCoord,
        cols: usize,
        rows: usize,
    },
    #[error("game path moves left at step {index}; rooms are only traversed rightward or vertically")]
    LeftwardStep { index: usize },
    #[error("malformed path sidecar line {line}: {text:?}")]
    BadSidecarLine { line: usize, text: String },
    #[error("unknown tile symbol {symbol:?} at column {col}, row {row}")]
    UnknownSymbol { symbol: char, col: usize, row: usize },
    #[error("level file {0} has no path sidecar")]
    MissingSidecar(String),
    #[error("no level files found in {0}")]
    EmptyCorpus(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("{file}: {source}")]
    InFile {
        file: String,
        source: Box<CorpusError>,
    },
}

impl CorpusError {
    fn in_file(self, file: &str) -> Self {
        CorpusError::InFile {
            file: file.to_string(),
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoomType {
    Horizontal,
    Vertical,
    Null,
}

impl RoomType {
    pub fn letter(self) -> char {
        match self {
            RoomType::Horizontal => 'H',
            RoomType::Vertical => 'V',
            RoomType::Null => 'N',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'H' => Some(RoomType::Horizontal),
            'V' => Some(RoomType::Vertical),
            'N' => Some(RoomType::Null),
            _ => None,
        }
    }

    pub fn is_playable(self) -> bool {
        self != RoomType::Null
    }
}

impl fmt::Display for RoomType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Direction from a room toward the next room on the game path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TravelDirection {
    Up,
    Down,
    Right,
}

impl TravelDirection {
    pub const ALL: [TravelDirection; 3] = [TravelDirection::Up, TravelDirection::Down, TravelDirection::Right];

    pub fn letter(self) -> char {
        match self {
            TravelDirection::Up => 'U',
            TravelDirection::Down => 'D',
            TravelDirection::Right => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'U' => Some(TravelDirection::Up),
            'D' => Some(TravelDirection::Down),
            'R' => Some(TravelDirection::Right),
            _ => None,
        }
    }
}

impl fmt::Display for TravelDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Position of a room in a level's room grid; row 0 is the top row of rooms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoomCoord {
    pub col: usize,
    pub row: usize,
}

impl RoomCoord {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }

    fn is_adjacent(self, other: RoomCoord) -> bool {
        self.col.abs_diff(other.col) + self.row.abs_diff(other.row) == 1
    }
}

impl fmt::Display for RoomCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Room {
    pub grid: TileGrid,
    pub room_type: RoomType,
    /// `None` exactly when the room is Null.
    pub direction: Option<TravelDirection>,
}

impl Room {
    pub fn null(chunk: ChunkSize, null_symbol: u8) -> Self {
        Self {
            grid: TileGrid::filled(chunk.width, chunk.height, null_symbol),
            room_type: RoomType::Null,
            direction: None,
        }
    }
}

/// The game path: typed rooms in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomSequence {
    pub rooms: Vec<(RoomCoord, Room)>,
}

impl RoomSequence {
    pub fn len(&self) -> usize {
        self.rooms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rooms.is_empty()
    }

    pub fn types(&self) -> Vec<RoomType> {
        self.rooms.iter().map(|(_, r)| r.room_type).collect()
    }

    pub fn coords(&self) -> Vec<RoomCoord> {
        self.rooms.iter().map(|(c, _)| *c).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedLevel {
    pub grid: TileGrid,
    /// `room_grid[row][col]`
    pub room_grid: Vec<Vec<Room>>,
    pub sequence: RoomSequence,
    pub chunk: ChunkSize,
}

impl AnnotatedLevel {
    pub fn room_cols(&self) -> usize {
        self.room_grid.first().map_or(0, Vec::len)
    }

    pub fn room_rows(&self) -> usize {
        self.room_grid.len()
    }

    /// Room-type labels, `labels[row][col]`.
    pub fn label_grid(&self) -> Vec<Vec<RoomType>> {
        self.room_grid
            .iter()
            .map(|row| row.iter().map(|r| r.room_type).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
    Above,
    Below,
}

/// Side of `from` on which `to` lies.
fn side_of(from: RoomCoord, to: RoomCoord) -> Side {
    if to.col > from.col {
        Side::Right
    } else if to.col < from.col {
        Side::Left
    } else if to.row < from.row {
        Side::Above
    } else {
        Side::Below
    }
}

/// Type every room of a segmented level from the ordered game path.
///
/// A room entered from the left and left through the right is Horizontal;
/// any vertical entrance or exit makes it Vertical. The first room is
/// entered from the left and the last room exits to the right. Chunks off
/// the path become Null rooms filled with `null_symbol`.
pub fn annotate(
    chunks: Vec<Vec<TileGrid>>,
    path: &[RoomCoord],
    null_symbol: u8,
) -> Result<AnnotatedLevel, CorpusError> {
    let rows = chunks.len();
    let cols = chunks.first().map_or(0, Vec::len);
    if path.is_empty() {
        return Err(CorpusError::EmptyPath);
    }
    let mut seen = HashSet::new();
    for (i, &coord) in path.iter().enumerate() {
        if coord.col >= cols || coord.row >= rows {
            return Err(CorpusError::OutOfBounds { coord, cols, rows });
        }
        if !seen.insert(coord) {
            return Err(CorpusError::RevisitedRoom(coord));
        }
        if i > 0 && !path[i - 1].is_adjacent(coord) {
            return Err(CorpusError::BrokenPath { index: i - 1 });
        }
        if i > 0 && side_of(path[i - 1], coord) == Side::Left {
            return Err(CorpusError::LeftwardStep { index: i - 1 });
        }
    }

    let chunk = {
        let g = &chunks[0][0];
        ChunkSize::new(g.width(), g.height())
    };
    let grid = {
        let mut g = TileGrid::filled(cols * chunk.width, rows * chunk.height, null_symbol);
        for (r, row) in chunks.iter().enumerate() {
            for (c, ch) in row.iter().enumerate() {
                g.blit(c * chunk.width, r * chunk.height, ch);
            }
        }
        g
    };

    let mut typed: Vec<(RoomCoord, RoomType, TravelDirection)> = Vec::with_capacity(path.len());
    for (i, &coord) in path.iter().enumerate() {
        let entrance = if i == 0 { Side::Left } else { side_of(coord, path[i - 1]) };
        let direction = match path.get(i + 1).map(|&next| side_of(coord, next)) {
            None | Some(Side::Right) => TravelDirection::Right,
            Some(Side::Above) => TravelDirection::Up,
            Some(Side::Below) => TravelDirection::Down,
            Some(Side::Left) => unreachable!("leftward steps rejected above"),
        };
        let room_type = if entrance == Side::Left && direction == TravelDirection::Right {
            RoomType::Horizontal
        } else {
            RoomType::Vertical
        };
        typed.push((coord, room_type, direction));
    }

    let mut room_grid: Vec<Vec<Room>> = (0..rows)
        .map(|_| (0..cols).map(|_| Room::null(chunk, null_symbol)).collect())
        .collect();
    let mut chunks = chunks;
    let mut sequence = Vec::with_capacity(path.len());
    for &(coord, room_type, direction) in &typed {
        let room = Room {
            grid: std::mem::replace(
                &mut chunks[coord.row][coord.col],
                TileGrid::filled(1, 1, null_symbol),
            ),
            room_type,
            direction: Some(direction),
        };
        room_grid[coord.row][coord.col] = room.clone();
        sequence.push((coord, room));
    }

    Ok(AnnotatedLevel {
        grid,
        room_grid,
        sequence: RoomSequence { rooms: sequence },
        chunk,
    })
}

/// Parse a path sidecar: one `col,row` pair per line, blank lines ignored.
pub fn parse_sidecar(text: &str) -> Result<Vec<RoomCoord>, CorpusError> {
    let mut coords = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || CorpusError::BadSidecarLine {
            line: idx + 1,
            text: line.to_string(),
        };
        let (c, r) = line.split_once(',').ok_or_else(bad)?;
        let col = c.trim().parse().map_err(|_| bad())?;
        let row = r.trim().parse().map_err(|_| bad())?;
        coords.push(RoomCoord::new(col, row));
    }
    Ok(coords)
}

pub fn format_sidecar(path: &[RoomCoord]) -> String {
    path.iter().map(|c| format!("{},{}\n", c.col, c.row)).collect()
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub chunk: ChunkSize,
    /// Pad ragged right/top edges with the null symbol instead of failing.
    pub pad: bool,
    pub alphabet: TileAlphabet,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            chunk: ChunkSize::default(),
            pad: false,
            alphabet: TileAlphabet::mega_man(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedLevel {
    /// File name of the level text, e.g. `mm_1_1.txt`.
    pub name: String,
    pub level: AnnotatedLevel,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub levels: Vec<NamedLevel>,
    pub alphabet: TileAlphabet,
    /// Tile symbols observed across all levels, reserved symbols excluded.
    pub observed: BTreeSet<u8>,
    pub chunk: ChunkSize,
}

impl Corpus {
    pub fn find(&self, name: &str) -> Option<&NamedLevel> {
        self.levels
            .iter()
            .find(|l| l.name == name || l.name.strip_suffix(".txt") == Some(name))
    }

    /// Split off one level for testing; the rest form the training set.
    pub fn withhold(&self, name: &str) -> Option<(Corpus, NamedLevel)> {
        let test = self.find(name)?.clone();
        let mut train = self.clone();
        train.levels.retain(|l| l.name != test.name);
        Some((train, test))
    }

    pub fn annotated(&self) -> impl Iterator<Item = &AnnotatedLevel> {
        self.levels.iter().map(|l| &l.level)
    }
}

/// Parse, segment and annotate one level from its text and sidecar.
pub fn load_level(
    level_text: &str,
    sidecar_text: &str,
    options: &LoadOptions,
) -> Result<AnnotatedLevel, CorpusError> {
    let mut grid = parse_level(level_text)?;
    let alphabet = &options.alphabet;
    for row in 0..grid.height() {
        for (col, &b) in grid.row(row).iter().enumerate() {
            if !alphabet.accepts(b) {
                return Err(CorpusError::UnknownSymbol {
                    symbol: b as char,
                    col,
                    row,
                });
            }
        }
    }
    if options.pad {
        grid = pad_to_chunks(&grid, options.chunk, alphabet.null_symbol());
    }
    let chunks = segment(&grid, options.chunk)?;
    let path = parse_sidecar(sidecar_text)?;
    annotate(chunks, &path, alphabet.null_symbol())
}

/// Load every `*.txt` level in `dir` together with its `*.path` sidecar.
///
/// Levels are returned sorted by file name. `alphabet.toml` in the directory,
/// if present, overrides the alphabet in `options`.
pub fn load_corpus(dir: &Path, options: &LoadOptions) -> Result<Corpus, CorpusError> {
    let io = |source| CorpusError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut options = options.clone();
    let alphabet_path = dir.join("alphabet.toml");
    if alphabet_path.is_file() {
        options.alphabet = TileAlphabet::load(&alphabet_path)?;
    }

    let mut level_files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
        .collect();
    level_files.sort();
    if level_files.is_empty() {
        return Err(CorpusError::EmptyCorpus(dir.display().to_string()));
    }

    let levels = level_files
        .par_iter()
        .map(|path| {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let sidecar = path.with_extension("path");
            if !sidecar.is_file() {
                return Err(CorpusError::MissingSidecar(name));
            }
            let read = |p: &Path| {
                std::fs::read_to_string(p).map_err(|source| CorpusError::Io {
                    path: p.display().to_string(),
                    source,
                })
            };
            let level = read(path)
                .and_then(|text| load_level(&text, &read(&sidecar)?, &options))
                .map_err(|e| e.in_file(&name))?;
            Ok(NamedLevel { name, level })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let reserved = [options.alphabet.null_symbol(), options.alphabet.border_symbol()];
    let observed = levels
        .iter()
        .flat_map(|l| l.level.grid.symbols())
        .filter(|s| !reserved.contains(s))
        .collect();

    Ok(Corpus {
        levels,
        alphabet: options.alphabet,
        observed,
        chunk: options.chunk,
    })
}
