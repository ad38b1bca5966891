//! Rectangular tile grids, the representation shared by levels and rooms.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusError;

/// Width and height of the chunks a level is cut into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChunkSize {
    pub width: usize,
    pub height: usize,
}

impl ChunkSize {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }
}

impl Default for ChunkSize {
    /// One Mega Man screen: 16 tiles wide, 15 tiles tall.
    fn default() -> Self {
        Self::new(16, 15)
    }
}

/// Axis of a grid, used when reporting dimension mismatches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Width,
    Height,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Width => f.write_str("width"),
            Axis::Height => f.write_str("height"),
        }
    }
}

/// A rectangular grid of single-byte tile symbols.
///
/// Row 0 is the top row, matching the order of lines in a level file.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TileGrid {
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

impl TileGrid {
    /// Grid of `width` x `height` cells all set to `fill`.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, fill: u8) -> Self {
        assert!(width >= 1 && height >= 1, "grid dimensions must be positive");
        Self {
            width,
            height,
            cells: vec![fill; width * height],
        }
    }

    /// Build a grid from row strings. Returns `None` for empty or ragged input.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Option<Self> {
        let width = rows.first()?.as_ref().len();
        if width == 0 || rows.iter().any(|r| r.as_ref().len() != width) {
            return None;
        }
        let cells = rows.iter().flat_map(|r| r.as_ref().bytes()).collect();
        Some(Self {
            width,
            height: rows.len(),
            cells,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.cells[row * self.width + col]
    }

    /// Like [`TileGrid::get`] but `None` outside the grid.
    #[inline]
    pub fn try_get(&self, col: isize, row: isize) -> Option<u8> {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            None
        } else {
            Some(self.get(col as usize, row as usize))
        }
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, tile: u8) {
        self.cells[row * self.width + col] = tile;
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row * self.width..(row + 1) * self.width]
    }

    pub fn symbols(&self) -> BTreeSet<u8> {
        self.cells.iter().copied().collect()
    }

    /// Copy of the `width` x `height` window whose top-left cell is (`col`, `row`).
    pub fn window(&self, col: usize, row: usize, width: usize, height: usize) -> TileGrid {
        let mut cells = Vec::with_capacity(width * height);
        for r in row..row + height {
            cells.extend_from_slice(&self.row(r)[col..col + width]);
        }
        TileGrid {
            width,
            height,
            cells,
        }
    }

    /// Overwrite the region starting at (`col`, `row`) with `other`.
    pub fn blit(&mut self, col: usize, row: usize, other: &TileGrid) {
        for r in 0..other.height {
            let dst = (row + r) * self.width + col;
            self.cells[dst..dst + other.width].copy_from_slice(other.row(r));
        }
    }

    /// Serialize as level text: one line per row, exactly one trailing newline.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for r in 0..self.height {
            out.extend(self.row(r).iter().map(|&b| b as char));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for TileGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TileGrid {}x{}", self.width, self.height)?;
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for TileGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parse level text into a grid.
///
/// Rows are newline-delimited; `\r\n` endings are accepted and a single
/// trailing newline is optional.
pub fn parse_level(text: &str) -> Result<TileGrid, CorpusError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    let mut width = None;
    let mut cells = Vec::with_capacity(body.len());
    let mut height = 0;
    for (idx, line) in body.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if !line.is_ascii() {
            return Err(CorpusError::NonAsciiRow { line: idx + 1 });
        }
        let expected = *width.get_or_insert(line.len());
        if line.len() != expected || expected == 0 {
            return Err(CorpusError::RaggedRows {
                line: idx + 1,
                expected,
                found: line.len(),
            });
        }
        cells.extend_from_slice(line.as_bytes());
        height += 1;
    }
    Ok(TileGrid {
        width: width.unwrap_or(0),
        height,
        cells,
    })
}

/// Cut a grid into a row-major array of chunks (`result[row][col]`, row 0 at the top).
pub fn segment(grid: &TileGrid, chunk: ChunkSize) -> Result<Vec<Vec<TileGrid>>, CorpusError> {
    if grid.width % chunk.width != 0 {
        return Err(CorpusError::NonDivisibleDimensions {
            axis: Axis::Width,
            size: grid.width,
            chunk: chunk.width,
        });
    }
    if grid.height % chunk.height != 0 {
        return Err(CorpusError::NonDivisibleDimensions {
            axis: Axis::Height,
            size: grid.height,
            chunk: chunk.height,
        });
    }
    let cols = grid.width / chunk.width;
    let rows = grid.height / chunk.height;
    Ok((0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| grid.window(c * chunk.width, r * chunk.height, chunk.width, chunk.height))
                .collect()
        })
        .collect())
}

/// Pad the right and top edges with `fill` until both dimensions divide `chunk`.
pub fn pad_to_chunks(grid: &TileGrid, chunk: ChunkSize, fill: u8) -> TileGrid {
    let width = grid.width.div_ceil(chunk.width) * chunk.width;
    let height = grid.height.div_ceil(chunk.height) * chunk.height;
    if width == grid.width && height == grid.height {
        return grid.clone();
    }
    let mut out = TileGrid::filled(width, height, fill);
    out.blit(0, height - grid.height, grid);
    out
}
