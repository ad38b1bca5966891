//! Batch evaluation: playability, resampling and similarity metrics.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{is_playable, JumpModel, Objective};
use crate::alphabet::TileAlphabet;
use crate::approach::{Approach, TrainedApproach};
use crate::assembler::{GeneratedLevel, DEFAULT_RESAMPLE_CAP};
use crate::corpus::{Corpus, RoomCoord};
use crate::error::ChainError;
use crate::hierarchical::edge_rooms;
use crate::room_model::CpdDifference;
use crate::seeds::level_seed;
use crate::TileGrid;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("test level {0:?} is not in the corpus")]
    MissingTestLevel(String),
    #[error("batch size must be at least 1")]
    EmptyBatch,
    #[error("rooms per level must be at least 1")]
    NoRooms,
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// True when some start room reaches some goal room through occupied rooms
/// (4-neighbour moves). `occupied` is indexed `[row][col]`.
pub fn rooms_connected(occupied: &[Vec<bool>], starts: &[RoomCoord], goals: &[RoomCoord]) -> bool {
    let rows = occupied.len();
    let cols = occupied.first().map_or(0, Vec::len);
    let is_open = |c: &RoomCoord| c.row < rows && c.col < cols && occupied[c.row][c.col];
    let mut seen = vec![vec![false; cols]; rows];
    let mut queue = VecDeque::new();
    for s in starts.iter().filter(|s| is_open(s)) {
        seen[s.row][s.col] = true;
        queue.push_back(*s);
    }
    let mut goal = vec![vec![false; cols]; rows];
    for g in goals.iter().filter(|g| is_open(g)) {
        goal[g.row][g.col] = true;
    }
    while let Some(cur) = queue.pop_front() {
        if goal[cur.row][cur.col] {
            return true;
        }
        let (c, r) = (cur.col, cur.row);
        let next = [
            (c + 1 < cols).then(|| RoomCoord::new(c + 1, r)),
            c.checked_sub(1).map(|c| RoomCoord::new(c, r)),
            (r + 1 < rows).then(|| RoomCoord::new(c, r + 1)),
            r.checked_sub(1).map(|r| RoomCoord::new(c, r)),
        ];
        for n in next.into_iter().flatten() {
            if occupied[n.row][n.col] && !seen[n.row][n.col] {
                seen[n.row][n.col] = true;
                queue.push_back(n);
            }
        }
    }
    false
}

/// Playable/null labels of a `H`/`V`/`N` label grid, `[row][col]`.
pub fn label_occupancy(labels: &TileGrid) -> Vec<Vec<bool>> {
    (0..labels.height())
        .map(|r| labels.row(r).iter().map(|&b| b == b'H' || b == b'V').collect())
        .collect()
}

/// Layout check for a room grid whose start and end are any leftmost and any
/// rightmost playable room.
pub fn grid_layout_playable(labels: &TileGrid) -> bool {
    let (starts, goals) = edge_rooms(labels);
    rooms_connected(&label_occupancy(labels), &starts, &goals)
}

/// Whether a generated level's room layout connects start and end.
///
/// Path layouts run from the first placement to the last; a self-collided
/// path is never playable. Grid layouts use the leftmost and rightmost rooms.
pub fn layout_playable(level: &GeneratedLevel) -> bool {
    if level.self_collision {
        return false;
    }
    let occupied = level.plan.occupancy();
    match &level.layout {
        Some(_) => match level.plan.start {
            Some(start) => rooms_connected(&occupied, &[start], &level.plan.goals),
            None => false,
        },
        None => {
            let rows: Vec<String> = occupied
                .iter()
                .map(|row| row.iter().map(|&o| if o { 'H' } else { 'N' }).collect())
                .collect();
            TileGrid::from_rows(&rows).is_some_and(|labels| grid_layout_playable(&labels))
        }
    }
}

fn fraction(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

pub fn layout_playability(levels: &[GeneratedLevel]) -> f64 {
    fraction(levels.iter().filter(|l| layout_playable(l)).count(), levels.len())
}

/// Whether the agent can walk from the level's start room to a goal room.
pub fn level_playable(level: &GeneratedLevel, jump: JumpModel, alphabet: &TileAlphabet) -> bool {
    if level.self_collision {
        return false;
    }
    Objective::for_generated(level).is_some_and(|o| is_playable(&level.grid, &o, jump, alphabet))
}

pub fn overall_playability(levels: &[GeneratedLevel], jump: JumpModel, alphabet: &TileAlphabet) -> f64 {
    let hits = levels
        .par_iter()
        .filter(|l| level_playable(l, jump, alphabet))
        .count();
    fraction(hits, levels.len())
}

/// Mean resample count. A level that ran out of budget counts at the cap.
pub fn mean_resampling(levels: &[GeneratedLevel], resample_cap: u32) -> f64 {
    if levels.is_empty() {
        return 0.0;
    }
    let sum: u64 = levels
        .iter()
        .map(|l| u64::from(if l.cap_exhausted { resample_cap } else { l.resample_count }))
        .sum();
    sum as f64 / levels.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub batch_size: usize,
    pub rooms_per_level: usize,
    pub seed: u64,
    pub resample_cap: u32,
    pub jump: JumpModel,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            batch_size: 50,
            rooms_per_level: 12,
            seed: 0,
            resample_cap: DEFAULT_RESAMPLE_CAP,
            jump: JumpModel::default(),
        }
    }
}

impl EvalConfig {
    fn validate(&self) -> Result<(), MetricsError> {
        if self.batch_size == 0 {
            return Err(MetricsError::EmptyBatch);
        }
        if self.rooms_per_level == 0 {
            return Err(MetricsError::NoRooms);
        }
        Ok(())
    }
}

/// Generate `config.batch_size` levels. Level `k` depends only on
/// `(config.seed, k)`, so results do not depend on thread count.
pub fn generate_batch(
    model: &TrainedApproach,
    config: &EvalConfig,
    alphabet: &TileAlphabet,
) -> Result<Vec<GeneratedLevel>, ChainError> {
    (0..config.batch_size as u64)
        .into_par_iter()
        .map(|k| {
            model.generate(
                level_seed(config.seed, k),
                config.rooms_per_level,
                config.resample_cap,
                alphabet,
                None,
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchInfo {
    pub levels: usize,
    pub rooms_per_level: usize,
    pub master_seed: u64,
    pub resample_cap: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub approach: Approach,
    pub test_level: String,
    pub layout_playability: f64,
    pub overall_playability: f64,
    pub mean_resampling: f64,
    pub layout_similarity: f64,
    pub inverse_content_similarity: Option<CpdDifference>,
    pub batch: BatchInfo,
    pub jump: JumpModel,
    /// Levels whose playable-room count missed `rooms_per_level`.
    pub room_count_misses: usize,
}

/// Compute every metric for an already trained model and generated batch.
pub fn report_for_batch(
    model: &TrainedApproach,
    levels: &[GeneratedLevel],
    test_name: &str,
    test: &crate::AnnotatedLevel,
    config: &EvalConfig,
    alphabet: &TileAlphabet,
) -> Result<MetricsReport, MetricsError> {
    let room_count_misses = levels
        .iter()
        .filter(|l| l.plan.rooms.len() != config.rooms_per_level)
        .count();
    Ok(MetricsReport {
        approach: model.approach(),
        test_level: test_name.to_string(),
        layout_playability: layout_playability(levels),
        overall_playability: overall_playability(levels, config.jump, alphabet),
        mean_resampling: mean_resampling(levels, config.resample_cap),
        layout_similarity: model.layout_similarity(test),
        inverse_content_similarity: model.inverse_content_similarity(test, alphabet)?,
        batch: BatchInfo {
            levels: levels.len(),
            rooms_per_level: config.rooms_per_level,
            master_seed: config.seed,
            resample_cap: config.resample_cap,
        },
        jump: config.jump,
        room_count_misses,
    })
}

/// Withhold `test_level`, train `approach` on the rest, generate a batch and
/// measure it.
pub fn evaluate(
    approach: Approach,
    corpus: &Corpus,
    test_level: &str,
    config: &EvalConfig,
) -> Result<MetricsReport, MetricsError> {
    config.validate()?;
    let (training, test) = corpus
        .withhold(test_level)
        .ok_or_else(|| MetricsError::MissingTestLevel(test_level.to_string()))?;
    let levels: Vec<_> = training.annotated().collect();
    let model = TrainedApproach::train(approach, &levels, corpus.chunk, &corpus.alphabet)?;
    let batch = generate_batch(&model, config, &corpus.alphabet)?;
    report_for_batch(&model, &batch, &test.name, &test.level, config, &corpus.alphabet)
}

fn percent(x: f64) -> String {
    format!("{:.1}%", x * 100.0)
}

fn similarity(x: f64) -> String {
    if x < 0.001 {
        format!("<0.1% ({x:.3e})")
    } else {
        percent(x)
    }
}

/// Aligned text table with one column per report.
pub fn comparison_table(reports: &[MetricsReport]) -> String {
    let mut rows: Vec<(String, Vec<String>)> = vec![
        ("".into(), reports.iter().map(|r| r.approach.title().to_string()).collect()),
        (
            "Layout Playability".into(),
            reports.iter().map(|r| percent(r.layout_playability)).collect(),
        ),
        (
            "Overall Playability".into(),
            reports.iter().map(|r| percent(r.overall_playability)).collect(),
        ),
        (
            "Necessary Resampling".into(),
            reports.iter().map(|r| format!("{:.1}", r.mean_resampling)).collect(),
        ),
        (
            "Layout Similarity".into(),
            reports.iter().map(|r| similarity(r.layout_similarity)).collect(),
        ),
    ];
    if reports.iter().any(|r| r.inverse_content_similarity.is_some()) {
        let cell = |r: &MetricsReport, f: fn(&CpdDifference) -> f64| {
            r.inverse_content_similarity
                .as_ref()
                .map_or_else(|| "n/a".to_string(), |d| format!("{:.6}", f(d)))
        };
        rows.push((
            "Total Difference".into(),
            reports.iter().map(|r| cell(r, |d| d.total)).collect(),
        ));
        rows.push((
            "Mean Difference".into(),
            reports.iter().map(|r| cell(r, |d| d.mean)).collect(),
        ));
    }

    let label_width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..reports.len())
        .map(|i| rows.iter().map(|(_, c)| c[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (label, cells) in &rows {
        let mut line = format!("{label:<label_width$}");
        for (cell, w) in cells.iter().zip(&widths) {
            let _ = write!(line, "  {cell:>w$}");
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
