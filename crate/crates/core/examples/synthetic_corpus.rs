//! Writes the bundled three-level mini corpus used when no real corpus is
//! available.
//!
//! ```text
//! cargo run -p mmlevel --example synthetic_corpus -- crates/core/data/synthetic
//! ```

use std::path::PathBuf;

use mmlevel::corpus::format_sidecar;
use mmlevel::{ChunkSize, RoomCoord, TileGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Entry {
    Left,
    Below,
    Above,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Exit {
    Right,
    Up,
    Down,
}

const W: usize = 16;
const H: usize = 15;
const FLOOR: usize = 13;

fn room(entry: Entry, exit: Exit, ladder: usize, rng: &mut ChaCha8Rng) -> TileGrid {
    let mut g = TileGrid::filled(W, H, b'-');
    let fill = |g: &mut TileGrid, cols: std::ops::Range<usize>, rows: std::ops::RangeInclusive<usize>, b: u8| {
        for r in rows {
            for c in cols.clone() {
                g.set(c, r, b);
            }
        }
    };
    fill(&mut g, 0..W, FLOOR..=H - 1, b'#');

    let shaft = matches!((entry, exit), (Entry::Below, Exit::Up) | (Entry::Above, Exit::Down));
    if shaft {
        // Shafts have walls but no floor.
        fill(&mut g, 1..W - 1, FLOOR..=H - 1, b'-');
        fill(&mut g, 0..1, 0..=H - 1, b'#');
        fill(&mut g, W - 1..W, 0..=H - 1, b'#');
        // Ledges hugging one wall, clear of the ladder.
        let ledge_row = rng.gen_range(4..10);
        if ladder > 4 {
            fill(&mut g, 1..rng.gen_range(2..ladder - 1), ledge_row..=ledge_row, b'#');
        } else {
            fill(&mut g, rng.gen_range(ladder + 2..W - 2)..W - 1, ledge_row..=ledge_row, b'#');
        }
    } else if entry == Entry::Left && exit == Exit::Right {
        match rng.gen_range(0..4) {
            0 => {
                let c = rng.gen_range(4..11);
                fill(&mut g, c..c + rng.gen_range(1..3), 11..=12, b'#');
            }
            1 => {
                let c = rng.gen_range(3..10);
                fill(&mut g, c..c + rng.gen_range(2..4), FLOOR..=FLOOR, b'H');
            }
            2 => {
                let c = rng.gen_range(2..10);
                fill(&mut g, c..c + 3, 9..=9, b'B');
                fill(&mut g, c + 1..c + 2, 8..=8, b'+');
            }
            _ => {
                let c = rng.gen_range(3..8);
                fill(&mut g, c..c + 1, 12..=12, b'#');
                fill(&mut g, c + 4..c + 6, 7..=7, b'B');
            }
        }
        if rng.gen_bool(0.5) {
            let c = rng.gen_range(1..W - 1);
            if g.get(c, 12) == b'-' {
                g.set(c, 12, b'*');
            }
        }
        // Bottomless pit, narrow enough to jump.
        if rng.gen_bool(0.6) {
            let c = rng.gen_range(2..W - 4);
            let width = rng.gen_range(1..3);
            let clear = (c..c + width).all(|c| (11..=12).all(|r| g.get(c, r) == b'-') && g.get(c, FLOOR) == b'#');
            if clear {
                fill(&mut g, c..c + width, FLOOR..=H - 1, b'-');
            }
        }
    } else if rng.gen_bool(0.5) {
        let r = rng.gen_range(5..9);
        let (c0, c1) = if ladder > 7 { (2, 5) } else { (W - 5, W - 2) };
        fill(&mut g, c0..c1, r..=r, b'B');
    }

    let ladder_rows = match (entry, exit) {
        (Entry::Below, Exit::Up) | (Entry::Above, Exit::Down) => 0..=H - 1,
        (_, Exit::Up) | (Entry::Above, _) => 0..=FLOOR - 1,
        (_, Exit::Down) | (Entry::Below, _) => FLOOR..=H - 1,
        (Entry::Left, Exit::Right) => 1..=0,
    };
    // Openings in the floor are five tiles wide around the ladder.
    if exit == Exit::Down || entry == Entry::Below {
        fill(&mut g, ladder - 2..ladder + 3, FLOOR..=H - 1, b'-');
    }
    fill(&mut g, ladder..ladder + 1, ladder_rows, b'l');
    g
}

fn level(path: &[(usize, usize)], cols: usize, rows: usize, seed: u64) -> (TileGrid, Vec<RoomCoord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chunk = ChunkSize::default();
    let mut grid = TileGrid::filled(cols * chunk.width, rows * chunk.height, b'@');
    let coords: Vec<RoomCoord> = path.iter().map(|&(c, r)| RoomCoord::new(c, r)).collect();
    let mut ladder = rng.gen_range(4..12);
    for (i, &here) in coords.iter().enumerate() {
        let entry = match i.checked_sub(1).map(|p| coords[p]) {
            Some(prev) if prev.row > here.row => Entry::Below,
            Some(prev) if prev.row < here.row => Entry::Above,
            _ => Entry::Left,
        };
        let exit = match coords.get(i + 1) {
            Some(next) if next.row < here.row => Exit::Up,
            Some(next) if next.row > here.row => Exit::Down,
            _ => Exit::Right,
        };
        // A new vertical run may use a different ladder column.
        if entry == Entry::Left && exit != Exit::Right {
            ladder = rng.gen_range(4..12);
        }
        let r = room(entry, exit, ladder, &mut rng);
        grid.blit(here.col * chunk.width, here.row * chunk.height, &r);
    }
    (grid, coords)
}

fn main() -> std::io::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/synthetic".into()));
    std::fs::create_dir_all(&out)?;
    let levels: [(&str, &[(usize, usize)], u64); 3] = [
        (
            "synth_1.txt",
            &[(0, 2), (1, 2), (1, 1), (1, 0), (2, 0), (3, 0), (3, 1), (3, 2), (4, 2), (5, 2)],
            11,
        ),
        (
            "synth_2.txt",
            &[(0, 1), (1, 1), (2, 1), (2, 2), (3, 2), (4, 2), (4, 1), (4, 0), (5, 0)],
            22,
        ),
        (
            "synth_3.txt",
            &[(0, 0), (1, 0), (1, 1), (2, 1), (3, 1), (3, 0), (4, 0), (4, 1), (4, 2), (5, 2)],
            33,
        ),
    ];
    for (name, path, seed) in levels {
        let (grid, coords) = level(path, 6, 3, seed);
        std::fs::write(out.join(name), grid.to_text())?;
        std::fs::write(out.join(name.replace(".txt", ".path")), format_sidecar(&coords))?;
    }
    Ok(())
}
