mod common;

use mmlevel::agent::{check_playable, is_playable, JumpModel, Objective};
use mmlevel::grid::parse_level;
use mmlevel::{ChunkSize, RoomCoord, TileAlphabet, TileGrid};
use proptest::prelude::*;
use rand::SeedableRng;

use common::{random_room, Oracle};

fn halves() -> Objective {
    Objective {
        chunk: ChunkSize::new(8, 15),
        start_room: RoomCoord::new(0, 0),
        goal_rooms: vec![RoomCoord::new(1, 0)],
    }
}

fn jump(max_rise: u8) -> JumpModel {
    JumpModel {
        max_rise,
        ..JumpModel::default()
    }
}

/// 16x15 room with a solid floor and a wall of `height` tiles at column 7.
fn wall_room(height: usize) -> TileGrid {
    let mut g = TileGrid::filled(16, 15, b'-');
    for c in 0..16 {
        g.set(c, 14, b'#');
    }
    for r in 14 - height..14 {
        g.set(7, r, b'#');
    }
    g
}

#[test]
fn corridor_takes_width_minus_one_steps() {
    let a = TileAlphabet::mega_man();
    let mut rows = vec!["----------------"; 14];
    rows.push("################");
    let grid = parse_level(&rows.join("\n")).unwrap();
    let objective = Objective {
        chunk: ChunkSize::new(1, 15),
        start_room: RoomCoord::new(0, 0),
        goal_rooms: vec![RoomCoord::new(15, 0)],
    };
    let v = check_playable(&grid, &objective, JumpModel::default(), &a).unwrap();
    assert!(v.playable);
    assert_eq!(v.path_length(), Some(15));
}

#[test]
fn three_tall_wall_needs_enough_rise() {
    let a = TileAlphabet::mega_man();
    let grid = wall_room(3);
    assert!(is_playable(&grid, &halves(), jump(4), &a));
    assert!(!is_playable(&grid, &halves(), jump(2), &a));

    // The BFS oracle reaches the same verdicts.
    for (rise, expected) in [(4, true), (2, false)] {
        let oracle = Oracle {
            grid: &grid,
            alphabet: &a,
            jump: jump(rise),
        };
        let start = oracle.start(0..8).unwrap();
        assert_eq!(oracle.distance(start, 8..16).is_some(), expected);
    }
}

#[test]
fn full_height_ladder_is_the_only_way_up() {
    let a = TileAlphabet::mega_man();
    // Two stacked rooms split by a two-tile slab with a ladder shaft at column 8.
    let mut g = TileGrid::filled(16, 30, b'-');
    for c in 0..16 {
        g.set(c, 29, b'#');
        g.set(c, 14, b'#');
        g.set(c, 15, b'#');
    }
    for r in 1..29 {
        g.set(8, r, b'l');
    }
    let objective = Objective {
        chunk: ChunkSize::new(16, 15),
        start_room: RoomCoord::new(0, 1),
        goal_rooms: vec![RoomCoord::new(0, 0)],
    };
    let v = check_playable(&g, &objective, JumpModel::default(), &a).unwrap();
    assert!(v.playable);
    assert!(v.path.unwrap().iter().any(|s| s.col == 8 && s.row == 15));

    let no_ladder = TileGrid::from_rows(
        &(0..30)
            .map(|r| String::from_utf8(g.row(r).iter().map(|&b| if b == b'l' { b'-' } else { b }).collect()).unwrap())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert!(!is_playable(&no_ladder, &objective, JumpModel::default(), &a));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bigger_jumps_never_hurt(
        seed in any::<u64>(),
        rise in 1u8..5,
        horizontal in 1u8..6,
        extra_rise in 0u8..3,
        extra_horizontal in 0u8..3,
    ) {
        let a = TileAlphabet::mega_man();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = random_room(&mut rng, 16, 15);
        let small = JumpModel { max_rise: rise, max_horizontal: horizontal };
        let big = JumpModel { max_rise: rise + extra_rise, max_horizontal: horizontal + extra_horizontal };
        if is_playable(&grid, &halves(), small, &a) {
            prop_assert!(is_playable(&grid, &halves(), big, &a));
        }
    }
}
