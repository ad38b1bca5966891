//! Ensemble Markov-chain generation of tile-based Mega Man levels.
//!
//! A first-order chain over room types plans the game path; one L-shaped
//! multidimensional Markov chain per room type fills in the rooms. The
//! [`metrics`] module evaluates generated batches against a single-model
//! baseline and a grid-level hierarchical baseline.

pub mod agent;
pub mod alphabet;
pub mod approach;
pub mod assembler;
pub mod bundle;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod grid;
pub mod hierarchical;
pub mod metrics;
pub mod room_model;
pub mod seeds;
pub mod sequence;
pub mod table;

pub use alphabet::{TileAlphabet, TileClass};
pub use corpus::{AnnotatedLevel, Corpus, Room, RoomCoord, RoomSequence, RoomType, TravelDirection};
pub use error::ChainError;
pub use grid::{ChunkSize, TileGrid};
pub use table::ConditionalTable;
