use thiserror::Error;

/// Failures while training or sampling a Markov chain.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("no training data")]
    EmptyTraining,
    #[error("training sequence {index} has {len} rooms; at least 2 are needed")]
    ShortSequence { index: usize, len: usize },
    #[error("room sequences may not contain Null rooms")]
    NullInSequence,
    #[error("requested length must be at least 1")]
    ZeroLength,
    #[error("chain has no transitions out of {0}")]
    DeadEnd(String),
    #[error("reference model has no entries to compare against")]
    NoSharedStructure,
    #[error("models disagree on use of the direction node")]
    IncompatibleModels,
    #[error("training room is {found_width}x{found_height}, expected {width}x{height}")]
    RoomSize {
        width: usize,
        height: usize,
        found_width: usize,
        found_height: usize,
    },
    #[error("unrecognized room sequence character {0:?}")]
    BadSequenceChar(char),
}
