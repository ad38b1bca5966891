//! Tile alphabet and the movement class of every symbol.
//!
//! The classification lives in a TOML document so that it can be revised
//! without touching code. The bundled default covers the 18 symbols of the
//! VGLC Mega Man encoding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bundled Mega Man alphabet.
pub const DEFAULT_ALPHABET_TOML: &str = include_str!("../data/alphabet.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TileClass {
    Passable,
    Solid,
    Hazard,
    Climbable,
}

impl fmt::Display for TileClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TileClass::Passable => "passable",
            TileClass::Solid => "solid",
            TileClass::Hazard => "hazard",
            TileClass::Climbable => "climbable",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum AlphabetError {
    #[error("cannot read alphabet config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed alphabet config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("alphabet key {0:?} must be exactly one ASCII character")]
    BadSymbol(String),
    #[error("reserved symbol {0:?} is also listed as a tile")]
    ReservedCollision(char),
    #[error("null and border symbols must differ")]
    ReservedClash,
    #[error("empty symbol {0:?} must be a passable tile")]
    BadEmptySymbol(char),
}

#[derive(Debug, Deserialize)]
struct AlphabetDoc {
    null_symbol: String,
    border_symbol: String,
    empty_symbol: String,
    tiles: BTreeMap<String, TileClass>,
}

/// The set of tile symbols plus their movement classes.
///
/// Every non-reserved symbol has exactly one class, so the four class
/// subsets are disjoint and cover the alphabet by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileAlphabet {
    classes: BTreeMap<u8, TileClass>,
    null_symbol: u8,
    border_symbol: u8,
    empty_symbol: u8,
}

fn single_ascii(s: &str) -> Result<u8, AlphabetError> {
    match s.as_bytes() {
        [b] if b.is_ascii() && !b.is_ascii_control() => Ok(*b),
        _ => Err(AlphabetError::BadSymbol(s.to_string())),
    }
}

impl TileAlphabet {
    pub fn from_toml(text: &str) -> Result<Self, AlphabetError> {
        let doc: AlphabetDoc = toml::from_str(text)?;
        let null_symbol = single_ascii(&doc.null_symbol)?;
        let border_symbol = single_ascii(&doc.border_symbol)?;
        let empty_symbol = single_ascii(&doc.empty_symbol)?;
        let mut classes = BTreeMap::new();
        for (key, class) in doc.tiles {
            classes.insert(single_ascii(&key)?, class);
        }
        Self::new(classes, null_symbol, border_symbol, empty_symbol)
    }

    pub fn load(path: &Path) -> Result<Self, AlphabetError> {
        let text = std::fs::read_to_string(path).map_err(|source| AlphabetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn new(
        classes: BTreeMap<u8, TileClass>,
        null_symbol: u8,
        border_symbol: u8,
        empty_symbol: u8,
    ) -> Result<Self, AlphabetError> {
        if null_symbol == border_symbol {
            return Err(AlphabetError::ReservedClash);
        }
        for reserved in [null_symbol, border_symbol] {
            if classes.contains_key(&reserved) {
                return Err(AlphabetError::ReservedCollision(reserved as char));
            }
        }
        if classes.get(&empty_symbol) != Some(&TileClass::Passable) {
            return Err(AlphabetError::BadEmptySymbol(empty_symbol as char));
        }
        Ok(Self {
            classes,
            null_symbol,
            border_symbol,
            empty_symbol,
        })
    }

    pub fn mega_man() -> Self {
        Self::from_toml(DEFAULT_ALPHABET_TOML).expect("bundled alphabet is valid")
    }

    pub fn null_symbol(&self) -> u8 {
        self.null_symbol
    }

    pub fn border_symbol(&self) -> u8 {
        self.border_symbol
    }

    /// Tile placed where generation meets an unseen context.
    pub fn empty_symbol(&self) -> u8 {
        self.empty_symbol
    }

    pub fn symbols(&self) -> BTreeSet<u8> {
        self.classes.keys().copied().collect()
    }

    pub fn class_of(&self, symbol: u8) -> Option<TileClass> {
        self.classes.get(&symbol).copied()
    }

    pub fn class_members(&self, class: TileClass) -> BTreeSet<u8> {
        self.classes
            .iter()
            .filter(|(_, c)| **c == class)
            .map(|(s, _)| *s)
            .collect()
    }

    /// Whether `symbol` is a tile or one of the reserved symbols.
    pub fn accepts(&self, symbol: u8) -> bool {
        symbol == self.null_symbol || symbol == self.border_symbol || self.classes.contains_key(&symbol)
    }

    /// The player's body may occupy this tile.
    #[inline]
    pub fn is_open(&self, symbol: u8) -> bool {
        matches!(
            self.class_of(symbol),
            Some(TileClass::Passable | TileClass::Climbable)
        )
    }

    #[inline]
    pub fn is_solid(&self, symbol: u8) -> bool {
        self.class_of(symbol) == Some(TileClass::Solid)
    }

    #[inline]
    pub fn is_climbable(&self, symbol: u8) -> bool {
        self.class_of(symbol) == Some(TileClass::Climbable)
    }

    #[inline]
    pub fn is_passable(&self, symbol: u8) -> bool {
        self.class_of(symbol) == Some(TileClass::Passable)
    }
}

impl Default for TileAlphabet {
    fn default() -> Self {
        Self::mega_man()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_alphabet_has_eighteen_tiles() {
        let a = TileAlphabet::mega_man();
        assert_eq!(a.symbols().len(), 18);
        assert_eq!(a.class_of(b'#'), Some(TileClass::Solid));
        assert_eq!(a.class_of(b'l'), Some(TileClass::Climbable));
        assert_eq!(a.class_of(b'-'), Some(TileClass::Passable));
        assert!(!a.symbols().contains(&a.null_symbol()));
        assert!(!a.symbols().contains(&a.border_symbol()));
    }

    #[test]
    fn classes_partition_symbols() {
        let a = TileAlphabet::mega_man();
        let mut union = BTreeSet::new();
        let mut total = 0;
        for class in [
            TileClass::Passable,
            TileClass::Solid,
            TileClass::Hazard,
            TileClass::Climbable,
        ] {
            let members = a.class_members(class);
            total += members.len();
            union.extend(members);
        }
        assert_eq!(total, union.len());
        assert_eq!(union, a.symbols());
    }

    #[test]
    fn reserved_symbol_collision_rejected() {
        let text = r##"
null_symbol = "#"
border_symbol = "~"
empty_symbol = "-"
[tiles]
"#" = "solid"
"-" = "passable"
"##;
        assert!(matches!(
            TileAlphabet::from_toml(text),
            Err(AlphabetError::ReservedCollision('#'))
        ));
    }

    #[test]
    fn multi_char_key_rejected() {
        let text = r#"
null_symbol = "@"
border_symbol = "~"
empty_symbol = "-"
[tiles]
"ab" = "solid"
"-" = "passable"
"#;
        assert!(matches!(
            TileAlphabet::from_toml(text),
            Err(AlphabetError::BadSymbol(_))
        ));
    }
}
