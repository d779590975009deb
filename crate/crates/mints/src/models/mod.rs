//! The combinatorial machines behind the reductions: deterministic and
//! branching tiling puzzles and bus machines.

pub mod branching;
pub mod bus;
pub mod tiling;

use thiserror::Error;

pub use branching::{btile_at, parse_word, s_solvable, BranchingPuzzle, BranchingTiler, Word};
pub use bus::{
    accepting_run, bus_accepts, bus_step, explore, Acceptance, BusConfiguration, BusMachine, BusMove, ConfigGraph, InstrRef, Instruction,
    LocalInstruction, RunTree, Switch, SwitchKind, Sym, Target,
};
pub use tiling::{location_count, location_le, solvable_within, tile_at, TilingGrid, TilingPuzzle};

pub type Tile = usize;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Invalid(msg.into()))
}

pub(crate) fn tile_index(tiles: &[String], name: &str) -> Result<Tile, ModelError> {
    tiles.iter().position(|t| t == name).ok_or_else(|| ModelError::Invalid(format!("unknown tile `{name}`")))
}

pub(crate) fn check_tiles(tiles: &[String]) -> Result<(), ModelError> {
    if tiles.is_empty() {
        return invalid("no tiles");
    }
    for (i, t) in tiles.iter().enumerate() {
        if tiles[..i].contains(t) {
            return invalid(format!("duplicate tile `{t}`"));
        }
    }
    Ok(())
}

/// Hex SHA-256 of a canonical serialization.
pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
