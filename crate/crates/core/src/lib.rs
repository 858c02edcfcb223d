//! Strategy-update dynamics on finite multi-player games played on graphs.
//!
//! The crate models games on graphs ([`game`]), enumerates positional and
//! history-based strategy profiles ([`strategy`]), builds the induced
//! dynamics graphs ([`dynamics`]), and decides termination and fair
//! termination ([`analysis`]). Simulation preorders live in [`relations`],
//! the game-minor calculus in [`minors`], and the interdomain routing
//! (Stable Paths Problem) layer in [`spp`].
//!
//! Graph construction and the randomized theorem suites are data-parallel;
//! with the default `parallel` feature they run on rayon, otherwise every
//! loop falls back to a sequential iterator with identical output.

pub mod analysis;
pub mod config;
pub mod dot;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod game;
pub mod gen;
pub mod graph;
pub mod minors;
pub mod par;
pub mod relations;
pub mod spp;
pub mod strategy;
pub mod theorems;

pub use config::Limits;
pub use error::{Error, Result};
pub use game::{Game, Play, Player, PlayerSet, Vertex};
