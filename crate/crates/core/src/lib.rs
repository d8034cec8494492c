//! Timed games under delayed control.
//!
//! The crate is organised bottom-up:
//!
//! * [`zone`] holds difference-bound matrices and federations, the exact
//!   symbolic representation of clock valuation sets.
//! * [`model`] holds timed automata, timed games and delayed games together
//!   with validation and deadlock-freedom completion; [`format`] reads and
//!   writes them as JSON model files.
//! * [`semantics`] gives the concrete transition systems, run replay and
//!   simulation.
//! * [`solver`] decides reachability and safety timed games over federations
//!   and extracts state-based strategies; it ships a discretised oracle.
//! * [`reduction`], [`embedding`] and [`counter`] are the model-to-model
//!   constructions: bounded schedules into classical games, classical games
//!   into delayed games, and two-counter machines into delayed games.

pub mod bound;
pub mod cli;
pub mod constraint;
pub mod counter;
pub mod embedding;
pub mod error;
pub mod format;
pub mod gen;
pub mod model;
pub mod rational;
pub mod reduction;
pub mod semantics;
pub mod solver;
pub mod zone;

pub use error::{Error, Result};
pub use rational::Rational;
