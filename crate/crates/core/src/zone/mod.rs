//! Difference-bound matrices and federations.

mod bound;
mod dbm;
mod federation;

pub use bound::Bound;
pub use dbm::{Dbm, Window};
pub use federation::Federation;

#[cfg(test)]
mod tests;
