//! Exact combinatorics for marked graphs, Stallings cores and the
//! retractions of the spine of outer space onto subgroup-fixed loci.

pub mod counting;
pub mod covers;
pub mod error;
pub(crate) mod fold;
pub mod format;
pub mod graph;
pub mod marked;
pub mod nielsen;
pub mod retract_aut;
pub mod retract_split;
pub mod sample;
pub mod selftest;
pub mod spine;
pub mod witness;
pub mod word;

pub use error::{Error, Result};
