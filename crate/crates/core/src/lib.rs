//! Compressed full-text index over run-length context-free grammars.
//!
//! A text is stored as a run-length grammar (built here as a locally
//! consistent grammar, or imported), and maximal exact matches of a pattern
//! and their relatives are found directly on the compressed form:
//!
//! * [`mem`]: MEMs, k-MEMs, MUMs, k-rare MEMs, matching statistics and
//!   intersections against several texts.
//! * [`apps`]: relative Lempel-Ziv compression and suffix-prefix overlaps.
//! * [`oracle`]: brute-force references for all of the above.
//!
//! Positions in every public result are 1-based and inclusive.

pub mod apps;
pub mod cli;
pub mod grammar;
pub mod index;
pub mod lcg;
pub mod mem;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod sam;

mod binio;
mod error;

pub use error::{Error, Result};
pub use grammar::{Rlcfg, Rule, Symbol};
pub use index::Index;
pub use mem::MemRecord;
