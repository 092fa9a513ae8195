//! Zero-sum magic squares over finite Abelian groups.
//!
//! A group of order `n²` admits an `n × n` square using each element once
//! with every row, column and both diagonals summing to zero exactly when
//! `n > 2` and the group has odd order or more than one involution. This
//! crate builds such squares, certifies the impossible cases, and provides an
//! exact verifier and a brute-force search oracle for small sides.

pub mod arith;
pub mod build;
pub mod classic;
pub mod error;
pub mod group;
pub mod kotzig;
pub mod oracle;
pub mod square;

pub use error::{Error, Result};
pub use group::{abelian_groups_of_order, GroupElement, GroupProfile, GroupSpec, Isomorphism};
pub use square::{DesignBlocks, Square, SumsReport, ZeroTranslation};
pub use build::{build_zms, replay, BuildOutcome, ConstructionTrace, ImpossibilityCertificate, ImpossibilityReason};
pub use oracle::{exhaustive_search, spectrum, SearchReport, SpectrumReport};
