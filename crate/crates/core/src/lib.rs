//! Formula engine for a small general-purpose spreadsheet function set.
//!
//! [`formula`] parses and prints formulas, [`eval`] evaluates them over a
//! [`table::Table`] in scalar or array mode, [`rewrite`] lints and rewrites
//! problem-specific functions into general-purpose compositions,
//! [`equivalence`] checks rewrites against their originals on generated
//! tables, and [`competency`] classifies formulas by the skills they use.

pub mod eval;
pub mod formula;
pub mod table;
pub mod value;
pub mod rewrite;
pub mod equivalence;
pub mod competency;
pub mod cli;
