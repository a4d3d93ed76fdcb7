//! Propositional logic: formulas, parsing, the DPI file format and a
//! SAT-backed reasoner.

mod dpi;
mod formula;
mod parse;
mod reasoner;
pub mod sat;

pub use dpi::{parse_dpi_file, serialize_dpi, Dpi};
pub use formula::{is_identifier, Formula, SentenceSet};
pub use parse::parse_formula;
pub use reasoner::{entails, is_consistent, Reasoner};
