//! File formats, reports and the command-line front end for `maxsat-core`.

pub mod cli;
pub mod dimacs;
pub mod lp_format;
pub mod verify;

pub use dimacs::{parse_dimacs, write_dimacs, ParseError};
pub use lp_format::write_cplex_lp;
