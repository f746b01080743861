//! Structure files, momentum-grid sampling and the `qspace` command line on top of
//! `qspace-core`.

pub mod cli;
pub mod format;
pub mod grid;

pub use format::{dump_structure, load_structure, parse_structure, LoadError};
