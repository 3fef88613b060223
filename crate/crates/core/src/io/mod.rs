//! Text formats: spec files, TSV tables and trace directories.

pub mod spec;
pub mod trace;
pub mod tsv;

pub use spec::{parse_spec, parse_spec_str, write_spec, DEFAULT_DEGREE};
pub use trace::{dump_trace, load_trace};
