//! Driver for crossing-limit-cycle analysis: JSON configs in, JSON reports
//! and SVG portraits out.

pub mod builtin;
pub mod config;
pub mod plot;
pub mod report;
