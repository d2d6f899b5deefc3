//! Library surface of the batch evaluation tool (the binary is a thin
//! wrapper; tests drive these modules directly).

pub mod commands;
pub mod dataset;
pub mod report;
