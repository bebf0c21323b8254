//! Library surface of the CLI: manifest, output formatting, subcommand
//! implementations and the report pipeline, reusable from integration tests.

pub mod commands;
pub mod manifest;
pub mod output;
pub mod report;
