//! File format and subcommands of the `toda` tool.

pub mod commands;
pub mod error;
pub mod format;
