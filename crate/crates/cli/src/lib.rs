//! Library side of the `metaspin` command-line tool.

pub mod cache;
pub mod commands;
pub mod config;
pub mod output;
pub mod verify;
