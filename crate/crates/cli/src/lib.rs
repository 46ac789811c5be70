//! Batch front-end for the radial blow-up laboratory: scenario files,
//! artifact writers and the `run`, `scan` and `verify` verbs.

pub mod commands;
pub mod config;
pub mod outputs;
pub mod verify;
