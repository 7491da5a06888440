//! Command-line and HTTP front end for `lineup-core`.

pub mod api;
pub mod cli;
pub mod config;
pub mod data;
pub mod export;
pub mod store;

pub use config::ServiceConfig;
