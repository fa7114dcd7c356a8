//! HTTP service and shared plumbing for the `conceptmap` command.

pub mod api;
pub mod config;
pub mod state;

pub use api::{router, serve_on};
pub use config::Config;
pub use state::{AppState, Snapshot};
