//! Command-line tool and HTTP service on top of [`smcqa`].

pub mod api;
pub mod commands;

pub use api::router;
pub use commands::Failure;
