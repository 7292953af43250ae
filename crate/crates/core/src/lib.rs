//! Leaflet question answering with subtractive mountain clustering.
//!
//! The vocabulary of a medication package insert is clustered around its most
//! "central" words, using a positional distance between words and a
//! co-occurrence factor. Questions and paragraphs are then compared through
//! their fuzzy cluster-membership profiles.
//!
//! Pipeline: [`text`] → [`distance`] → [`smc`] → [`retrieval`], glued
//! together and persisted by [`model`].

pub mod config;
pub mod distance;
pub mod error;
pub mod model;
pub mod retrieval;
pub mod smc;
pub mod stats;
pub mod text;

pub use config::ModelConfig;
pub use error::{Error, Result};
pub use model::{Model, Summary};
pub use retrieval::{answer, RankedAnswer, Reply};
