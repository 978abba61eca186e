//! Controlled English to Japanese parallel corpora for compositional
//! generalization: grammar sampling, rule-based transduction, pattern-driven
//! splits with leakage auditing, naturalness filtering, and scoring.

pub mod analysis;
pub mod audit;
pub mod build;
pub mod config;
pub mod corpus;
pub mod error;
pub mod grammar;
pub mod metrics;
pub mod naturalizer;
pub mod patterns;
pub mod resources;
pub mod transduction;

pub use config::RunConfig;
pub use resources::Resources;
