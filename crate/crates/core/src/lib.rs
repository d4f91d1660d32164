//! Multipartite EPR-steering toolkit.
//!
//! Builds qubit GHZ states and Gaussian continuous-variable networks,
//! evaluates inference-variance steering criteria on them, and aggregates the
//! results into genuine, collective and monogamy verdicts.

pub mod criteria;
pub mod cv;
pub mod error;
pub mod partition;
pub mod qubit;
pub mod report;
pub mod scenarios;
pub mod selftest;

pub use error::{Result, SteeringError};
pub use partition::SitePartition;
