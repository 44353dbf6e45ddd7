//! Reconstructs data-science pipelines from Python scripts and notebooks.
//!
//! Calls are extracted in evaluation order, mapped to stages through an API
//! dictionary, and collapsed into pipelines. Pipelines feed corpus
//! statistics, anti-pattern lints and project-level analysis.

pub mod analytics;
pub mod corpus;
pub mod dictionary;
pub mod error;
pub mod frontend;
pub mod par;
pub mod pipeline;
pub mod project;
pub mod taxonomy;

pub use error::{Error, Result};
pub use taxonomy::{is_feedback_edge, Layer, Stage};
