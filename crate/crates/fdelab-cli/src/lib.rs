//! Scenario runner binding the fast-diffusion laboratory's modules:
//! configuration parsing, experiment execution, and deterministic artifact
//! emission with a checksum manifest.

pub mod demo;
pub mod manifest;
pub mod runner;
pub mod scenario;

pub use demo::{demo_nonuniqueness, ContrastRow, ContrastTable};
pub use manifest::{ArtifactSink, Manifest, ManifestEntry};
pub use runner::{exit_code_for, run_scenario};
pub use scenario::{ExperimentKind, Scenario};
