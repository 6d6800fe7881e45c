//! Config-driven experiment runner: models to spectra to bounds to condition
//! checks, with seeded reproducible CSV/JSON output.
//!
//! [`parse_config`] reads a JSON [`ExperimentConfig`], [`run_suite`] executes
//! its stages, and [`emit_outputs`] writes the reports with a manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod stage;

pub use config::{parse_config, parse_grid, parse_structure, ConfigIssue, ExperimentConfig};
pub use error::{CliError, EXIT_CONFIG, EXIT_FINDING, EXIT_OK, EXIT_RUNTIME};
pub use output::{emit_outputs, Manifest, ManifestEntry, MANIFEST_NAME};
pub use run::{run_stages, run_suite, Report, SuiteOutput};
pub use stage::Stage;
