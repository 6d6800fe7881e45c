use std::path::PathBuf;

use crate::config::ConfigIssue;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_FINDING: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config:{}", list(.0))]
    Config(Vec<ConfigIssue>),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: infospec_core::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn list(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Stage { .. } | Self::Io { .. } => EXIT_RUNTIME,
        }
    }
}
