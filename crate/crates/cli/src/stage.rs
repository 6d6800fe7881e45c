use serde::{Deserialize, Serialize};

/// A unit of work. Declaration order is execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Spectrum,
    BoundFeinstein,
    BoundConverse,
    Simulate,
    CheckDirect,
    CheckConverse,
    CheckDomination,
    CheckEpsilon,
    CheckSeparation,
    ExampleAlternating,
    ExampleMixed,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::BoundFeinstein => "bound feinstein",
            Self::BoundConverse => "bound converse",
            Self::Simulate => "simulate",
            Self::CheckDirect => "check direct",
            Self::CheckConverse => "check converse",
            Self::CheckDomination => "check domination",
            Self::CheckEpsilon => "check epsilon",
            Self::CheckSeparation => "check separation",
            Self::ExampleAlternating => "example alternating",
            Self::ExampleMixed => "example mixed",
        }
    }

    /// Condition checks are limit sweeps: `γ_n` must vanish along the grid.
    pub fn is_sweep(&self) -> bool {
        matches!(
            self,
            Self::CheckDirect | Self::CheckConverse | Self::CheckDomination | Self::CheckEpsilon | Self::CheckSeparation
        )
    }

    /// Stages that evaluate the single configured input.
    pub fn needs_coupling(&self) -> bool {
        matches!(
            self,
            Self::Spectrum
                | Self::BoundFeinstein
                | Self::BoundConverse
                | Self::Simulate
                | Self::CheckDirect
                | Self::CheckConverse
                | Self::CheckDomination
                | Self::CheckEpsilon
        )
    }

    /// Stages that estimate p-limits from the grid.
    pub fn needs_plim(&self) -> bool {
        matches!(self, Self::CheckSeparation | Self::ExampleAlternating | Self::ExampleMixed)
    }
}
