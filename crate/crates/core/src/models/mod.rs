//! Source, channel and coupling families and their per-`n` laws.

mod channel;
mod coupling;
mod joint;
mod source;
pub mod validate;

pub use channel::{ChannelComponent, ChannelLaw, ChannelModel, ChannelSpec};
pub use coupling::{CouplingLaw, CouplingSpec, EncoderMap, InputCoupling};
pub use joint::{
    BlockLaw, JointModel, MarginalOptions, MarginalTerm, OutputMarginal, Triple,
    DEFAULT_ENUMERATION_CAP,
};
pub(crate) use joint::{entropy_value, information_value};
pub use source::{
    Component, CountableLaw, MessageSchedule, SourceLaw, SourceModel, SourceSpec,
    DEFAULT_SUPPORT_CAP,
};
