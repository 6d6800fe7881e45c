//! Codebooks, threshold decoding, the two finite-blocklength bounds and random-coding ensembles.

mod bounds;
mod codebook;
mod ensemble;
mod oracle;

pub use bounds::{
    code_error, feinstein_bound, map_decoder, verdu_han_bound, verdu_han_with_code, BoundKind, CodeTrialReport,
    DecoderTable, TrialMode, BOUND_CSV_HEADER,
};
pub use codebook::{fixed_code_error, passes, threshold_decode, transmit_once, Codebook, Decoded};
pub use ensemble::{
    codebook_count, ensemble_error_enumerated, ensemble_error_factorized, ensemble_error_mc,
    random_code_ensemble_error, EnsembleMode, EnsembleOptions, DEFAULT_CODEBOOK_CAP,
};
pub use oracle::{code_count, exhaustive_code_oracle, EncoderSummary, OracleReport, DEFAULT_ORACLE_CAP};
pub use crate::spectra::TIE_TOLERANCE;
