//! Condition checks, proof machinery, spectral functionals and verdicts on finite grids.

pub mod capacity;
mod conditions;
mod converse;
mod extract;
mod functionals;
mod schedule;
mod verdict;

pub use capacity::{dmc_capacity, Capacity};
pub use conditions::{
    condition_probability, condition_probability_at, condition_row, default_t_grid, domination_check,
    shift_property_check, transmissibility_check, trend_verdict, ConditionKind, ConditionReport,
    ConditionRow, ShiftReport, ShiftRow, Sign, Verdict, CONDITION_CSV_HEADER, DEFAULT_TREND_TOLERANCE,
};
pub use converse::{
    converse_property_diagnostic, ConverseDiagnostic, ConverseMode, StabilityRow, StabilityTarget,
    Subsequence, SubsequenceRow, DEFAULT_ETA, DEFAULT_GAP_TOLERANCE,
};
pub use extract::{extract_separation_point, SeparationExtract};
pub use functionals::{
    spectral_functionals, CandidateSummary, Functionals, InputCandidate, SpectraSet, BA_LABEL,
};
pub use schedule::{validate_gamma, validate_grid, CSchedule, GammaSchedule};
pub use verdict::{
    separation_verdict, separation_verdict_on, SeparationOptions, SeparationOutcome, SeparationReport,
};
