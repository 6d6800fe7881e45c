//! Separation verdict: compare `R_f` with `C` and, when they cross, ask for a converse property.

use serde::{Deserialize, Serialize};

use crate::analysis::conditions::{domination_check, ConditionKind, ConditionReport, DEFAULT_TREND_TOLERANCE};
use crate::analysis::converse::{converse_property_diagnostic, ConverseDiagnostic, ConverseMode, DEFAULT_GAP_TOLERANCE};
use crate::analysis::functionals::{spectral_functionals, Functionals, InputCandidate, SpectraSet};
use crate::analysis::schedule::GammaSchedule;
use crate::error::Result;
use crate::models::{ChannelModel, JointModel, SourceModel};
use crate::spectra::{ExactOptions, JointEval, DEFAULT_DELTA};

/// Rate estimates closer than this are treated as equal.
const RATE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationOutcome {
    Transmissible,
    NotTransmissible,
    Inconclusive,
}

impl SeparationOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Transmissible => "transmissible",
            Self::NotTransmissible => "not_transmissible",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationOptions {
    pub delta: f64,
    pub eval: JointEval,
    /// Diagnostics consulted when `R_f > C`; any single pass suffices.
    pub converse: Vec<ConverseMode>,
    pub gap_tolerance: f64,
    /// Run the strict split condition at the midpoint when `R_f < C`.
    pub confirm: bool,
    pub gamma: GammaSchedule,
    pub trend_tolerance: f64,
    pub ba_tol: f64,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            eval: JointEval::Auto {
                exact: ExactOptions::default(),
                samples: 100_000,
                seed: 0,
            },
            converse: vec![ConverseMode::SourceStrong, ConverseMode::ChannelStrong],
            gap_tolerance: DEFAULT_GAP_TOLERANCE,
            confirm: true,
            gamma: GammaSchedule::InverseSqrt,
            trend_tolerance: DEFAULT_TREND_TOLERANCE,
            ba_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub outcome: SeparationOutcome,
    pub r_f: f64,
    pub capacity: f64,
    pub capacity_lower_bound: bool,
    pub best_candidate: String,
    /// `½(R_f + C)`, reported when `R_f < C`.
    pub c_midpoint: Option<f64>,
    pub confirmation: Option<ConditionReport>,
    pub diagnostics: Vec<ConverseDiagnostic>,
    pub functionals: Functionals,
    pub note: String,
}

pub fn separation_verdict(
    source: &SourceModel,
    channel: &ChannelModel,
    candidates: &[InputCandidate],
    grid: &[usize],
    opts: &SeparationOptions,
) -> Result<SeparationReport> {
    let set = SpectraSet::compute(source, channel, candidates, grid, &opts.eval, opts.ba_tol)?;
    separation_verdict_on(&set, source, channel, candidates, opts)
}

/// [`separation_verdict`] on spectra that were already computed.
pub fn separation_verdict_on(
    set: &SpectraSet,
    source: &SourceModel,
    channel: &ChannelModel,
    candidates: &[InputCandidate],
    opts: &SeparationOptions,
) -> Result<SeparationReport> {
    let f = spectral_functionals(set, opts.delta)?;
    let mut report = SeparationReport {
        outcome: SeparationOutcome::Inconclusive,
        r_f: f.r_f,
        capacity: f.capacity,
        capacity_lower_bound: f.capacity_lower_bound,
        best_candidate: f.best_candidate.clone(),
        c_midpoint: None,
        confirmation: None,
        diagnostics: Vec::new(),
        functionals: f.clone(),
        note: String::from(
            "capacity estimate is the smallest information quantile over the full grid; \
             oscillating families show per-subsequence values in the diagnostics",
        ),
    };
    if f.r_f < f.capacity - RATE_MARGIN {
        let c = f.midpoint();
        report.outcome = SeparationOutcome::Transmissible;
        report.c_midpoint = Some(c);
        if opts.confirm && set.grid.len() >= 2 {
            let coupling = candidates
                .iter()
                .find(|k| k.label == f.best_candidate)
                .map(|k| k.coupling.clone());
            let coupling = match coupling {
                Some(k) => k,
                // The appended capacity-achieving input.
                None => crate::models::InputCoupling::ba_optimal(channel, opts.ba_tol)?,
            };
            let model = JointModel::new(source.clone(), coupling, channel.clone());
            let gammas = opts.gamma.sweep_values(&set.grid)?;
            report.confirmation = Some(domination_check(
                &model,
                &set.grid,
                &vec![c; set.grid.len()],
                &gammas,
                ConditionKind::Strict,
                0.0,
                opts.trend_tolerance,
                &opts.eval,
            )?);
        }
    } else if f.r_f > f.capacity + RATE_MARGIN {
        for mode in &opts.converse {
            report
                .diagnostics
                .push(converse_property_diagnostic(set, mode, opts.delta, opts.gap_tolerance)?);
        }
        if report.diagnostics.iter().any(|d| d.passes) {
            report.outcome = SeparationOutcome::NotTransmissible;
        } else {
            report.note = format!(
                "rate exceeds capacity but no converse property was confirmed; \
                 transmission may still succeed. {}",
                report.note
            );
        }
    }
    Ok(report)
}
