//! The Feinstein-type achievability bound and the Verdú–Han-type converse bound.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::block::Block;
use crate::error::Result;
use crate::models::BlockLaw;
use crate::spectra::JointLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialMode {
    /// Bound evaluated on an exact joint law.
    Exact,
    ExactEnsemble,
    MonteCarlo,
    FixedCode,
}

impl TrialMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::ExactEnsemble => "exact_ensemble",
            Self::MonteCarlo => "monte_carlo",
            Self::FixedCode => "fixed_code",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Feinstein,
    Converse,
}

/// A bound evaluation, optionally paired with an error probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeTrialReport {
    pub kind: BoundKind,
    pub n: usize,
    pub gamma: f64,
    pub mode: TrialMode,
    /// `Pr{A_n <= B_n + γ}` (achievability) or `Pr{A_n <= B_n - γ}` (converse).
    pub prob_term: f64,
    pub exp_term: f64,
    /// Bound before clipping to `[0, 1]`.
    pub bound_raw: f64,
    pub bound: f64,
    pub epsilon: Option<f64>,
    /// 95% confidence half-width for Monte Carlo error estimates.
    pub half_width: Option<f64>,
    pub seed: Option<u64>,
    pub taint: Option<String>,
}

impl CodeTrialReport {
    /// Whether the error/bound relation required by the bound kind holds.
    pub fn certified(&self, tol: f64) -> Option<bool> {
        let eps = self.epsilon?;
        Some(match self.kind {
            BoundKind::Feinstein => eps <= self.bound + tol,
            BoundKind::Converse => eps + tol >= self.bound,
        })
    }

    /// One row of the bound CSV, no header.
    pub fn write_csv_row(&self, out: &mut String) {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.gamma,
            self.prob_term,
            self.exp_term,
            self.bound,
            opt(self.epsilon),
            self.mode.name(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.taint.as_deref().unwrap_or("")
        );
    }
}

pub const BOUND_CSV_HEADER: &str = "n,gamma,prob_term,exp_term,bound,epsilon,mode,seed,taint";

fn mode_of(joint: &JointLaw) -> (TrialMode, Option<u64>) {
    match joint.mode() {
        crate::spectra::SpectrumMode::Exact => (TrialMode::Exact, None),
        crate::spectra::SpectrumMode::MonteCarlo { seed, .. } => (TrialMode::MonteCarlo, Some(seed)),
    }
}

/// `Pr{A_n <= B_n + γ} + e^{-nγ}`, clipped to `[0, 1]`.
pub fn feinstein_bound(joint: &JointLaw, gamma: f64) -> CodeTrialReport {
    let n = joint.n();
    let prob_term = joint.prob_a_le_b_plus(gamma).clamp(0.0, 1.0);
    let exp_term = (-(n as f64) * gamma).exp();
    let raw = prob_term + exp_term;
    let (mode, seed) = mode_of(joint);
    CodeTrialReport {
        kind: BoundKind::Feinstein,
        n,
        gamma,
        mode,
        prob_term,
        exp_term,
        bound_raw: raw,
        bound: raw.clamp(0.0, 1.0),
        epsilon: None,
        half_width: None,
        seed,
        taint: joint.taint().map(Into::into),
    }
}

/// `Pr{A_n <= B_n - γ} - e^{-nγ}`, clipped at 0. The joint law must come from
/// a deterministic encoder with its exact induced output marginal.
pub fn verdu_han_bound(joint: &JointLaw, gamma: f64) -> CodeTrialReport {
    let n = joint.n();
    let prob_term = joint.prob_a_le_b_plus(-gamma).clamp(0.0, 1.0);
    let exp_term = (-(n as f64) * gamma).exp();
    let raw = prob_term - exp_term;
    let (mode, seed) = mode_of(joint);
    CodeTrialReport {
        kind: BoundKind::Converse,
        n,
        gamma,
        mode,
        prob_term,
        exp_term,
        bound_raw: raw,
        bound: raw.clamp(0.0, 1.0),
        epsilon: None,
        half_width: None,
        seed,
        taint: joint.taint().map(Into::into),
    }
}

/// Decoder `ψ_n` as an explicit table; outputs missing from the table decode
/// to no message and count as errors.
pub type DecoderTable = HashMap<Block, Block>;

/// `Pr{V^n != ψ_n(Y^n)}` for the encoder carried by `law` (deterministic).
pub fn code_error(law: &BlockLaw, decoder: &DecoderTable, cap: f64) -> Result<f64> {
    let mut correct = 0.0;
    for t in law.joint_support(cap)? {
        if decoder.get(&t.y) == Some(&t.v) {
            correct += t.log_prob.exp();
        }
    }
    Ok((1.0 - correct).clamp(0.0, 1.0))
}

/// Converse bound plus the exact error of the supplied decoder, if any.
pub fn verdu_han_with_code(
    law: &BlockLaw,
    joint: &JointLaw,
    decoder: Option<&DecoderTable>,
    gamma: f64,
    cap: f64,
) -> Result<CodeTrialReport> {
    let mut r = verdu_han_bound(joint, gamma);
    if let Some(d) = decoder {
        r.epsilon = Some(code_error(law, d, cap)?);
        r.mode = TrialMode::FixedCode;
    }
    Ok(r)
}

/// Maximum a posteriori decoder for a deterministic encoder; ties go to the
/// earliest source block in support order.
pub fn map_decoder(law: &BlockLaw, cap: f64) -> Result<DecoderTable> {
    let mut best: HashMap<Block, (f64, Block)> = HashMap::new();
    for t in law.joint_support(cap)? {
        let e = best.entry(t.y.clone()).or_insert((f64::NEG_INFINITY, t.v.clone()));
        if t.log_prob > e.0 {
            *e = (t.log_prob, t.v);
        }
    }
    Ok(best.into_iter().map(|(y, (_, v))| (y, v)).collect())
}
