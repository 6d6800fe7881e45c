//! Transmissibility and domination conditions evaluated on a block-length grid.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::schedule::validate_gamma;
use crate::error::{Error, Result};
use crate::models::JointModel;
use crate::spectra::{fmt_value, joint_law, ls_slope, upper_half, JointEval, JointLaw, TIE_TOLERANCE};

/// Default allowance on top of ε when judging the last grid point.
pub const DEFAULT_TREND_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// `Pr{A_n <= B_n + γ}`, the direct condition.
    Plus,
    /// `Pr{A_n <= B_n - γ}`, the converse condition.
    Minus,
}

/// `Pr{A_n <= B_n ± γ}` on a joint law.
pub fn condition_probability(joint: &JointLaw, gamma: f64, sign: Sign) -> f64 {
    let shift = match sign {
        Sign::Plus => gamma,
        Sign::Minus => -gamma,
    };
    joint.prob_a_le_b_plus(shift).clamp(0.0, 1.0)
}

/// [`condition_probability`] for a model at block length `n`.
pub fn condition_probability_at(
    model: &JointModel,
    n: usize,
    gamma: f64,
    sign: Sign,
    eval: &JointEval,
) -> Result<f64> {
    let joint = joint_law(&model.resolve(n)?, eval)?;
    Ok(condition_probability(&joint, gamma, sign))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    pub t: f64,
    /// `Pr{A_n >= t}`.
    pub upper_info: f64,
    /// `Pr{B_n >= t - γ}`.
    pub upper_entropy: f64,
    /// `Pr{A_n >= t} - (Pr{B_n >= t - γ} - 2√α_n)`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub n: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub rows: Vec<ShiftRow>,
    pub worst_slack: f64,
    pub worst_t: f64,
    /// Grid points where the slack is below `-TIE_TOLERANCE`.
    pub violations: Vec<f64>,
}

impl ShiftReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `points` equally spaced thresholds covering both spectra, plus every atom
/// of `A_n` and every atom of `B_n` shifted by `γ` (where the two upper CDFs jump).
pub fn default_t_grid(joint: &JointLaw, gamma: f64, points: usize) -> Vec<f64> {
    let info = joint.info_marginal();
    let entropy = joint.entropy_marginal();
    let mut ts: Vec<f64> = info
        .values()
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .chain(entropy.values().iter().map(|b| b + gamma))
        .collect();
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    if points > 1 && lo.is_finite() && hi.is_finite() {
        let step = (hi - lo) / (points - 1) as f64;
        ts.extend((0..points).map(|i| lo + step * i as f64));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Checks `Pr{A_n >= t} >= Pr{B_n >= t - γ} - 2√α_n` with
/// `α_n = Pr{A_n <= B_n + γ}` computed on the same law.
pub fn shift_property_check(joint: &JointLaw, gamma: f64, t_grid: &[f64]) -> ShiftReport {
    let alpha = condition_probability(joint, gamma, Sign::Plus);
    let info = joint.info_marginal();
    let entropy = joint.entropy_marginal();
    let allowance = 2.0 * alpha.sqrt();
    let mut report = ShiftReport {
        n: joint.n(),
        gamma,
        alpha,
        rows: Vec::with_capacity(t_grid.len()),
        worst_slack: f64::INFINITY,
        worst_t: f64::NAN,
        violations: Vec::new(),
    };
    for &t in t_grid {
        let p = info.upper_cdf(t);
        let q = entropy.upper_cdf(t - gamma);
        let slack = p - (q - allowance);
        if slack < report.worst_slack {
            report.worst_slack = slack;
            report.worst_t = t;
        }
        if slack < -TIE_TOLERANCE {
            report.violations.push(t);
        }
        report.rows.push(ShiftRow {
            t,
            upper_info: p,
            upper_entropy: q,
            slack,
        });
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SatisfiedTrend,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SatisfiedTrend => "satisfied-trend",
            Self::Violated => "violated",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// Judges a per-n quantity against `ε`.
///
/// Satisfied when the last value is at most `ε + tol` and the least-squares
/// slope over the upper half of the grid is not positive; violated when the
/// last value exceeds `ε + tol` and the slope is not negative.
pub fn trend_verdict(grid: &[usize], values: &[f64], epsilon: f64, tol: f64) -> (Verdict, f64) {
    let Some(&last) = values.last() else {
        return (Verdict::Inconclusive, 0.0);
    };
    let half = upper_half(values.len());
    let xs: Vec<f64> = grid[half.clone()].iter().map(|&n| n as f64).collect();
    let slope = ls_slope(&xs, &values[half]);
    let verdict = if last <= epsilon + tol && slope <= 0.0 {
        Verdict::SatisfiedTrend
    } else if last > epsilon + tol && slope >= 0.0 {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    (verdict, slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// `Pr{A_n <= B_n + γ_n}`.
    Direct,
    /// `Pr{A_n <= B_n - γ_n}`.
    Converse,
    /// `Pr{B_n >= c_n} + Pr{A_n <= c_n + γ_n}`.
    Strict,
    /// `Pr{B_n >= c_n} + Pr{A_n <= c_n - γ_n}`.
    Domination,
    /// `Pr{B_n >= c_n} · Pr{A_n <= c_n - γ_n}`.
    Product,
}

impl ConditionKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Converse => "converse",
            Self::Strict => "strict",
            Self::Domination => "domination",
            Self::Product => "product",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub n: usize,
    pub gamma: f64,
    pub c: Option<f64>,
    pub term1: f64,
    /// Absent for the direct and converse conditions.
    pub term2: Option<f64>,
    pub combined: f64,
    /// Evaluation mode of the joint law: `exact` or `monte_carlo`.
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub epsilon: f64,
    pub tolerance: f64,
    pub rows: Vec<ConditionRow>,
    pub verdict: Verdict,
    pub slope: f64,
}

pub const CONDITION_CSV_HEADER: &str = "n,gamma_n,c_n,term1,term2,combined,mode,verdict";

impl ConditionReport {
    pub fn grid(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.n).collect()
    }

    /// Rows of the condition CSV, no header. Every row carries the grid verdict.
    pub fn write_csv_rows(&self, out: &mut String) {
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.n,
                r.gamma,
                r.c.map(fmt_value).unwrap_or_default(),
                r.term1,
                r.term2.map(|t| t.to_string()).unwrap_or_default(),
                r.combined,
                r.mode,
                self.verdict.name()
            );
        }
    }

    fn finish(kind: ConditionKind, epsilon: f64, tolerance: f64, rows: Vec<ConditionRow>) -> Self {
        let grid: Vec<usize> = rows.iter().map(|r| r.n).collect();
        let values: Vec<f64> = rows.iter().map(|r| r.combined).collect();
        let (verdict, slope) = trend_verdict(&grid, &values, epsilon, tolerance);
        Self {
            kind,
            epsilon,
            tolerance,
            rows,
            verdict,
            slope,
        }
    }
}

/// Evaluates `kind` at one block length on an already computed joint law.
pub fn condition_row(joint: &JointLaw, kind: ConditionKind, gamma: f64, c: Option<f64>) -> Result<ConditionRow> {
    let n = joint.n();
    let mode = joint.mode().name().to_string();
    let (term1, term2, combined) = match kind {
        ConditionKind::Direct => {
            let p = condition_probability(joint, gamma, Sign::Plus);
            (p, None, p)
        }
        ConditionKind::Converse => {
            let p = condition_probability(joint, gamma, Sign::Minus);
            (p, None, p)
        }
        ConditionKind::Strict | ConditionKind::Domination | ConditionKind::Product => {
            let c = c.ok_or_else(|| Error::ScheduleInvalid("split condition needs c_n".into()))?;
            let source_tail = joint.entropy_marginal().upper_cdf(c - TIE_TOLERANCE).clamp(0.0, 1.0);
            let t = if kind == ConditionKind::Strict { c + gamma } else { c - gamma };
            let channel_head = joint.info_marginal().cdf(t + TIE_TOLERANCE).clamp(0.0, 1.0);
            let combined = if kind == ConditionKind::Product {
                source_tail * channel_head
            } else {
                (source_tail + channel_head).min(2.0)
            };
            (source_tail, Some(channel_head), combined)
        }
    };
    Ok(ConditionRow {
        n,
        gamma,
        c,
        term1,
        term2,
        combined,
        mode,
    })
}

/// Direct or converse condition over a grid.
pub fn transmissibility_check(
    model: &JointModel,
    grid: &[usize],
    gammas: &[f64],
    sign: Sign,
    epsilon: f64,
    tolerance: f64,
    eval: &JointEval,
) -> Result<ConditionReport> {
    validate_gamma(grid, gammas)?;
    let kind = match sign {
        Sign::Plus => ConditionKind::Direct,
        Sign::Minus => ConditionKind::Converse,
    };
    let rows = grid
        .iter()
        .zip(gammas)
        .map(|(&n, &g)| condition_row(&joint_law(&model.resolve(n)?, eval)?, kind, g, None))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionReport::finish(kind, epsilon, tolerance, rows))
}

/// Split-spectrum condition at `c_n` over a grid; `kind` must be
/// [`ConditionKind::Strict`], [`ConditionKind::Domination`] or [`ConditionKind::Product`].
#[allow(clippy::too_many_arguments)]
pub fn domination_check(
    model: &JointModel,
    grid: &[usize],
    cs: &[f64],
    gammas: &[f64],
    kind: ConditionKind,
    epsilon: f64,
    tolerance: f64,
    eval: &JointEval,
) -> Result<ConditionReport> {
    validate_gamma(grid, gammas)?;
    if cs.len() != grid.len() {
        return Err(Error::ScheduleInvalid(format!(
            "{} split points for a grid of {} points",
            cs.len(),
            grid.len()
        )));
    }
    if matches!(kind, ConditionKind::Direct | ConditionKind::Converse) {
        return Err(Error::InvalidParameter(format!("{} is not a split condition", kind.name())));
    }
    let rows = grid
        .iter()
        .zip(gammas)
        .zip(cs)
        .map(|((&n, &g), &c)| condition_row(&joint_law(&model.resolve(n)?, eval)?, kind, g, Some(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionReport::finish(kind, epsilon, tolerance, rows))
}
