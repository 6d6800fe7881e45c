//! Finite-grid diagnostics for the strong, semi-strong and information-stability properties.

use serde::{Deserialize, Serialize};

use crate::analysis::conditions::{trend_verdict, Verdict};
use crate::analysis::functionals::{spectral_functionals, SpectraSet};
use crate::error::{Error, Result};
use crate::spectra::{estimate_from_trajectory, PlimKind, Spectrum};

/// Default allowance when comparing two p-lim proxies.
pub const DEFAULT_GAP_TOLERANCE: f64 = 0.02;
/// Default relative deviation for the stability ratio.
pub const DEFAULT_ETA: f64 = 0.1;

/// A subsequence of the grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsequence {
    Even,
    Odd,
    /// Explicit block lengths; those missing from the grid are ignored.
    List(Vec<usize>),
}

impl Subsequence {
    pub fn name(&self) -> String {
        match self {
            Self::Even => "even".into(),
            Self::Odd => "odd".into(),
            Self::List(ns) => format!("{ns:?}"),
        }
    }

    pub fn contains(&self, n: usize) -> bool {
        match self {
            Self::Even => n % 2 == 0,
            Self::Odd => n % 2 == 1,
            Self::List(ns) => ns.contains(&n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityTarget {
    Source,
    Channel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ConverseMode {
    /// `H̄ - H̲` proxy within tolerance of zero.
    SourceStrong,
    /// `sup Ī - sup I̲` proxy over the candidates within tolerance of zero.
    ChannelStrong,
    /// The `H̄` proxy on every subsequence matches the full-grid proxy.
    SemiStrongSource { subsequences: Vec<Subsequence> },
    /// The `I̲` proxy on every subsequence, for every candidate, stays below
    /// the full-grid capacity estimate.
    SemiStrongChannel { subsequences: Vec<Subsequence> },
    /// `Pr{|density / normalizer - 1| > η}` decreasing to zero.
    InfoStability { target: StabilityTarget, eta: f64 },
}

impl ConverseMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SourceStrong => "source_strong",
            Self::ChannelStrong => "channel_strong",
            Self::SemiStrongSource { .. } => "semi_strong_source",
            Self::SemiStrongChannel { .. } => "semi_strong_channel",
            Self::InfoStability { .. } => "info_stability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsequenceRow {
    pub label: String,
    pub subsequence: String,
    pub grid: Vec<usize>,
    pub estimate: f64,
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub label: String,
    pub n: usize,
    /// `H_n` or `C_n` used to normalize the density.
    pub normalizer: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseDiagnostic {
    pub mode: String,
    pub passes: bool,
    pub gap: Option<f64>,
    pub subsequences: Vec<SubsequenceRow>,
    pub stability: Vec<StabilityRow>,
    pub tolerance: f64,
}

impl ConverseDiagnostic {
    fn new(mode: &ConverseMode, tolerance: f64) -> Self {
        Self {
            mode: mode.name().into(),
            passes: false,
            gap: None,
            subsequences: Vec::new(),
            stability: Vec::new(),
            tolerance,
        }
    }
}

/// p-lim proxy on a subset of grid indices.
fn sub_proxy(set: &SpectraSet, spectra: &[Spectrum], idx: &[usize], kind: PlimKind, delta: f64) -> Result<f64> {
    let q = match kind {
        PlimKind::PLimsup => 1.0 - delta,
        PlimKind::PLiminf => delta,
    };
    let traj = idx.iter().map(|&i| spectra[i].mid_quantile(q)).collect::<Result<Vec<_>>>()?;
    let grid = idx.iter().map(|&i| set.grid[i]).collect();
    Ok(estimate_from_trajectory(kind, delta, grid, traj).estimate)
}

/// Mass of `|x / norm - 1| > η`. A zero normalizer counts every nonzero value
/// as a deviation.
fn deviation(s: &Spectrum, norm: f64, eta: f64) -> f64 {
    s.atoms()
        .filter(|(x, _)| {
            if norm == 0.0 {
                *x != 0.0
            } else {
                !((x / norm - 1.0).abs() <= eta)
            }
        })
        .map(|(_, m)| m)
        .sum()
}

pub fn converse_property_diagnostic(
    set: &SpectraSet,
    mode: &ConverseMode,
    delta: f64,
    tolerance: f64,
) -> Result<ConverseDiagnostic> {
    let f = spectral_functionals(set, delta)?;
    let mut d = ConverseDiagnostic::new(mode, tolerance);
    match mode {
        ConverseMode::SourceStrong => {
            let gap = f.r_f - f.source.h_under.as_ref().expect("entropy filled").estimate;
            d.gap = Some(gap);
            d.passes = gap <= tolerance;
        }
        ConverseMode::ChannelStrong => {
            let sup_bar = f
                .candidates
                .iter()
                .map(|c| c.summary.i_bar.as_ref().expect("information filled").estimate)
                .fold(f64::NEG_INFINITY, f64::max);
            let gap = sup_bar - f.capacity;
            d.gap = Some(gap);
            d.passes = gap <= tolerance;
        }
        ConverseMode::SemiStrongSource { subsequences } | ConverseMode::SemiStrongChannel { subsequences } => {
            let source_side = matches!(mode, ConverseMode::SemiStrongSource { .. });
            d.passes = true;
            for sub in subsequences {
                let idx = set.select(|n| sub.contains(n));
                if idx.is_empty() {
                    return Err(Error::SubsequenceEmpty(sub.name()));
                }
                let grid: Vec<usize> = idx.iter().map(|&i| set.grid[i]).collect();
                if source_side {
                    let est = sub_proxy(set, &set.source, &idx, PlimKind::PLimsup, delta)?;
                    d.passes &= (est - f.r_f).abs() <= tolerance;
                    d.subsequences.push(SubsequenceRow {
                        label: "source".into(),
                        subsequence: sub.name(),
                        grid,
                        estimate: est,
                        reference: f.r_f,
                    });
                } else {
                    for (label, spectra) in &set.candidates {
                        let est = sub_proxy(set, spectra, &idx, PlimKind::PLiminf, delta)?;
                        d.passes &= est <= f.capacity + tolerance;
                        d.subsequences.push(SubsequenceRow {
                            label: label.clone(),
                            subsequence: sub.name(),
                            grid: grid.clone(),
                            estimate: est,
                            reference: f.capacity,
                        });
                    }
                }
            }
        }
        ConverseMode::InfoStability { target, eta } => match target {
            StabilityTarget::Source => {
                let mut probs = Vec::new();
                for (s, &n) in set.source.iter().zip(&set.grid) {
                    let h = s.mean();
                    let p = deviation(s, h, *eta);
                    probs.push(p);
                    d.stability.push(StabilityRow {
                        label: "source".into(),
                        n,
                        normalizer: h,
                        deviation: p,
                    });
                }
                d.passes = trend_verdict(&set.grid, &probs, 0.0, tolerance).0 == Verdict::SatisfiedTrend;
            }
            StabilityTarget::Channel => {
                // C_n from the memoryless optimum, else the best candidate mean
                // (a lower bound on the true C_n).
                let c_n: Vec<f64> = (0..set.grid.len())
                    .map(|i| {
                        set.dmc_capacity.unwrap_or_else(|| {
                            set.candidates
                                .iter()
                                .map(|(_, sp)| sp[i].mean())
                                .filter(|m| m.is_finite())
                                .fold(0.0, f64::max)
                        })
                    })
                    .collect();
                d.passes = false;
                for (label, spectra) in &set.candidates {
                    let mut probs = Vec::new();
                    for ((s, &n), &c) in spectra.iter().zip(&set.grid).zip(&c_n) {
                        let p = deviation(s, c, *eta);
                        probs.push(p);
                        d.stability.push(StabilityRow {
                            label: label.clone(),
                            n,
                            normalizer: c,
                            deviation: p,
                        });
                    }
                    d.passes |= trend_verdict(&set.grid, &probs, 0.0, tolerance).0 == Verdict::SatisfiedTrend;
                }
            }
        },
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::functionals::InputCandidate;
    use crate::models::{ChannelModel, InputCoupling, SourceModel};
    use crate::spectra::{ExactOptions, JointEval};

    fn alternating_set() -> SpectraSet {
        SpectraSet::compute(
            &SourceModel::alternating(),
            &ChannelModel::alternating(),
            &[InputCandidate::new("identity", InputCoupling::identity())],
            &[1, 2, 3, 4, 5, 6, 7, 8],
            &JointEval::Exact(ExactOptions::default()),
            1e-10,
        )
        .unwrap()
    }

    #[test]
    fn alternating_fails_every_strong_form() {
        let set = alternating_set();
        for mode in [ConverseMode::SourceStrong, ConverseMode::ChannelStrong] {
            let d = converse_property_diagnostic(&set, &mode, 1e-3, DEFAULT_GAP_TOLERANCE).unwrap();
            assert!(!d.passes, "{}", d.mode);
            assert!((d.gap.unwrap() - 2f64.ln()).abs() < 1e-12);
        }
        let semi = ConverseMode::SemiStrongSource {
            subsequences: vec![Subsequence::Even, Subsequence::Odd],
        };
        let d = converse_property_diagnostic(&set, &semi, 1e-3, DEFAULT_GAP_TOLERANCE).unwrap();
        assert!(!d.passes);
        assert!((d.subsequences[0].estimate - 2f64.ln()).abs() < 1e-12);
        assert_eq!(d.subsequences[1].estimate, 0.0);
    }

    #[test]
    fn empty_subsequence() {
        let set = alternating_set();
        let mode = ConverseMode::SemiStrongSource {
            subsequences: vec![Subsequence::List(vec![100])],
        };
        assert!(matches!(
            converse_property_diagnostic(&set, &mode, 1e-3, 0.02),
            Err(Error::SubsequenceEmpty(_))
        ));
    }

    #[test]
    fn iid_source_is_stable() {
        let set = SpectraSet::compute(
            &SourceModel::bernoulli(0.3).unwrap(),
            &ChannelModel::bsc(0.1).unwrap(),
            &[],
            &[64, 128, 256, 512, 1024],
            &JointEval::Exact(ExactOptions::default()),
            1e-10,
        )
        .unwrap();
        let d = converse_property_diagnostic(
            &set,
            &ConverseMode::InfoStability {
                target: StabilityTarget::Source,
                eta: DEFAULT_ETA,
            },
            1e-3,
            DEFAULT_GAP_TOLERANCE,
        )
        .unwrap();
        assert!(d.passes);
        let d = converse_property_diagnostic(&set, &ConverseMode::SourceStrong, 1e-3, DEFAULT_GAP_TOLERANCE).unwrap();
        assert!(d.passes, "gap {:?}", d.gap);
    }
}
