//! Estimates of `R_f = H̄(V)` and `C = sup_X I̲(X; Y)` from spectra on a grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::capacity::dmc_capacity;
use crate::error::{Error, Result};
use crate::models::{ChannelModel, InputCoupling, JointModel, SourceModel};
use crate::spectra::{entropy_spectrum, information_spectrum, JointEval, SpectralSummary, Spectrum};

/// Label of the capacity-achieving i.i.d. input added for memoryless channels.
pub const BA_LABEL: &str = "ba_optimal";

/// A declared channel input, possibly correlated with the source.
#[derive(Debug, Clone, PartialEq)]
pub struct InputCandidate {
    pub label: String,
    pub coupling: InputCoupling,
}

impl InputCandidate {
    pub fn new(label: impl Into<String>, coupling: InputCoupling) -> Self {
        Self {
            label: label.into(),
            coupling,
        }
    }
}

/// Entropy spectra of the source and information spectra of every candidate
/// input, one per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraSet {
    pub grid: Vec<usize>,
    pub source: Vec<Spectrum>,
    pub candidates: Vec<(String, Vec<Spectrum>)>,
    /// Blahut–Arimoto capacity when the channel is memoryless.
    pub dmc_capacity: Option<f64>,
}

fn with_seed_offset(eval: &JointEval, offset: u64) -> JointEval {
    let mut e = eval.clone();
    match &mut e {
        JointEval::MonteCarlo { seed, .. } | JointEval::Auto { seed, .. } => {
            *seed = seed.wrapping_add(offset)
        }
        JointEval::Exact(_) => {}
    }
    e
}

impl SpectraSet {
    /// Evaluates every spectrum; grid points run in parallel. For memoryless
    /// channels the capacity-achieving i.i.d. input is appended unless a
    /// candidate already carries [`BA_LABEL`]. Candidate `k` draws Monte Carlo
    /// samples from `seed + k + 1`.
    pub fn compute(
        source: &SourceModel,
        channel: &ChannelModel,
        candidates: &[InputCandidate],
        grid: &[usize],
        eval: &JointEval,
        ba_tol: f64,
    ) -> Result<Self> {
        let mut cands = candidates.to_vec();
        let mut capacity = None;
        if let Some(kernel) = channel.per_letter() {
            let cap = dmc_capacity(kernel.rows(), ba_tol)?;
            capacity = Some(cap.capacity);
            if !cands.iter().any(|c| c.label == BA_LABEL) {
                cands.push(InputCandidate::new(BA_LABEL, InputCoupling::independent(cap.input)?));
            }
        }
        if cands.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        let source_spectra = grid
            .par_iter()
            .map(|&n| entropy_spectrum(&source.resolve(n)?, n, eval))
            .collect::<Result<Vec<_>>>()?;
        let mut cand_spectra = Vec::with_capacity(cands.len());
        for (k, c) in cands.iter().enumerate() {
            let model = JointModel::new(source.clone(), c.coupling.clone(), channel.clone());
            let e = with_seed_offset(eval, k as u64 + 1);
            let spectra = grid
                .par_iter()
                .map(|&n| information_spectrum(&model.resolve(n)?, &e))
                .collect::<Result<Vec<_>>>()?;
            cand_spectra.push((c.label.clone(), spectra));
        }
        Ok(Self {
            grid: grid.to_vec(),
            source: source_spectra,
            candidates: cand_spectra,
            dmc_capacity: capacity,
        })
    }

    /// Indices of grid points that belong to `members`.
    pub(crate) fn select(&self, members: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.grid.len()).filter(|&i| members(self.grid[i])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub label: String,
    pub summary: SpectralSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub delta: f64,
    pub grid: Vec<usize>,
    pub source: SpectralSummary,
    pub candidates: Vec<CandidateSummary>,
    /// `H̄` proxy.
    pub r_f: f64,
    /// Largest `I̲` proxy over the candidates.
    pub capacity: f64,
    pub best_candidate: String,
    /// Set unless the channel is memoryless, where the i.i.d. optimum is available.
    pub capacity_lower_bound: bool,
    pub dmc_capacity: Option<f64>,
}

impl Functionals {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.r_f + self.capacity)
    }
}

/// p-lim proxies for the source and every candidate at quantile level `δ`.
pub fn spectral_functionals(set: &SpectraSet, delta: f64) -> Result<Functionals> {
    if set.candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let source = SpectralSummary::new(delta, set.grid.clone()).with_entropy(&set.source)?;
    let candidates = set
        .candidates
        .iter()
        .map(|(label, spectra)| {
            Ok(CandidateSummary {
                label: label.clone(),
                summary: SpectralSummary::new(delta, set.grid.clone()).with_information(spectra)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let r_f = source.h_bar.as_ref().expect("entropy filled").estimate;
    let (best, capacity) = candidates
        .iter()
        .map(|c| (c.label.clone(), c.summary.i_under.as_ref().expect("information filled").estimate))
        .fold((String::new(), f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(Functionals {
        delta,
        grid: set.grid.clone(),
        source,
        candidates,
        r_f,
        capacity,
        best_candidate: best,
        capacity_lower_bound: set.dmc_capacity.is_none(),
        dmc_capacity: set.dmc_capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::ExactOptions;

    #[test]
    fn fair_coin_rate() {
        let set = SpectraSet::compute(
            &SourceModel::bernoulli(0.5).unwrap(),
            &ChannelModel::bsc(0.1).unwrap(),
            &[],
            &[8, 16, 32, 64],
            &JointEval::Exact(ExactOptions::default()),
            1e-10,
        )
        .unwrap();
        let f = spectral_functionals(&set, 1e-3).unwrap();
        assert!((f.r_f - 2f64.ln()).abs() < 1e-12);
        assert_eq!(f.best_candidate, BA_LABEL);
        assert!(!f.capacity_lower_bound);
        let h = 0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln();
        assert!((f.dmc_capacity.unwrap() - (2f64.ln() + h)).abs() < 1e-9);
    }

    #[test]
    fn empty_candidates() {
        let r = SpectraSet::compute(
            &SourceModel::alternating(),
            &ChannelModel::alternating(),
            &[],
            &[1, 2],
            &JointEval::default(),
            1e-10,
        );
        assert_eq!(r.unwrap_err(), Error::EmptyCandidates);
    }
}
