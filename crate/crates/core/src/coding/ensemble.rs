//! Average error of the random-code ensemble under the threshold decoder.

use serde::{Deserialize, Serialize};

use crate::block::{space_size, Block, Words};
use crate::coding::bounds::{feinstein_bound, CodeTrialReport, TrialMode};
use crate::coding::codebook::{density_or_sentinel, fixed_code_error, passes, transmit_once, Codebook};
use crate::error::{Error, Result};
use crate::models::BlockLaw;
use crate::rng::domain;
use crate::spectra::{exact_joint_law, sample_chunks, ExactOptions};

/// Default cap on enumerated codebooks.
pub const DEFAULT_CODEBOOK_CAP: f64 = 2e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EnsembleMode {
    /// Enumerate every codebook, weighted by its generation probability.
    ExactEnumeration,
    /// Exact average through per-candidate pass probabilities; see
    /// [`ensemble_error_factorized`].
    ExactFactorized,
    /// Enumeration when within the codebook cap, otherwise factorized.
    Exact,
    MonteCarlo { budget: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    pub codebook_cap: f64,
    /// Cap on `(v, x, y)` work for exact scoring.
    pub enumeration_cap: f64,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            codebook_cap: DEFAULT_CODEBOOK_CAP,
            enumeration_cap: 1e7,
        }
    }
}

/// Per-`v` input alternatives `(x, P(x|v))`.
fn alternatives(law: &BlockLaw, support: &[(Block, f64)], cap: f64) -> Result<Vec<Vec<(Block, f64)>>> {
    support
        .iter()
        .map(|(v, _)| {
            Ok(law
                .coupling
                .support(v, law.n, cap)?
                .into_iter()
                .map(|(x, lx)| (x, lx.exp()))
                .collect())
        })
        .collect()
}

/// Number of codebooks, `Π_v |supp P(·|v)|`.
pub fn codebook_count(law: &BlockLaw, cap: f64) -> Result<f64> {
    let support = law.source.support(cap)?;
    Ok(alternatives(law, &support, cap)?
        .iter()
        .map(|a| a.len() as f64)
        .product())
}

/// Exact `ε̄_n` by enumerating all codebooks.
pub fn ensemble_error_enumerated(law: &BlockLaw, gamma: f64, opts: &EnsembleOptions) -> Result<f64> {
    let support = law.source.support(opts.enumeration_cap)?;
    let alts = alternatives(law, &support, opts.enumeration_cap)?;
    let count: f64 = alts.iter().map(|a| a.len() as f64).product();
    if count > opts.codebook_cap {
        return Err(Error::CapExceeded {
            what: "codebooks",
            size: count,
            cap: opts.codebook_cap,
        });
    }
    let radices: Vec<usize> = alts.iter().map(Vec::len).collect();
    let mut digits = vec![0usize; radices.len()];
    let mut total = 0.0;
    loop {
        let mut weight = 1.0;
        let entries = support
            .iter()
            .zip(&alts)
            .zip(&digits)
            .map(|(((v, lp), a), &d)| {
                weight *= a[d].1;
                (v.clone(), *lp, a[d].0.clone())
            })
            .collect();
        if weight > 0.0 {
            total += weight * fixed_code_error(&Codebook::from_entries(law.n, entries), law, gamma);
        }
        // Mixed-radix increment.
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(total.clamp(0.0, 1.0));
            }
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Exact `ε̄_n` without enumerating codebooks.
///
/// Codewords are drawn independently, so given the transmitted `v`, its
/// codeword `x` and the output `y`, each competitor `v'` passes the threshold
/// independently with probability `π(v', y) = Σ_x' P(x'|v') 1{pass}`. The
/// decoder is correct iff `v` passes and no competitor does:
/// `1 - ε̄ = Σ_v P(v) Σ_x P(x|v) Σ_y W(y|x) 1{pass(v,x,y)} Π_{v'≠v} (1 - π(v', y))`.
pub fn ensemble_error_factorized(law: &BlockLaw, gamma: f64, opts: &EnsembleOptions) -> Result<f64> {
    let cap = opts.enumeration_cap;
    let support = law.source.support(cap)?;
    let alts = alternatives(law, &support, cap)?;
    let ys = space_size(law.channel.outputs, law.n);
    let work = ys * alts.iter().map(|a| a.len() as f64).sum::<f64>();
    if work > cap {
        return Err(Error::CapExceeded {
            what: "ensemble scoring",
            size: work,
            cap,
        });
    }
    let n = law.n as f64;
    let mut correct = 0.0;
    let m = support.len();
    let mut pi = vec![0.0; m];
    let mut pass_tab: Vec<Vec<bool>> = alts.iter().map(|a| vec![false; a.len()]).collect();
    let mut prefix = vec![1.0; m + 1];
    let mut suffix = vec![1.0; m + 1];
    for y in Words::new(law.channel.outputs, law.n) {
        let log_py = law.log_py(&y);
        for (k, ((_, lp), a)) in support.iter().zip(&alts).enumerate() {
            let b = -lp / n;
            pi[k] = 0.0;
            for (j, (x, px)) in a.iter().enumerate() {
                let p = passes(density_or_sentinel(law, x, &y, log_py), b, gamma);
                pass_tab[k][j] = p;
                if p {
                    pi[k] += px;
                }
            }
        }
        for k in 0..m {
            prefix[k + 1] = prefix[k] * (1.0 - pi[k]);
        }
        for k in (0..m).rev() {
            suffix[k] = suffix[k + 1] * (1.0 - pi[k]);
        }
        for (k, ((_, lp), a)) in support.iter().zip(&alts).enumerate() {
            let others = prefix[k] * suffix[k + 1];
            if others == 0.0 {
                continue;
            }
            let mut hit = 0.0;
            for (j, (x, px)) in a.iter().enumerate() {
                if pass_tab[k][j] {
                    hit += px * law.log_w(x, &y).exp();
                }
            }
            correct += lp.exp() * hit * others;
        }
    }
    Ok((1.0 - correct).clamp(0.0, 1.0))
}

/// Ensemble-average error with the Feinstein bound alongside. In exact modes
/// the report is certified against the bound by the caller via
/// [`CodeTrialReport::certified`].
pub fn random_code_ensemble_error(
    law: &BlockLaw,
    gamma: f64,
    mode: EnsembleMode,
    opts: &EnsembleOptions,
) -> Result<CodeTrialReport> {
    let joint = exact_joint_law(
        law,
        &ExactOptions {
            enumeration_cap: opts.enumeration_cap,
            ..Default::default()
        },
    )?;
    let mut report = feinstein_bound(&joint, gamma);
    match mode {
        EnsembleMode::ExactEnumeration => {
            report.epsilon = Some(ensemble_error_enumerated(law, gamma, opts)?);
        }
        EnsembleMode::ExactFactorized => {
            report.epsilon = Some(ensemble_error_factorized(law, gamma, opts)?);
        }
        EnsembleMode::Exact => {
            let e = if codebook_count(law, opts.enumeration_cap)? <= opts.codebook_cap {
                ensemble_error_enumerated(law, gamma, opts)?
            } else {
                ensemble_error_factorized(law, gamma, opts)?
            };
            report.epsilon = Some(e);
        }
        EnsembleMode::MonteCarlo { budget, seed } => {
            let (mean, hw) = ensemble_error_mc(law, gamma, budget, seed, opts)?;
            report.epsilon = Some(mean);
            report.half_width = Some(hw);
            report.seed = Some(seed);
            report.mode = TrialMode::MonteCarlo;
            return Ok(report);
        }
    }
    report.mode = TrialMode::ExactEnsemble;
    Ok(report)
}

/// Mean error over `budget` sampled codebooks and its 95% half-width. Each
/// codebook is scored exactly when `|support| · |Y^n|` is within the cap,
/// otherwise by one simulated transmission.
pub fn ensemble_error_mc(
    law: &BlockLaw,
    gamma: f64,
    budget: usize,
    seed: u64,
    opts: &EnsembleOptions,
) -> Result<(f64, f64)> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let support = law.source.support(opts.enumeration_cap)?;
    let exact_scoring =
        support.len() as f64 * space_size(law.channel.outputs, law.n) <= opts.enumeration_cap;
    let scores = sample_chunks(budget, seed, domain::at(domain::CODEBOOK, law.n), |rng| {
        let book = Codebook::sample(law, &support, rng)?;
        Ok(if exact_scoring {
            fixed_code_error(&book, law, gamma)
        } else if transmit_once(&book, law, gamma, rng) {
            1.0
        } else {
            0.0
        })
    })?;
    let k = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / k;
    let var = if scores.len() > 1 {
        scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok((mean, 1.96 * (var / k).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ChannelModel, InputCoupling, JointModel, MessageSchedule, SourceModel};

    fn law(source: SourceModel, coupling: InputCoupling, channel: ChannelModel, n: usize) -> BlockLaw {
        JointModel::new(source, coupling, channel).resolve(n).unwrap()
    }

    #[test]
    fn collision_probability() {
        let l = law(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::uniform(4).unwrap(),
            ChannelModel::identity(4).unwrap(),
            1,
        );
        let o = EnsembleOptions::default();
        let e = ensemble_error_enumerated(&l, 0.3, &o).unwrap();
        assert!((e - 0.25).abs() < 1e-15);
        let f = ensemble_error_factorized(&l, 0.3, &o).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
        let r = random_code_ensemble_error(&l, 0.3, EnsembleMode::Exact, &o).unwrap();
        assert!((r.bound - 0.7408).abs() < 1e-4);
        assert_eq!(r.certified(1e-10), Some(true));
    }

    #[test]
    fn single_message_never_errs() {
        let l = law(
            SourceModel::uniform_message(MessageSchedule::Constant(1)).unwrap(),
            InputCoupling::uniform(4).unwrap(),
            ChannelModel::identity(4).unwrap(),
            1,
        );
        let o = EnsembleOptions::default();
        assert_eq!(codebook_count(&l, 1e6).unwrap(), 4.0);
        assert_eq!(ensemble_error_enumerated(&l, 0.3, &o).unwrap(), 0.0);
    }

    #[test]
    fn identity_map_never_passes() {
        let l = law(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::identity(),
            ChannelModel::identity(2).unwrap(),
            2,
        );
        let o = EnsembleOptions::default();
        assert_eq!(ensemble_error_enumerated(&l, 0.1, &o).unwrap(), 1.0);
    }

    #[test]
    fn monte_carlo_brackets_exact() {
        let l = law(
            SourceModel::bernoulli(0.3).unwrap(),
            InputCoupling::uniform(2).unwrap(),
            ChannelModel::bsc(0.1).unwrap(),
            2,
        );
        let o = EnsembleOptions::default();
        let exact = ensemble_error_factorized(&l, 0.1, &o).unwrap();
        let (mean, hw) = ensemble_error_mc(&l, 0.1, 20_000, 9, &o).unwrap();
        assert!((mean - exact).abs() < 2.0 * hw.max(1e-3));
    }
}
