//! Splitting a transmissible instance into a source part and a channel part.
//!
//! Given `α_n = Pr{A_n <= B_n + γ_n} < 1`, set `γ' = γ_n/4` and
//! `δ_n = max(√α_n, e^{-nγ'})`. The split rate is
//! `d_n = sup{R : Pr{B_n >= R} > δ_n} - γ'`, the retained set is
//! `S_n = {v : b(v) >= d_n}` and `c_n = d_n + 2γ'`. Conditioning the joint law
//! on `V^n ∈ S_n` gives `(Ṽ, X̃, Ỹ)`, whose information density `Ã_n` uses the
//! conditional output law. Two inequalities must then hold:
//!
//! * `Pr{Ã_n <= d_n + γ_n - γ'} <= √α_n` (channel side);
//! * `Pr{B_n >= c_n} <= δ_n` (source side).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::block::Block;
use crate::error::{Error, Result};
use crate::models::{entropy_value, information_value, BlockLaw};
use crate::spectra::{Spectrum, SpectrumMode, TIE_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationExtract {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub delta: f64,
    pub d: f64,
    pub c: f64,
    /// `Pr{V^n ∈ S_n}`.
    pub lambda1: f64,
    /// `Pr{V^n ∉ S_n}`.
    pub lambda2: f64,
    /// `λ1 > δ_n`; when false the inequalities are reported but not asserted.
    pub valid: bool,
    /// `Pr{Ã_n <= d_n + γ_n - γ'}`.
    pub channel_term: f64,
    /// `Pr{B_n >= c_n}`.
    pub source_term: f64,
    pub channel_holds: bool,
    pub source_holds: bool,
}

impl SeparationExtract {
    /// Both inequalities hold, or the extraction was not valid to begin with.
    pub fn certified(&self) -> bool {
        !self.valid || (self.channel_holds && self.source_holds)
    }
}

/// Runs the extraction on the exactly enumerated joint law of `law`.
pub fn extract_separation_point(law: &BlockLaw, gamma: f64, cap: f64) -> Result<SeparationExtract> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let n = law.n;
    let nf = n as f64;
    let triples = law.joint_support(cap)?;
    let mut log_py_of = HashMap::<Block, f64>::new();
    let mut b_of = HashMap::<Block, f64>::new();
    let mut alpha = 0.0;
    let mut entropy_atoms = HashMap::<Block, f64>::new();
    let mut rows = Vec::with_capacity(triples.len());
    for t in &triples {
        let b = match b_of.get(&t.v) {
            Some(&b) => b,
            None => {
                let b = entropy_value(law.log_pv(&t.v), n)?;
                b_of.insert(t.v.clone(), b);
                b
            }
        };
        let log_py = *log_py_of.entry(t.y.clone()).or_insert_with(|| law.log_py(&t.y));
        let a = information_value(law.log_w(&t.x, &t.y), log_py, n)?;
        let mass = t.log_prob.exp();
        if a <= b + gamma + TIE_TOLERANCE {
            alpha += mass;
        }
        *entropy_atoms.entry(t.v.clone()).or_default() += mass;
        rows.push((b, mass));
    }
    let alpha = alpha.clamp(0.0, 1.0);
    if alpha >= 1.0 - TIE_TOLERANCE {
        return Err(Error::Precondition(format!("alpha_n = {alpha} leaves nothing to split")));
    }
    let gamma_prime = gamma / 4.0;
    let delta = alpha.sqrt().max((-nf * gamma_prime).exp());
    let entropy = Spectrum::from_atoms(
        n,
        SpectrumMode::Exact,
        entropy_atoms.iter().map(|(v, m)| (b_of[v], *m)).collect(),
    );
    // Pr{B >= R} is left-continuous and steps down just after each atom, so
    // the supremum is the largest atom whose upper tail exceeds δ.
    let top = entropy
        .values()
        .iter()
        .rev()
        .find(|&&b| entropy.upper_cdf(b) > delta)
        .copied()
        .ok_or_else(|| Error::Precondition("no entropy atom carries more than delta".into()))?;
    let d = top - gamma_prime;
    let c = d + 2.0 * gamma_prime;
    let lambda1: f64 = rows.iter().filter(|(b, _)| *b >= d).map(|(_, m)| m).sum();
    let lambda1 = lambda1.clamp(0.0, 1.0);
    let lambda2 = 1.0 - lambda1;
    // Conditional output law given V ∈ S.
    let mut p_tilde = HashMap::<&[u32], f64>::new();
    for (t, (b, m)) in triples.iter().zip(&rows) {
        if *b >= d {
            *p_tilde.entry(&t.y).or_default() += m / lambda1;
        }
    }
    let threshold = d + gamma - gamma_prime;
    let mut channel_term = 0.0;
    for (t, (b, m)) in triples.iter().zip(&rows) {
        if *b >= d {
            let a_tilde = (law.log_w(&t.x, &t.y) - p_tilde[t.y.as_slice()].ln()) / nf;
            if a_tilde <= threshold + TIE_TOLERANCE {
                channel_term += m / lambda1;
            }
        }
    }
    let source_term = entropy.upper_cdf(c);
    Ok(SeparationExtract {
        n,
        alpha,
        gamma,
        gamma_prime,
        delta,
        d,
        c,
        lambda1,
        lambda2,
        valid: lambda1 > delta,
        channel_term,
        source_term,
        channel_holds: channel_term <= alpha.sqrt() + TIE_TOLERANCE,
        source_holds: source_term <= delta + TIE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ChannelModel, InputCoupling, JointModel, MessageSchedule, SourceModel};

    #[test]
    fn separated_point_spectra() {
        let law = JointModel::new(
            SourceModel::uniform_message(MessageSchedule::Constant(1)).unwrap(),
            InputCoupling::uniform(2).unwrap(),
            ChannelModel::identity(2).unwrap(),
        )
        .resolve(2)
        .unwrap();
        let e = extract_separation_point(&law, 0.3, 1e6).unwrap();
        assert_eq!(e.alpha, 0.0);
        assert!((e.delta - (-2.0 * 0.075f64).exp()).abs() < 1e-15);
        assert!((e.d - (0.0 - 0.075)).abs() < 1e-15);
        assert!(e.valid && e.certified());
        assert_eq!(e.lambda1, 1.0);
    }

    #[test]
    fn quaternary_identity() {
        let law = JointModel::new(
            SourceModel::bernoulli(0.25).unwrap(),
            InputCoupling::uniform(4).unwrap(),
            ChannelModel::identity(4).unwrap(),
        )
        .resolve(2)
        .unwrap();
        let e = extract_separation_point(&law, 0.4, 1e6).unwrap();
        assert!((e.lambda1 + e.lambda2 - 1.0).abs() < 1e-15);
        assert!(e.certified());
    }

    #[test]
    fn refuses_alpha_one() {
        let law = JointModel::new(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::identity(),
            ChannelModel::identity(2).unwrap(),
        )
        .resolve(2)
        .unwrap();
        assert!(matches!(extract_separation_point(&law, 0.1, 1e6), Err(Error::Precondition(_))));
    }
}
