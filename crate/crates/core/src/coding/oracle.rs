//! Exhaustive enumeration of every (encoder, decoder) pair at tiny block lengths.

use serde::{Deserialize, Serialize};

use crate::block::{space_size, Block, Words};
use crate::coding::bounds::verdu_han_bound;
use crate::error::{Error, Result};
use crate::models::{ChannelModel, InputCoupling, JointModel, SourceModel};
use crate::spectra::{exact_joint_law, ExactOptions, ExactRoute};

pub const DEFAULT_ORACLE_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderSummary {
    /// `x(v)` for each support block, in support order.
    pub codewords: Vec<Block>,
    /// Converse bound for each requested γ.
    pub bounds: Vec<f64>,
    pub min_epsilon: f64,
    pub max_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub gammas: Vec<f64>,
    pub support: Vec<Block>,
    pub codes: u64,
    pub min_epsilon: f64,
    /// Codewords and decoder (support index per output word) of a best code.
    pub argmin: (Vec<Block>, Vec<usize>),
    pub encoders: Vec<EncoderSummary>,
    /// `(code count with ε < bound - tol, smallest ε - bound)` per γ.
    pub converse_checks: Vec<(usize, f64)>,
}

impl OracleReport {
    pub fn violations(&self) -> usize {
        self.converse_checks.iter().map(|c| c.0).sum()
    }
}

/// Number of codes `(|X|^n)^{|S|} · |S|^{|Y|^n}`.
pub fn code_count(support: usize, inputs: usize, outputs: usize, n: usize) -> f64 {
    space_size(inputs, n).powi(support as i32) * (support as f64).powf(space_size(outputs, n))
}

/// Exact `ε_n` for every code, with the converse bound checked against each.
/// `visit` sees `(codewords, decoder, ε)` for every code.
pub fn exhaustive_code_oracle(
    source: &SourceModel,
    channel: &ChannelModel,
    n: usize,
    gammas: &[f64],
    cap: f64,
    tol: f64,
    mut visit: Option<&mut dyn FnMut(&[Block], &[usize], f64)>,
) -> Result<OracleReport> {
    let src = source.resolve(n)?;
    let chan = channel.resolve(n)?;
    let support = src.support(cap)?;
    let s = support.len();
    let count = code_count(s, chan.inputs, chan.outputs, n);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "codes",
            size: count,
            cap,
        });
    }
    let xs: Vec<Block> = Words::new(chan.inputs, n).collect();
    let ys: Vec<Block> = Words::new(chan.outputs, n).collect();
    let mut report = OracleReport {
        n,
        gammas: gammas.to_vec(),
        support: support.iter().map(|(v, _)| v.clone()).collect(),
        codes: 0,
        min_epsilon: f64::INFINITY,
        argmin: (Vec::new(), Vec::new()),
        encoders: Vec::new(),
        converse_checks: vec![(0, f64::INFINITY); gammas.len()],
    };
    let mut enc = vec![0usize; s];
    loop {
        let codewords: Vec<Block> = enc.iter().map(|&i| xs[i].clone()).collect();
        let law = JointModel::new(
            source.clone(),
            InputCoupling::table(report.support.iter().cloned().zip(codewords.iter().cloned())),
            channel.clone(),
        )
        .resolve(n)?;
        let joint = exact_joint_law(
            &law,
            &ExactOptions {
                route: ExactRoute::Enumeration,
                enumeration_cap: cap.max(1e7),
                ..Default::default()
            },
        )?;
        let bounds: Vec<f64> = gammas.iter().map(|&g| verdu_han_bound(&joint, g).bound).collect();
        // joint[y][k] = P(v_k) W(y | x(v_k))
        let joint_mass: Vec<Vec<f64>> = ys
            .iter()
            .map(|y| {
                support
                    .iter()
                    .zip(&codewords)
                    .map(|((_, lp), x)| (lp + chan.log_prob(x, y)).exp())
                    .collect()
            })
            .collect();
        let mut summary = EncoderSummary {
            codewords: codewords.clone(),
            bounds: bounds.clone(),
            min_epsilon: f64::INFINITY,
            max_epsilon: f64::NEG_INFINITY,
        };
        let mut dec = vec![0usize; ys.len()];
        loop {
            let correct: f64 = dec.iter().zip(&joint_mass).map(|(&k, row)| row[k]).sum();
            let eps = (1.0 - correct).max(0.0);
            report.codes += 1;
            summary.min_epsilon = summary.min_epsilon.min(eps);
            summary.max_epsilon = summary.max_epsilon.max(eps);
            if eps < report.min_epsilon {
                report.min_epsilon = eps;
                report.argmin = (codewords.clone(), dec.clone());
            }
            for (check, b) in report.converse_checks.iter_mut().zip(&bounds) {
                check.1 = check.1.min(eps - b);
                if eps < b - tol {
                    check.0 += 1;
                }
            }
            if let Some(f) = visit.as_deref_mut() {
                f(&codewords, &dec, eps);
            }
            if !increment(&mut dec, s) {
                break;
            }
        }
        report.encoders.push(summary);
        if !increment(&mut enc, xs.len()) {
            break;
        }
    }
    Ok(report)
}

fn increment(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_identity_is_error_free() {
        let r = exhaustive_code_oracle(
            &SourceModel::bernoulli(0.5).unwrap(),
            &ChannelModel::identity(2).unwrap(),
            1,
            &[0.1],
            1e6,
            1e-12,
            None,
        )
        .unwrap();
        assert_eq!(r.codes, 16);
        assert_eq!(r.min_epsilon, 0.0);
        assert_eq!(r.violations(), 0);
    }

    #[test]
    fn four_messages_over_a_bit() {
        let mut seen = 0;
        let mut visit = |_: &[Block], _: &[usize], _: f64| seen += 1;
        let r = exhaustive_code_oracle(
            &SourceModel::iid(vec![0.25; 4]).unwrap(),
            &ChannelModel::identity(2).unwrap(),
            1,
            &[0.2],
            1e6,
            1e-12,
            Some(&mut visit),
        )
        .unwrap();
        assert_eq!(seen, 256);
        assert!((r.min_epsilon - 0.5).abs() < 1e-15);
        assert_eq!(r.violations(), 0);
    }

    #[test]
    fn deterministic_source_never_errs() {
        let r = exhaustive_code_oracle(
            &SourceModel::alternating(),
            &ChannelModel::alternating(),
            1,
            &[0.1],
            1e6,
            1e-12,
            None,
        )
        .unwrap();
        // Decoders that map the only reachable output to the only message.
        assert_eq!(r.min_epsilon, 0.0);
        assert!(r.encoders.iter().all(|e| e.min_epsilon == 0.0));
    }
}
