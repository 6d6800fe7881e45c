//! Channel inputs `X^n` jointly distributed with the source output `V^n`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::capacity::dmc_capacity;
use crate::block::Block;
use crate::dist::{check_probability_vector, Categorical, Kernel};
use crate::error::{Error, Result};
use crate::models::{ChannelModel, SourceLaw};

/// Deterministic encoder `φ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderMap {
    /// `x_t = v_t`.
    Identity,
    /// Every letter mapped to the same input symbol.
    Constant(u32),
    /// `x_t = map[v_t]`.
    Letters(Vec<u32>),
    /// Explicit block table `v -> x`.
    Table(Vec<(Block, Block)>),
}

/// Declarative coupling description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CouplingSpec {
    DeterministicMap { map: EncoderMap },
    /// i.i.d. inputs independent of the source.
    Independent { probs: Vec<f64> },
    /// Memoryless kernel `P_{X|V}` applied letter by letter.
    PerLetterKernel { matrix: Vec<Vec<f64>> },
    /// i.i.d. capacity-achieving input of a memoryless channel.
    BaOptimal {
        #[serde(default = "default_ba_tol")]
        tol: f64,
    },
}

fn default_ba_tol() -> f64 {
    1e-10
}

/// A validated input coupling.
#[derive(Debug, Clone, PartialEq)]
pub enum InputCoupling {
    Deterministic(EncoderMap),
    Independent(Vec<f64>),
    PerLetterKernel(Kernel),
}

impl InputCoupling {
    pub fn identity() -> Self {
        Self::Deterministic(EncoderMap::Identity)
    }

    pub fn independent(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs)?;
        Ok(Self::Independent(probs))
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::independent(vec![1.0 / size as f64; size])
    }

    pub fn kernel(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::PerLetterKernel(Kernel::new(matrix)?))
    }

    pub fn table(entries: impl IntoIterator<Item = (Block, Block)>) -> Self {
        Self::Deterministic(EncoderMap::Table(entries.into_iter().collect()))
    }

    /// Capacity-achieving i.i.d. input of a memoryless channel.
    pub fn ba_optimal(channel: &ChannelModel, tol: f64) -> Result<Self> {
        let kernel = channel.per_letter().ok_or_else(|| {
            Error::Incompatible("capacity-achieving input needs a memoryless channel".into())
        })?;
        let cap = dmc_capacity(kernel.rows(), tol)?;
        Self::independent(cap.input)
    }

    pub fn from_spec(spec: &CouplingSpec, channel: &ChannelModel) -> Result<Self> {
        match spec {
            CouplingSpec::DeterministicMap { map } => Ok(Self::Deterministic(map.clone())),
            CouplingSpec::Independent { probs } => Self::independent(probs.clone()),
            CouplingSpec::PerLetterKernel { matrix } => Self::kernel(matrix.clone()),
            CouplingSpec::BaOptimal { tol } => Self::ba_optimal(channel, *tol),
        }
    }

    pub fn to_spec(&self) -> CouplingSpec {
        match self {
            Self::Deterministic(m) => CouplingSpec::DeterministicMap { map: m.clone() },
            Self::Independent(p) => CouplingSpec::Independent { probs: p.clone() },
            Self::PerLetterKernel(k) => CouplingSpec::PerLetterKernel {
                matrix: k.rows().to_vec(),
            },
        }
    }

    /// Specializes the coupling to a block length and checks alphabets.
    pub fn resolve(&self, source: &SourceLaw, n: usize, channel_inputs: usize) -> Result<CouplingLaw> {
        let check_x = |x: u32| {
            if (x as usize) < channel_inputs {
                Ok(())
            } else {
                Err(Error::AlphabetMismatch(format!(
                    "input symbol {x} outside a {channel_inputs}-letter channel alphabet"
                )))
            }
        };
        let letters = match source {
            SourceLaw::Letters { alphabet, .. } => Some(*alphabet),
            SourceLaw::Messages { .. } => None,
        };
        match self {
            Self::Independent(p) => {
                if p.len() != channel_inputs {
                    return Err(Error::AlphabetMismatch(format!(
                        "input law over {} symbols for a {channel_inputs}-input channel",
                        p.len()
                    )));
                }
                Ok(CouplingLaw::Independent {
                    pmf: p.clone(),
                    log_pmf: p.iter().map(|q| q.ln()).collect(),
                    sampler: Categorical::new(p),
                })
            }
            Self::PerLetterKernel(k) => {
                let alphabet = letters.ok_or_else(|| {
                    Error::Incompatible("per-letter kernel needs a letter source".into())
                })?;
                if k.inputs() != alphabet || k.outputs() != channel_inputs {
                    return Err(Error::AlphabetMismatch(format!(
                        "kernel is {}x{}, expected {alphabet}x{channel_inputs}",
                        k.inputs(),
                        k.outputs()
                    )));
                }
                Ok(CouplingLaw::letterwise(k.clone()))
            }
            Self::Deterministic(EncoderMap::Table(entries)) => {
                let mut table = BTreeMap::new();
                for (v, x) in entries {
                    if x.len() != n {
                        return Err(Error::AlphabetMismatch(format!(
                            "codeword of length {} at block length {n}",
                            x.len()
                        )));
                    }
                    x.iter().try_for_each(|&s| check_x(s))?;
                    table.insert(v.clone(), x.clone());
                }
                Ok(CouplingLaw::Table(table))
            }
            Self::Deterministic(map) => {
                let alphabet = letters.ok_or_else(|| {
                    Error::Incompatible("letter encoders need a letter source".into())
                })?;
                let image: Vec<u32> = match map {
                    EncoderMap::Identity => (0..alphabet as u32).collect(),
                    EncoderMap::Constant(c) => vec![*c; alphabet],
                    EncoderMap::Letters(m) => {
                        if m.len() != alphabet {
                            return Err(Error::AlphabetMismatch(format!(
                                "letter map has {} entries for a {alphabet}-letter source",
                                m.len()
                            )));
                        }
                        m.clone()
                    }
                    EncoderMap::Table(_) => unreachable!("handled above"),
                };
                image.iter().try_for_each(|&s| check_x(s))?;
                let rows = image
                    .iter()
                    .map(|&x| {
                        (0..channel_inputs)
                            .map(|j| if j as u32 == x { 1.0 } else { 0.0 })
                            .collect()
                    })
                    .collect();
                Ok(CouplingLaw::letterwise(Kernel::new(rows)?))
            }
        }
    }
}

/// `P_{X^n|V^n}` at a fixed block length.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingLaw {
    /// `Π_t K(x_t|v_t)`.
    Letterwise {
        kernel: Kernel,
        samplers: Vec<Categorical>,
    },
    /// `Π_t p(x_t)`, independent of `v`.
    Independent {
        pmf: Vec<f64>,
        log_pmf: Vec<f64>,
        sampler: Categorical,
    },
    /// Deterministic block encoder.
    Table(BTreeMap<Block, Block>),
}

impl CouplingLaw {
    fn letterwise(kernel: Kernel) -> Self {
        let samplers = kernel.rows().iter().map(|r| Categorical::new(r)).collect();
        Self::Letterwise { kernel, samplers }
    }

    pub fn is_independent(&self) -> bool {
        matches!(self, Self::Independent { .. })
    }

    /// Per-letter kernel `K(x|v)`, treating an independent law as constant rows.
    pub fn letter_kernel(&self, source_alphabet: usize) -> Option<Kernel> {
        match self {
            Self::Letterwise { kernel, .. } => Some(kernel.clone()),
            Self::Independent { pmf, .. } => Kernel::constant_rows(source_alphabet, pmf).ok(),
            Self::Table(_) => None,
        }
    }

    /// `ln P_{X^n|V^n}(x|v)`.
    pub fn log_prob(&self, x: &[u32], v: &[u32]) -> f64 {
        match self {
            Self::Letterwise { kernel, .. } => {
                v.iter().zip(x).map(|(&a, &b)| kernel.log_prob(a, b)).sum()
            }
            Self::Independent { log_pmf, .. } => x.iter().map(|&s| log_pmf[s as usize]).sum(),
            Self::Table(t) => match t.get(v) {
                Some(c) if c.as_slice() == x => 0.0,
                _ => f64::NEG_INFINITY,
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        v: &[u32],
        n: usize,
        out: &mut Block,
    ) -> Result<()> {
        out.clear();
        match self {
            Self::Letterwise { samplers, .. } => {
                out.extend(v.iter().map(|&a| samplers[a as usize].sample(rng)))
            }
            Self::Independent { sampler, .. } => out.extend((0..n).map(|_| sampler.sample(rng))),
            Self::Table(t) => out.extend_from_slice(t.get(v).ok_or_else(|| {
                Error::Precondition(format!("encoder table has no codeword for {v:?}"))
            })?),
        }
        Ok(())
    }

    /// Inputs reachable from `v` with their log-probabilities.
    pub fn support(&self, v: &[u32], n: usize, cap: f64) -> Result<Vec<(Block, f64)>> {
        let letters: Vec<Vec<(u32, f64)>> = match self {
            Self::Table(t) => {
                return Ok(t.get(v).map(|x| vec![(x.clone(), 0.0)]).unwrap_or_default());
            }
            Self::Letterwise { kernel, .. } => v
                .iter()
                .map(|&a| live(&kernel.rows()[a as usize]))
                .collect(),
            Self::Independent { pmf, .. } => vec![live(pmf); n],
        };
        let size: f64 = letters.iter().map(|l| l.len() as f64).product();
        if size > cap {
            return Err(Error::CapExceeded {
                what: "input support",
                size,
                cap,
            });
        }
        let mut out = vec![(Vec::with_capacity(n), 0.0)];
        for choices in &letters {
            out = out
                .into_iter()
                .flat_map(|(prefix, lp)| {
                    choices.iter().map(move |&(s, p)| {
                        let mut b = prefix.clone();
                        b.push(s);
                        (b, lp + p.ln())
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

fn live(row: &[f64]) -> Vec<(u32, f64)> {
    row.iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, p)| (i as u32, *p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SourceModel;

    #[test]
    fn identity_requires_room() {
        let src = SourceModel::iid(vec![0.25; 4]).unwrap().resolve(1).unwrap();
        assert!(InputCoupling::identity().resolve(&src, 1, 2).is_err());
        assert!(InputCoupling::identity().resolve(&src, 1, 4).is_ok());
    }

    #[test]
    fn kernel_support_and_probs() {
        let src = SourceModel::bernoulli(0.5).unwrap().resolve(2).unwrap();
        let law = InputCoupling::kernel(vec![vec![0.5, 0.5], vec![0.0, 1.0]])
            .unwrap()
            .resolve(&src, 2, 2)
            .unwrap();
        let s = law.support(&[0, 1], 2, 1e6).unwrap();
        assert_eq!(s.len(), 2);
        let total: f64 = s.iter().map(|(_, lp)| lp.exp()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(law.log_prob(&[0, 0], &[0, 1]), f64::NEG_INFINITY);
    }

    #[test]
    fn messages_need_independent_or_table() {
        let src = SourceModel::uniform_message(crate::models::MessageSchedule::Constant(2))
            .unwrap()
            .resolve(1)
            .unwrap();
        assert!(InputCoupling::identity().resolve(&src, 1, 2).is_err());
        assert!(InputCoupling::uniform(2).unwrap().resolve(&src, 1, 2).is_ok());
        let t = InputCoupling::table([(vec![0], vec![0]), (vec![1], vec![1])]);
        assert!(t.resolve(&src, 1, 2).is_ok());
    }
}
