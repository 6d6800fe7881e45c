//! General channels `{W^n}`: memoryless kernels, mixtures, the identity and
//! the alternating even/odd example. Block kernels are never materialized;
//! `W^n(y|x)` is evaluated letter by letter.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{check_mixture_weights, log_sum_exp, Categorical, Kernel};
use crate::error::{Error, Result};

/// Declarative channel description, as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ChannelSpec {
    Dmc {
        matrix: Vec<Vec<f64>>,
    },
    /// Binary symmetric channel.
    Bsc {
        crossover: f64,
    },
    /// Binary erasure channel; output 2 is the erasure.
    Bec {
        erasure: f64,
    },
    Mixed {
        weights: Vec<f64>,
        components: Vec<ChannelSpec>,
    },
    Identity {
        size: usize,
    },
    AlternatingExample,
}

impl ChannelSpec {
    /// The per-letter matrix of a memoryless kind.
    pub fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Self::Dmc { matrix } => Some(matrix.clone()),
            Self::Bsc { crossover: p } => Some(vec![vec![1.0 - p, *p], vec![*p, 1.0 - p]]),
            Self::Bec { erasure: e } => Some(vec![vec![1.0 - e, 0.0, *e], vec![0.0, 1.0 - e, *e]]),
            Self::Identity { size } => Some(
                (0..*size)
                    .map(|i| (0..*size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// A validated general channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    kind: ChannelKind,
    spec: ChannelSpec,
}

#[derive(Debug, Clone, PartialEq)]
enum ChannelKind {
    Memoryless(Kernel),
    Mixed {
        weights: Vec<f64>,
        components: Vec<ChannelModel>,
    },
    Alternating,
}

impl ChannelModel {
    pub fn dmc(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_spec(&ChannelSpec::Dmc { matrix })
    }

    pub fn bsc(crossover: f64) -> Result<Self> {
        Self::from_spec(&ChannelSpec::Bsc { crossover })
    }

    pub fn bec(erasure: f64) -> Result<Self> {
        Self::from_spec(&ChannelSpec::Bec { erasure })
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::from_spec(&ChannelSpec::Identity { size })
    }

    /// Identity for even `n`; every input goes to `0^n` for odd `n`.
    pub fn alternating() -> Self {
        Self {
            kind: ChannelKind::Alternating,
            spec: ChannelSpec::AlternatingExample,
        }
    }

    pub fn mixed(weights: Vec<f64>, components: Vec<ChannelModel>) -> Result<Self> {
        Self::from_spec(&ChannelSpec::Mixed {
            weights,
            components: components.iter().map(|c| c.spec.clone()).collect(),
        })
    }

    pub fn from_spec(spec: &ChannelSpec) -> Result<Self> {
        let kind = match spec {
            ChannelSpec::AlternatingExample => ChannelKind::Alternating,
            ChannelSpec::Mixed {
                weights,
                components,
            } => {
                check_mixture_weights(weights)?;
                if weights.len() != components.len() {
                    return Err(Error::InvalidWeights(format!(
                        "{} weights for {} components",
                        weights.len(),
                        components.len()
                    )));
                }
                let components: Vec<ChannelModel> =
                    components.iter().map(Self::from_spec).collect::<Result<_>>()?;
                let dims = components[0].dims();
                if let Some(c) = components.iter().find(|c| c.dims() != dims) {
                    return Err(Error::AlphabetMismatch(format!(
                        "mixture components have alphabets {:?} and {:?}",
                        dims,
                        c.dims()
                    )));
                }
                ChannelKind::Mixed {
                    weights: weights.clone(),
                    components,
                }
            }
            memoryless => {
                if let ChannelSpec::Identity { size: 0 } = memoryless {
                    return Err(Error::InvalidParameter("empty identity channel".into()));
                }
                let matrix = memoryless.matrix().expect("memoryless kinds have a matrix");
                ChannelKind::Memoryless(Kernel::new(matrix)?)
            }
        };
        Ok(Self {
            kind,
            spec: spec.clone(),
        })
    }

    pub fn to_spec(&self) -> ChannelSpec {
        self.spec.clone()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.spec {
            ChannelSpec::Dmc { .. } | ChannelSpec::Bsc { .. } | ChannelSpec::Bec { .. } => "dmc",
            ChannelSpec::Mixed { .. } => "mixed",
            ChannelSpec::Identity { .. } => "identity",
            ChannelSpec::AlternatingExample => "alternating_example",
        }
    }

    /// Whether this is a single stationary memoryless channel.
    pub fn is_memoryless(&self) -> bool {
        matches!(self.kind, ChannelKind::Memoryless(_))
    }

    /// Per-letter kernel of a memoryless channel.
    pub fn per_letter(&self) -> Option<&Kernel> {
        match &self.kind {
            ChannelKind::Memoryless(k) => Some(k),
            _ => None,
        }
    }

    /// Per-letter input and output alphabet sizes.
    pub fn dims(&self) -> (usize, usize) {
        match &self.kind {
            ChannelKind::Memoryless(k) => (k.inputs(), k.outputs()),
            ChannelKind::Mixed { components, .. } => components[0].dims(),
            ChannelKind::Alternating => (2, 2),
        }
    }

    /// Materializes `W^n` as a mixture of memoryless kernels.
    pub fn resolve(&self, n: usize) -> Result<ChannelLaw> {
        if n == 0 {
            return Err(Error::InvalidParameter("block length must be positive".into()));
        }
        let mut parts = Vec::new();
        self.collect(n, 1.0, &mut parts)?;
        let (inputs, outputs) = self.dims();
        Ok(ChannelLaw {
            n,
            inputs,
            outputs,
            components: parts
                .into_iter()
                .map(|(w, k)| ChannelComponent::new(w, k))
                .collect(),
        })
    }

    fn collect(&self, n: usize, scale: f64, out: &mut Vec<(f64, Kernel)>) -> Result<()> {
        match &self.kind {
            ChannelKind::Memoryless(k) => out.push((scale, k.clone())),
            ChannelKind::Alternating => {
                let k = if n % 2 == 0 {
                    Kernel::identity(2)?
                } else {
                    Kernel::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]])?
                };
                out.push((scale, k));
            }
            ChannelKind::Mixed {
                weights,
                components,
            } => {
                for (w, c) in weights.iter().zip(components) {
                    c.collect(n, scale * w, out)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelComponent {
    pub weight: f64,
    pub kernel: Kernel,
    samplers: Vec<Categorical>,
}

impl ChannelComponent {
    fn new(weight: f64, kernel: Kernel) -> Self {
        let samplers = kernel.rows().iter().map(|r| Categorical::new(r)).collect();
        Self {
            weight,
            kernel,
            samplers,
        }
    }
}

/// `W^n` at a fixed block length: `Σ_j b_j Π_t W_j(y_t|x_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelLaw {
    pub n: usize,
    pub inputs: usize,
    pub outputs: usize,
    pub components: Vec<ChannelComponent>,
}

impl ChannelLaw {
    pub fn single_kernel(&self) -> Option<&Kernel> {
        match self.components.as_slice() {
            [c] => Some(&c.kernel),
            _ => None,
        }
    }

    /// `ln W^n(y|x)`.
    pub fn log_prob(&self, x: &[u32], y: &[u32]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        if let [c] = self.components.as_slice() {
            return x.iter().zip(y).map(|(&a, &b)| c.kernel.log_prob(a, b)).sum();
        }
        let terms: Vec<f64> = self
            .components
            .iter()
            .map(|c| {
                c.weight.ln()
                    + x.iter()
                        .zip(y)
                        .map(|(&a, &b)| c.kernel.log_prob(a, b))
                        .sum::<f64>()
            })
            .collect();
        log_sum_exp(&terms)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, x: &[u32], out: &mut Vec<u32>) {
        out.clear();
        let c = if self.components.len() == 1 {
            &self.components[0]
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = self.components.len() - 1;
            for (i, c) in self.components.iter().enumerate() {
                acc += c.weight;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            &self.components[pick]
        };
        out.extend(x.iter().map(|&a| c.samplers[a as usize].sample(rng)));
    }
}
