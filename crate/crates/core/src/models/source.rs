//! General sources `{P_{V^n}}`: i.i.d., mixtures, uniform message sets, the
//! alternating even/odd example and truncated countable-alphabet laws.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::block::{space_size, Block, Words};
use crate::dist::{check_mixture_weights, check_probability_vector, log_sum_exp, Categorical};
use crate::error::{Error, Result};

pub const DEFAULT_SUPPORT_CAP: usize = 4096;

fn default_support_cap() -> usize {
    DEFAULT_SUPPORT_CAP
}

/// Declarative source description, as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SourceSpec {
    Iid {
        probs: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Mixed {
        weights: Vec<f64>,
        components: Vec<SourceSpec>,
    },
    UniformMessage {
        messages: MessageSchedule,
    },
    AlternatingExample,
    TruncatedCountable {
        law: CountableLaw,
        tail_budget: f64,
        #[serde(default = "default_support_cap")]
        support_cap: usize,
    },
}

/// Message-count schedule `M_n` of a uniform message source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageSchedule {
    Constant(u64),
    /// `M_n = base^n`.
    Power { base: u64 },
    Table(BTreeMap<usize, u64>),
}

impl MessageSchedule {
    pub fn count(&self, n: usize) -> Result<u64> {
        let m = match self {
            Self::Constant(m) => *m,
            Self::Power { base } => base.checked_pow(n as u32).ok_or_else(|| {
                Error::InvalidParameter(format!("{base}^{n} messages overflow u64"))
            })?,
            Self::Table(t) => *t.get(&n).ok_or_else(|| {
                Error::InvalidParameter(format!("no message count for n = {n}"))
            })?,
        };
        if m == 0 {
            return Err(Error::InvalidParameter("message set is empty".into()));
        }
        Ok(m)
    }
}

/// Countably infinite per-letter laws on `{0, 1, 2, ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountableLaw {
    /// `P(k) = p (1-p)^k`.
    Geometric { p: f64 },
    /// `P(k) = e^{-λ} λ^k / k!`.
    Poisson { lambda: f64 },
}

impl CountableLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::Geometric { p } if !(p > 0.0 && p < 1.0) => Err(Error::InvalidParameter(
                format!("geometric parameter {p} outside (0, 1)"),
            )),
            Self::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => Err(
                Error::InvalidParameter(format!("Poisson rate {lambda} must be positive")),
            ),
            _ => Ok(()),
        }
    }

    fn log_pmf(&self, k: usize) -> f64 {
        match *self {
            Self::Geometric { p } => p.ln() + k as f64 * (-p).ln_1p(),
            Self::Poisson { lambda } => {
                let log_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
                -lambda + k as f64 * lambda.ln() - log_fact
            }
        }
    }

    /// Exact mass of `{k >= len}`.
    fn tail(&self, len: usize) -> f64 {
        match *self {
            Self::Geometric { p } => (1.0 - p).powi(len as i32),
            Self::Poisson { lambda } => {
                // Sum the tail directly; `1 - cdf` cancels catastrophically.
                let mut log_term = self.log_pmf(len);
                let mut tail = 0.0;
                let mut k = len;
                loop {
                    let t = log_term.exp();
                    tail += t;
                    if k as f64 > lambda && t <= tail * 1e-17 {
                        return tail;
                    }
                    k += 1;
                    log_term += lambda.ln() - (k as f64).ln();
                }
            }
        }
    }

    /// First `len` probabilities and the mass of `{k >= len}`.
    fn prefix(&self, len: usize) -> (Vec<f64>, f64) {
        ((0..len).map(|k| self.log_pmf(k).exp()).collect(), self.tail(len))
    }
}

/// A validated general source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    kind: SourceKind,
    labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
enum SourceKind {
    Iid(Vec<f64>),
    Mixed {
        weights: Vec<f64>,
        components: Vec<SourceModel>,
    },
    UniformMessage(MessageSchedule),
    Alternating,
    Truncated {
        law: CountableLaw,
        tail_budget: f64,
        support_cap: usize,
    },
}

impl SourceModel {
    pub fn iid(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs)?;
        Ok(Self {
            kind: SourceKind::Iid(probs),
            labels: None,
        })
    }

    /// Bernoulli(p) on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::iid(vec![1.0 - p, p])
    }

    pub fn mixed(weights: Vec<f64>, components: Vec<SourceModel>) -> Result<Self> {
        check_mixture_weights(&weights)?;
        if weights.len() != components.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if components.iter().any(|c| matches!(c.kind, SourceKind::UniformMessage(_))) {
            return Err(Error::Incompatible(
                "message sources cannot be mixture components".into(),
            ));
        }
        Ok(Self {
            kind: SourceKind::Mixed {
                weights,
                components,
            },
            labels: None,
        })
    }

    pub fn uniform_message(messages: MessageSchedule) -> Result<Self> {
        if let MessageSchedule::Constant(0) = messages {
            return Err(Error::InvalidParameter("message set is empty".into()));
        }
        Ok(Self {
            kind: SourceKind::UniformMessage(messages),
            labels: None,
        })
    }

    /// Uniform on `{0,1}^n` for even `n`, the point mass on `0^n` for odd `n`.
    pub fn alternating() -> Self {
        Self {
            kind: SourceKind::Alternating,
            labels: None,
        }
    }

    pub fn truncated(law: CountableLaw, tail_budget: f64, support_cap: usize) -> Result<Self> {
        law.validate()?;
        if !(tail_budget > 0.0 && tail_budget < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail budget {tail_budget} outside (0, 1)"
            )));
        }
        let model = Self {
            kind: SourceKind::Truncated {
                law,
                tail_budget,
                support_cap,
            },
            labels: None,
        };
        model.resolve(1)?;
        Ok(model)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if let SourceKind::Iid(p) = &self.kind {
            if p.len() != labels.len() {
                return Err(Error::AlphabetMismatch(format!(
                    "{} labels for {} symbols",
                    labels.len(),
                    p.len()
                )));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn from_spec(spec: &SourceSpec) -> Result<Self> {
        match spec {
            SourceSpec::Iid { probs, labels } => {
                let m = Self::iid(probs.clone())?;
                match labels {
                    Some(l) => m.with_labels(l.clone()),
                    None => Ok(m),
                }
            }
            SourceSpec::Mixed {
                weights,
                components,
            } => Self::mixed(
                weights.clone(),
                components
                    .iter()
                    .map(Self::from_spec)
                    .collect::<Result<_>>()?,
            ),
            SourceSpec::UniformMessage { messages } => Self::uniform_message(messages.clone()),
            SourceSpec::AlternatingExample => Ok(Self::alternating()),
            SourceSpec::TruncatedCountable {
                law,
                tail_budget,
                support_cap,
            } => Self::truncated(*law, *tail_budget, *support_cap),
        }
    }

    pub fn to_spec(&self) -> SourceSpec {
        match &self.kind {
            SourceKind::Iid(p) => SourceSpec::Iid {
                probs: p.clone(),
                labels: self.labels.clone(),
            },
            SourceKind::Mixed {
                weights,
                components,
            } => SourceSpec::Mixed {
                weights: weights.clone(),
                components: components.iter().map(Self::to_spec).collect(),
            },
            SourceKind::UniformMessage(m) => SourceSpec::UniformMessage {
                messages: m.clone(),
            },
            SourceKind::Alternating => SourceSpec::AlternatingExample,
            SourceKind::Truncated {
                law,
                tail_budget,
                support_cap,
            } => SourceSpec::TruncatedCountable {
                law: *law,
                tail_budget: *tail_budget,
                support_cap: *support_cap,
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SourceKind::Iid(_) => "iid",
            SourceKind::Mixed { .. } => "mixed",
            SourceKind::UniformMessage(_) => "uniform_message",
            SourceKind::Alternating => "alternating_example",
            SourceKind::Truncated { .. } => "truncated_countable",
        }
    }

    /// Materializes `P_{V^n}`.
    pub fn resolve(&self, n: usize) -> Result<SourceLaw> {
        if n == 0 {
            return Err(Error::InvalidParameter("block length must be positive".into()));
        }
        match &self.kind {
            SourceKind::UniformMessage(m) => Ok(SourceLaw::Messages { count: m.count(n)? }),
            _ => {
                let (components, tail_mass) = self.letter_components(n)?;
                let alphabet = components.iter().map(|c| c.pmf.len()).max().unwrap_or(0);
                let components = components
                    .into_iter()
                    .map(|mut c| {
                        c.pmf.resize(alphabet, 0.0);
                        Component::new(c.weight, c.pmf)
                    })
                    .collect();
                Ok(SourceLaw::Letters {
                    n,
                    alphabet,
                    components,
                    tail_mass,
                })
            }
        }
    }

    fn letter_components(&self, n: usize) -> Result<(Vec<RawComponent>, f64)> {
        match &self.kind {
            SourceKind::Iid(p) => Ok((vec![RawComponent::new(1.0, p.clone())], 0.0)),
            SourceKind::Alternating => {
                let pmf = if n % 2 == 0 { vec![0.5, 0.5] } else { vec![1.0, 0.0] };
                Ok((vec![RawComponent::new(1.0, pmf)], 0.0))
            }
            SourceKind::Truncated {
                law,
                tail_budget,
                support_cap,
            } => {
                let (pmf, block_tail) = truncate(law, *tail_budget, *support_cap, n)?;
                Ok((vec![RawComponent::new(1.0, pmf)], block_tail))
            }
            SourceKind::Mixed {
                weights,
                components,
            } => {
                let mut out = Vec::new();
                let mut tail = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    let (sub, t) = c.letter_components(n)?;
                    tail += w * t;
                    out.extend(sub.into_iter().map(|mut s| {
                        s.weight *= w;
                        s
                    }));
                }
                Ok((out, tail))
            }
            SourceKind::UniformMessage(_) => Err(Error::Incompatible(
                "message source has no letter structure".into(),
            )),
        }
    }
}

struct RawComponent {
    weight: f64,
    pmf: Vec<f64>,
}

impl RawComponent {
    fn new(weight: f64, pmf: Vec<f64>) -> Self {
        Self { weight, pmf }
    }
}

/// Smallest prefix whose block tail mass `1 - (1 - t)^n` is within budget;
/// the kept letters are renormalized.
fn truncate(law: &CountableLaw, budget: f64, cap: usize, n: usize) -> Result<(Vec<f64>, f64)> {
    let block_tail = |t: f64| -((n as f64) * (-t).ln_1p()).exp_m1();
    let mut reached = 1.0;
    for len in 1..=cap {
        reached = block_tail(law.tail(len));
        if reached <= budget {
            let (probs, _) = law.prefix(len);
            let kept: f64 = probs.iter().sum();
            return Ok((probs.iter().map(|p| p / kept).collect(), reached));
        }
    }
    Err(Error::TailBudgetExceeded {
        budget,
        cap,
        reached,
    })
}

/// One i.i.d. mixture component with cached log-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub pmf: Vec<f64>,
    pub log_pmf: Vec<f64>,
    sampler: Categorical,
}

impl Component {
    fn new(weight: f64, pmf: Vec<f64>) -> Self {
        let log_pmf = pmf.iter().map(|p| p.ln()).collect();
        let sampler = Categorical::new(&pmf);
        Self {
            weight,
            pmf,
            log_pmf,
            sampler,
        }
    }
}

/// `P_{V^n}` at a fixed block length.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceLaw {
    /// Mixture of i.i.d. laws over `alphabet^n`; `tail_mass` is the
    /// probability discarded by truncation.
    Letters {
        n: usize,
        alphabet: usize,
        components: Vec<Component>,
        tail_mass: f64,
    },
    /// Uniform on `{0, .., count-1}`; blocks are the single message index.
    Messages { count: u64 },
}

impl SourceLaw {
    pub fn block_len(&self) -> usize {
        match self {
            Self::Letters { n, .. } => *n,
            Self::Messages { .. } => 1,
        }
    }

    pub fn tail_mass(&self) -> f64 {
        match self {
            Self::Letters { tail_mass, .. } => *tail_mass,
            Self::Messages { .. } => 0.0,
        }
    }

    /// Per-letter law when the source is a single i.i.d. component.
    pub fn single_pmf(&self) -> Option<&[f64]> {
        match self {
            Self::Letters { components, .. } if components.len() == 1 => {
                Some(&components[0].pmf)
            }
            _ => None,
        }
    }

    pub fn log_prob(&self, v: &[u32]) -> f64 {
        match self {
            Self::Letters {
                alphabet,
                components,
                ..
            } => {
                if v.iter().any(|&s| s as usize >= *alphabet) {
                    return f64::NEG_INFINITY;
                }
                if components.len() == 1 {
                    return v.iter().map(|&s| components[0].log_pmf[s as usize]).sum();
                }
                let terms: Vec<f64> = components
                    .iter()
                    .map(|c| c.weight.ln() + v.iter().map(|&s| c.log_pmf[s as usize]).sum::<f64>())
                    .collect();
                log_sum_exp(&terms)
            }
            Self::Messages { count } => match v {
                [m] if (*m as u64) < *count => -(*count as f64).ln(),
                _ => f64::NEG_INFINITY,
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Block) {
        out.clear();
        match self {
            Self::Letters { n, components, .. } => {
                let c = if components.len() == 1 {
                    &components[0]
                } else {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    let mut pick = components.len() - 1;
                    for (i, c) in components.iter().enumerate() {
                        acc += c.weight;
                        if u < acc {
                            pick = i;
                            break;
                        }
                    }
                    &components[pick]
                };
                out.extend((0..*n).map(|_| c.sampler.sample(rng)));
            }
            Self::Messages { count } => out.push(rng.random_range(0..*count) as u32),
        }
    }

    /// Letters that carry positive mass under some component.
    fn live_letters(&self) -> Vec<u32> {
        match self {
            Self::Letters {
                alphabet,
                components,
                ..
            } => (0..*alphabet as u32)
                .filter(|&s| components.iter().any(|c| c.pmf[s as usize] > 0.0))
                .collect(),
            Self::Messages { .. } => Vec::new(),
        }
    }

    /// Upper bound on the support size.
    pub fn support_size(&self) -> f64 {
        match self {
            Self::Letters { n, .. } => space_size(self.live_letters().len(), *n),
            Self::Messages { count } => *count as f64,
        }
    }

    /// Every block with positive probability and its log-probability.
    pub fn support(&self, cap: f64) -> Result<Vec<(Block, f64)>> {
        let size = self.support_size();
        if size > cap {
            return Err(Error::CapExceeded {
                what: "source support",
                size,
                cap,
            });
        }
        match self {
            Self::Letters { n, .. } => {
                let live = self.live_letters();
                Ok(Words::new(live.len(), *n)
                    .map(|w| w.iter().map(|&i| live[i as usize]).collect::<Block>())
                    .map(|v| {
                        let lp = self.log_prob(&v);
                        (v, lp)
                    })
                    .filter(|(_, lp)| *lp > f64::NEG_INFINITY)
                    .collect())
            }
            Self::Messages { count } => {
                let lp = -(*count as f64).ln();
                Ok((0..*count as u32).map(|m| (vec![m], lp)).collect())
            }
        }
    }
}
