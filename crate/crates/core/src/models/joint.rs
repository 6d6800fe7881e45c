//! The pipeline `V^n -> X^n -> Y^n` at a fixed block length, with the output
//! marginal `P_{Y^n}` induced by the declared coupling.

use std::collections::HashMap;

use rand::Rng;

use crate::block::{space_size, Block, Words};
use crate::dist::log_sum_exp;
use crate::error::{Error, Result};
use crate::models::{ChannelLaw, ChannelModel, CouplingLaw, InputCoupling, SourceLaw, SourceModel};
use crate::rng::{domain, substream, CHUNK};

/// Default cap on enumerated `(v, x, y)` triples.
pub const DEFAULT_ENUMERATION_CAP: f64 = 1e7;

/// Options controlling how `P_{Y^n}` is obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalOptions {
    pub enumeration_cap: f64,
    /// Permit a sampled plug-in estimate when no exact route exists.
    pub allow_plug_in: bool,
    pub plug_in_samples: usize,
    pub seed: u64,
}

impl Default for MarginalOptions {
    fn default() -> Self {
        Self {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            allow_plug_in: false,
            plug_in_samples: 100_000,
            seed: 0,
        }
    }
}

/// Source, coupling and channel families bound together.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    pub source: SourceModel,
    pub coupling: InputCoupling,
    pub channel: ChannelModel,
    pub options: MarginalOptions,
}

impl JointModel {
    pub fn new(source: SourceModel, coupling: InputCoupling, channel: ChannelModel) -> Self {
        Self {
            source,
            coupling,
            channel,
            options: MarginalOptions::default(),
        }
    }

    pub fn with_options(mut self, options: MarginalOptions) -> Self {
        self.options = options;
        self
    }

    pub fn resolve(&self, n: usize) -> Result<BlockLaw> {
        let source = self.source.resolve(n)?;
        let channel = self.channel.resolve(n)?;
        let coupling = self.coupling.resolve(&source, n, channel.inputs)?;
        let marginal = OutputMarginal::Product { terms: Vec::new() };
        let mut law = BlockLaw {
            n,
            source,
            coupling,
            channel,
            marginal,
        };
        law.marginal = law.build_marginal(&self.options)?;
        Ok(law)
    }
}

/// One product term `w Π_t q(y_t)` of a product-mixture marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTerm {
    pub log_weight: f64,
    pub pmf: Vec<f64>,
    pub log_pmf: Vec<f64>,
}

/// `P_{Y^n}` in whichever form could be computed.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputMarginal {
    /// `Σ_k w_k Π_t q_k(y_t)`; exact.
    Product { terms: Vec<MarginalTerm> },
    /// Enumerated `ln P_{Y^n}(y)`; exact.
    Enumerated(HashMap<Block, f64>),
    /// Add-half smoothed empirical law of sampled outputs; approximate.
    PlugIn {
        counts: HashMap<Block, u64>,
        total: u64,
        space: f64,
    },
}

impl OutputMarginal {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Self::PlugIn { .. })
    }
}

/// Everything needed to evaluate densities at block length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLaw {
    pub n: usize,
    pub source: SourceLaw,
    pub coupling: CouplingLaw,
    pub channel: ChannelLaw,
    pub marginal: OutputMarginal,
}

impl BlockLaw {
    fn build_marginal(&self, opts: &MarginalOptions) -> Result<OutputMarginal> {
        if let Some(terms) = self.product_terms() {
            return Ok(OutputMarginal::Product { terms });
        }
        let size = self.source.support_size() * space_size(self.channel.outputs, self.n);
        if size <= opts.enumeration_cap {
            return self.enumerate_marginal(opts.enumeration_cap);
        }
        if !opts.allow_plug_in {
            return Err(Error::MarginalUnavailable);
        }
        if opts.plug_in_samples == 0 {
            return Err(Error::ZeroBudget);
        }
        let mut counts = HashMap::new();
        let (mut v, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
        let chunks = opts.plug_in_samples.div_ceil(CHUNK);
        for c in 0..chunks {
            let mut rng = substream(opts.seed, domain::at(domain::PLUG_IN, self.n), c as u64);
            let len = CHUNK.min(opts.plug_in_samples - c * CHUNK);
            for _ in 0..len {
                self.sample(&mut rng, &mut v, &mut x, &mut y)?;
                *counts.entry(y.clone()).or_insert(0u64) += 1;
            }
        }
        Ok(OutputMarginal::PlugIn {
            counts,
            total: opts.plug_in_samples as u64,
            space: space_size(self.channel.outputs, self.n),
        })
    }

    /// Product-mixture marginal when the coupling acts letter by letter.
    fn product_terms(&self) -> Option<Vec<MarginalTerm>> {
        let inputs = self.input_components()?;
        let mut terms = Vec::new();
        for (a, px) in &inputs {
            for c in &self.channel.components {
                let pmf = c.kernel.push_forward(px);
                terms.push(MarginalTerm {
                    log_weight: a + c.weight.ln(),
                    log_pmf: pmf.iter().map(|q| q.ln()).collect(),
                    pmf,
                });
            }
        }
        Some(terms)
    }

    /// Per-letter input laws `(ln a_i, p_{X,i})` when `X^n` is a mixture of
    /// i.i.d. laws; `None` for block-table encoders.
    pub fn input_components(&self) -> Option<Vec<(f64, Vec<f64>)>> {
        match (&self.coupling, &self.source) {
            (CouplingLaw::Independent { pmf, .. }, _) => Some(vec![(0.0, pmf.clone())]),
            (CouplingLaw::Letterwise { kernel, .. }, SourceLaw::Letters { components, .. }) => {
                Some(
                    components
                        .iter()
                        .map(|c| {
                            (c.weight.ln(), kernel.push_forward(&c.pmf))
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    fn enumerate_marginal(&self, cap: f64) -> Result<OutputMarginal> {
        let support = self.source.support(cap)?;
        let mut table = HashMap::new();
        for y in Words::new(self.channel.outputs, self.n) {
            let mut terms = Vec::new();
            for (v, lp) in &support {
                for (x, lx) in self.coupling.support(v, self.n, cap)? {
                    let lw = self.channel.log_prob(&x, &y);
                    if lw > f64::NEG_INFINITY {
                        terms.push(lp + lx + lw);
                    }
                }
            }
            let l = log_sum_exp(&terms);
            if l > f64::NEG_INFINITY {
                table.insert(y, l);
            }
        }
        Ok(OutputMarginal::Enumerated(table))
    }

    pub fn taint(&self) -> Option<&'static str> {
        (!self.marginal.is_exact()).then_some("approximate-marginal")
    }

    pub fn log_pv(&self, v: &[u32]) -> f64 {
        self.source.log_prob(v)
    }

    pub fn log_px_given_v(&self, x: &[u32], v: &[u32]) -> f64 {
        self.coupling.log_prob(x, v)
    }

    pub fn log_w(&self, x: &[u32], y: &[u32]) -> f64 {
        self.channel.log_prob(x, y)
    }

    pub fn log_py(&self, y: &[u32]) -> f64 {
        match &self.marginal {
            OutputMarginal::Product { terms } => {
                let lse: Vec<f64> = terms
                    .iter()
                    .map(|t| t.log_weight + y.iter().map(|&s| t.log_pmf[s as usize]).sum::<f64>())
                    .collect();
                log_sum_exp(&lse)
            }
            OutputMarginal::Enumerated(t) => t.get(y).copied().unwrap_or(f64::NEG_INFINITY),
            OutputMarginal::PlugIn {
                counts,
                total,
                space,
            } => {
                let c = counts.get(y).copied().unwrap_or(0) as f64;
                ((c + 0.5) / (*total as f64 + 0.5 * space)).ln()
            }
        }
    }

    /// `(1/n) ln 1/P_{V^n}(v)`.
    pub fn entropy_density(&self, v: &[u32]) -> Result<f64> {
        entropy_value(self.log_pv(v), self.n)
    }

    /// `(1/n) ln W^n(y|x)/P_{Y^n}(y)`, with `-inf` when only `W^n(y|x)` vanishes.
    pub fn information_density(&self, x: &[u32], y: &[u32]) -> Result<f64> {
        information_value(self.log_w(x, y), self.log_py(y), self.n)
    }

    /// Ancestral sample of `(v, x, y)`.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        v: &mut Block,
        x: &mut Block,
        y: &mut Block,
    ) -> Result<()> {
        self.source.sample(rng, v);
        self.coupling.sample(rng, v, self.n, x)?;
        self.channel.sample(rng, x, y);
        Ok(())
    }

    /// Every `(v, x, y)` with positive probability and `ln P(v, x, y)`. The
    /// cap applies to the `(v, x)` pairs with positive probability times `|Y|^n`.
    pub fn joint_support(&self, cap: f64) -> Result<Vec<Triple>> {
        let outputs = space_size(self.channel.outputs, self.n);
        let mut pairs = Vec::new();
        for (v, lp) in self.source.support(cap)? {
            for (x, lx) in self.coupling.support(&v, self.n, cap)? {
                pairs.push((v.clone(), x, lp + lx));
                let size = pairs.len() as f64 * outputs;
                if size > cap {
                    return Err(Error::CapExceeded {
                        what: "joint support",
                        size,
                        cap,
                    });
                }
            }
        }
        let mut out = Vec::new();
        for (v, x, lvx) in pairs {
            for y in Words::new(self.channel.outputs, self.n) {
                let lw = self.channel.log_prob(&x, &y);
                if lw > f64::NEG_INFINITY {
                    out.push(Triple {
                        v: v.clone(),
                        x: x.clone(),
                        y,
                        log_prob: lvx + lw,
                    });
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn entropy_value(log_pv: f64, n: usize) -> Result<f64> {
    if log_pv == f64::NEG_INFINITY {
        return Err(Error::ZeroProbabilityOutcome);
    }
    Ok(-log_pv / n as f64)
}

pub(crate) fn information_value(log_w: f64, log_py: f64, n: usize) -> Result<f64> {
    match (log_w == f64::NEG_INFINITY, log_py == f64::NEG_INFINITY) {
        (true, true) => Err(Error::UndefinedDensity),
        (true, false) => Ok(f64::NEG_INFINITY),
        // W > 0 forces P_Y > 0 under an exact marginal.
        (false, true) => Err(Error::UndefinedDensity),
        (false, false) => Ok((log_w - log_py) / n as f64),
    }
}

/// One outcome of the joint law.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub v: Block,
    pub x: Block,
    pub y: Block,
    pub log_prob: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::EncoderMap;

    fn as_probs(t: &[Triple]) -> Vec<(Vec<u32>, Vec<u32>, Vec<u32>, f64)> {
        t.iter()
            .map(|t| (t.v.clone(), t.x.clone(), t.y.clone(), t.log_prob.exp()))
            .collect()
    }

    #[test]
    fn deterministic_pipeline() {
        let m = JointModel::new(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::identity(),
            ChannelModel::identity(2).unwrap(),
        );
        let s = as_probs(&m.resolve(1).unwrap().joint_support(1e7).unwrap());
        assert_eq!(
            s,
            vec![(vec![0], vec![0], vec![0], 0.5), (vec![1], vec![1], vec![1], 0.5)]
        );
    }

    #[test]
    fn alternating_odd_single_triple() {
        let m = JointModel::new(
            SourceModel::alternating(),
            InputCoupling::Deterministic(EncoderMap::Identity),
            ChannelModel::alternating(),
        );
        let s = as_probs(&m.resolve(1).unwrap().joint_support(1e7).unwrap());
        assert_eq!(s, vec![(vec![0], vec![0], vec![0], 1.0)]);
    }

    #[test]
    fn bsc_triples() {
        let m = JointModel::new(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::identity(),
            ChannelModel::bsc(0.1).unwrap(),
        );
        let s = as_probs(&m.resolve(1).unwrap().joint_support(1e7).unwrap());
        let expect = [
            (0, 0, 0, 0.45),
            (0, 0, 1, 0.05),
            (1, 1, 0, 0.05),
            (1, 1, 1, 0.45),
        ];
        assert_eq!(s.len(), 4);
        for ((v, x, y, p), e) in s.iter().zip(expect) {
            assert_eq!((v[0], x[0], y[0]), (e.0, e.1, e.2));
            assert!((p - e.3).abs() < 1e-15);
        }
    }

    #[test]
    fn table_encoder_marginal_is_enumerated() {
        let m = JointModel::new(
            SourceModel::bernoulli(0.25).unwrap(),
            InputCoupling::table([(vec![0, 0], vec![0, 0]), (vec![0, 1], vec![1, 1]),
                (vec![1, 0], vec![1, 1]), (vec![1, 1], vec![0, 0])]),
            ChannelModel::bsc(0.1).unwrap(),
        );
        let law = m.resolve(2).unwrap();
        assert!(matches!(law.marginal, OutputMarginal::Enumerated(_)));
        let total: f64 = Words::new(2, 2).map(|y| law.log_py(&y).exp()).sum();
        assert!((total - 1.0).abs() < 1e-14);
        // P(X = 00) = 9/16 + 1/16.
        let p00 = 0.625 * 0.81 + 0.375 * 0.01;
        assert!((law.log_py(&[0, 0]).exp() - p00).abs() < 1e-15);
    }

    #[test]
    fn plug_in_requires_flag() {
        let table: Vec<_> = Words::new(2, 12).map(|v| (v.clone(), v)).collect();
        let m = JointModel::new(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::table(table),
            ChannelModel::bsc(0.1).unwrap(),
        )
        .with_options(MarginalOptions {
            enumeration_cap: 1e3,
            ..Default::default()
        });
        assert_eq!(m.resolve(12).unwrap_err(), Error::MarginalUnavailable);
        let m = m.with_options(MarginalOptions {
            enumeration_cap: 1e3,
            allow_plug_in: true,
            plug_in_samples: 1000,
            seed: 3,
        });
        let law = m.resolve(12).unwrap();
        assert_eq!(law.taint(), Some("approximate-marginal"));
    }

    #[test]
    fn densities() {
        let m = JointModel::new(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::uniform(2).unwrap(),
            ChannelModel::bsc(0.1).unwrap(),
        );
        let law = m.resolve(1).unwrap();
        assert!((law.information_density(&[0], &[0]).unwrap() - 1.8f64.ln()).abs() < 1e-15);
        let id = JointModel::new(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::uniform(2).unwrap(),
            ChannelModel::identity(2).unwrap(),
        )
        .resolve(1)
        .unwrap();
        assert_eq!(id.information_density(&[0], &[1]).unwrap(), f64::NEG_INFINITY);
        assert!((id.information_density(&[0], &[0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(information_value(f64::NEG_INFINITY, f64::NEG_INFINITY, 1), Err(Error::UndefinedDensity));
        assert_eq!(id.entropy_density(&[2]), Err(Error::ZeroProbabilityOutcome));
    }
}
