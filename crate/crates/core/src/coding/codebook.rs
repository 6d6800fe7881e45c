//! Codebooks over the source support and the information-density threshold decoder.

use rand::Rng;

use crate::block::{Block, Words};
use crate::error::Result;
use crate::models::BlockLaw;
use crate::spectra::TIE_TOLERANCE;

/// Encoder table `v -> x(v)` over the enumerated support of `V^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub n: usize,
    /// `(v, ln P_{V^n}(v), x(v))` in support order.
    pub entries: Vec<(Block, f64, Block)>,
    /// `(seed, substream index)` for sampled codebooks.
    pub stream: Option<(u64, u64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoded {
    /// Index into the codebook entries.
    Message(usize),
    /// No candidate or more than one candidate passed the threshold.
    Ambiguous,
}

impl Codebook {
    pub fn from_entries(n: usize, entries: Vec<(Block, f64, Block)>) -> Self {
        Self {
            n,
            entries,
            stream: None,
        }
    }

    /// Draws `x(v) ~ P_{X^n|V^n}(·|v)` independently for each `v`, in support order.
    pub fn sample<R: Rng + ?Sized>(law: &BlockLaw, support: &[(Block, f64)], rng: &mut R) -> Result<Self> {
        let mut entries = Vec::with_capacity(support.len());
        for (v, lp) in support {
            let mut x = Vec::with_capacity(law.n);
            law.coupling.sample(rng, v, law.n, &mut x)?;
            entries.push((v.clone(), *lp, x));
        }
        Ok(Self::from_entries(law.n, entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Whether `(v, x, y)` lies in the threshold set: `A > B + γ`.
#[inline]
pub fn passes(a: f64, b: f64, gamma: f64) -> bool {
    a > b + gamma + TIE_TOLERANCE
}

/// Information density with `-inf` whenever `W^n(y|x) = 0`, including the
/// case where `y` is outside the marginal's support.
pub(crate) fn density_or_sentinel(law: &BlockLaw, x: &[u32], y: &[u32], log_py: f64) -> f64 {
    let lw = law.log_w(x, y);
    if lw == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        (lw - log_py) / law.n as f64
    }
}

/// The unique codebook entry whose triple passes the threshold, if any.
///
/// `P_{Y^n}` is the ensemble marginal carried by `law`.
pub fn threshold_decode(codebook: &Codebook, law: &BlockLaw, gamma: f64, y: &[u32]) -> Decoded {
    let log_py = law.log_py(y);
    let n = law.n as f64;
    let mut found = None;
    for (i, (_, lp, x)) in codebook.entries.iter().enumerate() {
        let a = density_or_sentinel(law, x, y, log_py);
        if passes(a, -lp / n, gamma) {
            if found.is_some() {
                return Decoded::Ambiguous;
            }
            found = Some(i);
        }
    }
    found.map_or(Decoded::Ambiguous, Decoded::Message)
}

/// Exact error probability of a codebook under the threshold decoder, with
/// ambiguous outputs scored as errors.
pub fn fixed_code_error(codebook: &Codebook, law: &BlockLaw, gamma: f64) -> f64 {
    let mut correct = 0.0;
    for y in Words::new(law.channel.outputs, law.n) {
        if let Decoded::Message(i) = threshold_decode(codebook, law, gamma, &y) {
            let (_, lp, x) = &codebook.entries[i];
            correct += (lp + law.log_w(x, &y)).exp();
        }
    }
    (1.0 - correct).clamp(0.0, 1.0)
}

/// One transmission through a codebook: draw `v`, send `x(v)`, decode.
pub fn transmit_once<R: Rng + ?Sized>(codebook: &Codebook, law: &BlockLaw, gamma: f64, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut pick = codebook.len() - 1;
    for (i, (_, lp, _)) in codebook.entries.iter().enumerate() {
        acc += lp.exp();
        if u < acc {
            pick = i;
            break;
        }
    }
    let mut y = Vec::with_capacity(law.n);
    law.channel.sample(rng, &codebook.entries[pick].2, &mut y);
    threshold_decode(codebook, law, gamma, &y) != Decoded::Message(pick)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ChannelModel, InputCoupling, JointModel, SourceModel};

    fn setup() -> BlockLaw {
        JointModel::new(
            SourceModel::bernoulli(0.5).unwrap(),
            InputCoupling::uniform(4).unwrap(),
            ChannelModel::identity(4).unwrap(),
        )
        .resolve(1)
        .unwrap()
    }

    fn book(x0: u32, x1: u32) -> Codebook {
        let l = 0.5f64.ln();
        Codebook::from_entries(1, vec![(vec![0], l, vec![x0]), (vec![1], l, vec![x1])])
    }

    #[test]
    fn decodes_unique_candidate() {
        let law = setup();
        assert_eq!(threshold_decode(&book(0, 2), &law, 0.3, &[2]), Decoded::Message(1));
    }

    #[test]
    fn collision_is_ambiguous() {
        let law = setup();
        assert_eq!(threshold_decode(&book(0, 0), &law, 0.3, &[0]), Decoded::Ambiguous);
    }

    #[test]
    fn large_gamma_rejects_everything() {
        let law = setup();
        let g = 4f64.ln() - 2f64.ln();
        for y in 0..4 {
            assert_eq!(threshold_decode(&book(0, 2), &law, g, &[y]), Decoded::Ambiguous);
        }
        assert_eq!(fixed_code_error(&book(0, 2), &law, g), 1.0);
        assert_eq!(fixed_code_error(&book(0, 2), &law, 0.3), 0.0);
    }
}
