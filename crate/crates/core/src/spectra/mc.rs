//! Seeded Monte Carlo spectra.
//!
//! Samples are drawn in chunks of [`CHUNK`]; chunk `c` always uses the same
//! substream and results are concatenated in chunk order, so the output does
//! not depend on the rayon pool size.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{entropy_value, BlockLaw, SourceLaw};
use crate::rng::{domain, substream, CHUNK};
use crate::spectra::joint::{JointAtom, JointLaw};
use crate::spectra::spectrum::{Spectrum, SpectrumMode};

/// Runs `draw` once per sample across chunks and returns the samples in order.
pub fn sample_chunks<T, F>(samples: usize, seed: u64, dom: u64, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    if samples == 0 {
        return Err(Error::ZeroBudget);
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, dom, c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(samples);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Entropy spectrum from `samples` draws of `V^n`.
pub fn mc_entropy_spectrum(source: &SourceLaw, n: usize, samples: usize, seed: u64) -> Result<Spectrum> {
    if let SourceLaw::Messages { count } = source {
        if samples == 0 {
            return Err(Error::ZeroBudget);
        }
        let v = (*count as f64).ln() / n as f64;
        return Ok(Spectrum::from_samples(n, seed, &vec![v; samples]));
    }
    let values = sample_chunks(samples, seed, domain::at(domain::ENTROPY, n), |rng| {
        let mut v = Vec::with_capacity(n);
        source.sample(rng, &mut v);
        entropy_value(source.log_prob(&v), n)
    })?;
    Ok(Spectrum::from_samples(n, seed, &values))
}

/// Information spectrum from ancestral draws of `(V^n, X^n, Y^n)`.
pub fn mc_information_spectrum(law: &BlockLaw, samples: usize, seed: u64) -> Result<Spectrum> {
    let values = sample_chunks(samples, seed, domain::at(domain::INFORMATION, law.n), |rng| {
        let (mut v, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
        law.sample(rng, &mut v, &mut x, &mut y)?;
        law.information_density(&x, &y)
    })?;
    Ok(Spectrum::from_samples(law.n, seed, &values).with_taint(law.taint().map(Into::into)))
}

/// Joint law of `(A_n, B_n)` from ancestral draws.
pub fn mc_joint_law(law: &BlockLaw, samples: usize, seed: u64) -> Result<JointLaw> {
    let atoms = sample_chunks(samples, seed, domain::at(domain::JOINT, law.n), |rng| {
        let (mut v, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
        law.sample(rng, &mut v, &mut x, &mut y)?;
        Ok(JointAtom {
            a: law.information_density(&x, &y)?,
            b: law.entropy_density(&v)?,
            mass: 1.0 / samples as f64,
        })
    })?;
    Ok(JointLaw::from_atoms(law.n, SpectrumMode::MonteCarlo { samples, seed }, atoms)
        .with_taint(law.taint().map(Into::into)))
}

/// DKW half-width: `sup |F_N - F| <= sqrt(ln(2/α) / 2N)` with probability `1 - α`.
pub fn dkw_epsilon(samples: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * samples as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SourceModel;

    #[test]
    fn uniform_source_is_a_point() {
        let src = SourceModel::bernoulli(0.5).unwrap().resolve(8).unwrap();
        let s = mc_entropy_spectrum(&src, 8, 5000, 11).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.values()[0] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn reproducible_and_pool_independent() {
        let src = SourceModel::bernoulli(0.2).unwrap().resolve(16).unwrap();
        let a = mc_entropy_spectrum(&src, 16, 10_000, 5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| mc_entropy_spectrum(&src, 16, 10_000, 5).unwrap());
        assert_eq!(a, b);
        assert_eq!(mc_entropy_spectrum(&src, 16, 0, 5), Err(Error::ZeroBudget));
    }
}
