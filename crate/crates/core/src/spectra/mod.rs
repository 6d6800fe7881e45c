//! Entropy and information spectra: exact routes, Monte Carlo, and p-lim proxies.

mod exact;
mod joint;
mod mc;
mod spectrum;
mod summary;

pub use exact::{
    composition_count, exact_entropy_spectrum, exact_information_spectrum, exact_joint_law,
    joint_support_size, ExactOptions, ExactRoute,
};
pub use joint::{JointAtom, JointLaw, TIE_TOLERANCE};
pub use mc::{dkw_epsilon, mc_entropy_spectrum, mc_information_spectrum, mc_joint_law, sample_chunks};
pub use spectrum::{fmt_value, Spectrum, SpectrumMode, SPECTRUM_CSV_HEADER, VALUE_TOL};
pub use summary::{
    estimate_from_trajectory, ls_slope, plim_estimate, upper_half, PlimEstimate, PlimKind,
    PlimMethod, SpectralSummary, DEFAULT_DELTA, SUMMARY_CSV_HEADER,
};

use crate::error::{Error, Result};
use crate::models::{BlockLaw, SourceLaw};

/// How to obtain the joint law of `(A_n, B_n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum JointEval {
    Exact(ExactOptions),
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact when within caps, otherwise Monte Carlo.
    Auto {
        exact: ExactOptions,
        samples: usize,
        seed: u64,
    },
}

impl Default for JointEval {
    fn default() -> Self {
        Self::Exact(ExactOptions::default())
    }
}

pub fn joint_law(law: &BlockLaw, eval: &JointEval) -> Result<JointLaw> {
    match eval {
        JointEval::Exact(opts) => exact_joint_law(law, opts),
        JointEval::MonteCarlo { samples, seed } => mc_joint_law(law, *samples, *seed),
        JointEval::Auto {
            exact,
            samples,
            seed,
        } => match exact_joint_law(law, exact) {
            Err(Error::CapExceeded { .. }) | Err(Error::Incompatible(_)) => {
                mc_joint_law(law, *samples, *seed)
            }
            other => other,
        },
    }
}

/// Entropy spectrum at `n` under the same evaluation policy as [`joint_law`].
pub fn entropy_spectrum(source: &SourceLaw, n: usize, eval: &JointEval) -> Result<Spectrum> {
    match eval {
        JointEval::Exact(opts) => exact_entropy_spectrum(source, n, opts),
        JointEval::MonteCarlo { samples, seed } => mc_entropy_spectrum(source, n, *samples, *seed),
        JointEval::Auto {
            exact,
            samples,
            seed,
        } => match exact_entropy_spectrum(source, n, exact) {
            Err(Error::CapExceeded { .. }) | Err(Error::Incompatible(_)) => {
                mc_entropy_spectrum(source, n, *samples, *seed)
            }
            other => other,
        },
    }
}

/// Information spectrum under the same evaluation policy as [`joint_law`].
pub fn information_spectrum(law: &BlockLaw, eval: &JointEval) -> Result<Spectrum> {
    match eval {
        JointEval::Exact(opts) => exact_information_spectrum(law, opts),
        JointEval::MonteCarlo { samples, seed } => mc_information_spectrum(law, *samples, *seed),
        JointEval::Auto {
            exact,
            samples,
            seed,
        } => match exact_information_spectrum(law, exact) {
            Err(Error::CapExceeded { .. }) | Err(Error::Incompatible(_)) => {
                mc_information_spectrum(law, *samples, *seed)
            }
            other => other,
        },
    }
}
