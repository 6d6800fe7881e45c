//! Joint law of the information density `A_n` and the entropy density `B_n`.

use crate::spectra::spectrum::{Spectrum, SpectrumMode};

/// Slack used when comparing densities, so that exact ties such as
/// `A = B + γ` are not decided by rounding.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointAtom {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum JointLaw {
    /// Explicit atoms (exact) or equally weighted samples (Monte Carlo).
    Atoms {
        n: usize,
        mode: SpectrumMode,
        atoms: Vec<JointAtom>,
        taint: Option<String>,
    },
    /// `A_n` independent of `B_n`, stored as its two marginals.
    Independent { info: Spectrum, entropy: Spectrum },
}

impl JointLaw {
    pub fn from_atoms(n: usize, mode: SpectrumMode, mut atoms: Vec<JointAtom>) -> Self {
        atoms.retain(|t| t.mass > 0.0);
        atoms.sort_by(|x, y| x.b.total_cmp(&y.b).then(x.a.total_cmp(&y.a)));
        Self::Atoms {
            n,
            mode,
            atoms,
            taint: None,
        }
    }

    pub fn with_taint(mut self, t: Option<String>) -> Self {
        if let Self::Atoms { taint, .. } = &mut self {
            *taint = t;
        }
        self
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Atoms { n, .. } => *n,
            Self::Independent { info, .. } => info.n,
        }
    }

    pub fn mode(&self) -> SpectrumMode {
        match self {
            Self::Atoms { mode, .. } => *mode,
            Self::Independent { info, entropy } => match info.mode {
                SpectrumMode::Exact => entropy.mode,
                m => m,
            },
        }
    }

    pub fn taint(&self) -> Option<&str> {
        match self {
            Self::Atoms { taint, .. } => taint.as_deref(),
            Self::Independent { info, entropy } => {
                info.taint.as_deref().or(entropy.taint.as_deref())
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        self.mode() == SpectrumMode::Exact
    }

    /// `Pr{A_n <= B_n + shift}`, ties resolved with [`TIE_TOLERANCE`].
    pub fn prob_a_le_b_plus(&self, shift: f64) -> f64 {
        match self {
            Self::Atoms { atoms, .. } => atoms
                .iter()
                .filter(|t| t.a <= t.b + shift + TIE_TOLERANCE)
                .map(|t| t.mass)
                .sum(),
            Self::Independent { info, entropy } => entropy
                .atoms()
                .map(|(b, m)| m * info.cdf(b + shift + TIE_TOLERANCE))
                .sum(),
        }
    }

    /// `Pr{B_n >= c}`.
    pub fn prob_b_ge(&self, c: f64) -> f64 {
        self.entropy_marginal().upper_cdf(c)
    }

    /// `Pr{A_n <= t}`.
    pub fn prob_a_le(&self, t: f64) -> f64 {
        self.info_marginal().cdf(t)
    }

    /// `Pr{A_n >= t}`.
    pub fn prob_a_ge(&self, t: f64) -> f64 {
        self.info_marginal().upper_cdf(t)
    }

    pub fn info_marginal(&self) -> Spectrum {
        match self {
            Self::Atoms {
                n,
                mode,
                atoms,
                taint,
            } => Spectrum::from_atoms(*n, *mode, atoms.iter().map(|t| (t.a, t.mass)).collect())
                .with_taint(taint.clone()),
            Self::Independent { info, .. } => info.clone(),
        }
    }

    pub fn entropy_marginal(&self) -> Spectrum {
        match self {
            Self::Atoms { n, mode, atoms, .. } => {
                Spectrum::from_atoms(*n, *mode, atoms.iter().map(|t| (t.b, t.mass)).collect())
            }
            Self::Independent { entropy, .. } => entropy.clone(),
        }
    }

    /// Explicit atoms; the product of the marginals for the independent form.
    pub fn atoms(&self) -> Vec<JointAtom> {
        match self {
            Self::Atoms { atoms, .. } => atoms.clone(),
            Self::Independent { info, entropy } => entropy
                .atoms()
                .flat_map(|(b, mb)| info.atoms().map(move |(a, ma)| JointAtom { a, b, mass: ma * mb }))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_matches_product_atoms() {
        let info = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(0.1, 0.5), (0.9, 0.5)]);
        let entropy = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(0.2, 0.25), (0.5, 0.75)]);
        let ind = JointLaw::Independent { info, entropy };
        let flat = JointLaw::from_atoms(1, SpectrumMode::Exact, ind.atoms());
        for s in [-0.5, 0.0, 0.3, 0.4, 1.0] {
            assert!((ind.prob_a_le_b_plus(s) - flat.prob_a_le_b_plus(s)).abs() < 1e-15);
        }
        assert_eq!(ind.prob_b_ge(0.5), 0.75);
        assert_eq!(flat.prob_a_le(0.1), 0.5);
    }

    #[test]
    fn ties_count_as_not_exceeding() {
        let law = JointLaw::from_atoms(
            1,
            SpectrumMode::Exact,
            vec![JointAtom { a: 4f64.ln(), b: 2f64.ln(), mass: 1.0 }],
        );
        assert_eq!(law.prob_a_le_b_plus(2f64.ln()), 1.0);
        assert_eq!(law.prob_a_le_b_plus(0.3), 0.0);
    }
}
