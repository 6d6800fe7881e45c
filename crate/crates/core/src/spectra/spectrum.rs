//! Discrete distributions of a normalized density and their CDF queries.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atom values closer than this (relative to `max(1, |v|)`) are merged.
pub const VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SpectrumMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl SpectrumMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::MonteCarlo { .. } => "monte_carlo",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Exact => None,
            Self::MonteCarlo { seed, .. } => Some(*seed),
        }
    }
}

/// Law of a nats-per-symbol random variable at block length `n`.
///
/// Atoms are sorted ascending; `-inf` is allowed and sorts first. Monte Carlo
/// spectra keep every sample as an atom of weight `1/N`, merged when equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub n: usize,
    pub mode: SpectrumMode,
    values: Vec<f64>,
    masses: Vec<f64>,
    cumulative: Vec<f64>,
    /// `suffix[k] = Σ_{j >= k} masses[j]`, kept separately so small upper
    /// tails do not cancel against the total.
    suffix: Vec<f64>,
    pub taint: Option<String>,
}

pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0))
}

impl Spectrum {
    /// Sorts, drops zero masses and merges nearly equal values.
    pub fn from_atoms(n: usize, mode: SpectrumMode, mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.retain(|(_, m)| *m > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut masses: Vec<f64> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match values.last() {
                Some(&last) if close(last, v, VALUE_TOL) => *masses.last_mut().unwrap() += m,
                _ => {
                    values.push(v);
                    masses.push(m);
                }
            }
        }
        let mut acc = 0.0;
        let cumulative = masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        let mut suffix = vec![0.0; masses.len() + 1];
        for k in (0..masses.len()).rev() {
            suffix[k] = suffix[k + 1] + masses[k];
        }
        Self {
            n,
            mode,
            values,
            masses,
            cumulative,
            suffix,
            taint: None,
        }
    }

    /// Equally weighted samples.
    pub fn from_samples(n: usize, seed: u64, samples: &[f64]) -> Self {
        let w = 1.0 / samples.len() as f64;
        Self::from_atoms(
            n,
            SpectrumMode::MonteCarlo {
                samples: samples.len(),
                seed,
            },
            samples.iter().map(|&v| (v, w)).collect(),
        )
    }

    pub fn point(n: usize, value: f64) -> Self {
        Self::from_atoms(n, SpectrumMode::Exact, vec![(value, 1.0)])
    }

    pub fn with_taint(mut self, taint: Option<String>) -> Self {
        self.taint = taint;
        self
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.masses.iter().copied())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("spectrum has atoms")
    }

    /// `Pr{value <= t}`.
    pub fn cdf(&self, t: f64) -> f64 {
        let k = self.values.partition_point(|v| *v <= t);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `Pr{value < t}`.
    pub fn cdf_strict(&self, t: f64) -> f64 {
        let k = self.values.partition_point(|v| *v < t);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `Pr{value >= t}`.
    pub fn upper_cdf(&self, t: f64) -> f64 {
        self.suffix[self.values.partition_point(|v| *v < t)]
    }

    /// Mass of `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf(hi) - self.cdf_strict(lo)).max(0.0)
    }

    /// Smallest atom value whose CDF reaches `q`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidQuantile(q));
        }
        let total = self.total_mass();
        let target = q * total - 1e-12 * total;
        let k = self.cumulative.partition_point(|c| *c < target);
        Ok(self.values[k.min(self.values.len() - 1)])
    }

    /// Quantile of the mid-distribution: each atom sits at the midpoint of its
    /// CDF jump and the quantile interpolates linearly between neighbours.
    /// On lattice spectra this removes the sawtooth of [`Spectrum::quantile`]
    /// along a grid of block lengths. Falls back to the step quantile next to
    /// non-finite atoms.
    pub fn mid_quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidQuantile(q));
        }
        let total = self.total_mass();
        let mid = |k: usize| (self.cumulative[k] - 0.5 * self.masses[k]) / total;
        let last = self.values.len() - 1;
        if q <= mid(0) {
            return Ok(self.values[0]);
        }
        if q >= mid(last) {
            return Ok(self.values[last]);
        }
        let k = (1..=last).find(|&k| q <= mid(k)).unwrap_or(last);
        let (lo, hi) = (self.values[k - 1], self.values[k]);
        if !lo.is_finite() || !hi.is_finite() {
            return self.quantile(q);
        }
        let t = (q - mid(k - 1)) / (mid(k) - mid(k - 1));
        Ok(lo + t * (hi - lo))
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, m)| v * m).sum::<f64>() / self.total_mass()
    }

    /// Total variation distance, pairing atoms whose values agree within `tol`.
    pub fn tv(&self, other: &Spectrum, tol: f64) -> f64 {
        let (a, b) = (&self, other);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() || j < b.len() {
            if i < a.len() && j < b.len() && close(a.values[i], b.values[j], tol) {
                acc += (a.masses[i] - b.masses[j]).abs();
                i += 1;
                j += 1;
            } else if j >= b.len() || (i < a.len() && a.values[i] < b.values[j]) {
                acc += a.masses[i];
                i += 1;
            } else {
                acc += b.masses[j];
                j += 1;
            }
        }
        0.5 * acc
    }

    /// Kolmogorov–Smirnov distance `sup_t |F(t) - G(t)|`. Atoms of the two
    /// spectra within [`VALUE_TOL`] of each other count as the same point, so
    /// rounding differences between routes do not register as a full atom.
    pub fn ks(&self, other: &Spectrum) -> f64 {
        self.values
            .iter()
            .chain(&other.values)
            .map(|&t| {
                let t = if t.is_finite() { t + VALUE_TOL * t.abs().max(1.0) } else { t };
                (self.cdf(t) - other.cdf(t)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Rows of the spectrum CSV (`n,value,mass,mode,seed`), no header.
    pub fn write_csv_rows(&self, out: &mut String) {
        let seed = self.mode.seed().map(|s| s.to_string()).unwrap_or_default();
        for (v, m) in self.atoms() {
            let _ = writeln!(out, "{},{},{},{},{}", self.n, fmt_value(v), m, self.mode.name(), seed);
        }
    }
}

pub const SPECTRUM_CSV_HEADER: &str = "n,value,mass,mode,seed";

/// Shortest round-trip formatting with `-inf`/`inf` literals.
pub fn fmt_value(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern_quarter() -> Spectrum {
        Spectrum::from_atoms(
            1,
            SpectrumMode::Exact,
            vec![(-(0.25f64).ln(), 0.25), (-(0.75f64).ln(), 0.75)],
        )
    }

    #[test]
    fn point_queries() {
        let s = Spectrum::point(3, 2f64.ln());
        assert_eq!(s.upper_cdf(0.5), 1.0);
        assert_eq!(s.cdf(0.5), 0.0);
        assert_eq!(s.quantile(0.3).unwrap(), 2f64.ln());
    }

    #[test]
    fn bernoulli_cdf_and_quantiles() {
        let s = bern_quarter();
        assert_eq!(s.cdf(1.0), 0.75);
        assert_eq!(s.quantile(1.0).unwrap(), -(0.25f64).ln());
        assert_eq!(s.quantile(0.75).unwrap(), -(0.75f64).ln());
        assert_eq!(s.quantile(0.0).unwrap(), -(0.75f64).ln());
        assert!(s.quantile(1.5).is_err());
    }

    #[test]
    fn mid_quantile_interpolates() {
        let s = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(s.mid_quantile(0.1).unwrap(), 0.0);
        assert!((s.mid_quantile(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(s.mid_quantile(0.9).unwrap(), 1.0);
        let t = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(f64::NEG_INFINITY, 0.5), (0.0, 0.5)]);
        assert_eq!(t.mid_quantile(0.4).unwrap(), f64::NEG_INFINITY);
        assert_eq!(Spectrum::point(2, 3.0).mid_quantile(0.999).unwrap(), 3.0);
    }

    #[test]
    fn neg_infinity_sentinel() {
        let s = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(f64::NEG_INFINITY, 0.5), (0.0, 0.5)]);
        assert_eq!(s.cdf(-1e300), 0.5);
        assert_eq!(s.upper_cdf(-1e300), 0.5);
        assert_eq!(s.quantile(0.25).unwrap(), f64::NEG_INFINITY);
        let mut csv = String::new();
        s.write_csv_rows(&mut csv);
        assert!(csv.starts_with("1,-inf,0.5,exact,\n"));
    }

    #[test]
    fn merging_and_distances() {
        let a = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(1.0, 0.5), (1.0 + 1e-14, 0.5)]);
        assert_eq!(a.len(), 1);
        let b = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(1.0, 0.25), (2.0, 0.75)]);
        assert!((a.tv(&b, 1e-12) - 0.75).abs() < 1e-15);
        assert!((a.ks(&b) - 0.75).abs() < 1e-15);
        let c = Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(1.0 + 1e-14, 0.25), (2.0 - 1e-14, 0.75)]);
        assert_eq!(b.ks(&c), 0.0);
        assert_eq!(a.tv(&a, 1e-12), 0.0);
    }
}
