//! Finite probability vectors, stochastic matrices and log-domain helpers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance for probability vectors and kernel rows.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability vector over a finite ordered symbol set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    symbols: Vec<u32>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(symbols: Vec<u32>, probs: Vec<f64>) -> Result<Self> {
        if symbols.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} symbols but {} probabilities",
                symbols.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut sorted = symbols.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDistribution("duplicate symbols".into()));
        }
        check_probability_vector(&probs)?;
        Ok(Self { symbols, probs })
    }

    /// Distribution over `0..probs.len()`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let symbols = (0..probs.len() as u32).collect();
        Self::new(symbols, probs)
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Self::from_probs(vec![1.0 / size as f64; size])
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_of(&self, symbol: u32) -> f64 {
        self.symbols
            .iter()
            .position(|&s| s == symbol)
            .map_or(0.0, |i| self.probs[i])
    }
}

/// Checks nonnegativity and unit sum within [`NORMALIZATION_TOL`].
pub fn check_probability_vector(probs: &[f64]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
    }
    let residual = (probs.iter().sum::<f64>() - 1.0).abs();
    if residual > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to 1 - {residual:e}"
        )));
    }
    Ok(())
}

/// Mixture weights must be strictly positive and sum to one.
pub fn check_mixture_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no components".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
        return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
    }
    let residual = (weights.iter().sum::<f64>() - 1.0).abs();
    if residual > NORMALIZATION_TOL {
        return Err(Error::InvalidWeights(format!(
            "weights sum to {}",
            weights.iter().sum::<f64>()
        )));
    }
    Ok(())
}

/// `ln Σ exp(x_i)` without overflow; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Row-stochastic matrix `rows[input][output]` with cached logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    rows: Vec<Vec<f64>>,
    log_rows: Vec<Vec<f64>>,
    outputs: usize,
}

impl Kernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let residuals = row_residuals(&rows)?;
        if let Some((row, residual)) = residuals
            .iter()
            .copied()
            .enumerate()
            .find(|(_, r)| *r > NORMALIZATION_TOL)
        {
            return Err(Error::NonStochasticMatrix { row, residual });
        }
        let outputs = rows[0].len();
        let log_rows = rows
            .iter()
            .map(|r| r.iter().map(|p| p.ln()).collect())
            .collect();
        Ok(Self {
            rows,
            log_rows,
            outputs,
        })
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::new(
            (0..size)
                .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Every input row equal to `pmf`.
    pub fn constant_rows(inputs: usize, pmf: &[f64]) -> Result<Self> {
        Self::new(vec![pmf.to_vec(); inputs])
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    #[inline]
    pub fn prob(&self, input: u32, output: u32) -> f64 {
        self.rows[input as usize][output as usize]
    }

    #[inline]
    pub fn log_prob(&self, input: u32, output: u32) -> f64 {
        self.log_rows[input as usize][output as usize]
    }

    /// Output law `Σ_x p(x) W(·|x)` for an input law `p`.
    pub fn push_forward(&self, input: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs];
        for (p, row) in input.iter().zip(&self.rows) {
            if *p == 0.0 {
                continue;
            }
            for (o, w) in out.iter_mut().zip(row) {
                *o += p * w;
            }
        }
        out
    }

    /// Kernel composition `(self ∘ next)(z|x) = Σ_y self(y|x) next(z|y)`.
    pub fn compose(&self, next: &Kernel) -> Result<Kernel> {
        if self.outputs != next.inputs() {
            return Err(Error::AlphabetMismatch(format!(
                "cannot compose {}-output kernel with {}-input kernel",
                self.outputs,
                next.inputs()
            )));
        }
        Kernel::new(self.rows.iter().map(|r| next.push_forward(r)).collect())
    }
}

/// Absolute deviation of each row sum from one; errors on malformed shape.
pub fn row_residuals(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::InvalidDistribution("empty matrix".into()));
    }
    let width = rows[0].len();
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != width {
                return Err(Error::AlphabetMismatch(format!(
                    "row {i} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::NonStochasticMatrix {
                    row: i,
                    residual: f64::NAN,
                });
            }
            Ok((row.iter().sum::<f64>() - 1.0).abs())
        })
        .collect()
}

/// Inverse-CDF sampler for a small categorical law.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // Pin the last reachable entry so rounding never walks off the end.
        if let Some(last) = probs.iter().rposition(|p| *p > 0.0) {
            for c in &mut cumulative[last..] {
                *c = f64::INFINITY;
            }
        }
        Self { cumulative }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|c| *c <= u) as u32
    }
}
