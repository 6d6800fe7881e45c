//! Blahut–Arimoto capacity of a discrete memoryless channel.

use serde::{Deserialize, Serialize};

use crate::dist::Kernel;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capacity {
    /// Capacity in nats (the lower end of the final bracket).
    pub capacity: f64,
    /// Upper end of the final bracket, `max_x D(W(·|x) || q)`.
    pub upper: f64,
    pub input: Vec<f64>,
    pub iterations: usize,
}

/// Iterates until the bracket `[I(p), max_x D(W(·|x) || pW)]` is narrower than `tol`.
pub fn dmc_capacity(matrix: &[Vec<f64>], tol: f64) -> Result<Capacity> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let kernel = Kernel::new(matrix.to_vec())?;
    let k = kernel.inputs();
    let mut p = vec![1.0 / k as f64; k];
    let mut d = vec![0.0; k];
    for it in 1..=MAX_ITERATIONS {
        let q = kernel.push_forward(&p);
        for (dx, row) in d.iter_mut().zip(kernel.rows()) {
            *dx = row
                .iter()
                .zip(&q)
                .filter(|(w, _)| **w > 0.0)
                .map(|(w, qy)| w * (w / qy).ln())
                .sum();
        }
        let lower: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower < tol || it == MAX_ITERATIONS {
            return Ok(Capacity {
                capacity: lower.max(0.0),
                upper,
                input: p,
                iterations: it,
            });
        }
        let shift = upper;
        for (px, dx) in p.iter_mut().zip(&d) {
            *px *= (dx - shift).exp();
        }
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|px| *px /= z);
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn bsc() {
        let c = dmc_capacity(&[vec![0.9, 0.1], vec![0.1, 0.9]], 1e-12).unwrap();
        assert!((c.capacity - (2f64.ln() - h(0.1))).abs() < 1e-9);
        assert!((c.capacity - 0.368064).abs() < 1e-6);
        let c = dmc_capacity(&[vec![0.5, 0.5], vec![0.5, 0.5]], 1e-12).unwrap();
        assert!(c.capacity.abs() < 1e-12);
    }

    #[test]
    fn identity_and_bec() {
        let id: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let c = dmc_capacity(&id, 1e-12).unwrap();
        assert!((c.capacity - 3f64.ln()).abs() < 1e-9);
        assert!(c.input.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-6));
        let e = 0.3;
        let c = dmc_capacity(&[vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]], 1e-12).unwrap();
        assert!((c.capacity - (1.0 - e) * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_channel_bracket_closes() {
        let m = [vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8]];
        let c = dmc_capacity(&m, 1e-10).unwrap();
        assert!(c.upper - c.capacity < 1e-10);
    }

    #[test]
    fn rejects_non_stochastic() {
        assert!(matches!(
            dmc_capacity(&[vec![0.5, 0.4]], 1e-9),
            Err(Error::NonStochasticMatrix { .. })
        ));
    }
}
