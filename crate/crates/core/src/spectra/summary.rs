//! Finite-grid proxies for the limit superior / inferior in probability.
//!
//! The `(1-δ)`- or `δ`-quantile (of the mid-distribution, see
//! [`Spectrum::mid_quantile`]) is tracked over the block-length grid. When
//! the trajectory is constant it is reported as is. When it is monotone it is
//! extrapolated with `L + b n^{-1/2} (+ c/n)` fitted on the largest block lengths, since extreme quantiles of a
//! concentrating density approach their limit at rate `n^{-1/2}`. Otherwise
//! (oscillating families) the extremum over the upper half of the grid is
//! used: the maximum for a limsup, the minimum for a liminf.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::spectrum::Spectrum;

pub const DEFAULT_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlimKind {
    PLimsup,
    PLiminf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlimMethod {
    Constant,
    Extrapolated,
    TailExtremum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlimEstimate {
    pub kind: PlimKind,
    pub delta: f64,
    pub grid: Vec<usize>,
    pub trajectory: Vec<f64>,
    pub estimate: f64,
    /// Quantile at the largest grid point.
    pub last: f64,
    pub monotone: bool,
    pub method: PlimMethod,
    /// Least-squares slope of the trajectory against `n` over the upper half.
    pub slope: f64,
}

/// Least-squares slope of `ys` against `xs`; zero for fewer than two points.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Indices of the upper half of the grid (at least two points when possible).
pub fn upper_half(len: usize) -> std::ops::Range<usize> {
    let start = (len / 2).min(len.saturating_sub(2));
    start..len
}

/// The extrapolation uses grid points within this many octaves of the
/// largest block length; smaller ones carry higher-order terms the fit does
/// not model. On a doubling grid that is the last four points.
pub const FIT_OCTAVES: u32 = 3;

/// Intercept of a least-squares fit of `ys` on the columns `1, n^{-1/2}[, 1/n]`
/// over the points within [`FIT_OCTAVES`] of the largest `n`. The `1/n` column
/// needs four points spanning a factor of 4; a window narrower than a factor
/// of 2 carries no trend information and returns the last value.
fn extrapolate(grid: &[usize], ys: &[f64]) -> f64 {
    let n_max = grid[grid.len() - 1] as f64;
    let in_window = grid.iter().filter(|&&n| n as f64 * f64::from(1u32 << FIT_OCTAVES) >= n_max).count();
    let skip = grid.len() - in_window.max(2);
    let (grid, ys) = (&grid[skip..], &ys[skip..]);
    let span = n_max / grid[0] as f64;
    let cols: usize = match (grid.len(), span) {
        (_, s) if s < 2.0 => return ys[ys.len() - 1],
        (k, s) if k >= 4 && s >= 4.0 => 3,
        _ => 2,
    };
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .map(|&n| {
            let n = n as f64;
            [1.0, n.powf(-0.5), 1.0 / n][..cols].to_vec()
        })
        .collect();
    // Normal equations; at most 3x3.
    let mut a = vec![vec![0.0; cols + 1]; cols];
    for (r, y) in rows.iter().zip(ys) {
        for i in 0..cols {
            for j in 0..cols {
                a[i][j] += r[i] * r[j];
            }
            a[i][cols] += r[i] * y;
        }
    }
    for p in 0..cols {
        let piv = (p..cols)
            .max_by(|&i, &j| a[i][p].abs().total_cmp(&a[j][p].abs()))
            .expect("non-empty");
        a.swap(p, piv);
        if a[p][p].abs() < 1e-300 {
            return ys[ys.len() - 1];
        }
        for i in 0..cols {
            if i != p {
                let f = a[i][p] / a[p][p];
                for j in p..=cols {
                    a[i][j] -= f * a[p][j];
                }
            }
        }
    }
    a[0][cols] / a[0][0]
}

/// p-limsup / p-liminf proxy from spectra on an increasing grid.
pub fn plim_estimate(spectra: &[Spectrum], kind: PlimKind, delta: f64) -> Result<PlimEstimate> {
    if spectra.len() < 2 {
        return Err(Error::InvalidParameter("p-lim proxy needs at least two grid points".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidQuantile(delta));
    }
    let mut sorted: Vec<&Spectrum> = spectra.iter().collect();
    sorted.sort_by_key(|s| s.n);
    let grid: Vec<usize> = sorted.iter().map(|s| s.n).collect();
    let q = match kind {
        PlimKind::PLimsup => 1.0 - delta,
        PlimKind::PLiminf => delta,
    };
    let trajectory: Vec<f64> = sorted.iter().map(|s| s.mid_quantile(q)).collect::<Result<_>>()?;
    Ok(estimate_from_trajectory(kind, delta, grid, trajectory))
}

pub fn estimate_from_trajectory(
    kind: PlimKind,
    delta: f64,
    grid: Vec<usize>,
    trajectory: Vec<f64>,
) -> PlimEstimate {
    let last = *trajectory.last().expect("non-empty grid");
    let hi = trajectory.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = trajectory.iter().copied().fold(f64::INFINITY, f64::min);
    let finite = hi.is_finite() && lo.is_finite();
    let range = hi - lo;
    let tol = 1e-9 + 0.02 * if finite { range } else { 0.0 };
    let increasing = trajectory.windows(2).all(|w| w[1] >= w[0] - tol);
    let decreasing = trajectory.windows(2).all(|w| w[1] <= w[0] + tol);
    let monotone = finite && (increasing || decreasing);
    let half = upper_half(grid.len());
    let xs: Vec<f64> = grid[half.clone()].iter().map(|&n| n as f64).collect();
    let slope = if finite {
        ls_slope(&xs, &trajectory[half.clone()])
    } else {
        0.0
    };
    let (estimate, method) = if finite && range <= 1e-12 * hi.abs().max(1.0) {
        (last, PlimMethod::Constant)
    } else if monotone {
        (extrapolate(&grid, &trajectory), PlimMethod::Extrapolated)
    } else {
        let tail = &trajectory[half];
        let e = match kind {
            PlimKind::PLimsup => tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            PlimKind::PLiminf => tail.iter().copied().fold(f64::INFINITY, f64::min),
        };
        (e, PlimMethod::TailExtremum)
    };
    PlimEstimate {
        kind,
        delta,
        grid,
        trajectory,
        estimate,
        last,
        monotone,
        method,
        slope,
    }
}

/// Estimates of `H̄, H̲` for a source and `Ī, I̲` for a channel input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub delta: f64,
    pub grid: Vec<usize>,
    pub h_bar: Option<PlimEstimate>,
    pub h_under: Option<PlimEstimate>,
    pub i_bar: Option<PlimEstimate>,
    pub i_under: Option<PlimEstimate>,
}

impl SpectralSummary {
    pub fn new(delta: f64, grid: Vec<usize>) -> Self {
        Self {
            delta,
            grid,
            h_bar: None,
            h_under: None,
            i_bar: None,
            i_under: None,
        }
    }

    /// Fills `H̄`/`H̲` from entropy spectra on the grid.
    pub fn with_entropy(mut self, spectra: &[Spectrum]) -> Result<Self> {
        let (bar, under) = ordered_pair(spectra, self.delta)?;
        self.h_bar = Some(bar);
        self.h_under = Some(under);
        Ok(self)
    }

    /// Fills `Ī`/`I̲` from information spectra on the grid.
    pub fn with_information(mut self, spectra: &[Spectrum]) -> Result<Self> {
        let (bar, under) = ordered_pair(spectra, self.delta)?;
        self.i_bar = Some(bar);
        self.i_under = Some(under);
        Ok(self)
    }

    /// Rows of the summary CSV (`n,quantity,delta,estimate`), no header.
    /// One row per grid point with the raw quantile, then the proxy with `n` empty.
    pub fn write_csv_rows(&self, out: &mut String) {
        for (name, e) in [
            ("H_bar", &self.h_bar),
            ("H_under", &self.h_under),
            ("I_bar", &self.i_bar),
            ("I_under", &self.i_under),
        ] {
            if let Some(e) = e {
                for (n, q) in e.grid.iter().zip(&e.trajectory) {
                    let _ = writeln!(out, "{n},{name}_quantile,{},{}", e.delta, crate::spectra::fmt_value(*q));
                }
                let _ = writeln!(out, ",{name},{},{}", e.delta, crate::spectra::fmt_value(e.estimate));
            }
        }
    }
}

pub const SUMMARY_CSV_HEADER: &str = "n,quantity,delta,estimate";

/// Both proxies, with the liminf proxy capped at the limsup proxy: the two
/// extrapolations are separate fits and can cross by fit noise when the
/// limits coincide.
fn ordered_pair(spectra: &[Spectrum], delta: f64) -> Result<(PlimEstimate, PlimEstimate)> {
    let bar = plim_estimate(spectra, PlimKind::PLimsup, delta)?;
    let mut under = plim_estimate(spectra, PlimKind::PLiminf, delta)?;
    if under.estimate > bar.estimate {
        under.estimate = bar.estimate;
    }
    Ok((bar, under))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::SpectrumMode;

    #[test]
    fn constant_trajectory() {
        let sp: Vec<Spectrum> = [2, 4, 8].iter().map(|&n| Spectrum::point(n, 2f64.ln())).collect();
        let e = plim_estimate(&sp, PlimKind::PLimsup, 1e-3).unwrap();
        assert_eq!(e.method, PlimMethod::Constant);
        assert_eq!(e.estimate, 2f64.ln());
    }

    #[test]
    fn extrapolation_recovers_limit() {
        let grid = vec![64, 128, 256, 512, 1024];
        let traj: Vec<f64> = grid
            .iter()
            .map(|&n| 0.5 + 0.8 / (n as f64).sqrt() + 2.0 / n as f64)
            .collect();
        let e = estimate_from_trajectory(PlimKind::PLimsup, 1e-3, grid, traj);
        assert!(e.monotone);
        assert!((e.estimate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn interleaved_grid_extrapolates() {
        let grid = vec![256, 257, 512, 513, 1024, 1025, 2048, 2049];
        let traj: Vec<f64> = grid
            .iter()
            .map(|&n| 0.5 - 0.3 / (n as f64).sqrt() - 2.0 / n as f64)
            .collect();
        let e = estimate_from_trajectory(PlimKind::PLiminf, 1e-3, grid, traj);
        assert!((e.estimate - 0.5).abs() < 1e-9, "{}", e.estimate);
    }

    #[test]
    fn narrow_window_returns_last() {
        let grid = vec![1000, 1001, 1002, 1003];
        let traj = vec![0.40, 0.41, 0.42, 0.43];
        let e = estimate_from_trajectory(PlimKind::PLimsup, 1e-3, grid, traj);
        assert_eq!(e.estimate, 0.43);
    }

    #[test]
    fn oscillating_uses_tail_extremum() {
        let sp: Vec<Spectrum> = (1..=6)
            .map(|n| Spectrum::point(n, if n % 2 == 0 { 2f64.ln() } else { 0.0 }))
            .collect();
        let sup = plim_estimate(&sp, PlimKind::PLimsup, 1e-3).unwrap();
        let inf = plim_estimate(&sp, PlimKind::PLiminf, 1e-3).unwrap();
        assert_eq!(sup.method, PlimMethod::TailExtremum);
        assert_eq!(sup.estimate, 2f64.ln());
        assert_eq!(inf.estimate, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let one = vec![Spectrum::from_atoms(1, SpectrumMode::Exact, vec![(0.0, 1.0)])];
        assert!(plim_estimate(&one, PlimKind::PLimsup, 1e-3).is_err());
        let two = vec![one[0].clone(), one[0].clone()];
        assert!(plim_estimate(&two, PlimKind::PLimsup, 1.0).is_err());
    }
}
