//! γ_n and c_n schedules over a block-length grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold-margin schedule `γ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaSchedule {
    /// `γ_n = n^{-1/2}`.
    InverseSqrt,
    /// `γ_n = scale · n^{-exponent}`, with `0 < exponent < 1`.
    Power { scale: f64, exponent: f64 },
    /// A fixed margin; never valid for a limit sweep.
    Constant { value: f64 },
    /// One value per grid point.
    List { values: Vec<f64> },
}

impl Default for GammaSchedule {
    fn default() -> Self {
        Self::InverseSqrt
    }
}

impl GammaSchedule {
    pub fn values(&self, grid: &[usize]) -> Result<Vec<f64>> {
        Ok(match self {
            Self::InverseSqrt => grid.iter().map(|&n| (n as f64).powf(-0.5)).collect(),
            Self::Power { scale, exponent } => {
                grid.iter().map(|&n| scale * (n as f64).powf(-exponent)).collect()
            }
            Self::Constant { value } => vec![*value; grid.len()],
            Self::List { values } => {
                if values.len() != grid.len() {
                    return Err(Error::ScheduleInvalid(format!(
                        "{} values for a grid of {} points",
                        values.len(),
                        grid.len()
                    )));
                }
                values.clone()
            }
        })
    }

    /// Values checked against `γ_n > 0`, `γ_n → 0`, `nγ_n → ∞` on the grid.
    pub fn sweep_values(&self, grid: &[usize]) -> Result<Vec<f64>> {
        if let Self::Constant { value } = self {
            return Err(Error::ScheduleInvalid(format!(
                "constant margin {value} does not vanish as n grows"
            )));
        }
        let v = self.values(grid)?;
        validate_gamma(grid, &v)?;
        Ok(v)
    }
}

/// Checks a grid: non-empty and strictly increasing.
pub fn validate_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::ScheduleInvalid("empty block-length grid".into()));
    }
    if grid[0] == 0 {
        return Err(Error::ScheduleInvalid("block lengths start at 1".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ScheduleInvalid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Numerical form of the margin requirements on a grid: every `γ_n` positive
/// and finite; along the grid `γ_n` never increases and ends below where it
/// started, and `nγ_n` strictly increases.
pub fn validate_gamma(grid: &[usize], gammas: &[f64]) -> Result<()> {
    validate_grid(grid)?;
    if grid.len() != gammas.len() {
        return Err(Error::ScheduleInvalid(format!(
            "{} margins for a grid of {} points",
            gammas.len(),
            grid.len()
        )));
    }
    if let Some((n, g)) = grid.iter().zip(gammas).find(|(_, g)| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::ScheduleInvalid(format!("gamma at n={n} is {g}, must be positive")));
    }
    if grid.len() < 2 {
        return Ok(());
    }
    if gammas.windows(2).any(|w| w[1] > w[0]) || gammas[gammas.len() - 1] >= gammas[0] {
        return Err(Error::ScheduleInvalid("gamma must decrease towards 0 along the grid".into()));
    }
    let scaled: Vec<f64> = grid.iter().zip(gammas).map(|(&n, g)| n as f64 * g).collect();
    if scaled.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ScheduleInvalid("n * gamma must increase along the grid".into()));
    }
    Ok(())
}

/// Split-point schedule `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CSchedule {
    /// `½(R_f + C)` from the module's own estimates.
    Midpoint,
    Constant { value: f64 },
    List { values: Vec<f64> },
}

impl Default for CSchedule {
    fn default() -> Self {
        Self::Midpoint
    }
}

impl CSchedule {
    pub fn values(&self, grid: &[usize], midpoint: Option<f64>) -> Result<Vec<f64>> {
        match self {
            Self::Midpoint => midpoint
                .map(|m| vec![m; grid.len()])
                .ok_or_else(|| Error::ScheduleInvalid("midpoint split needs rate estimates".into())),
            Self::Constant { value } => Ok(vec![*value; grid.len()]),
            Self::List { values } if values.len() == grid.len() => Ok(values.clone()),
            Self::List { values } => Err(Error::ScheduleInvalid(format!(
                "{} split points for a grid of {} points",
                values.len(),
                grid.len()
            ))),
        }
    }
}
