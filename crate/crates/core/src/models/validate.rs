//! Read-only diagnostics on declared models. Unlike the constructors these
//! never fail; problems are reported as flags.

use serde::{Deserialize, Serialize};

use crate::dist::{row_residuals, NORMALIZATION_TOL};
use crate::models::{ChannelSpec, SourceModel, SourceSpec};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub kind: String,
    /// Largest absolute deviation from unit sum across all vectors and rows.
    pub max_residual: f64,
    pub findings: Vec<Finding>,
    pub input_alphabet: Option<usize>,
    pub output_alphabet: Option<usize>,
    /// `(n, tail mass)` for truncated sources.
    pub tail_masses: Vec<(usize, f64)>,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    /// JSON pointer relative to the model declaration.
    pub path: String,
    pub flag: String,
    pub residual: Option<f64>,
}

fn flag(d: &mut Diagnostics, path: String, flag: &str, residual: Option<f64>) {
    d.findings.push(Finding {
        path,
        flag: flag.into(),
        residual,
    });
}

fn check_vector(d: &mut Diagnostics, path: String, what: &str, probs: &[f64]) {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        flag(d, path, &format!("negative-{what}"), None);
        return;
    }
    let r = (probs.iter().sum::<f64>() - 1.0).abs();
    d.max_residual = d.max_residual.max(r);
    if r > NORMALIZATION_TOL {
        flag(d, path, &format!("non-normalized-{what}"), Some(r));
    }
}

pub fn validate_source(spec: &SourceSpec, n_grid: &[usize]) -> Diagnostics {
    let mut d = Diagnostics {
        kind: kind_of_source(spec).into(),
        ..Default::default()
    };
    walk_source(&mut d, spec, "/params");
    if d.findings.is_empty() {
        match SourceModel::from_spec(spec) {
            Ok(model) => {
                for &n in n_grid {
                    match model.resolve(n) {
                        Ok(law) => {
                            if let crate::models::SourceLaw::Letters { alphabet, .. } = &law {
                                d.output_alphabet = Some(d.output_alphabet.unwrap_or(0).max(*alphabet));
                            }
                            if matches!(spec, SourceSpec::TruncatedCountable { .. })
                                || law.tail_mass() > 0.0
                            {
                                d.tail_masses.push((n, law.tail_mass()));
                            }
                        }
                        Err(e) => flag(&mut d, String::new(), &e.to_string(), None),
                    }
                }
            }
            Err(e) => flag(&mut d, String::new(), &e.to_string(), None),
        }
    }
    d
}

fn walk_source(d: &mut Diagnostics, spec: &SourceSpec, path: &str) {
    match spec {
        SourceSpec::Iid { probs, .. } => check_vector(d, format!("{path}/probs"), "distribution", probs),
        SourceSpec::Mixed {
            weights,
            components,
        } => {
            check_weights(d, &format!("{path}/weights"), weights, components.len());
            for (i, c) in components.iter().enumerate() {
                walk_source(d, c, &format!("{path}/components/{i}/params"));
            }
        }
        _ => {}
    }
}

fn check_weights(d: &mut Diagnostics, path: &str, weights: &[f64], count: usize) {
    if weights.len() != count {
        flag(d, path.into(), "weight-count-mismatch", None);
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        flag(d, path.into(), "non-positive-weight", None);
    } else {
        check_vector(d, path.into(), "weights", weights);
    }
}

pub fn validate_channel(spec: &ChannelSpec) -> Diagnostics {
    let mut d = Diagnostics {
        kind: kind_of_channel(spec).into(),
        ..Default::default()
    };
    walk_channel(&mut d, spec, "/params");
    d
}

fn walk_channel(d: &mut Diagnostics, spec: &ChannelSpec, path: &str) {
    if let ChannelSpec::Mixed {
        weights,
        components,
    } = spec
    {
        check_weights(d, &format!("{path}/weights"), weights, components.len());
        for (i, c) in components.iter().enumerate() {
            walk_channel(d, c, &format!("{path}/components/{i}/params"));
        }
        return;
    }
    let (inputs, outputs) = match spec.matrix() {
        Some(m) => match row_residuals(&m) {
            Ok(res) => {
                for (row, r) in res.into_iter().enumerate() {
                    if r.is_nan() {
                        flag(d, format!("{path}/matrix/{row}"), "negative-entry", None);
                        continue;
                    }
                    d.max_residual = d.max_residual.max(r);
                    if r > NORMALIZATION_TOL {
                        flag(d, format!("{path}/matrix/{row}"), "non-stochastic", Some(r));
                    }
                }
                (m.len(), m[0].len())
            }
            Err(e) => {
                flag(d, format!("{path}/matrix"), &e.to_string(), None);
                return;
            }
        },
        None => (2, 2),
    };
    if let Some(prev) = d.input_alphabet {
        if prev != inputs || d.output_alphabet != Some(outputs) {
            flag(d, path.into(), "alphabet-mismatch", None);
        }
    }
    d.input_alphabet = Some(inputs);
    d.output_alphabet = Some(outputs);
}

fn kind_of_source(spec: &SourceSpec) -> &'static str {
    match spec {
        SourceSpec::Iid { .. } => "iid",
        SourceSpec::Mixed { .. } => "mixed",
        SourceSpec::UniformMessage { .. } => "uniform_message",
        SourceSpec::AlternatingExample => "alternating_example",
        SourceSpec::TruncatedCountable { .. } => "truncated_countable",
    }
}

fn kind_of_channel(spec: &ChannelSpec) -> &'static str {
    match spec {
        ChannelSpec::Dmc { .. } | ChannelSpec::Bsc { .. } | ChannelSpec::Bec { .. } => "dmc",
        ChannelSpec::Mixed { .. } => "mixed",
        ChannelSpec::Identity { .. } => "identity",
        ChannelSpec::AlternatingExample => "alternating_example",
    }
}
