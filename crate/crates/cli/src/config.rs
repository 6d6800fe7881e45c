//! Experiment configuration: JSON parsing with pointer-addressed errors and
//! semantic validation.

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use infospec_core::analysis::{
    validate_grid, CSchedule, ConditionKind, ConverseMode, GammaSchedule, InputCandidate, DEFAULT_GAP_TOLERANCE,
    DEFAULT_TREND_TOLERANCE,
};
use infospec_core::coding::DEFAULT_CODEBOOK_CAP;
use infospec_core::models::validate::{validate_channel, validate_source, Diagnostics};
use infospec_core::models::{ChannelModel, ChannelSpec, CouplingSpec, InputCoupling, SourceModel, SourceSpec};
use infospec_core::spectra::{ExactOptions, ExactRoute, JointEval, DEFAULT_DELTA};

use crate::stage::Stage;

/// One schema or semantic violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    /// JSON pointer into the config document.
    pub pointer: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "(root)" } else { &self.pointer };
        write!(f, "{at}: {}", self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    #[default]
    Exact,
    MonteCarlo,
    /// Exact within caps, Monte Carlo beyond.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    #[default]
    Auto,
    Enumeration,
    Convolution,
    TypeClasses,
}

impl From<RouteName> for ExactRoute {
    fn from(r: RouteName) -> Self {
        match r {
            RouteName::Auto => ExactRoute::Auto,
            RouteName::Enumeration => ExactRoute::Enumeration,
            RouteName::Convolution => ExactRoute::Convolution,
            RouteName::TypeClasses => ExactRoute::TypeClasses,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Evaluation {
    pub mode: EvalMode,
    /// Monte Carlo sample budget per spectrum.
    pub samples: usize,
    pub route: RouteName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantize: Option<f64>,
}

impl Default for Evaluation {
    fn default() -> Self {
        Self {
            mode: EvalMode::Exact,
            samples: 100_000,
            route: RouteName::Auto,
            quantize: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulateMode {
    #[default]
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Simulate {
    pub mode: SimulateMode,
    /// Codebook draws for the Monte Carlo ensemble.
    pub budget: usize,
}

impl Default for Simulate {
    fn default() -> Self {
        Self {
            mode: SimulateMode::Exact,
            budget: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub enumeration: f64,
    pub types: f64,
    pub codebooks: f64,
}

impl Default for Caps {
    fn default() -> Self {
        let e = ExactOptions::default();
        Self {
            enumeration: e.enumeration_cap,
            types: e.type_cap,
            codebooks: DEFAULT_CODEBOOK_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub trend: f64,
    pub gap: f64,
    pub blahut_arimoto: f64,
    /// Slack allowed when certifying a bound against an exact error.
    pub certify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trend: DEFAULT_TREND_TOLERANCE,
            gap: DEFAULT_GAP_TOLERANCE,
            blahut_arimoto: 1e-10,
            certify: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateDecl {
    pub label: String,
    pub coupling: CouplingSpec,
}

fn default_converse() -> Vec<ConverseMode> {
    vec![ConverseMode::SourceStrong, ConverseMode::ChannelStrong]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    /// Input used by spectrum, bound, simulate and condition stages. Defaults
    /// to the capacity-achieving i.i.d. input for memoryless channels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSpec>,
    /// Inputs compared by the separation verdict.
    pub candidates: Vec<CandidateDecl>,
    pub n_grid: Vec<usize>,
    pub gamma: GammaSchedule,
    pub c: CSchedule,
    pub epsilon: f64,
    pub delta: f64,
    pub split: ConditionKind,
    pub converse: Vec<ConverseMode>,
    pub evaluation: Evaluation,
    pub simulate: Simulate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub caps: Caps,
    pub tolerances: Tolerances,
    pub stages: Vec<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

const FIELDS: &[&str] = &[
    "source",
    "channel",
    "coupling",
    "candidates",
    "n_grid",
    "gamma",
    "c",
    "epsilon",
    "delta",
    "split",
    "converse",
    "evaluation",
    "simulate",
    "seed",
    "caps",
    "tolerances",
    "stages",
    "output_dir",
];

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

fn field<T: DeserializeOwned>(map: &Map<String, Value>, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<T> {
    let v = map.get(key)?;
    match serde_path_to_error::deserialize::<_, T>(v.clone()) {
        Ok(t) => Some(t),
        Err(e) => {
            issues.push(ConfigIssue::new(format!("/{key}{}", pointer(e.path())), e.inner().to_string()));
            None
        }
    }
}

fn required<T: DeserializeOwned>(map: &Map<String, Value>, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<T> {
    if !map.contains_key(key) {
        issues.push(ConfigIssue::new(format!("/{key}"), "missing required field"));
        return None;
    }
    field(map, key, issues)
}

/// Parses and validates a config document. Every violation is reported.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<ConfigIssue>> {
    let cfg = parse_structure(text)?;
    let issues = cfg.validate(&[]);
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(issues)
    }
}

/// Schema-level parse only; [`ExperimentConfig::validate`] does the rest.
pub fn parse_structure(text: &str) -> Result<ExperimentConfig, Vec<ConfigIssue>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| vec![ConfigIssue::new("", format!("invalid JSON: {e}"))])?;
    let Value::Object(map) = value else {
        return Err(vec![ConfigIssue::new("", "expected a JSON object")]);
    };
    let mut issues = Vec::new();
    for key in map.keys() {
        if !FIELDS.contains(&key.as_str()) {
            issues.push(ConfigIssue::new(format!("/{}", escape(key)), "unknown field"));
        }
    }
    let source = required(&map, "source", &mut issues);
    let channel = required(&map, "channel", &mut issues);
    let n_grid = required(&map, "n_grid", &mut issues);
    let coupling = field::<Option<CouplingSpec>>(&map, "coupling", &mut issues).flatten();
    let candidates = field(&map, "candidates", &mut issues).unwrap_or_default();
    let gamma = field(&map, "gamma", &mut issues).unwrap_or_default();
    let c = field(&map, "c", &mut issues).unwrap_or_default();
    let epsilon = field(&map, "epsilon", &mut issues).unwrap_or(0.0);
    let delta = field(&map, "delta", &mut issues).unwrap_or(DEFAULT_DELTA);
    let split = field(&map, "split", &mut issues).unwrap_or(ConditionKind::Domination);
    let converse = field(&map, "converse", &mut issues).unwrap_or_else(default_converse);
    let evaluation = field(&map, "evaluation", &mut issues).unwrap_or_default();
    let simulate = field(&map, "simulate", &mut issues).unwrap_or_default();
    let seed = field::<Option<u64>>(&map, "seed", &mut issues).flatten();
    let caps = field(&map, "caps", &mut issues).unwrap_or_default();
    let tolerances = field(&map, "tolerances", &mut issues).unwrap_or_default();
    let stages = field(&map, "stages", &mut issues).unwrap_or_default();
    let output_dir = field::<Option<String>>(&map, "output_dir", &mut issues).flatten();
    match (source, channel, n_grid) {
        (Some(source), Some(channel), Some(n_grid)) if issues.is_empty() => Ok(ExperimentConfig {
            source,
            channel,
            coupling,
            candidates,
            n_grid,
            gamma,
            c,
            epsilon,
            delta,
            split,
            converse,
            evaluation,
            simulate,
            seed,
            caps,
            tolerances,
            stages,
            output_dir,
        }),
        _ => Err(issues),
    }
}

fn diagnostics_issues(prefix: &str, d: &Diagnostics, issues: &mut Vec<ConfigIssue>) {
    for f in &d.findings {
        let msg = match f.residual {
            Some(r) => format!("{} (residual {r:.3e})", f.flag),
            None => f.flag.clone(),
        };
        issues.push(ConfigIssue::new(format!("{prefix}{}", f.path), msg));
    }
}

impl ExperimentConfig {
    /// A config with the given models and every other field at its default.
    pub fn new(source: SourceSpec, channel: ChannelSpec, n_grid: Vec<usize>) -> Self {
        Self {
            source,
            channel,
            coupling: None,
            candidates: Vec::new(),
            n_grid,
            gamma: GammaSchedule::default(),
            c: CSchedule::default(),
            epsilon: 0.0,
            delta: DEFAULT_DELTA,
            split: ConditionKind::Domination,
            converse: default_converse(),
            evaluation: Evaluation::default(),
            simulate: Simulate::default(),
            seed: None,
            caps: Caps::default(),
            tolerances: Tolerances::default(),
            stages: Vec::new(),
            output_dir: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact serialization with `output_dir` cleared, so the
    /// hash depends only on what is computed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn mc_enabled(&self) -> bool {
        self.evaluation.mode != EvalMode::Exact || self.simulate.mode == SimulateMode::MonteCarlo
    }

    pub fn exact_options(&self) -> ExactOptions {
        ExactOptions {
            route: self.evaluation.route.into(),
            enumeration_cap: self.caps.enumeration,
            type_cap: self.caps.types,
            quantize: self.evaluation.quantize,
        }
    }

    pub fn eval(&self) -> JointEval {
        let seed = self.seed.unwrap_or(0);
        let samples = self.evaluation.samples;
        match self.evaluation.mode {
            EvalMode::Exact => JointEval::Exact(self.exact_options()),
            EvalMode::MonteCarlo => JointEval::MonteCarlo { samples, seed },
            EvalMode::Auto => JointEval::Auto {
                exact: self.exact_options(),
                samples,
                seed,
            },
        }
    }

    /// Stages from the config plus `extra`, deduplicated, in dependency order.
    pub fn stage_plan(&self, extra: &[Stage]) -> Vec<Stage> {
        let mut s: Vec<Stage> = self.stages.iter().chain(extra).copied().collect();
        s.sort();
        s.dedup();
        s
    }

    /// Semantic checks for the stages in the config plus `extra`.
    pub fn validate(&self, extra: &[Stage]) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let plan = self.stage_plan(extra);
        let grid_ok = match validate_grid(&self.n_grid) {
            Ok(()) => true,
            Err(e) => {
                issues.push(ConfigIssue::new("/n_grid", e.to_string()));
                false
            }
        };
        let grid: &[usize] = if grid_ok { &self.n_grid } else { &[] };
        diagnostics_issues("/source", &validate_source(&self.source, grid), &mut issues);
        let channel_diag = validate_channel(&self.channel);
        diagnostics_issues("/channel", &channel_diag, &mut issues);
        let channel = if channel_diag.is_valid() {
            match ChannelModel::from_spec(&self.channel) {
                Ok(c) => Some(c),
                Err(e) => {
                    issues.push(ConfigIssue::new("/channel", e.to_string()));
                    None
                }
            }
        } else {
            None
        };
        if let Some(ch) = &channel {
            if let Some(spec) = &self.coupling {
                if let Err(e) = InputCoupling::from_spec(spec, ch) {
                    issues.push(ConfigIssue::new("/coupling", e.to_string()));
                }
            } else if ch.per_letter().is_none() && plan.iter().any(|s| s.needs_coupling()) {
                issues.push(ConfigIssue::new(
                    "/coupling",
                    "required: the channel is not memoryless, so there is no default input",
                ));
            }
            for (i, c) in self.candidates.iter().enumerate() {
                if let Err(e) = InputCoupling::from_spec(&c.coupling, ch) {
                    issues.push(ConfigIssue::new(format!("/candidates/{i}/coupling"), e.to_string()));
                }
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            issues.push(ConfigIssue::new("/delta", "must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            issues.push(ConfigIssue::new("/epsilon", "must lie in [0, 1]"));
        }
        if self.evaluation.samples == 0 {
            issues.push(ConfigIssue::new("/evaluation/samples", "must be at least 1"));
        }
        if let Some(q) = self.evaluation.quantize {
            if !(q > 0.0 && q.is_finite()) {
                issues.push(ConfigIssue::new("/evaluation/quantize", "must be positive"));
            }
        }
        if self.simulate.budget == 0 {
            issues.push(ConfigIssue::new("/simulate/budget", "must be at least 1"));
        }
        for (name, v) in [
            ("enumeration", self.caps.enumeration),
            ("types", self.caps.types),
            ("codebooks", self.caps.codebooks),
        ] {
            if !(v >= 1.0) {
                issues.push(ConfigIssue::new(format!("/caps/{name}"), "must be at least 1"));
            }
        }
        for (name, v) in [
            ("trend", self.tolerances.trend),
            ("gap", self.tolerances.gap),
            ("blahut_arimoto", self.tolerances.blahut_arimoto),
            ("certify", self.tolerances.certify),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                issues.push(ConfigIssue::new(format!("/tolerances/{name}"), "must be finite and non-negative"));
            }
        }
        if matches!(self.split, ConditionKind::Direct | ConditionKind::Converse) {
            issues.push(ConfigIssue::new("/split", "must be strict, domination or product"));
        }
        if grid_ok {
            let sweep = plan.iter().any(|s| s.is_sweep());
            let gammas = if sweep {
                self.gamma.sweep_values(&self.n_grid)
            } else {
                self.gamma.values(&self.n_grid)
            };
            if let Err(e) = gammas {
                issues.push(ConfigIssue::new("/gamma", e.to_string()));
            }
            if plan.contains(&Stage::CheckDomination) {
                if let Err(e) = self.c.values(&self.n_grid, Some(0.0)) {
                    issues.push(ConfigIssue::new("/c", e.to_string()));
                }
            }
            if plan.iter().any(|s| s.needs_plim()) && self.n_grid.len() < 2 {
                issues.push(ConfigIssue::new("/n_grid", "p-lim proxies need at least two block lengths"));
            }
        }
        if self.mc_enabled() && self.seed.is_none() {
            issues.push(ConfigIssue::new("/seed", "required when Monte Carlo evaluation is enabled"));
        }
        issues
    }

    pub fn source_model(&self) -> infospec_core::Result<SourceModel> {
        SourceModel::from_spec(&self.source)
    }

    pub fn channel_model(&self) -> infospec_core::Result<ChannelModel> {
        ChannelModel::from_spec(&self.channel)
    }

    /// The configured input, or the capacity-achieving i.i.d. input.
    pub fn coupling(&self, channel: &ChannelModel) -> infospec_core::Result<InputCoupling> {
        match &self.coupling {
            Some(spec) => InputCoupling::from_spec(spec, channel),
            None => InputCoupling::ba_optimal(channel, self.tolerances.blahut_arimoto),
        }
    }

    /// Declared candidates; the configured coupling stands in when none are listed.
    pub fn candidates(&self, channel: &ChannelModel) -> infospec_core::Result<Vec<InputCandidate>> {
        if self.candidates.is_empty() {
            if let Some(spec) = &self.coupling {
                return Ok(vec![InputCandidate::new("coupling", InputCoupling::from_spec(spec, channel)?)]);
            }
        }
        self.candidates
            .iter()
            .map(|c| Ok(InputCandidate::new(c.label.clone(), InputCoupling::from_spec(&c.coupling, channel)?)))
            .collect()
    }
}

/// Parses `a..b` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad grid start in {s:?}"))?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad grid end in {s:?}"))?;
        if a > b {
            return Err(format!("empty grid {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad block length {t:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "source": {"kind": "iid", "params": {"probs": [0.3, 0.7]}},
        "channel": {"kind": "dmc", "params": {"matrix": [[0.9, 0.1], [0.2, 0.8]]}},
        "n_grid": [1, 2, 4]
    }"#;

    #[test]
    fn minimal_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.n_grid, vec![1, 2, 4]);
        assert_eq!(c.evaluation.mode, EvalMode::Exact);
    }

    #[test]
    fn collects_all_structural_errors() {
        let text = r#"{"source": {"kind": "nope"}, "channel": 3, "bogus": 1, "n_grid": [1]}"#;
        let issues = parse_structure(text).unwrap_err();
        let ptrs: Vec<&str> = issues.iter().map(|i| i.pointer.as_str()).collect();
        assert!(ptrs.contains(&"/bogus"), "{ptrs:?}");
        assert!(ptrs.iter().any(|p| p.starts_with("/source")), "{ptrs:?}");
        assert!(ptrs.contains(&"/channel"), "{ptrs:?}");
    }

    #[test]
    fn nested_pointer() {
        let text = r#"{
            "source": {"kind": "iid", "params": {"probs": [0.5, "x"]}},
            "channel": {"kind": "bsc", "params": {"crossover": 0.1}},
            "n_grid": [1, 2]
        }"#;
        let issues = parse_structure(text).unwrap_err();
        assert_eq!(issues[0].pointer, "/source/params/probs/1");
    }

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("1..6").unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(parse_grid("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_grid("8, 16,32").unwrap(), vec![8, 16, 32]);
        assert!(parse_grid("4..2").is_err());
        assert!(parse_grid("a").is_err());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut a = parse_config(MINIMAL).unwrap();
        let h = a.hash();
        a.output_dir = Some("elsewhere".into());
        assert_eq!(a.hash(), h);
        a.seed = Some(1);
        assert_ne!(a.hash(), h);
    }
}
