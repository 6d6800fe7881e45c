//! Stage execution. Each stage turns a validated config into report files.

use std::fmt::Write as _;

use serde_json::{json, Value};

use infospec_core::analysis::{
    converse_property_diagnostic, domination_check, separation_verdict, separation_verdict_on,
    spectral_functionals, transmissibility_check, ConverseMode, SeparationOptions,
    SpectraSet, Sign, Subsequence, CONDITION_CSV_HEADER,
};
use infospec_core::coding::{
    feinstein_bound, map_decoder, code_error, random_code_ensemble_error, verdu_han_with_code, EnsembleMode,
    EnsembleOptions, BOUND_CSV_HEADER,
};
use infospec_core::models::{
    ChannelModel, ChannelSpec, CouplingSpec, EncoderMap, InputCoupling, JointModel, SourceModel, SourceSpec,
};
use infospec_core::spectra::{
    entropy_spectrum, information_spectrum, joint_law, JointEval, PlimEstimate, SpectralSummary, Spectrum,
    SPECTRUM_CSV_HEADER, SUMMARY_CSV_HEADER,
};

use crate::config::{CandidateDecl, ExperimentConfig};
use crate::error::CliError;
use crate::stage::Stage;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    /// File name inside the output directory.
    pub name: String,
    pub body: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub reports: Vec<Report>,
    /// Certification or assertion failures; reports are still written.
    pub findings: Vec<String>,
}

struct Cx<'a> {
    cfg: &'a ExperimentConfig,
    stage: Stage,
    hash: String,
    out: SuiteOutput,
}

impl Cx<'_> {
    fn core<T>(&self, r: infospec_core::Result<T>) -> Result<T, CliError> {
        r.map_err(|source| CliError::Stage {
            stage: self.stage.name(),
            source,
        })
    }

    fn seed_text(&self) -> String {
        self.cfg.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into())
    }

    fn csv(&mut self, name: &str, header: &str, rows: &str) {
        let body = format!("# config_sha256={} seed={}\n{header}\n{rows}", self.hash, self.seed_text());
        self.out.reports.push(Report {
            name: name.into(),
            body,
        });
    }

    fn json(&mut self, name: &str, mut value: Value) {
        if let Value::Object(m) = &mut value {
            m.insert("config_sha256".into(), Value::String(self.hash.clone()));
            m.insert("seed".into(), self.cfg.seed.map(Value::from).unwrap_or(Value::Null));
            m.insert("inputs".into(), serde_json::to_value(self.cfg).expect("config serializes"));
        }
        let body = serde_json::to_string_pretty(&value).expect("report serializes") + "\n";
        self.out.reports.push(Report {
            name: name.into(),
            body,
        });
    }

    fn finding(&mut self, msg: String) {
        self.out.findings.push(format!("{}: {msg}", self.stage.name()));
    }
}

fn with_seed_offset(eval: &JointEval, offset: u64) -> JointEval {
    let mut e = eval.clone();
    if let JointEval::MonteCarlo { seed, .. } | JointEval::Auto { seed, .. } = &mut e {
        *seed = seed.wrapping_add(offset);
    }
    e
}

struct Models {
    source: SourceModel,
    channel: ChannelModel,
}

fn models(cx: &Cx) -> Result<Models, CliError> {
    Ok(Models {
        source: cx.core(cx.cfg.source_model())?,
        channel: cx.core(cx.cfg.channel_model())?,
    })
}

fn joint_model(cx: &Cx, m: &Models) -> Result<JointModel, CliError> {
    let coupling = cx.core(cx.cfg.coupling(&m.channel))?;
    Ok(JointModel::new(m.source.clone(), coupling, m.channel.clone()))
}

/// Runs every stage of the plan in order.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    run_stages(cfg, &cfg.stage_plan(&[]))
}

/// Runs `stages` (already in dependency order) against `cfg`.
pub fn run_stages(cfg: &ExperimentConfig, stages: &[Stage]) -> Result<SuiteOutput, CliError> {
    let issues = cfg.validate(stages);
    if !issues.is_empty() {
        return Err(CliError::Config(issues));
    }
    let hash = cfg.hash();
    let mut cx = Cx {
        cfg,
        stage: Stage::Spectrum,
        hash: hash.clone(),
        out: SuiteOutput {
            config_hash: hash,
            seed: cfg.seed,
            ..Default::default()
        },
    };
    for &stage in stages {
        cx.stage = stage;
        match stage {
            Stage::Spectrum => spectrum(&mut cx)?,
            Stage::BoundFeinstein | Stage::BoundConverse => bound(&mut cx)?,
            Stage::Simulate => simulate(&mut cx)?,
            Stage::CheckDirect | Stage::CheckConverse | Stage::CheckEpsilon => transmissibility(&mut cx)?,
            Stage::CheckDomination => domination(&mut cx)?,
            Stage::CheckSeparation => separation(&mut cx)?,
            Stage::ExampleAlternating => alternating(&mut cx)?,
            Stage::ExampleMixed => mixed(&mut cx)?,
        }
    }
    Ok(cx.out)
}

fn spectrum(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let model = joint_model(cx, &m)?;
    let eval = cx.cfg.eval();
    let info_eval = with_seed_offset(&eval, 1);
    let grid = cx.cfg.n_grid.clone();
    let mut ent = Vec::new();
    let mut info = Vec::new();
    for &n in &grid {
        let law = cx.core(m.source.resolve(n))?;
        ent.push(cx.core(entropy_spectrum(&law, n, &eval))?);
        let block = cx.core(model.resolve(n))?;
        info.push(cx.core(information_spectrum(&block, &info_eval))?);
    }
    let rows = |sp: &[Spectrum]| {
        let mut s = String::new();
        for x in sp {
            x.write_csv_rows(&mut s);
        }
        s
    };
    cx.csv("spectrum_entropy.csv", SPECTRUM_CSV_HEADER, &rows(&ent));
    cx.csv("spectrum_information.csv", SPECTRUM_CSV_HEADER, &rows(&info));
    if grid.len() >= 2 {
        let summary = cx.core(
            SpectralSummary::new(cx.cfg.delta, grid)
                .with_entropy(&ent)
                .and_then(|s| s.with_information(&info)),
        )?;
        let mut s = String::new();
        summary.write_csv_rows(&mut s);
        cx.csv("summary.csv", SUMMARY_CSV_HEADER, &s);
    }
    Ok(())
}

fn bound(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let model = joint_model(cx, &m)?;
    let eval = cx.cfg.eval();
    let gammas = cx.core(cx.cfg.gamma.values(&cx.cfg.n_grid))?;
    let cap = cx.cfg.caps.enumeration;
    let tol = cx.cfg.tolerances.certify;
    let deterministic = matches!(model.coupling, InputCoupling::Deterministic(_));
    let mut rows = String::new();
    for (&n, &g) in cx.cfg.n_grid.clone().iter().zip(&gammas) {
        let law = cx.core(model.resolve(n))?;
        let joint = cx.core(joint_law(&law, &eval))?;
        let r = if cx.stage == Stage::BoundFeinstein {
            feinstein_bound(&joint, g)
        } else {
            // The exact error of the MAP decoder is attached when the encoder
            // is deterministic and the support is small enough to enumerate.
            let decoder = if deterministic { map_decoder(&law, cap).ok() } else { None };
            let r = cx.core(verdu_han_with_code(&law, &joint, decoder.as_ref(), g, cap))?;
            if r.certified(tol) == Some(false) {
                cx.finding(format!(
                    "n={n} gamma={g}: code error {} below converse bound {}",
                    r.epsilon.unwrap_or(f64::NAN),
                    r.bound
                ));
            }
            r
        };
        r.write_csv_row(&mut rows);
    }
    let name = if cx.stage == Stage::BoundFeinstein {
        "bound_feinstein.csv"
    } else {
        "bound_converse.csv"
    };
    cx.csv(name, BOUND_CSV_HEADER, &rows);
    Ok(())
}

fn simulate(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let model = joint_model(cx, &m)?;
    let gammas = cx.core(cx.cfg.gamma.values(&cx.cfg.n_grid))?;
    let opts = EnsembleOptions {
        codebook_cap: cx.cfg.caps.codebooks,
        enumeration_cap: cx.cfg.caps.enumeration,
    };
    let mode = match cx.cfg.simulate.mode {
        crate::config::SimulateMode::Exact => EnsembleMode::Exact,
        crate::config::SimulateMode::MonteCarlo => EnsembleMode::MonteCarlo {
            budget: cx.cfg.simulate.budget,
            seed: cx.cfg.seed.unwrap_or(0),
        },
    };
    let tol = cx.cfg.tolerances.certify;
    let mut rows = String::new();
    for (&n, &g) in cx.cfg.n_grid.clone().iter().zip(&gammas) {
        let law = cx.core(model.resolve(n))?;
        let r = cx.core(random_code_ensemble_error(&law, g, mode, &opts))?;
        // Monte Carlo estimates get their confidence half-width as slack.
        let slack = tol + r.half_width.unwrap_or(0.0);
        if r.certified(slack) == Some(false) {
            cx.finding(format!(
                "n={n} gamma={g}: ensemble error {} exceeds Feinstein bound {}",
                r.epsilon.unwrap_or(f64::NAN),
                r.bound
            ));
        }
        r.write_csv_row(&mut rows);
    }
    cx.csv("simulate.csv", BOUND_CSV_HEADER, &rows);
    Ok(())
}

fn transmissibility(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let model = joint_model(cx, &m)?;
    let grid = cx.cfg.n_grid.clone();
    let gammas = cx.core(cx.cfg.gamma.sweep_values(&grid))?;
    let eval = cx.cfg.eval();
    let trend = cx.cfg.tolerances.trend;
    let runs: Vec<(Sign, f64, &str)> = match cx.stage {
        Stage::CheckDirect => vec![(Sign::Plus, 0.0, "condition_direct.csv")],
        Stage::CheckConverse => vec![(Sign::Minus, 0.0, "condition_converse.csv")],
        _ => vec![
            (Sign::Plus, cx.cfg.epsilon, "condition_epsilon_direct.csv"),
            (Sign::Minus, cx.cfg.epsilon, "condition_epsilon_converse.csv"),
        ],
    };
    for (sign, eps, name) in runs {
        let r = cx.core(transmissibility_check(&model, &grid, &gammas, sign, eps, trend, &eval))?;
        let mut rows = String::new();
        r.write_csv_rows(&mut rows);
        cx.csv(name, CONDITION_CSV_HEADER, &rows);
    }
    Ok(())
}

fn domination(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let model = joint_model(cx, &m)?;
    let grid = cx.cfg.n_grid.clone();
    let gammas = cx.core(cx.cfg.gamma.sweep_values(&grid))?;
    let eval = cx.cfg.eval();
    let midpoint = if matches!(cx.cfg.c, infospec_core::analysis::CSchedule::Midpoint) {
        let cands = cx.core(cx.cfg.candidates(&m.channel))?;
        let cands = if cands.is_empty() {
            vec![infospec_core::analysis::InputCandidate::new("coupling", model.coupling.clone())]
        } else {
            cands
        };
        let set = cx.core(SpectraSet::compute(
            &m.source,
            &m.channel,
            &cands,
            &grid,
            &eval,
            cx.cfg.tolerances.blahut_arimoto,
        ))?;
        Some(cx.core(spectral_functionals(&set, cx.cfg.delta))?.midpoint())
    } else {
        None
    };
    let cs = cx.core(cx.cfg.c.values(&grid, midpoint))?;
    let kind = cx.cfg.split;
    let r = cx.core(domination_check(&model, &grid, &cs, &gammas, kind, 0.0, cx.cfg.tolerances.trend, &eval))?;
    let mut rows = String::new();
    r.write_csv_rows(&mut rows);
    cx.csv(&format!("condition_{}.csv", kind.name()), CONDITION_CSV_HEADER, &rows);
    Ok(())
}

fn separation_options(cfg: &ExperimentConfig) -> SeparationOptions {
    SeparationOptions {
        delta: cfg.delta,
        eval: cfg.eval(),
        converse: cfg.converse.clone(),
        gap_tolerance: cfg.tolerances.gap,
        confirm: true,
        gamma: cfg.gamma.clone(),
        trend_tolerance: cfg.tolerances.trend,
        ba_tol: cfg.tolerances.blahut_arimoto,
    }
}

fn plim_rows(out: &mut String, name: &str, e: &Option<PlimEstimate>) {
    use infospec_core::spectra::fmt_value;
    if let Some(e) = e {
        for (n, q) in e.grid.iter().zip(&e.trajectory) {
            let _ = writeln!(out, "{n},{name}_quantile,{},{}", e.delta, fmt_value(*q));
        }
        let _ = writeln!(out, ",{name},{},{}", e.delta, fmt_value(e.estimate));
    }
}

fn separation(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let cands = cx.core(cx.cfg.candidates(&m.channel))?;
    let opts = separation_options(cx.cfg);
    let r = cx.core(separation_verdict(&m.source, &m.channel, &cands, &cx.cfg.n_grid, &opts))?;
    let mut rows = String::new();
    plim_rows(&mut rows, "H_bar", &r.functionals.source.h_bar);
    plim_rows(&mut rows, "H_under", &r.functionals.source.h_under);
    for c in &r.functionals.candidates {
        plim_rows(&mut rows, &format!("I_bar[{}]", c.label), &c.summary.i_bar);
        plim_rows(&mut rows, &format!("I_under[{}]", c.label), &c.summary.i_under);
    }
    cx.csv("separation_summary.csv", SUMMARY_CSV_HEADER, &rows);
    if let Some(conf) = &r.confirmation {
        let mut rows = String::new();
        conf.write_csv_rows(&mut rows);
        cx.csv("condition_strict.csv", CONDITION_CSV_HEADER, &rows);
    }
    cx.json(
        "verdict.json",
        json!({
            "verdict": r.outcome.name(),
            "r_f": r.r_f,
            "capacity": r.capacity,
            "c_n": r.c_midpoint,
            "report": r,
        }),
    );
    Ok(())
}

impl ExperimentConfig {
    /// Alternating-parity source and channel with three declared inputs.
    pub fn example_alternating(n_grid: Vec<usize>) -> Self {
        let mut c = Self::new(SourceSpec::AlternatingExample, ChannelSpec::AlternatingExample, n_grid);
        c.coupling = Some(CouplingSpec::DeterministicMap { map: EncoderMap::Identity });
        c.candidates = vec![
            CandidateDecl {
                label: "identity".into(),
                coupling: CouplingSpec::DeterministicMap { map: EncoderMap::Identity },
            },
            CandidateDecl {
                label: "uniform".into(),
                coupling: CouplingSpec::Independent { probs: vec![0.5, 0.5] },
            },
            CandidateDecl {
                label: "biased".into(),
                coupling: CouplingSpec::Independent { probs: vec![0.3, 0.7] },
            },
        ];
        c.stages = vec![Stage::ExampleAlternating];
        c
    }

    /// Equal mixture of Bern(0.1) and Bern(0.4) over a BSC(0.1).
    pub fn example_mixed(n_grid: Vec<usize>) -> Self {
        let bern = |p: f64| SourceSpec::Iid {
            probs: vec![1.0 - p, p],
            labels: None,
        };
        let source = SourceSpec::Mixed {
            weights: vec![0.5, 0.5],
            components: vec![bern(0.1), bern(0.4)],
        };
        let mut c = Self::new(source, ChannelSpec::Bsc { crossover: 0.1 }, n_grid);
        c.stages = vec![Stage::ExampleMixed];
        c
    }
}

fn alternating(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let cands = cx.core(cx.cfg.candidates(&m.channel))?;
    let grid = cx.cfg.n_grid.clone();
    let opts = separation_options(cx.cfg);
    let set = cx.core(SpectraSet::compute(&m.source, &m.channel, &cands, &grid, &opts.eval, opts.ba_tol))?;
    let model = joint_model(cx, &m)?;
    let delta = cx.cfg.delta;
    let ln2 = 2f64.ln();
    let mut rows = String::new();
    for (i, &n) in grid.iter().enumerate() {
        // Adding 0.0 turns a -0 quantile into 0.
        let h = cx.core(set.source[i].mid_quantile(1.0 - delta))? + 0.0;
        let mut best = (String::new(), f64::NEG_INFINITY);
        for (label, sp) in &set.candidates {
            let q = cx.core(sp[i].mid_quantile(delta))?;
            if q > best.1 {
                best = (label.clone(), q);
            }
        }
        let law = cx.core(model.resolve(n))?;
        let err = map_decoder(&law, cx.cfg.caps.enumeration)
            .and_then(|d| code_error(&law, &d, cx.cfg.caps.enumeration))
            .ok();
        let parity = if n % 2 == 0 { "even" } else { "odd" };
        let _ = writeln!(
            rows,
            "{n},{parity},{h},{},{},{}",
            best.1,
            best.0,
            err.map(|e| e.to_string()).unwrap_or_default()
        );
        let expected = if n % 2 == 0 { ln2 } else { 0.0 };
        if (h - expected).abs() > 1e-12 {
            cx.finding(format!("n={n}: entropy quantile {h}, expected {expected}"));
        }
        if n % 2 == 1 && best.1 != 0.0 {
            cx.finding(format!("n={n}: information quantile {} at odd n", best.1));
        }
        if err.is_some_and(|e| e != 0.0) {
            cx.finding(format!("n={n}: identity code error {}", err.unwrap_or(f64::NAN)));
        }
    }
    cx.csv(
        "example_alternating.csv",
        "n,parity,entropy_upper_quantile,information_lower_quantile,best_input,identity_code_error",
        &rows,
    );
    let r = cx.core(separation_verdict_on(&set, &m.source, &m.channel, &cands, &opts))?;
    cx.json(
        "example_alternating.json",
        json!({
            "verdict": r.outcome.name(),
            "r_f": r.r_f,
            "capacity": r.capacity,
            "note": "R_f is the limsup proxy of the entropy spectrum and C the liminf proxy of the \
                     information spectrum over the full grid; per-parity values are in the CSV.",
            "report": r,
        }),
    );
    Ok(())
}

fn entropy_nats(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

fn mixed(cx: &mut Cx) -> Result<(), CliError> {
    let m = models(cx)?;
    let cands = cx.core(cx.cfg.candidates(&m.channel))?;
    let grid = cx.cfg.n_grid.clone();
    let opts = separation_options(cx.cfg);
    let set = cx.core(SpectraSet::compute(&m.source, &m.channel, &cands, &grid, &opts.eval, opts.ba_tol))?;
    let components: Vec<f64> = match &cx.cfg.source {
        SourceSpec::Mixed { components, .. } => components
            .iter()
            .filter_map(|c| match c {
                SourceSpec::Iid { probs, .. } => Some(entropy_nats(probs)),
                _ => None,
            })
            .collect(),
        _ => Vec::new(),
    };
    let delta = cx.cfg.delta;
    let mut header = "n,entropy_lower_quantile,entropy_upper_quantile".to_string();
    for k in 0..components.len() {
        let _ = write!(header, ",mass_near_component_{k}");
    }
    let mut rows = String::new();
    for (i, &n) in grid.iter().enumerate() {
        let s = &set.source[i];
        let lo = cx.core(s.mid_quantile(delta))?;
        let hi = cx.core(s.mid_quantile(1.0 - delta))?;
        let _ = write!(rows, "{n},{lo},{hi}");
        for h in &components {
            let _ = write!(rows, ",{}", s.mass_between(h - 0.02, h + 0.02));
        }
        rows.push('\n');
    }
    cx.csv("example_mixed.csv", &header, &rows);
    let gap = cx.core(converse_property_diagnostic(&set, &ConverseMode::SourceStrong, delta, opts.gap_tolerance))?;
    let both_parities = grid.iter().any(|n| n % 2 == 0) && grid.iter().any(|n| n % 2 == 1);
    let semi = if both_parities {
        let mode = ConverseMode::SemiStrongSource {
            subsequences: vec![Subsequence::Even, Subsequence::Odd],
        };
        Some(cx.core(converse_property_diagnostic(&set, &mode, delta, opts.gap_tolerance))?)
    } else {
        None
    };
    let expected_gap = match components.as_slice() {
        [] => None,
        cs => Some(cs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - cs.iter().copied().fold(f64::INFINITY, f64::min)),
    };
    cx.json(
        "example_mixed.json",
        json!({
            "component_entropies": components,
            "expected_gap": expected_gap,
            "gap": gap.gap,
            "source_strong": gap,
            "semi_strong_source": semi,
        }),
    );
    Ok(())
}
