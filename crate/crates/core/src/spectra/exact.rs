//! Exact spectra by three independent routes.
//!
//! * enumeration of the full support (any model, small `n`);
//! * convolution of per-letter atoms (single-component product models);
//! * type classes: when every law in the pipeline is a mixture of i.i.d.
//!   laws, all densities depend on a block only through its letter counts,
//!   so the spectrum is a sum over compositions of `n`.

use crate::block::{space_size, Words};
use crate::dist::log_sum_exp;
use crate::error::{Error, Result};
use crate::models::{entropy_value, information_value, BlockLaw, CouplingLaw, OutputMarginal, SourceLaw};
use crate::spectra::joint::{JointAtom, JointLaw};
use crate::spectra::spectrum::{close, Spectrum, SpectrumMode, VALUE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactRoute {
    Auto,
    Enumeration,
    Convolution,
    TypeClasses,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOptions {
    pub route: ExactRoute,
    /// Cap on enumerated outcomes.
    pub enumeration_cap: f64,
    /// Cap on the number of type classes.
    pub type_cap: f64,
    /// Optional grid step (nats) applied to running sums in the convolution
    /// route; per-symbol values then err by at most half a step.
    pub quantize: Option<f64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            route: ExactRoute::Auto,
            enumeration_cap: 1e7,
            type_cap: 4e6,
            quantize: None,
        }
    }
}

impl ExactOptions {
    pub fn route(route: ExactRoute) -> Self {
        Self {
            route,
            ..Self::default()
        }
    }
}

// ---------------------------------------------------------------------------
// Type-class machinery

struct LogFactorials(Vec<f64>);

impl LogFactorials {
    fn new(n: usize) -> Self {
        let mut t = Vec::with_capacity(n + 1);
        t.push(0.0);
        for i in 1..=n {
            t.push(t[i - 1] + (i as f64).ln());
        }
        Self(t)
    }
}

/// Number of compositions of `n` into `k` nonnegative parts.
pub fn composition_count(n: usize, k: usize) -> f64 {
    if k == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let (lo, hi) = (n.min(k - 1), n.max(k - 1));
    // C(n + k - 1, lo) = prod_{i=1..lo} (hi + i) / i
    (1..=lo)
        .map(|i| ((hi + i) as f64).ln() - (i as f64).ln())
        .sum::<f64>()
        .exp()
}

fn for_each_type(n: usize, k: usize, f: &mut impl FnMut(&[u32], f64)) {
    if k == 0 {
        return;
    }
    let lf = LogFactorials::new(n);
    let mut counts = vec![0u32; k];
    fn rec(
        i: usize,
        left: usize,
        acc: f64,
        counts: &mut [u32],
        lf: &LogFactorials,
        n: usize,
        f: &mut impl FnMut(&[u32], f64),
    ) {
        let k = counts.len();
        if i + 1 == k {
            counts[i] = left as u32;
            f(counts, lf.0[n] - acc - lf.0[left]);
            return;
        }
        for c in 0..=left {
            counts[i] = c as u32;
            rec(i + 1, left - c, acc + lf.0[c], counts, lf, n, f);
        }
    }
    rec(0, n, 0.0, &mut counts, &lf, n, f);
}

/// `ln Σ_i w_i Π_l r_i(l)^{c_l}` for per-letter log tables `r_i`.
struct Mix {
    log_weights: Vec<f64>,
    tables: Vec<Vec<f64>>,
}

impl Mix {
    fn eval(&self, counts: &[u32]) -> f64 {
        let terms: Vec<f64> = self
            .log_weights
            .iter()
            .zip(&self.tables)
            .map(|(w, t)| {
                w + counts
                    .iter()
                    .zip(t)
                    .filter(|(c, _)| **c > 0)
                    .map(|(c, l)| *c as f64 * l)
                    .sum::<f64>()
            })
            .collect();
        log_sum_exp(&terms)
    }
}

fn source_letters(source: &SourceLaw) -> Option<(Vec<u32>, Mix)> {
    let SourceLaw::Letters {
        alphabet,
        components,
        ..
    } = source
    else {
        return None;
    };
    let live: Vec<u32> = (0..*alphabet as u32)
        .filter(|&s| components.iter().any(|c| c.pmf[s as usize] > 0.0))
        .collect();
    let mix = Mix {
        log_weights: components.iter().map(|c| c.weight.ln()).collect(),
        tables: components
            .iter()
            .map(|c| live.iter().map(|&s| c.log_pmf[s as usize]).collect())
            .collect(),
    };
    Some((live, mix))
}

/// Per-letter log tables over `(x, y)` pairs for input, channel and marginal.
struct PairTables {
    pairs: Vec<(u32, u32)>,
    input: Mix,
    channel: Mix,
    marginal: Mix,
}

fn pair_tables(law: &BlockLaw) -> Option<PairTables> {
    let inputs = law.input_components()?;
    let OutputMarginal::Product { terms } = &law.marginal else {
        return None;
    };
    let chan = &law.channel.components;
    let mut pairs = Vec::new();
    for x in 0..law.channel.inputs as u32 {
        if !inputs.iter().any(|(_, p)| p[x as usize] > 0.0) {
            continue;
        }
        for y in 0..law.channel.outputs as u32 {
            if chan.iter().any(|c| c.kernel.prob(x, y) > 0.0) {
                pairs.push((x, y));
            }
        }
    }
    Some(PairTables {
        input: Mix {
            log_weights: inputs.iter().map(|(a, _)| *a).collect(),
            tables: inputs
                .iter()
                .map(|(_, p)| pairs.iter().map(|&(x, _)| p[x as usize].ln()).collect())
                .collect(),
        },
        channel: Mix {
            log_weights: chan.iter().map(|c| c.weight.ln()).collect(),
            tables: chan
                .iter()
                .map(|c| pairs.iter().map(|&(x, y)| c.kernel.log_prob(x, y)).collect())
                .collect(),
        },
        marginal: Mix {
            log_weights: terms.iter().map(|t| t.log_weight).collect(),
            tables: terms
                .iter()
                .map(|t| pairs.iter().map(|&(_, y)| t.log_pmf[y as usize]).collect())
                .collect(),
        },
        pairs,
    })
}

fn check_types(n: usize, k: usize, cap: f64) -> Result<()> {
    let count = composition_count(n, k);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "type classes",
            size: count,
            cap,
        });
    }
    Ok(())
}

fn entropy_by_types(source: &SourceLaw, n: usize, cap: f64) -> Result<Spectrum> {
    let (live, mix) = source_letters(source)
        .ok_or_else(|| Error::Incompatible("type classes need a letter source".into()))?;
    check_types(n, live.len(), cap)?;
    let mut atoms = Vec::new();
    for_each_type(n, live.len(), &mut |c, lm| {
        let lp = mix.eval(c);
        if lp > f64::NEG_INFINITY {
            atoms.push((-lp / n as f64, (lm + lp).exp()));
        }
    });
    Ok(Spectrum::from_atoms(n, SpectrumMode::Exact, atoms))
}

fn information_by_types(law: &BlockLaw, cap: f64) -> Result<Spectrum> {
    let n = law.n;
    let t = pair_tables(law).ok_or_else(|| {
        Error::Incompatible("type classes need letterwise inputs and a product marginal".into())
    })?;
    check_types(n, t.pairs.len(), cap)?;
    let mut atoms = Vec::new();
    let mut err = None;
    for_each_type(n, t.pairs.len(), &mut |c, lm| {
        let lx = t.input.eval(c);
        let lw = t.channel.eval(c);
        let lm_total = lm + lx + lw;
        if lm_total == f64::NEG_INFINITY {
            return;
        }
        match information_value(lw, t.marginal.eval(c), n) {
            Ok(a) => atoms.push((a, lm_total.exp())),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Spectrum::from_atoms(n, SpectrumMode::Exact, atoms))
}

fn joint_by_types(law: &BlockLaw, cap: f64) -> Result<JointLaw> {
    let n = law.n;
    let incompatible = || Error::Incompatible("type classes need a letterwise pipeline".into());
    let (live, src) = source_letters(&law.source).ok_or_else(incompatible)?;
    let pt = pair_tables(law).ok_or_else(incompatible)?;
    let log_k = |v: u32, x: u32| match &law.coupling {
        CouplingLaw::Letterwise { kernel, .. } => kernel.log_prob(v, x),
        CouplingLaw::Independent { log_pmf, .. } => log_pmf[x as usize],
        CouplingLaw::Table(_) => f64::NEG_INFINITY,
    };
    // Triples (v, x, y) indexed into the source letters and the pair list.
    let mut triples = Vec::new();
    for (vi, &v) in live.iter().enumerate() {
        for (pi, &(x, _)) in pt.pairs.iter().enumerate() {
            if log_k(v, x) > f64::NEG_INFINITY {
                triples.push((vi, pi, log_k(v, x)));
            }
        }
    }
    check_types(n, triples.len(), cap)?;
    let (mut cv, mut cp) = (vec![0u32; live.len()], vec![0u32; pt.pairs.len()]);
    let mut atoms = Vec::new();
    let mut err = None;
    for_each_type(n, triples.len(), &mut |c, lm| {
        cv.iter_mut().for_each(|x| *x = 0);
        cp.iter_mut().for_each(|x| *x = 0);
        let mut lk = 0.0;
        for (&k, &(vi, pi, l)) in c.iter().zip(&triples) {
            if k > 0 {
                cv[vi] += k;
                cp[pi] += k;
                lk += k as f64 * l;
            }
        }
        let lv = src.eval(&cv);
        let lw = pt.channel.eval(&cp);
        let total = lm + lv + lk + lw;
        if total == f64::NEG_INFINITY {
            return;
        }
        let a = information_value(lw, pt.marginal.eval(&cp), n);
        let b = entropy_value(lv, n);
        match (a, b) {
            (Ok(a), Ok(b)) => atoms.push(JointAtom {
                a,
                b,
                mass: total.exp(),
            }),
            (Err(e), _) | (_, Err(e)) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(JointLaw::from_atoms(n, SpectrumMode::Exact, atoms))
}

// ---------------------------------------------------------------------------
// Convolution

/// Sum of `n` i.i.d. copies of a per-letter atom set, as `(sum, mass)`.
fn convolve_power(letter: &[(f64, f64)], n: usize, quantize: Option<f64>, max_atoms: f64) -> Result<Vec<(f64, f64)>> {
    let mut acc = vec![(0.0, 1.0)];
    for _ in 0..n {
        if acc.len() as f64 > max_atoms {
            return Err(Error::CapExceeded {
                what: "convolution atoms",
                size: acc.len() as f64,
                cap: max_atoms,
            });
        }
        let mut next = Vec::with_capacity(acc.len() * letter.len());
        for &(s, m) in &acc {
            for &(t, p) in letter {
                let mut v = s + t;
                if let Some(q) = quantize {
                    v = (v / q).round() * q;
                }
                next.push((v, m * p));
            }
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        acc.clear();
        for (v, m) in next {
            match acc.last_mut() {
                Some(last) if close(last.0, v, VALUE_TOL) => last.1 += m,
                _ => acc.push((v, m)),
            }
        }
    }
    Ok(acc)
}

fn entropy_by_convolution(source: &SourceLaw, n: usize, quantize: Option<f64>, max_atoms: f64) -> Result<Spectrum> {
    let pmf = source
        .single_pmf()
        .ok_or_else(|| Error::Incompatible("convolution needs a single i.i.d. source".into()))?;
    let letter: Vec<(f64, f64)> = pmf
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| (-p.ln(), *p))
        .collect();
    let atoms = convolve_power(&letter, n, quantize, max_atoms)?
        .into_iter()
        .map(|(s, m)| (s / n as f64, m))
        .collect();
    Ok(quantized(Spectrum::from_atoms(n, SpectrumMode::Exact, atoms), quantize))
}

fn quantized(s: Spectrum, quantize: Option<f64>) -> Spectrum {
    match quantize {
        Some(q) => s.with_taint(Some(format!("quantized:{q}"))),
        None => s,
    }
}

/// Single input law, single channel kernel and a one-term marginal.
fn product_letters(law: &BlockLaw) -> Option<Vec<(f64, f64, u32, u32)>> {
    let inputs = law.input_components()?;
    let kernel = law.channel.single_kernel()?;
    let OutputMarginal::Product { terms } = &law.marginal else {
        return None;
    };
    if inputs.len() != 1 || terms.len() != 1 {
        return None;
    }
    let px = &inputs[0].1;
    let q = &terms[0];
    let mut out = Vec::new();
    for x in 0..kernel.inputs() as u32 {
        for y in 0..kernel.outputs() as u32 {
            let m = px[x as usize] * kernel.prob(x, y);
            if m > 0.0 {
                out.push((kernel.log_prob(x, y) - q.log_pmf[y as usize], m, x, y));
            }
        }
    }
    Some(out)
}

fn information_by_convolution(law: &BlockLaw, quantize: Option<f64>, max_atoms: f64) -> Result<Spectrum> {
    let n = law.n;
    let letters = product_letters(law)
        .ok_or_else(|| Error::Incompatible("convolution needs a product-form pipeline".into()))?;
    let letter: Vec<(f64, f64)> = letters.iter().map(|&(a, m, _, _)| (a, m)).collect();
    let atoms = convolve_power(&letter, n, quantize, max_atoms)?
        .into_iter()
        .map(|(s, m)| (s / n as f64, m))
        .collect();
    Ok(quantized(Spectrum::from_atoms(n, SpectrumMode::Exact, atoms), quantize))
}

fn joint_by_convolution(law: &BlockLaw) -> Result<JointLaw> {
    let n = law.n;
    let incompatible = || Error::Incompatible("convolution needs a product-form pipeline".into());
    let pv = law.source.single_pmf().ok_or_else(incompatible)?;
    let kernel = law.channel.single_kernel().ok_or_else(incompatible)?;
    let OutputMarginal::Product { terms } = &law.marginal else {
        return Err(incompatible());
    };
    if terms.len() != 1 {
        return Err(incompatible());
    }
    let q = &terms[0].log_pmf;
    let coupling = |v: u32, x: u32| match &law.coupling {
        CouplingLaw::Letterwise { kernel, .. } => kernel.prob(v, x),
        CouplingLaw::Independent { pmf, .. } => pmf[x as usize],
        CouplingLaw::Table(_) => 0.0,
    };
    let mut letter = Vec::new();
    for (v, p) in pv.iter().enumerate() {
        for x in 0..kernel.inputs() as u32 {
            for y in 0..kernel.outputs() as u32 {
                let m = p * coupling(v as u32, x) * kernel.prob(x, y);
                if m > 0.0 {
                    letter.push((kernel.log_prob(x, y) - q[y as usize], -p.ln(), m));
                }
            }
        }
    }
    let mut acc: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 1.0)];
    let same = |a: f64, b: f64| close(a, b, VALUE_TOL);
    for _ in 0..n {
        let mut next = Vec::with_capacity(acc.len() * letter.len());
        for &(a, b, m) in &acc {
            for &(da, db, p) in &letter {
                next.push((a + da, b + db, m * p));
            }
        }
        next.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        acc.clear();
        for t in next {
            // Merge against recent atoms sharing the same `a` within tolerance.
            let hit = acc
                .iter_mut()
                .rev()
                .take_while(|u| same(u.0, t.0))
                .find(|u| same(u.1, t.1));
            match hit {
                Some(u) => u.2 += t.2,
                None => acc.push(t),
            }
        }
    }
    let atoms = acc
        .into_iter()
        .map(|(a, b, m)| JointAtom {
            a: a / n as f64,
            b: b / n as f64,
            mass: m,
        })
        .collect();
    Ok(JointLaw::from_atoms(n, SpectrumMode::Exact, atoms))
}

// ---------------------------------------------------------------------------
// Enumeration

fn entropy_by_enumeration(source: &SourceLaw, n: usize, cap: f64) -> Result<Spectrum> {
    let atoms = source
        .support(cap)?
        .into_iter()
        .map(|(_, lp)| (-lp / n as f64, lp.exp()))
        .collect();
    Ok(Spectrum::from_atoms(n, SpectrumMode::Exact, atoms))
}

fn information_by_enumeration(law: &BlockLaw, cap: f64) -> Result<Spectrum> {
    let mut atoms = Vec::new();
    if law.coupling.is_independent() {
        // The source block does not affect (X^n, Y^n); enumerate inputs once.
        let inputs = law.coupling.support(&[], law.n, cap)?;
        let size = inputs.len() as f64 * space_size(law.channel.outputs, law.n);
        if size > cap {
            return Err(Error::CapExceeded {
                what: "input-output pairs",
                size,
                cap,
            });
        }
        for (x, lx) in inputs {
            for y in Words::new(law.channel.outputs, law.n) {
                let lw = law.log_w(&x, &y);
                if lw > f64::NEG_INFINITY {
                    atoms.push((law.information_density(&x, &y)?, (lx + lw).exp()));
                }
            }
        }
    } else {
        for t in law.joint_support(cap)? {
            atoms.push((law.information_density(&t.x, &t.y)?, t.log_prob.exp()));
        }
    }
    Ok(Spectrum::from_atoms(law.n, SpectrumMode::Exact, atoms).with_taint(law.taint().map(Into::into)))
}

fn joint_by_enumeration(law: &BlockLaw, cap: f64) -> Result<JointLaw> {
    let mut atoms = Vec::new();
    for t in law.joint_support(cap)? {
        atoms.push(JointAtom {
            a: law.information_density(&t.x, &t.y)?,
            b: law.entropy_density(&t.v)?,
            mass: t.log_prob.exp(),
        });
    }
    Ok(JointLaw::from_atoms(law.n, SpectrumMode::Exact, atoms).with_taint(law.taint().map(Into::into)))
}

/// Atom budget for the convolution fallback of [`ExactRoute::Auto`]; keeps
/// the total work near `25 · type_cap` merge steps.
fn convolution_budget(opts: &ExactOptions, n: usize) -> f64 {
    (25.0 * opts.type_cap / n.max(1) as f64).min(opts.type_cap)
}

// ---------------------------------------------------------------------------
// Public entry points

/// Exact entropy spectrum of `P_{V^n}`.
pub fn exact_entropy_spectrum(source: &SourceLaw, n: usize, opts: &ExactOptions) -> Result<Spectrum> {
    if let SourceLaw::Messages { count } = source {
        return Ok(Spectrum::point(n, (*count as f64).ln() / n as f64));
    }
    match opts.route {
        ExactRoute::Enumeration => entropy_by_enumeration(source, n, opts.enumeration_cap),
        ExactRoute::Convolution => entropy_by_convolution(source, n, opts.quantize, f64::INFINITY),
        ExactRoute::TypeClasses => entropy_by_types(source, n, opts.type_cap),
        ExactRoute::Auto => {
            let live = source_letters(source).map_or(0, |(l, _)| l.len());
            if composition_count(n, live) <= opts.type_cap {
                entropy_by_types(source, n, opts.type_cap)
            } else if let Ok(s) = entropy_by_convolution(source, n, opts.quantize, convolution_budget(opts, n)) {
                Ok(s)
            } else if source.support_size() <= opts.enumeration_cap {
                entropy_by_enumeration(source, n, opts.enumeration_cap)
            } else {
                Err(Error::CapExceeded {
                    what: "entropy spectrum",
                    size: source.support_size(),
                    cap: opts.enumeration_cap,
                })
            }
        }
    }
}

/// Exact information spectrum under the pipeline's joint law of `(X^n, Y^n)`.
pub fn exact_information_spectrum(law: &BlockLaw, opts: &ExactOptions) -> Result<Spectrum> {
    match opts.route {
        ExactRoute::Enumeration => information_by_enumeration(law, opts.enumeration_cap),
        ExactRoute::Convolution => information_by_convolution(law, opts.quantize, f64::INFINITY),
        ExactRoute::TypeClasses => information_by_types(law, opts.type_cap),
        ExactRoute::Auto => {
            if let Some(t) = pair_tables(law) {
                if composition_count(law.n, t.pairs.len()) <= opts.type_cap {
                    return information_by_types(law, opts.type_cap);
                }
            }
            if let Ok(s) = information_by_convolution(law, opts.quantize, convolution_budget(opts, law.n)) {
                return Ok(s);
            }
            information_by_enumeration(law, opts.enumeration_cap)
        }
    }
}

/// Exact joint law of `(A_n, B_n)`.
pub fn exact_joint_law(law: &BlockLaw, opts: &ExactOptions) -> Result<JointLaw> {
    match opts.route {
        ExactRoute::Enumeration => joint_by_enumeration(law, opts.enumeration_cap),
        ExactRoute::Convolution => joint_by_convolution(law),
        ExactRoute::TypeClasses => joint_by_types(law, opts.type_cap),
        ExactRoute::Auto => {
            if law.coupling.is_independent() && law.marginal.is_exact() {
                // (X, Y) is independent of V, hence A_n of B_n.
                let info = exact_information_spectrum(law, opts)?;
                let entropy = exact_entropy_spectrum(&law.source, law.n, opts)?;
                return Ok(JointLaw::Independent { info, entropy });
            }
            match joint_by_types(law, opts.type_cap) {
                Err(Error::Incompatible(_)) | Err(Error::CapExceeded { .. }) => {
                    joint_by_enumeration(law, opts.enumeration_cap)
                }
                other => other,
            }
        }
    }
}

/// Upper bound on the enumeration size of the joint support.
pub fn joint_support_size(law: &BlockLaw) -> f64 {
    law.source.support_size()
        * space_size(law.channel.inputs, law.n)
        * space_size(law.channel.outputs, law.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ChannelModel, InputCoupling, JointModel, SourceModel};

    #[test]
    fn composition_counts() {
        assert_eq!(composition_count(3, 2), 4.0);
        assert!((composition_count(8, 4) - 165.0).abs() < 1e-9);
        assert_eq!(composition_count(5, 1), 1.0);
        let mut seen = 0;
        let mut total = 0.0;
        for_each_type(4, 3, &mut |_, lm| {
            seen += 1;
            total += lm.exp();
        });
        assert_eq!(seen, 15);
        assert!((total - 81.0).abs() < 1e-9);
    }

    #[test]
    fn bernoulli_entropy_examples() {
        let opts = ExactOptions::default();
        let s = exact_entropy_spectrum(&SourceModel::bernoulli(0.5).unwrap().resolve(3).unwrap(), 3, &opts)
            .unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.values()[0] - 2f64.ln()).abs() < 1e-15);
        let s = exact_entropy_spectrum(&SourceModel::bernoulli(0.25).unwrap().resolve(1).unwrap(), 1, &opts)
            .unwrap();
        let atoms: Vec<_> = s.atoms().collect();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].0 + 0.75f64.ln()).abs() < 1e-15 && (atoms[0].1 - 0.75).abs() < 1e-15);
        assert!((atoms[1].0 + 0.25f64.ln()).abs() < 1e-15 && (atoms[1].1 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn routes_agree_on_bsc_information() {
        let law = JointModel::new(
            SourceModel::bernoulli(0.3).unwrap(),
            InputCoupling::uniform(2).unwrap(),
            ChannelModel::bsc(0.1).unwrap(),
        )
        .resolve(2)
        .unwrap();
        let e = exact_information_spectrum(&law, &ExactOptions::route(ExactRoute::Enumeration)).unwrap();
        let c = exact_information_spectrum(&law, &ExactOptions::route(ExactRoute::Convolution)).unwrap();
        let t = exact_information_spectrum(&law, &ExactOptions::route(ExactRoute::TypeClasses)).unwrap();
        assert!(e.tv(&c, 1e-12) < 1e-12);
        assert!(e.tv(&t, 1e-12) < 1e-12);
    }

    #[test]
    fn quantization_is_reported() {
        let src = SourceModel::bernoulli(0.3).unwrap().resolve(20).unwrap();
        let opts = ExactOptions {
            route: ExactRoute::Convolution,
            quantize: Some(1e-3),
            ..Default::default()
        };
        let s = exact_entropy_spectrum(&src, 20, &opts).unwrap();
        assert_eq!(s.taint.as_deref(), Some("quantized:0.001"));
    }
}
