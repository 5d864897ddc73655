//! Filter-and-renormalize inference over enumerated hypothesis classes.
//!
//! A [`Model`] is a probability distribution over full-horizon prefixes.
//! Observing a symbol removes (general models) or zeroes (special models)
//! every entry that disagrees at the current position and renormalizes the
//! rest — learning is deletion plus renormalization, nothing more.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use thiserror::Error;

use crate::udl::{symbols_to_string, Description, LanguageSpec, Symbol};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("observation contradicts every surviving hypothesis")]
    Contradiction,
    #[error("horizon of {0} symbols already fully observed")]
    HorizonExhausted(usize),
    #[error("symbol {symbol} outside alphabet of size {k}")]
    SymbolOutOfRange { symbol: Symbol, k: u8 },
    #[error("model must have at least one entry")]
    EmptyModel,
    #[error("model weights must be positive and finite (entry {prefix:?})")]
    BadWeight { prefix: String },
    #[error("entry {prefix:?} has length {got}, expected the horizon {expected}")]
    WrongPrefixLength { prefix: String, expected: usize, got: usize },
    #[error("subset selects no entries")]
    EmptySubset,
    #[error("reweight factor must be positive and finite, got {0}")]
    BadGamma(f64),
    #[error("zero set would leave the model without positive mass")]
    ZeroedEverything,
    #[error("boundaries request {requested} symbols but only {available} remain before the horizon")]
    BoundariesExceedHorizon { requested: usize, available: usize },
    #[error("alignment is undefined once the full horizon is observed")]
    AlignmentUndefined,
    #[error("periodic process needs a nonempty period")]
    EmptyPeriod,
    #[error("process emitted only {emitted} of the {needed} symbols requested")]
    ProcessPrefixUnavailable { needed: usize, emitted: usize },
}

/// Whether zeroed-out hypotheses are dropped or pinned at exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Inconsistent entries are deleted; every surviving entry is positive.
    General,
    /// Entries may sit at exactly 0 and are retained through updates.
    Special,
}

// ─── processes ───────────────────────────────────────────────────────────────

/// The true data generator a model is measured against: either a designated
/// program of some language or an explicit repeating symbol string.
#[derive(Debug, Clone, PartialEq)]
pub struct Process {
    source: Source,
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Program {
        language: LanguageSpec,
        description: Description,
        max_steps: u64,
    },
    Periodic { symbols: Vec<Symbol> },
}

impl Process {
    /// A process that repeats `symbols` forever.
    pub fn periodic(symbols: Vec<Symbol>) -> Result<Process, ModelError> {
        if symbols.is_empty() {
            return Err(ModelError::EmptyPeriod);
        }
        Ok(Process { source: Source::Periodic { symbols } })
    }

    /// A process that emits whatever `description` emits under `language`
    /// within `max_steps` machine steps.
    pub fn program(language: LanguageSpec, description: Description, max_steps: u64) -> Process {
        Process {
            source: Source::Program { language, description, max_steps },
        }
    }

    /// The first `len` symbols the process generates.
    pub fn true_prefix(&self, len: usize) -> Result<Vec<Symbol>, ModelError> {
        match &self.source {
            Source::Periodic { symbols } => {
                Ok((0..len).map(|i| symbols[i % symbols.len()]).collect())
            }
            Source::Program { language, description, max_steps } => {
                let outcome = language.run(description, *max_steps, len);
                if outcome.emitted.len() < len {
                    return Err(ModelError::ProcessPrefixUnavailable {
                        needed: len,
                        emitted: outcome.emitted.len(),
                    });
                }
                Ok(outcome.emitted)
            }
        }
    }

    /// Short human/CLI form: `periodic:<symbols>` or `program:<bitlen>:<hex>`.
    pub fn describe(&self) -> String {
        match &self.source {
            Source::Periodic { symbols } => format!("periodic:{}", symbols_to_string(symbols)),
            Source::Program { description, .. } => format!("program:{}", description.to_hex()),
        }
    }
}

// ─── models ──────────────────────────────────────────────────────────────────

/// A distribution over full-horizon prefixes, tagged with the language it was
/// enumerated under and how many symbols it has absorbed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    language_id: String,
    k: u8,
    horizon: usize,
    observed_count: usize,
    kind: ModelKind,
    entries: BTreeMap<Vec<Symbol>, f64>,
}

/// Point-in-time metrics of a model against a process.
///
/// `alignment` is `None` once the full horizon has been observed (there are
/// no remaining positions to average over).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub correspondence: f64,
    pub alignment: Option<f64>,
    pub entropy: f64,
    pub surviving: usize,
}

impl Model {
    /// Build a general model from positive weights, normalizing them.
    pub fn from_weights(
        language_id: impl Into<String>,
        k: u8,
        horizon: usize,
        weights: BTreeMap<Vec<Symbol>, f64>,
    ) -> Result<Model, ModelError> {
        if weights.is_empty() {
            return Err(ModelError::EmptyModel);
        }
        let mut total = 0.0;
        for (prefix, &w) in &weights {
            if prefix.len() != horizon {
                return Err(ModelError::WrongPrefixLength {
                    prefix: symbols_to_string(prefix),
                    expected: horizon,
                    got: prefix.len(),
                });
            }
            if prefix.iter().any(|&s| s >= k) {
                return Err(ModelError::SymbolOutOfRange {
                    symbol: *prefix.iter().find(|&&s| s >= k).unwrap(),
                    k,
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(ModelError::BadWeight { prefix: symbols_to_string(prefix) });
            }
            total += w;
        }
        let entries = weights.into_iter().map(|(p, w)| (p, w / total)).collect();
        Ok(Model {
            language_id: language_id.into(),
            k,
            horizon,
            observed_count: 0,
            kind: ModelKind::General,
            entries,
        })
    }

    pub fn language_id(&self) -> &str {
        &self.language_id
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// How many symbols this model has already observed.
    pub fn observed_count(&self) -> usize {
        self.observed_count
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[Symbol], f64)> {
        self.entries.iter().map(|(p, &v)| (p.as_slice(), v))
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    /// Entries with strictly positive probability.
    pub fn surviving_count(&self) -> usize {
        self.entries.values().filter(|&&p| p > 0.0).count()
    }

    /// Probability of a full-horizon prefix; 0 for entries not present.
    pub fn probability(&self, prefix: &[Symbol]) -> f64 {
        self.entries.get(prefix).copied().unwrap_or(0.0)
    }

    /// Condition on one more symbol: keep (or retain at zero) the entries
    /// whose prefix agrees at the current position, and renormalize.
    pub fn observe_update(&self, symbol: Symbol) -> Result<Model, ModelError> {
        if self.observed_count >= self.horizon {
            return Err(ModelError::HorizonExhausted(self.horizon));
        }
        if symbol >= self.k {
            return Err(ModelError::SymbolOutOfRange { symbol, k: self.k });
        }
        let t = self.observed_count;
        let mass: f64 = self
            .entries
            .iter()
            .filter(|(prefix, _)| prefix[t] == symbol)
            .map(|(_, &p)| p)
            .sum();
        if mass <= 0.0 {
            return Err(ModelError::Contradiction);
        }
        let entries = match self.kind {
            ModelKind::General => self
                .entries
                .iter()
                .filter(|(prefix, _)| prefix[t] == symbol)
                .map(|(prefix, &p)| (prefix.clone(), p / mass))
                .collect(),
            ModelKind::Special => self
                .entries
                .iter()
                .map(|(prefix, &p)| {
                    let p = if prefix[t] == symbol { p / mass } else { 0.0 };
                    (prefix.clone(), p)
                })
                .collect(),
        };
        Ok(Model {
            language_id: self.language_id.clone(),
            k: self.k,
            horizon: self.horizon,
            observed_count: t + 1,
            kind: self.kind,
            entries,
        })
    }

    /// Fold [`Model::observe_update`] over a symbol string.
    pub fn batch_update(&self, symbols: &[Symbol]) -> Result<Model, ModelError> {
        let mut model = self.clone();
        for &s in symbols {
            model = model.observe_update(s)?;
        }
        Ok(model)
    }

    /// Probability this model assigns to the process's true full prefix.
    pub fn correspondence(&self, process: &Process) -> Result<f64, ModelError> {
        let truth = process.true_prefix(self.horizon)?;
        Ok(self.probability(&truth))
    }

    /// Expected per-position agreement with the true sequence, averaged over
    /// every not-yet-observed position under the current (static) posterior.
    pub fn alignment(&self, process: &Process) -> Result<f64, ModelError> {
        let t = self.observed_count;
        if t >= self.horizon {
            return Err(ModelError::AlignmentUndefined);
        }
        let truth = process.true_prefix(self.horizon)?;
        let mut sum = 0.0;
        for j in t..self.horizon {
            for (prefix, &p) in &self.entries {
                if prefix[j] == truth[j] {
                    sum += p;
                }
            }
        }
        Ok(sum / (self.horizon - t) as f64)
    }

    /// Shannon entropy of the distribution in bits; zero entries contribute
    /// nothing.
    pub fn entropy(&self) -> f64 {
        let h = -self
            .entries
            .values()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>();
        // A concentrated model yields -(1·log2 1) = -0.0; keep zero unsigned.
        h.max(0.0)
    }

    /// All metrics against a process at the current observation point.
    pub fn metrics(&self, process: &Process) -> Result<Metrics, ModelError> {
        let alignment = if self.observed_count < self.horizon {
            Some(self.alignment(process)?)
        } else {
            None
        };
        Ok(Metrics {
            correspondence: self.correspondence(process)?,
            alignment,
            entropy: self.entropy(),
            surviving: self.surviving_count(),
        })
    }

    /// Multiply the probability of every selected entry by `gamma` and
    /// renormalize. Entries at exactly zero stay at zero.
    pub fn reweight(
        &self,
        select: impl Fn(&[Symbol]) -> bool,
        gamma: f64,
    ) -> Result<Model, ModelError> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(ModelError::BadGamma(gamma));
        }
        let mut selected = 0usize;
        let mut entries: BTreeMap<Vec<Symbol>, f64> = self
            .entries
            .iter()
            .map(|(prefix, &p)| {
                if select(prefix) {
                    selected += 1;
                    (prefix.clone(), p * gamma)
                } else {
                    (prefix.clone(), p)
                }
            })
            .collect();
        if selected == 0 {
            return Err(ModelError::EmptySubset);
        }
        let total: f64 = entries.values().sum();
        for p in entries.values_mut() {
            *p /= total;
        }
        Ok(Model {
            language_id: self.language_id.clone(),
            k: self.k,
            horizon: self.horizon,
            observed_count: self.observed_count,
            kind: self.kind,
            entries,
        })
    }

    /// Pin every entry selected by `zero_set` at exactly 0 and renormalize
    /// the rest; the result is a special model. Selecting nothing is a no-op
    /// (the model is returned unchanged, still general, with a warning).
    pub fn make_special(
        &self,
        zero_set: impl Fn(&[Symbol]) -> bool,
    ) -> Result<Model, ModelError> {
        let selected: Vec<Vec<Symbol>> = self
            .entries
            .keys()
            .filter(|prefix| zero_set(prefix))
            .cloned()
            .collect();
        if selected.is_empty() {
            log::warn!("make_special: zero set selected no entries; model left unchanged");
            return Ok(self.clone());
        }
        if selected.len() == self.entries.len() {
            return Err(ModelError::ZeroedEverything);
        }
        let mut entries = self.entries.clone();
        for prefix in &selected {
            entries.insert(prefix.clone(), 0.0);
        }
        let total: f64 = entries.values().sum();
        if total <= 0.0 {
            return Err(ModelError::ZeroedEverything);
        }
        for p in entries.values_mut() {
            *p /= total;
        }
        Ok(Model {
            language_id: self.language_id.clone(),
            k: self.k,
            horizon: self.horizon,
            observed_count: self.observed_count,
            kind: ModelKind::Special,
            entries,
        })
    }

    /// Write the model as JSON Lines: a header object, then one
    /// `{prefix, p}` object per entry in prefix order.
    pub fn write_snapshot<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Header<'a> {
            format_version: u32,
            language_id: &'a str,
            k: u8,
            horizon: usize,
            observed_count: usize,
            kind: ModelKind,
            entry_count: usize,
        }
        let header = Header {
            format_version: 1,
            language_id: &self.language_id,
            k: self.k,
            horizon: self.horizon,
            observed_count: self.observed_count,
            kind: self.kind,
            entry_count: self.entries.len(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for (prefix, &p) in &self.entries {
            #[derive(Serialize)]
            struct Line {
                prefix: String,
                p: f64,
            }
            writeln!(w, "{}", serde_json::to_string(&Line { prefix: symbols_to_string(prefix), p })?)?;
        }
        Ok(())
    }
}

// ─── chains and thresholds ───────────────────────────────────────────────────

/// One stage of a submodel chain: the model before, the segment absorbed,
/// the model after, and metrics on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    pub stage: usize,
    pub prior: Model,
    pub segment: Vec<Symbol>,
    pub posterior: Model,
    pub before: Metrics,
    pub after: Metrics,
}

/// Split the process's next symbols into segments of the given lengths and
/// absorb them stage by stage. Each stage's posterior is the next stage's
/// prior; the final posterior equals one batch update over the concatenation.
pub fn run_chain(
    prior: &Model,
    process: &Process,
    boundaries: &[usize],
) -> Result<Vec<ChainRecord>, ModelError> {
    let requested: usize = boundaries.iter().sum();
    let available = prior.horizon() - prior.observed_count();
    if requested > available {
        return Err(ModelError::BoundariesExceedHorizon { requested, available });
    }
    let truth = process.true_prefix(prior.observed_count() + requested)?;
    let mut current = prior.clone();
    let mut records = Vec::with_capacity(boundaries.len());
    for (stage, &len) in boundaries.iter().enumerate() {
        let from = current.observed_count();
        let segment = truth[from..from + len].to_vec();
        let before = current.metrics(process)?;
        let posterior = current.batch_update(&segment)?;
        let after = posterior.metrics(process)?;
        records.push(ChainRecord {
            stage,
            prior: current,
            segment,
            posterior: posterior.clone(),
            before,
            after,
        });
        current = posterior;
    }
    Ok(records)
}

/// The smallest number of additional true symbols after which the model's
/// correspondence reaches `theta`, or `None` if it never does within the
/// horizon (including when the truth contradicts the model outright).
pub fn steps_to_threshold(
    prior: &Model,
    process: &Process,
    theta: f64,
) -> Result<Option<usize>, ModelError> {
    assert!(
        theta > 0.0 && theta <= 1.0,
        "threshold must lie in (0, 1], got {theta}"
    );
    let truth = process.true_prefix(prior.horizon())?;
    let mut model = prior.clone();
    let mut steps = 0usize;
    loop {
        if model.probability(&truth) >= theta {
            return Ok(Some(steps));
        }
        if model.observed_count() >= model.horizon() {
            return Ok(None);
        }
        match model.observe_update(truth[model.observed_count()]) {
            Ok(next) => model = next,
            Err(ModelError::Contradiction) => return Ok(None),
            Err(e) => return Err(e),
        }
        steps += 1;
    }
}

// ─── trace output ────────────────────────────────────────────────────────────

/// One row of a per-step observation trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub symbol: Symbol,
    pub metrics: Metrics,
}

/// CSV with columns
/// `step,observed_symbol,correspondence,alignment,entropy,surviving_classes`.
/// The alignment field is empty on rows where it is undefined.
pub fn write_trace_csv<W: io::Write>(w: &mut W, rows: &[TraceRow]) -> io::Result<()> {
    writeln!(w, "step,observed_symbol,correspondence,alignment,entropy,surviving_classes")?;
    for row in rows {
        let alignment = row
            .metrics
            .alignment
            .map(|a| a.to_string())
            .unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            row.step,
            crate::udl::symbol_to_char(row.symbol),
            row.metrics.correspondence,
            alignment,
            row.metrics.entropy,
            row.metrics.surviving
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pfx(s: &str) -> Vec<Symbol> {
        crate::udl::parse_symbols(s).unwrap()
    }

    fn model3() -> Model {
        // The worked three-class example used throughout: 1/2, 1/4, 1/4.
        let mut w = BTreeMap::new();
        w.insert(pfx("00"), 0.5);
        w.insert(pfx("01"), 0.25);
        w.insert(pfx("10"), 0.25);
        Model::from_weights("test-lang", 2, 2, w).unwrap()
    }

    #[test]
    fn observe_filters_and_renormalizes() {
        let m = model3().observe_update(0).unwrap();
        assert_eq!(m.observed_count(), 1);
        assert_eq!(m.entry_count(), 2, "general update deletes the loser");
        assert!((m.probability(&pfx("00")) - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.probability(&pfx("01")) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.probability(&pfx("10")), 0.0);
    }

    #[test]
    fn special_models_keep_zeroed_entries() {
        let special = model3().make_special(|p| p == pfx("10")).unwrap();
        assert_eq!(special.kind(), ModelKind::Special);
        assert_eq!(special.entry_count(), 3);
        assert_eq!(special.probability(&pfx("10")), 0.0);
        assert!((special.probability(&pfx("00")) - 2.0 / 3.0).abs() < 1e-12);

        let updated = special.observe_update(0).unwrap();
        assert_eq!(updated.entry_count(), 3, "zeros are retained, not deleted");
        assert_eq!(updated.probability(&pfx("10")), 0.0);
        assert!((updated.probability(&pfx("00")) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn contradiction_on_empty_support() {
        let one = Model::from_weights(
            "test-lang",
            2,
            2,
            BTreeMap::from([(pfx("00"), 1.0)]),
        )
        .unwrap();
        assert!(matches!(one.observe_update(1), Err(ModelError::Contradiction)));

        // A special model whose only positive entry disagrees also contradicts.
        let special = model3().make_special(|p| p[0] == 0).unwrap();
        assert!(matches!(special.observe_update(0), Err(ModelError::Contradiction)));
    }

    #[test]
    fn horizon_and_alphabet_are_enforced() {
        let m = model3().batch_update(&pfx("00")).unwrap();
        assert!(matches!(m.observe_update(0), Err(ModelError::HorizonExhausted(2))));
        assert!(matches!(
            model3().observe_update(5),
            Err(ModelError::SymbolOutOfRange { symbol: 5, k: 2 })
        ));
    }

    #[test]
    fn batch_equals_sequential() {
        let seq = model3().observe_update(0).unwrap().observe_update(1).unwrap();
        let batch = model3().batch_update(&pfx("01")).unwrap();
        assert_eq!(seq.entry_count(), batch.entry_count());
        for (prefix, p) in batch.entries() {
            assert!((p - seq.probability(prefix)).abs() < 1e-12);
        }
        // The empty batch is the identity.
        assert_eq!(model3().batch_update(&[]).unwrap(), model3());
    }

    #[test]
    fn correspondence_grows_toward_one() {
        let truth = Process::periodic(vec![0]).unwrap();
        let m0 = model3();
        let c0 = m0.correspondence(&truth).unwrap();
        let m1 = m0.observe_update(0).unwrap();
        let c1 = m1.correspondence(&truth).unwrap();
        let m2 = m1.observe_update(0).unwrap();
        let c2 = m2.correspondence(&truth).unwrap();
        assert!((c0 - 0.5).abs() < 1e-12);
        assert!((c1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((c2 - 1.0).abs() < 1e-12);
        assert!(c0 <= c1 && c1 <= c2);
    }

    #[test]
    fn alignment_weights_agreement_per_position() {
        // Two equally likely hypotheses; one matches the truth everywhere,
        // the other at two of four positions: alignment 3/4.
        let mut w = BTreeMap::new();
        w.insert(pfx("0000"), 0.5);
        w.insert(pfx("0101"), 0.5);
        let m = Model::from_weights("test-lang", 2, 4, w).unwrap();
        let truth = Process::periodic(vec![0]).unwrap();
        assert!((m.alignment(&truth).unwrap() - 0.75).abs() < 1e-12);

        // After the horizon it is undefined.
        let done = m.batch_update(&pfx("0000")).unwrap();
        assert!(matches!(done.alignment(&truth), Err(ModelError::AlignmentUndefined)));
    }

    #[test]
    fn entropy_of_known_distributions() {
        let mut w = BTreeMap::new();
        for s in ["00", "01", "10", "11"] {
            w.insert(pfx(s), 1.0);
        }
        let uniform = Model::from_weights("test-lang", 2, 2, w).unwrap();
        assert!((uniform.entropy() - 2.0).abs() < 1e-12);

        let point = Model::from_weights("test-lang", 2, 2, BTreeMap::from([(pfx("00"), 1.0)])).unwrap();
        assert_eq!(point.entropy(), 0.0);
        assert!((model3().entropy() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_obeys_the_chain_rule() {
        // Split the three-class model by first symbol and check
        // H(m) = H(split) + Σ mass · H(conditional) exactly (within float eps).
        let m = model3();
        let mass0: f64 = m.entries().filter(|(p, _)| p[0] == 0).map(|(_, v)| v).sum();
        let mass1 = 1.0 - mass0;
        let h_split = -(mass0 * mass0.log2() + mass1 * mass1.log2());
        let h_cond0 = {
            let ps = [m.probability(&pfx("00")) / mass0, m.probability(&pfx("01")) / mass0];
            -ps.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
        };
        let h_cond1 = 0.0; // single entry under first symbol 1
        let rhs = h_split + mass0 * h_cond0 + mass1 * h_cond1;
        assert!((m.entropy() - rhs).abs() < 1e-9, "chain rule identity violated");
    }

    #[test]
    fn reweight_boosts_and_renormalizes() {
        let mut w = BTreeMap::new();
        for s in ["00", "01", "10", "11"] {
            w.insert(pfx(s), 1.0);
        }
        let uniform = Model::from_weights("test-lang", 2, 2, w).unwrap();
        let boosted = uniform.reweight(|p| p == pfx("00"), 8.0).unwrap();
        assert!((boosted.probability(&pfx("00")) - 8.0 / 11.0).abs() < 1e-12);
        assert!((boosted.probability(&pfx("01")) - 1.0 / 11.0).abs() < 1e-12);
        assert_eq!(boosted.kind(), ModelKind::General);

        assert!(matches!(uniform.reweight(|_| false, 2.0), Err(ModelError::EmptySubset)));
        assert!(matches!(uniform.reweight(|_| true, 0.0), Err(ModelError::BadGamma(_))));
    }

    #[test]
    fn zeros_absorb_reweighting() {
        let special = model3().make_special(|p| p == pfx("10")).unwrap();
        let boosted = special.reweight(|_| true, 7.5).unwrap();
        assert_eq!(boosted.probability(&pfx("10")), 0.0);
        assert_eq!(boosted.kind(), ModelKind::Special);
    }

    #[test]
    fn make_special_edge_cases() {
        // Vacuous zero set: unchanged model, still general.
        let noop = model3().make_special(|_| false).unwrap();
        assert_eq!(noop, model3());
        assert_eq!(noop.kind(), ModelKind::General);

        // Zeroing every entry is rejected.
        assert!(matches!(model3().make_special(|_| true), Err(ModelError::ZeroedEverything)));

        // Zeroing all remaining positive mass of a special model is too.
        let special = model3().make_special(|p| p == pfx("10")).unwrap();
        assert!(matches!(
            special.make_special(|p| p[0] == 0),
            Err(ModelError::ZeroedEverything)
        ));
    }

    #[test]
    fn chain_stages_compose_like_one_batch() {
        let mut w = BTreeMap::new();
        for s in ["0000", "0001", "0101", "1111"] {
            w.insert(pfx(s), 1.0);
        }
        let prior = Model::from_weights("test-lang", 2, 4, w).unwrap();
        let truth = Process::periodic(vec![0]).unwrap();

        let records = run_chain(&prior, &truth, &[2, 2]).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].segment, pfx("00"));
        assert_eq!(records[1].segment, pfx("00"));
        assert_eq!(records[0].posterior, records[1].prior);

        let direct = prior.batch_update(&pfx("0000")).unwrap();
        let chained = &records[1].posterior;
        assert_eq!(direct.entry_count(), chained.entry_count());
        for (prefix, p) in direct.entries() {
            assert!((p - chained.probability(prefix)).abs() < 1e-12);
        }

        assert!(run_chain(&prior, &truth, &[]).unwrap().is_empty());
        assert!(matches!(
            run_chain(&prior, &truth, &[3, 2]),
            Err(ModelError::BoundariesExceedHorizon { requested: 5, available: 4 })
        ));

        // A zero-length stage records an unchanged model.
        let with_empty = run_chain(&prior, &truth, &[0, 4]).unwrap();
        assert_eq!(with_empty[0].prior, with_empty[0].posterior);
    }

    #[test]
    fn threshold_steps_count_observations() {
        let truth = Process::periodic(vec![0]).unwrap();
        // model3 against "00": 1/2 → 2/3 → 1.
        assert_eq!(steps_to_threshold(&model3(), &truth, 0.5).unwrap(), Some(0));
        assert_eq!(steps_to_threshold(&model3(), &truth, 0.6).unwrap(), Some(1));
        assert_eq!(steps_to_threshold(&model3(), &truth, 0.9).unwrap(), Some(2));
        assert_eq!(steps_to_threshold(&model3(), &truth, 1.0).unwrap(), Some(2));

        // Zeroing the truth makes the threshold unreachable.
        let hopeless = model3().make_special(|p| p == pfx("00")).unwrap();
        assert_eq!(steps_to_threshold(&hopeless, &truth, 0.9).unwrap(), None);
    }

    #[test]
    fn processes_generate_prefixes() {
        let p = Process::periodic(vec![0, 1]).unwrap();
        assert_eq!(p.true_prefix(5).unwrap(), pfx("01010"));
        assert_eq!(p.true_prefix(0).unwrap(), Vec::<Symbol>::new());
        assert!(matches!(Process::periodic(vec![]), Err(ModelError::EmptyPeriod)));
        assert_eq!(p.describe(), "periodic:01");

        let lang = LanguageSpec::base(2).unwrap();
        // INC EMIT [ EMIT ] emits ones forever.
        let d = Description::from_hex("15:12cc").unwrap();
        let prog = Process::program(lang.clone(), d.clone(), 100);
        assert_eq!(prog.true_prefix(4).unwrap(), pfx("1111"));
        assert_eq!(prog.describe(), "program:15:12cc");

        // EMIT HALT emits a single symbol: longer prefixes are unavailable.
        let short = Process::program(lang, Description::from_hex("6:9c").unwrap(), 100);
        assert!(matches!(
            short.true_prefix(3),
            Err(ModelError::ProcessPrefixUnavailable { needed: 3, emitted: 1 })
        ));
    }

    #[test]
    fn snapshot_lines_are_stable() {
        let mut buf = Vec::new();
        model3().write_snapshot(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("{\"format_version\":1,\"language_id\":\"test-lang\""));
        assert_eq!(lines[1], "{\"prefix\":\"00\",\"p\":0.5}");
        assert_eq!(lines[2], "{\"prefix\":\"01\",\"p\":0.25}");
        assert_eq!(lines[3], "{\"prefix\":\"10\",\"p\":0.25}");
    }

    #[test]
    fn trace_csv_layout() {
        let rows = vec![
            TraceRow {
                step: 1,
                symbol: 0,
                metrics: Metrics { correspondence: 0.5, alignment: Some(0.75), entropy: 1.0, surviving: 2 },
            },
            TraceRow {
                step: 2,
                symbol: 1,
                metrics: Metrics { correspondence: 1.0, alignment: None, entropy: 0.0, surviving: 1 },
            },
        ];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "step,observed_symbol,correspondence,alignment,entropy,surviving_classes\n\
             1,0,0.5,0.75,1,2\n\
             2,1,1,,0,1\n"
        );
    }
}
