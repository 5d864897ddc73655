//! Exhaustive sweeps over descriptions, grouped into hypothesis classes.
//!
//! A sweep runs every description of length `0..=max_len_bits` under fixed
//! budgets and keeps the ones whose output reaches the horizon. Descriptions
//! are grouped by the prefix they emit; each group's MDL is the length of its
//! shortest member. The sweep is a parallel map with an order-independent
//! merge, so results are identical regardless of scheduling.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::{Model, ModelError};
use crate::udl::{
    char_to_symbol, symbols_to_string, Description, LanguageSpec, RunStatus, Symbol, UdlError,
};

/// Descriptions a single sweep may touch unless explicitly overridden.
pub const DEFAULT_SWEEP_CEILING: u64 = 1 << 22;

/// On-disk cache format version written and accepted by this build.
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("sweep of 2^{0} + … descriptions exceeds the ceiling of {1}")]
    SweepCeilingExceeded(u32, u64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("step budget must be at least 1")]
    ZeroStepBudget,
    #[error("space has no classes, so no prior exists")]
    EmptySpace,
    #[error("prefix {prefix:?} has length {got}, expected the horizon {expected}")]
    WrongPrefixLength { prefix: String, expected: usize, got: usize },
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format version {found} unsupported (expected {CACHE_FORMAT_VERSION})")]
    VersionMismatch { found: u64 },
    #[error("corrupt cache: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Language(#[from] UdlError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// All descriptions (up to the sweep bound) that emit the same prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisClass {
    /// The emitted horizon-length prefix that names this class.
    pub prefix: Vec<Symbol>,
    /// Length in bits of the shortest description that emits the prefix.
    pub mdl_bits: u32,
    /// The shortest such description, ties broken lexicographically.
    pub representative: Description,
    /// How many swept descriptions landed in this class.
    pub program_count: u64,
}

/// The result of one sweep: every prefix reachable within the budgets,
/// keyed and ordered by prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSpace {
    language: LanguageSpec,
    language_id: String,
    horizon: usize,
    max_len_bits: u32,
    max_steps: u64,
    classes: BTreeMap<Vec<Symbol>, HypothesisClass>,
}

impl HypothesisSpace {
    pub fn language(&self) -> &LanguageSpec {
        &self.language
    }

    pub fn language_id(&self) -> &str {
        &self.language_id
    }

    pub fn k(&self) -> u8 {
        self.language.alphabet().size()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn max_len_bits(&self) -> u32 {
        self.max_len_bits
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Classes in prefix order.
    pub fn classes(&self) -> impl Iterator<Item = &HypothesisClass> {
        self.classes.values()
    }

    pub fn get(&self, prefix: &[Symbol]) -> Option<&HypothesisClass> {
        self.classes.get(prefix)
    }

    /// MDL of a prefix: `Ok(None)` when the prefix was never emitted within
    /// the sweep bounds, an error when the prefix has the wrong length.
    pub fn mdl_of(&self, prefix: &[Symbol]) -> Result<Option<u32>, SpaceError> {
        if prefix.len() != self.horizon {
            return Err(SpaceError::WrongPrefixLength {
                prefix: symbols_to_string(prefix),
                expected: self.horizon,
                got: prefix.len(),
            });
        }
        Ok(self.classes.get(prefix).map(|c| c.mdl_bits))
    }

    /// The length-penalized prior over enumerated classes:
    /// `p(h) ∝ 2^(−mdl_bits(h))`.
    pub fn solomonoff_prior(&self) -> Result<Model, SpaceError> {
        if self.classes.is_empty() {
            return Err(SpaceError::EmptySpace);
        }
        let weights: BTreeMap<Vec<Symbol>, f64> = self
            .classes
            .iter()
            .map(|(prefix, class)| (prefix.clone(), 2f64.powi(-(class.mdl_bits as i32))))
            .collect();
        Ok(Model::from_weights(
            self.language_id.clone(),
            self.k(),
            self.horizon,
            weights,
        )?)
    }

    // ── cache ──

    /// Write the space as JSON Lines: one header object, then one class per
    /// line in prefix order. Byte-identical across repeated saves.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SpaceError> {
        let mut w = BufWriter::new(File::create(path)?);
        let header = CacheHeader {
            format_version: CACHE_FORMAT_VERSION,
            language: self.language.to_json_value(),
            k: self.k(),
            horizon: self.horizon,
            max_len_bits: self.max_len_bits,
            max_steps: self.max_steps,
            class_count: self.classes.len(),
        };
        writeln!(w, "{}", serde_json::to_string(&header).expect("header serializes"))?;
        for class in self.classes.values() {
            let line = CacheLine {
                prefix: symbols_to_string(&class.prefix),
                mdl: class.mdl_bits,
                rep: class.representative.to_hex(),
                count: class.program_count,
            };
            writeln!(w, "{}", serde_json::to_string(&line).expect("class serializes"))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a cache back. Fails on unknown format versions, on a language
    /// whose embedded id does not match its content, and on malformed or
    /// truncated class lines.
    pub fn load(path: impl AsRef<Path>) -> Result<HypothesisSpace, SpaceError> {
        let mut lines = BufReader::new(File::open(path)?).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| SpaceError::Corrupt("empty cache file".into()))??;
        let header_value: serde_json::Value = serde_json::from_str(&header_line)
            .map_err(|e| SpaceError::Corrupt(format!("bad header: {e}")))?;
        let version = header_value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| SpaceError::Corrupt("header missing format_version".into()))?;
        if version != CACHE_FORMAT_VERSION as u64 {
            return Err(SpaceError::VersionMismatch { found: version });
        }
        let header: CacheHeader = serde_json::from_value(header_value)
            .map_err(|e| SpaceError::Corrupt(format!("bad header: {e}")))?;
        // Re-deriving the language verifies the embedded id against content.
        let language = LanguageSpec::from_json_value(&header.language)?;
        let k = language.alphabet().size();
        if k != header.k {
            return Err(SpaceError::Corrupt(format!(
                "header k={} disagrees with language alphabet {k}",
                header.k
            )));
        }

        let mut classes = BTreeMap::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: CacheLine = serde_json::from_str(&line)
                .map_err(|e| SpaceError::Corrupt(format!("bad class line: {e}")))?;
            let prefix = raw
                .prefix
                .chars()
                .map(char_to_symbol)
                .collect::<Option<Vec<Symbol>>>()
                .ok_or_else(|| SpaceError::Corrupt(format!("bad prefix {:?}", raw.prefix)))?;
            if prefix.len() != header.horizon {
                return Err(SpaceError::Corrupt(format!(
                    "prefix {:?} does not span the horizon {}",
                    raw.prefix, header.horizon
                )));
            }
            if prefix.iter().any(|&s| s >= k) {
                return Err(SpaceError::Corrupt(format!(
                    "prefix {:?} uses symbols outside the alphabet",
                    raw.prefix
                )));
            }
            let class = HypothesisClass {
                prefix: prefix.clone(),
                mdl_bits: raw.mdl,
                representative: Description::from_hex(&raw.rep)?,
                program_count: raw.count,
            };
            if classes.insert(prefix, class).is_some() {
                return Err(SpaceError::Corrupt(format!("duplicate prefix {:?}", raw.prefix)));
            }
        }
        if classes.len() != header.class_count {
            return Err(SpaceError::Corrupt(format!(
                "header promises {} classes, file carries {}",
                header.class_count,
                classes.len()
            )));
        }
        Ok(HypothesisSpace {
            language_id: language.id(),
            language,
            horizon: header.horizon,
            max_len_bits: header.max_len_bits,
            max_steps: header.max_steps,
            classes,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format_version: u32,
    language: serde_json::Value,
    k: u8,
    horizon: usize,
    max_len_bits: u32,
    max_steps: u64,
    class_count: usize,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    prefix: String,
    mdl: u32,
    rep: String,
    count: u64,
}

/// Sweep with the default description ceiling.
pub fn enumerate_space(
    language: &LanguageSpec,
    max_len_bits: u32,
    max_steps: u64,
    horizon: usize,
) -> Result<HypothesisSpace, SpaceError> {
    enumerate_space_with_ceiling(language, max_len_bits, max_steps, horizon, DEFAULT_SWEEP_CEILING)
}

/// Run every description of length `0..=max_len_bits` under
/// `(max_steps, horizon)` budgets and group the ones that fill the emit
/// budget. Refuses sweeps whose description count `2^(max_len_bits+1)`
/// exceeds `ceiling`.
pub fn enumerate_space_with_ceiling(
    language: &LanguageSpec,
    max_len_bits: u32,
    max_steps: u64,
    horizon: usize,
    ceiling: u64,
) -> Result<HypothesisSpace, SpaceError> {
    if horizon == 0 {
        return Err(SpaceError::ZeroHorizon);
    }
    if max_steps == 0 {
        return Err(SpaceError::ZeroStepBudget);
    }
    let over_ceiling = match max_len_bits.checked_add(1).and_then(|s| 1u64.checked_shl(s)) {
        Some(total) => total > ceiling,
        None => true,
    };
    if over_ceiling {
        return Err(SpaceError::SweepCeilingExceeded(max_len_bits.saturating_add(1), ceiling));
    }

    // Accumulators carry (len, value) of the best representative seen; the
    // merge keeps the shorter-then-smaller one, so any split of the sweep
    // reduces to the same classes.
    struct Acc {
        len: u32,
        value: u64,
        count: u64,
    }
    fn merge_entry(map: &mut HashMap<Vec<Symbol>, Acc>, prefix: Vec<Symbol>, incoming: Acc) {
        map.entry(prefix)
            .and_modify(|acc| {
                acc.count += incoming.count;
                if (incoming.len, incoming.value) < (acc.len, acc.value) {
                    acc.len = incoming.len;
                    acc.value = incoming.value;
                }
            })
            .or_insert(incoming);
    }

    let grouped: HashMap<Vec<Symbol>, Acc> = (0..=max_len_bits)
        .into_par_iter()
        .flat_map(|len| (0..1u64 << len).into_par_iter().map(move |value| (len, value)))
        .fold(HashMap::new, |mut map, (len, value)| {
            let d = Description::from_value(value, len);
            let outcome = language.run(&d, max_steps, horizon);
            if outcome.status == RunStatus::EmitBudgetReached {
                merge_entry(&mut map, outcome.emitted, Acc { len, value, count: 1 });
            }
            map
        })
        .reduce(HashMap::new, |mut left, right| {
            for (prefix, acc) in right {
                merge_entry(&mut left, prefix, acc);
            }
            left
        });

    let classes: BTreeMap<Vec<Symbol>, HypothesisClass> = grouped
        .into_iter()
        .map(|(prefix, acc)| {
            let class = HypothesisClass {
                prefix: prefix.clone(),
                mdl_bits: acc.len,
                representative: Description::from_value(acc.value, acc.len),
                program_count: acc.count,
            };
            (prefix, class)
        })
        .collect();

    Ok(HypothesisSpace {
        language: language.clone(),
        language_id: language.id(),
        horizon,
        max_len_bits,
        max_steps,
        classes,
    })
}
