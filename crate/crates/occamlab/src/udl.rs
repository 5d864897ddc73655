//! The universal description language: bitstring descriptions, the `R0(k)`
//! tape machine, and wrappers that re-encode it.
//!
//! Everything here is total: any bitstring is a valid description of any
//! language, and `run` always returns an outcome under finite budgets. The
//! base machine decodes a description as a stream of 3-bit opcodes
//! (most-significant bit first, 1..=2 trailing bits ignored) driving an
//! unbounded tape of cells mod `k`. Wrappers change how bits are decoded,
//! never what the underlying machine can do.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// An output symbol: an integer in `0..k`.
pub type Symbol = u8;

/// Errors raised while building or parsing language specs and descriptions.
#[derive(Debug, Error)]
pub enum UdlError {
    #[error("alphabet size {0} out of range (must be 2..=16)")]
    AlphabetSize(u8),
    #[error("dictionary table must contain at least one entry")]
    EmptyTable,
    #[error("permutation {0:?} is not a bijection on the 8 opcodes")]
    BadPermutation([u8; 8]),
    #[error("simulation overhead is undefined for the base language")]
    NotAWrapper,
    #[error("malformed bitstring {input:?}: {reason}")]
    BadBitstring { input: String, reason: String },
    #[error("malformed language spec: {0}")]
    BadLanguageSpec(String),
    #[error("language id mismatch: claimed {claimed}, computed {computed}")]
    IdMismatch { claimed: String, computed: String },
}

// ─── alphabet ────────────────────────────────────────────────────────────────

/// Output alphabet `{0, 1, …, k−1}` with `2 <= k <= 16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet(u8);

impl Alphabet {
    pub fn new(k: u8) -> Result<Self, UdlError> {
        if (2..=16).contains(&k) {
            Ok(Alphabet(k))
        } else {
            Err(UdlError::AlphabetSize(k))
        }
    }

    pub fn size(&self) -> u8 {
        self.0
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        sym < self.0
    }
}

/// Render a symbol as a single hex digit (`0..=15` → `'0'..='f'`).
pub fn symbol_to_char(sym: Symbol) -> char {
    char::from_digit(sym as u32, 16).expect("symbol out of range for display")
}

/// Inverse of [`symbol_to_char`]; `None` for characters outside `0..=f`.
pub fn char_to_symbol(c: char) -> Option<Symbol> {
    c.to_digit(16).map(|d| d as Symbol)
}

/// Render a symbol string as one hex digit per symbol (`[0,1,2]` → `"012"`).
pub fn symbols_to_string(symbols: &[Symbol]) -> String {
    symbols.iter().copied().map(symbol_to_char).collect()
}

/// Inverse of [`symbols_to_string`]. Accepts the empty string; `None` if any
/// character is not a hex digit. Alphabet membership is the caller's check.
pub fn parse_symbols(s: &str) -> Option<Vec<Symbol>> {
    s.chars().map(char_to_symbol).collect()
}

// ─── descriptions ────────────────────────────────────────────────────────────

/// A finite bitstring. The empty string is a valid description.
///
/// Descriptions order by length first, then lexicographically — the order in
/// which an exhaustive sweep visits them, and the order used to break ties
/// when electing class representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Description {
    bits: Vec<bool>,
}

impl Description {
    pub fn empty() -> Self {
        Description { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Description { bits }
    }

    /// The `len` low bits of `value`, most significant first. `len <= 64`.
    pub fn from_value(value: u64, len: u32) -> Self {
        assert!(len <= 64, "description value form limited to 64 bits");
        let bits = (0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect();
        Description { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// New description with `bit` stuck on the front (e.g. an escape bit).
    pub fn prepended(&self, bit: bool) -> Description {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.push(bit);
        bits.extend_from_slice(&self.bits);
        Description { bits }
    }

    /// The suffix starting at bit `from` (empty if `from` is past the end).
    pub fn tail(&self, from: usize) -> Description {
        Description {
            bits: self.bits.get(from..).unwrap_or(&[]).to_vec(),
        }
    }

    /// Compact `<bitlen>:<hex>` notation, bits packed into hex digits most
    /// significant first, final digit zero-padded. `""` packs to `"0:"`.
    pub fn to_hex(&self) -> String {
        let mut hex = String::with_capacity(self.bits.len().div_ceil(4));
        for chunk in self.bits.chunks(4) {
            let mut nibble = 0u32;
            for (i, b) in chunk.iter().enumerate() {
                if *b {
                    nibble |= 1 << (3 - i);
                }
            }
            hex.push(char::from_digit(nibble, 16).unwrap());
        }
        format!("{}:{}", self.bits.len(), hex)
    }

    /// Parse the `<bitlen>:<hex>` notation. Strict: the digit count must be
    /// exactly `ceil(bitlen/4)` and padding bits must be zero.
    pub fn from_hex(s: &str) -> Result<Self, UdlError> {
        let bad = |reason: &str| UdlError::BadBitstring {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (len_part, hex_part) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let bitlen: usize = len_part.parse().map_err(|_| bad("bad bit length"))?;
        if hex_part.len() != bitlen.div_ceil(4) {
            return Err(bad("hex digit count does not match bit length"));
        }
        let mut bits = Vec::with_capacity(bitlen);
        for (di, c) in hex_part.chars().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| bad("non-hex digit"))?;
            for i in 0..4 {
                let bit = nibble & (1 << (3 - i)) != 0;
                if di * 4 + i < bitlen {
                    bits.push(bit);
                } else if bit {
                    return Err(bad("nonzero padding bits"));
                }
            }
        }
        Ok(Description { bits })
    }
}

impl Ord for Description {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for Description {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

/// Pack bits into bytes, most significant first, zero-padded (hash input).
fn pack_bytes(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, b) in bits.iter().enumerate() {
        if *b {
            out[i / 8] |= 1 << (7 - i % 8);
        }
    }
    out
}

// ─── the machine ─────────────────────────────────────────────────────────────

/// The eight `R0` opcodes, in numeric order of their 3-bit encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Opcode {
    Inc,       // 000: cell ← (cell + 1) mod k
    Dec,       // 001: cell ← (cell − 1) mod k
    Right,     // 010: head ← head + 1
    Left,      // 011: head ← head − 1, no-op at cell 0
    Emit,      // 100: append current cell to the output
    LoopStart, // 101: if cell = 0 jump past the matching LoopEnd
    LoopEnd,   // 110: if cell ≠ 0 jump past the matching LoopStart
    Halt,      // 111
}

const OPCODES: [Opcode; 8] = [
    Opcode::Inc,
    Opcode::Dec,
    Opcode::Right,
    Opcode::Left,
    Opcode::Emit,
    Opcode::LoopStart,
    Opcode::LoopEnd,
    Opcode::Halt,
];

/// Decode complete 3-bit groups, most significant bit first. Trailing bits
/// that do not fill a group are ignored.
fn decode_program(d: &Description) -> Vec<Opcode> {
    d.bits()
        .chunks_exact(3)
        .map(|g| OPCODES[(g[0] as usize) << 2 | (g[1] as usize) << 1 | g[2] as usize])
        .collect()
}

/// For each bracket opcode, the index of its match (`None` if unmatched).
fn match_brackets(prog: &[Opcode]) -> Vec<Option<usize>> {
    let mut matches = vec![None; prog.len()];
    let mut stack = Vec::new();
    for (i, op) in prog.iter().enumerate() {
        match op {
            Opcode::LoopStart => stack.push(i),
            Opcode::LoopEnd => {
                if let Some(j) = stack.pop() {
                    matches[j] = Some(i);
                    matches[i] = Some(j);
                }
            }
            _ => {}
        }
    }
    matches
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// The program executed a halt or ran past its final instruction.
    Halted,
    /// The output reached the emit budget; the budget stopped the run.
    EmitBudgetReached,
    /// The step budget ran out before the program halted.
    StepBudgetExhausted,
}

/// The result of running a description: what was emitted, why the run
/// stopped, and how many budget steps it consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionOutcome {
    pub emitted: Vec<Symbol>,
    pub status: RunStatus,
    pub steps_used: u64,
}

fn run_base(k: u8, d: &Description, max_steps: u64, max_emit: usize) -> ExecutionOutcome {
    let prog = decode_program(d);
    let brackets = match_brackets(&prog);
    let mut tape: Vec<u8> = vec![0];
    let mut head = 0usize;
    let mut out: Vec<Symbol> = Vec::new();
    let mut pc = 0usize;
    let mut steps = 0u64;

    // Termination checks, in precedence order: the emit budget is inspected
    // before anything else, so a program that fills it is reported as stopped
    // by the budget even if its next instruction would have halted.
    loop {
        if out.len() >= max_emit {
            return ExecutionOutcome {
                emitted: out,
                status: RunStatus::EmitBudgetReached,
                steps_used: steps,
            };
        }
        if pc >= prog.len() {
            return ExecutionOutcome {
                emitted: out,
                status: RunStatus::Halted,
                steps_used: steps,
            };
        }
        if steps >= max_steps {
            return ExecutionOutcome {
                emitted: out,
                status: RunStatus::StepBudgetExhausted,
                steps_used: steps,
            };
        }
        steps += 1;
        match prog[pc] {
            Opcode::Inc => {
                tape[head] = (tape[head] + 1) % k;
                pc += 1;
            }
            Opcode::Dec => {
                tape[head] = (tape[head] + k - 1) % k;
                pc += 1;
            }
            Opcode::Right => {
                head += 1;
                if head == tape.len() {
                    tape.push(0);
                }
                pc += 1;
            }
            Opcode::Left => {
                head = head.saturating_sub(1);
                pc += 1;
            }
            Opcode::Emit => {
                out.push(tape[head]);
                pc += 1;
            }
            Opcode::LoopStart => {
                if tape[head] == 0 {
                    // Unmatched start: skip to the end of the program.
                    pc = brackets[pc].map(|j| j + 1).unwrap_or(prog.len());
                } else {
                    pc += 1;
                }
            }
            Opcode::LoopEnd => {
                if tape[head] != 0 {
                    // Unmatched end: no-op.
                    pc = brackets[pc].map(|j| j + 1).unwrap_or(pc + 1);
                } else {
                    pc += 1;
                }
            }
            Opcode::Halt => {
                return ExecutionOutcome {
                    emitted: out,
                    status: RunStatus::Halted,
                    steps_used: steps,
                };
            }
        }
    }
}

// ─── language specs ──────────────────────────────────────────────────────────

/// A description language: the base machine or a finite chain of wrappers
/// around it. Construct through [`LanguageSpec::base`],
/// [`LanguageSpec::dictionary_wrapper`], [`LanguageSpec::permutation_wrapper`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSpec {
    kind: Kind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Base { k: u8 },
    Dictionary { inner: Box<LanguageSpec>, table: Vec<Description> },
    Permutation { inner: Box<LanguageSpec>, perm: [u8; 8] },
}

impl LanguageSpec {
    /// The base machine `R0(k)`.
    pub fn base(k: u8) -> Result<Self, UdlError> {
        Alphabet::new(k)?;
        Ok(LanguageSpec { kind: Kind::Base { k } })
    }

    /// Wrap `inner` with a lookup table: a leading 1 escapes to `inner`, a
    /// leading 0 selects a table entry by the next `ceil(log2 m)` bits.
    pub fn dictionary_wrapper(inner: LanguageSpec, table: Vec<Description>) -> Result<Self, UdlError> {
        if table.is_empty() {
            return Err(UdlError::EmptyTable);
        }
        Ok(LanguageSpec {
            kind: Kind::Dictionary { inner: Box::new(inner), table },
        })
    }

    /// Wrap `inner` by relabeling each complete 3-bit group through `perm`
    /// before `inner` sees the description.
    pub fn permutation_wrapper(inner: LanguageSpec, perm: [u8; 8]) -> Result<Self, UdlError> {
        let mut seen = [false; 8];
        for &p in &perm {
            if p >= 8 || seen[p as usize] {
                return Err(UdlError::BadPermutation(perm));
            }
            seen[p as usize] = true;
        }
        Ok(LanguageSpec {
            kind: Kind::Permutation { inner: Box::new(inner), perm },
        })
    }

    /// The output alphabet, shared along the whole wrapper chain.
    pub fn alphabet(&self) -> Alphabet {
        match &self.kind {
            Kind::Base { k } => Alphabet(*k),
            Kind::Dictionary { inner, .. } | Kind::Permutation { inner, .. } => inner.alphabet(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            Kind::Base { .. } => "base-r0",
            Kind::Dictionary { .. } => "dictionary-wrapper",
            Kind::Permutation { .. } => "permutation-wrapper",
        }
    }

    /// The wrapped language, if this is a wrapper.
    pub fn inner(&self) -> Option<&LanguageSpec> {
        match &self.kind {
            Kind::Base { .. } => None,
            Kind::Dictionary { inner, .. } | Kind::Permutation { inner, .. } => Some(inner),
        }
    }

    pub fn table(&self) -> Option<&[Description]> {
        match &self.kind {
            Kind::Dictionary { table, .. } => Some(table),
            _ => None,
        }
    }

    pub fn perm(&self) -> Option<[u8; 8]> {
        match &self.kind {
            Kind::Permutation { perm, .. } => Some(*perm),
            _ => None,
        }
    }

    /// Extra description bits a wrapper spends to reach any program of its
    /// inner language: 1 for the dictionary escape bit, 0 for permutations.
    /// Undefined for the base language.
    pub fn simulation_overhead(&self) -> Result<u32, UdlError> {
        match &self.kind {
            Kind::Base { .. } => Err(UdlError::NotAWrapper),
            Kind::Dictionary { .. } => Ok(1),
            Kind::Permutation { .. } => Ok(0),
        }
    }

    /// Budget steps a wrapper's decoder consumes before the inner language
    /// takes over (the dictionary dispatch costs one step; relabeling is
    /// free). Zero for the base language.
    pub fn dispatch_steps(&self) -> u64 {
        match &self.kind {
            Kind::Dictionary { .. } => 1,
            _ => 0,
        }
    }

    /// Execute `d` under this language. Total and deterministic: every
    /// bitstring yields an outcome within the budgets.
    pub fn run(&self, d: &Description, max_steps: u64, max_emit: usize) -> ExecutionOutcome {
        match &self.kind {
            Kind::Base { k } => run_base(*k, d, max_steps, max_emit),
            Kind::Permutation { inner, perm } => {
                let mut bits = d.bits().to_vec();
                for group in bits.chunks_exact_mut(3) {
                    let v = (group[0] as usize) << 2 | (group[1] as usize) << 1 | group[2] as usize;
                    let p = perm[v];
                    group[0] = p & 4 != 0;
                    group[1] = p & 2 != 0;
                    group[2] = p & 1 != 0;
                }
                inner.run(&Description::from_bits(bits), max_steps, max_emit)
            }
            Kind::Dictionary { inner, table } => {
                // Same precedence as the machine loop: emit budget, then
                // out-of-description (halt), then step budget, then dispatch.
                if max_emit == 0 {
                    return ExecutionOutcome {
                        emitted: Vec::new(),
                        status: RunStatus::EmitBudgetReached,
                        steps_used: 0,
                    };
                }
                if d.is_empty() {
                    return ExecutionOutcome {
                        emitted: Vec::new(),
                        status: RunStatus::Halted,
                        steps_used: 0,
                    };
                }
                if max_steps == 0 {
                    return ExecutionOutcome {
                        emitted: Vec::new(),
                        status: RunStatus::StepBudgetExhausted,
                        steps_used: 0,
                    };
                }
                // The dispatch itself costs one step; the selected program
                // then runs under the remaining budgets.
                let selected = if d.bit(0) {
                    d.tail(1)
                } else {
                    let idx_bits = (usize::BITS - (table.len() - 1).leading_zeros()) as usize;
                    if d.len() < 1 + idx_bits {
                        // Description ends inside the index: nothing to run.
                        return ExecutionOutcome {
                            emitted: Vec::new(),
                            status: RunStatus::Halted,
                            steps_used: 1,
                        };
                    }
                    let mut idx = 0usize;
                    for i in 0..idx_bits {
                        idx = idx << 1 | d.bit(1 + i) as usize;
                    }
                    table[idx.min(table.len() - 1)].clone()
                };
                let mut outcome = inner.run(&selected, max_steps - 1, max_emit);
                outcome.steps_used += 1;
                outcome
            }
        }
    }

    /// Stable content hash of the full spec (hex SHA-256). Changes whenever
    /// any field anywhere in the wrapper chain changes.
    pub fn id(&self) -> String {
        let mut bytes = Vec::new();
        self.content_bytes(&mut bytes);
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    fn content_bytes(&self, out: &mut Vec<u8>) {
        match &self.kind {
            Kind::Base { k } => {
                out.push(0);
                out.push(*k);
            }
            Kind::Dictionary { inner, table } => {
                out.push(1);
                out.extend_from_slice(&(table.len() as u32).to_le_bytes());
                for entry in table {
                    out.extend_from_slice(&(entry.len() as u32).to_le_bytes());
                    out.extend_from_slice(&pack_bytes(entry.bits()));
                }
                inner.content_bytes(out);
            }
            Kind::Permutation { inner, perm } => {
                out.push(2);
                out.extend_from_slice(perm);
                inner.content_bytes(out);
            }
        }
    }

    // ── serialization ──

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_bridge(true)).expect("language spec serialization cannot fail")
    }

    /// Single-line JSON form, with the content hash embedded as `id`.
    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self, UdlError> {
        let bridge: Bridge = serde_json::from_value(value.clone())
            .map_err(|e| UdlError::BadLanguageSpec(e.to_string()))?;
        Self::from_bridge(&bridge)
    }

    pub fn from_json_str(s: &str) -> Result<Self, UdlError> {
        let bridge: Bridge =
            serde_json::from_str(s).map_err(|e| UdlError::BadLanguageSpec(e.to_string()))?;
        Self::from_bridge(&bridge)
    }

    fn to_bridge(&self, with_id: bool) -> Bridge {
        let mut bridge = match &self.kind {
            Kind::Base { k } => Bridge {
                kind: self.kind_name().to_string(),
                k: Some(*k),
                ..Bridge::default()
            },
            Kind::Dictionary { inner, table } => Bridge {
                kind: self.kind_name().to_string(),
                table: Some(table.iter().map(Description::to_hex).collect()),
                inner: Some(Box::new(inner.to_bridge(false))),
                ..Bridge::default()
            },
            Kind::Permutation { inner, perm } => Bridge {
                kind: self.kind_name().to_string(),
                perm: Some(perm.to_vec()),
                inner: Some(Box::new(inner.to_bridge(false))),
                ..Bridge::default()
            },
        };
        if with_id {
            bridge.id = Some(self.id());
        }
        bridge
    }

    fn from_bridge(bridge: &Bridge) -> Result<Self, UdlError> {
        let missing = |field: &str| {
            UdlError::BadLanguageSpec(format!("{} spec missing {field}", bridge.kind))
        };
        let spec = match bridge.kind.as_str() {
            "base-r0" => LanguageSpec::base(bridge.k.ok_or_else(|| missing("k"))?)?,
            "dictionary-wrapper" => {
                let inner = Self::from_bridge(bridge.inner.as_deref().ok_or_else(|| missing("inner"))?)?;
                let table = bridge
                    .table
                    .as_ref()
                    .ok_or_else(|| missing("table"))?
                    .iter()
                    .map(|s| Description::from_hex(s))
                    .collect::<Result<Vec<_>, _>>()?;
                LanguageSpec::dictionary_wrapper(inner, table)?
            }
            "permutation-wrapper" => {
                let inner = Self::from_bridge(bridge.inner.as_deref().ok_or_else(|| missing("inner"))?)?;
                let perm_vec = bridge.perm.as_ref().ok_or_else(|| missing("perm"))?;
                let perm: [u8; 8] = perm_vec.as_slice().try_into().map_err(|_| {
                    UdlError::BadLanguageSpec(format!("perm must have 8 entries, got {}", perm_vec.len()))
                })?;
                LanguageSpec::permutation_wrapper(inner, perm)?
            }
            other => {
                return Err(UdlError::BadLanguageSpec(format!("unknown kind {other:?}")));
            }
        };
        if let Some(claimed) = &bridge.id {
            let computed = spec.id();
            if *claimed != computed {
                return Err(UdlError::IdMismatch {
                    claimed: claimed.clone(),
                    computed,
                });
            }
        }
        Ok(spec)
    }
}

/// Wire form of [`LanguageSpec`]: `{kind, k, table, perm, inner, id}` with
/// absent fields omitted. `id` appears on the outermost spec only.
#[derive(Debug, Default, Serialize, Deserialize)]
struct Bridge {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    perm: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<Bridge>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
}
