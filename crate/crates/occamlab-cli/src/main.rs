//! `occamlab` — sweep description languages, run induction traces, and
//! emit the relativity demo reports.
//!
//! Exit codes: 0 on success (and demo verdict pass), 1 on runtime failures
//! (I/O, contradictions, failed verdicts), 2 on validation or precondition
//! problems.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use occamlab::enumeration::{
    enumerate_space_with_ceiling, HypothesisSpace, SpaceError, DEFAULT_SWEEP_CEILING,
};
use occamlab::inference::{
    run_chain, write_trace_csv, Model, ModelError, Process, TraceRow,
};
use occamlab::relativity::{
    demo_confidence_tradeoff, demo_invariance, demo_no_privilege, demo_overwhelm, demo_posthoc,
    demo_prior_posterior_symmetry, demo_reorder, DemoError, DemoReport, PrivilegeColumn,
};
use occamlab::udl::{
    parse_symbols, symbols_to_string, Alphabet, Description, LanguageSpec, Symbol, UdlError,
};

const SWEEP_CEILING_VAR: &str = "OCCAMLAB_SWEEP_CEILING";

#[derive(Parser)]
#[command(name = "occamlab", version, about = "Description-language experiments at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep every description up to a length bound and cache the classes.
    Enumerate(CommonArgs),
    /// Observe a process step by step and trace the model metrics as CSV.
    Induce(CommonArgs),
    /// Feed a process through staged updates, each posterior priming the next.
    Chain(CommonArgs),
    /// Run one named demonstration and write its JSON + CSV report.
    Demo {
        name: DemoName,
        #[command(flatten)]
        args: CommonArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Invariance,
    Reorder,
    Overwhelm,
    Posthoc,
    Symmetry,
    Privilege,
    Tradeoff,
}

impl DemoName {
    fn as_str(self) -> &'static str {
        match self {
            DemoName::Invariance => "invariance",
            DemoName::Reorder => "reorder",
            DemoName::Overwhelm => "overwhelm",
            DemoName::Posthoc => "posthoc",
            DemoName::Symmetry => "symmetry",
            DemoName::Privilege => "privilege",
            DemoName::Tradeoff => "tradeoff",
        }
    }
}

#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Language spec as inline JSON or a path to a JSON file.
    #[arg(long)]
    language: Option<String>,
    /// Alphabet size of the default base language (ignored with --language).
    #[arg(long)]
    k: Option<u8>,
    /// Prefix length distinguishing hypotheses; for `induce`, how many
    /// symbols to observe.
    #[arg(long)]
    horizon: Option<usize>,
    /// Longest description length swept, in bits.
    #[arg(long = "max-len")]
    max_len: Option<u32>,
    /// Execution step budget per description.
    #[arg(long = "max-steps")]
    max_steps: Option<u64>,
    /// Process spec: "periodic:<symbols>" or "program:<bitlen>:<hex>".
    #[arg(long)]
    process: Option<String>,
    /// Hypothesis-space cache to load instead of sweeping.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Output path (cache, trace, chain, or report depending on command).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the random selections demos make when inputs are omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Correspondence threshold for the trade-off demo.
    #[arg(long)]
    theta: Option<f64>,
    /// Confidence factor for the trade-off demo.
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated chain segment lengths, e.g. "2,2".
    #[arg(long)]
    boundaries: Option<String>,
    /// Observed symbol string.
    #[arg(long)]
    observed: Option<String>,
    /// Period string (posthoc) or maximum continuation length (symmetry).
    #[arg(long)]
    period: Option<String>,
    /// Demo wrapper: "dictionary", "permutation", inline JSON, or a file.
    #[arg(long)]
    wrapper: Option<String>,
    /// First class of a reorder pair (prefix string).
    #[arg(long)]
    ha: Option<String>,
    /// Second class of a reorder pair (prefix string).
    #[arg(long)]
    hb: Option<String>,
}

/// The same knobs as accepted in a `--config` file.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    language: Option<String>,
    k: Option<u8>,
    horizon: Option<usize>,
    max_len: Option<u32>,
    max_steps: Option<u64>,
    process: Option<String>,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    theta: Option<f64>,
    gamma: Option<f64>,
    boundaries: Option<String>,
    observed: Option<String>,
    period: Option<String>,
    wrapper: Option<String>,
    ha: Option<String>,
    hb: Option<String>,
}

struct AppError {
    message: String,
    code: i32,
}

impl AppError {
    fn validation(message: impl Into<String>) -> AppError {
        AppError { message: message.into(), code: 2 }
    }

    fn runtime(message: impl Into<String>) -> AppError {
        AppError { message: message.into(), code: 1 }
    }
}

impl From<UdlError> for AppError {
    fn from(e: UdlError) -> AppError {
        AppError::validation(e.to_string())
    }
}

impl From<SpaceError> for AppError {
    fn from(e: SpaceError) -> AppError {
        match e {
            SpaceError::SweepCeilingExceeded(..)
            | SpaceError::ZeroHorizon
            | SpaceError::ZeroStepBudget
            | SpaceError::EmptySpace
            | SpaceError::WrongPrefixLength { .. } => AppError::validation(e.to_string()),
            _ => AppError::runtime(e.to_string()),
        }
    }
}

impl From<ModelError> for AppError {
    fn from(e: ModelError) -> AppError {
        match e {
            ModelError::Contradiction => AppError::runtime(e.to_string()),
            _ => AppError::validation(e.to_string()),
        }
    }
}

impl From<DemoError> for AppError {
    fn from(e: DemoError) -> AppError {
        match e {
            DemoError::Space(inner) => inner.into(),
            DemoError::Model(inner) => inner.into(),
            DemoError::Language(inner) => inner.into(),
            _ => AppError::validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> AppError {
        AppError::runtime(e.to_string())
    }
}

/// Flag values merged over the config file, with defaults applied.
struct Resolved {
    language: LanguageSpec,
    horizon: usize,
    max_len: u32,
    max_steps: u64,
    ceiling: u64,
    process: Option<String>,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: u64,
    theta: f64,
    gamma: f64,
    boundaries: Option<String>,
    observed: Option<String>,
    period: Option<String>,
    wrapper: Option<String>,
    ha: Option<String>,
    hb: Option<String>,
}

fn resolve(args: CommonArgs) -> Result<Resolved, AppError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| AppError::validation(format!("cannot read config {path:?}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| AppError::validation(format!("bad config {path:?}: {e}")))?
        }
        None => FileConfig::default(),
    };

    let k = args.k.or(file.k).unwrap_or(2);
    let language = match args.language.or(file.language) {
        Some(spec) => parse_language(&spec)?,
        None => LanguageSpec::base(k)?,
    };
    let ceiling = match std::env::var(SWEEP_CEILING_VAR) {
        Ok(raw) => raw.parse::<u64>().map_err(|_| {
            AppError::validation(format!("{SWEEP_CEILING_VAR} must be an integer, got {raw:?}"))
        })?,
        Err(_) => DEFAULT_SWEEP_CEILING,
    };
    Ok(Resolved {
        language,
        horizon: args.horizon.or(file.horizon).unwrap_or(8),
        max_len: args.max_len.or(file.max_len).unwrap_or(18),
        max_steps: args.max_steps.or(file.max_steps).unwrap_or(512),
        ceiling,
        process: args.process.or(file.process),
        cache: args.cache.or(file.cache),
        out: args.out.or(file.out),
        seed: args.seed.or(file.seed).unwrap_or(0),
        theta: args.theta.or(file.theta).unwrap_or(0.9),
        gamma: args.gamma.or(file.gamma).unwrap_or(8.0),
        boundaries: args.boundaries.or(file.boundaries),
        observed: args.observed.or(file.observed),
        period: args.period.or(file.period),
        wrapper: args.wrapper.or(file.wrapper),
        ha: args.ha.or(file.ha),
        hb: args.hb.or(file.hb),
    })
}

fn parse_language(spec: &str) -> Result<LanguageSpec, AppError> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec)
            .map_err(|e| AppError::validation(format!("cannot read language file {spec:?}: {e}")))?
    };
    Ok(LanguageSpec::from_json_str(&text)?)
}

fn parse_prefix(raw: &str, what: &str) -> Result<Vec<Symbol>, AppError> {
    parse_symbols(raw)
        .ok_or_else(|| AppError::validation(format!("{what} must be a string of hex digit symbols, got {raw:?}")))
}

fn parse_process(resolved: &Resolved, language: &LanguageSpec, max_steps: u64) -> Result<Process, AppError> {
    let spec = resolved
        .process
        .as_deref()
        .ok_or_else(|| AppError::validation("--process is required for this command"))?;
    if let Some(rest) = spec.strip_prefix("periodic:") {
        Ok(Process::periodic(parse_prefix(rest, "periodic process")?)?)
    } else if let Some(rest) = spec.strip_prefix("program:") {
        let description = Description::from_hex(rest)?;
        Ok(Process::program(language.clone(), description, max_steps))
    } else {
        Err(AppError::validation(format!(
            "process must look like periodic:<symbols> or program:<bitlen>:<hex>, got {spec:?}"
        )))
    }
}

/// Load the cache if one was named, otherwise sweep with the resolved bounds.
fn load_space(resolved: &Resolved) -> Result<HypothesisSpace, AppError> {
    match &resolved.cache {
        Some(path) => Ok(HypothesisSpace::load(path)?),
        None => Ok(enumerate_space_with_ceiling(
            &resolved.language,
            resolved.max_len,
            resolved.max_steps,
            resolved.horizon,
            resolved.ceiling,
        )?),
    }
}

fn required_out(resolved: &Resolved) -> Result<&Path, AppError> {
    resolved
        .out
        .as_deref()
        .ok_or_else(|| AppError::validation("--out is required for this command"))
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Induce(args) => cmd_induce(args),
        Command::Chain(args) => cmd_chain(args),
        Command::Demo { name, args } => cmd_demo(name, args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn cmd_enumerate(args: CommonArgs) -> Result<i32, AppError> {
    let resolved = resolve(args)?;
    let out = required_out(&resolved)?;
    let started = Instant::now();
    let space = enumerate_space_with_ceiling(
        &resolved.language,
        resolved.max_len,
        resolved.max_steps,
        resolved.horizon,
        resolved.ceiling,
    )?;
    space.save(out)?;
    if space.is_empty() {
        eprintln!(
            "warning: no description of at most {} bits emitted {} symbols; the cache is empty",
            resolved.max_len, resolved.horizon
        );
    }
    let mdls: Vec<u32> = space.classes().map(|c| c.mdl_bits).collect();
    let show = |v: Option<&u32>| v.map_or_else(|| "-".to_string(), u32::to_string);
    println!(
        "classes={} min_mdl={} max_mdl={} elapsed_ms={}",
        space.class_count(),
        show(mdls.iter().min()),
        show(mdls.iter().max()),
        started.elapsed().as_millis()
    );
    Ok(0)
}

fn cmd_induce(args: CommonArgs) -> Result<i32, AppError> {
    let resolved = resolve(args)?;
    if resolved.cache.is_none() {
        return Err(AppError::validation("--cache is required: induce reads an enumerated space"));
    }
    let space = load_space(&resolved)?;
    let steps = resolved.horizon.min(space.horizon());
    let process = parse_process(&resolved, space.language(), space.max_steps())?;
    let truth = process.true_prefix(steps)?;

    let mut model = space.solomonoff_prior()?;
    let mut rows: Vec<TraceRow> = Vec::with_capacity(steps);
    for (i, &symbol) in truth.iter().enumerate() {
        model = model.observe_update(symbol)?;
        rows.push(TraceRow { step: i + 1, symbol, metrics: model.metrics(&process)? });
    }

    let mut buffer = Vec::new();
    write_trace_csv(&mut buffer, &rows)?;
    match &resolved.out {
        Some(path) => fs::write(path, &buffer)?,
        None => std::io::stdout().write_all(&buffer)?,
    }
    println!(
        "observed={} final_correspondence={}",
        rows.len(),
        rows.last().map_or_else(|| "-".to_string(), |r| r.metrics.correspondence.to_string())
    );
    Ok(0)
}

fn model_json(model: &Model) -> serde_json::Value {
    let entries: BTreeMap<String, f64> =
        model.entries().map(|(p, v)| (symbols_to_string(p), v)).collect();
    serde_json::json!({
        "observed_count": model.observed_count(),
        "kind": model.kind(),
        "entries": entries,
    })
}

fn cmd_chain(args: CommonArgs) -> Result<i32, AppError> {
    let resolved = resolve(args)?;
    let space = load_space(&resolved)?;
    let process = parse_process(&resolved, space.language(), space.max_steps())?;
    let boundaries: Vec<usize> = match resolved.boundaries.as_deref() {
        None | Some("") => Vec::new(),
        Some(raw) => raw
            .split(',')
            .map(|part| {
                part.trim().parse::<usize>().map_err(|_| {
                    AppError::validation(format!("boundaries must be integers, got {part:?}"))
                })
            })
            .collect::<Result<_, _>>()?,
    };

    let prior = space.solomonoff_prior()?;
    let records = run_chain(&prior, &process, &boundaries)?;
    let mut buffer = String::new();
    for record in &records {
        let line = serde_json::json!({
            "stage": record.stage,
            "segment": symbols_to_string(&record.segment),
            "prior": model_json(&record.prior),
            "posterior": model_json(&record.posterior),
            "before": record.before,
            "after": record.after,
        });
        buffer.push_str(&serde_json::to_string(&line).expect("chain records serialize"));
        buffer.push('\n');
    }
    match &resolved.out {
        Some(path) => fs::write(path, &buffer)?,
        None => std::io::stdout().write_all(buffer.as_bytes())?,
    }
    println!("stages={}", records.len());
    Ok(0)
}

// ── demo plumbing ──

fn pick_class(space: &HypothesisSpace, rng: &mut ChaCha8Rng) -> Vec<Symbol> {
    let classes: Vec<&Vec<Symbol>> = space.classes().map(|c| &c.prefix).collect();
    classes[rng.random_range(0..classes.len())].clone()
}

/// The seeded reorder pair: two classes with strictly increasing MDL.
fn pick_pair(space: &HypothesisSpace, rng: &mut ChaCha8Rng) -> Result<(Vec<Symbol>, Vec<Symbol>), AppError> {
    let classes: Vec<_> = space.classes().collect();
    if classes.len() >= 2 {
        for _ in 0..64 {
            let a = rng.random_range(0..classes.len());
            let b = rng.random_range(0..classes.len());
            let (lo, hi) = if classes[a].mdl_bits <= classes[b].mdl_bits { (a, b) } else { (b, a) };
            if classes[lo].mdl_bits < classes[hi].mdl_bits {
                return Ok((classes[lo].prefix.clone(), classes[hi].prefix.clone()));
            }
        }
    }
    let lo = classes.iter().min_by_key(|c| (c.mdl_bits, &c.prefix));
    let hi = classes.iter().max_by_key(|c| (c.mdl_bits, std::cmp::Reverse(&c.prefix)));
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo.mdl_bits < hi.mdl_bits => {
            Ok((lo.prefix.clone(), hi.prefix.clone()))
        }
        _ => Err(AppError::validation(
            "the space has no two classes with different MDLs to reorder",
        )),
    }
}

fn resolve_wrapper(
    space: &HypothesisSpace,
    spec: Option<&str>,
    rng: &mut ChaCha8Rng,
) -> Result<LanguageSpec, AppError> {
    let base = space.language().clone();
    match spec.unwrap_or("dictionary") {
        "dictionary" => {
            if space.is_empty() {
                return Err(AppError::validation("cannot seed a dictionary from an empty space"));
            }
            let favored = pick_class(space, rng);
            let rep = space.get(&favored).expect("picked from the space").representative.clone();
            Ok(LanguageSpec::dictionary_wrapper(base, vec![rep])?)
        }
        "permutation" => {
            let mut perm_vec: Vec<u8> = (0..8).collect();
            perm_vec.shuffle(rng);
            let mut perm = [0u8; 8];
            perm.copy_from_slice(&perm_vec);
            Ok(LanguageSpec::permutation_wrapper(base, perm)?)
        }
        other => parse_language(other),
    }
}

fn write_report(resolved: &Resolved, report: &DemoReport) -> Result<i32, AppError> {
    let out = required_out(resolved)?;
    fs::write(out, report.to_json_string() + "\n")?;
    fs::write(out.with_extension("csv"), report.to_csv_string())?;
    println!(
        "demo={} verdict={}",
        report.demo,
        if report.passed() { "pass" } else { "fail" }
    );
    Ok(if report.passed() { 0 } else { 1 })
}

fn observed_prefix(resolved: &Resolved) -> Result<Vec<Symbol>, AppError> {
    match resolved.observed.as_deref() {
        Some(raw) => parse_prefix(raw, "--observed"),
        None => Ok(Vec::new()),
    }
}

fn cmd_demo(name: DemoName, args: CommonArgs) -> Result<i32, AppError> {
    let resolved = resolve(args)?;
    let mut rng = ChaCha8Rng::seed_from_u64(resolved.seed);
    let alphabet = resolved.language.alphabet();

    let report = match name {
        DemoName::Invariance => {
            let space = load_space(&resolved)?;
            let wrapper = resolve_wrapper(&space, resolved.wrapper.as_deref(), &mut rng)?;
            demo_invariance(&space, &wrapper, resolved.ceiling)?
        }
        DemoName::Reorder => {
            let space = load_space(&resolved)?;
            let (ha, hb) = match (&resolved.ha, &resolved.hb) {
                (Some(a), Some(b)) => (parse_prefix(a, "--ha")?, parse_prefix(b, "--hb")?),
                (None, None) => pick_pair(&space, &mut rng)?,
                _ => return Err(AppError::validation("--ha and --hb must be given together")),
            };
            demo_reorder(&space, &ha, &hb, resolved.ceiling)?
        }
        DemoName::Overwhelm => {
            let space = load_space(&resolved)?;
            demo_overwhelm(&space, &observed_prefix(&resolved)?, resolved.ceiling)?
        }
        DemoName::Posthoc => {
            let period = resolved
                .period
                .as_deref()
                .ok_or_else(|| AppError::validation("--period is required for the posthoc demo"))?;
            demo_posthoc(
                alphabet,
                &observed_prefix(&resolved)?,
                &parse_prefix(period, "--period")?,
            )?
        }
        DemoName::Symmetry => {
            let max_len: usize = match resolved.period.as_deref() {
                None => 2,
                Some(raw) => raw.parse().map_err(|_| {
                    AppError::validation(format!(
                        "--period names the maximum continuation length here, got {raw:?}"
                    ))
                })?,
            };
            let continuations = continuation_battery(alphabet, max_len);
            demo_prior_posterior_symmetry(alphabet, &observed_prefix(&resolved)?, &continuations)?
        }
        DemoName::Privilege => {
            let space = load_space(&resolved)?;
            let (columns, probes) = privilege_inputs(&resolved, &space, &mut rng)?;
            demo_no_privilege(&columns, &probes)?
        }
        DemoName::Tradeoff => {
            let space = load_space(&resolved)?;
            let process = parse_process(&resolved, space.language(), space.max_steps())?;
            let truth = process.true_prefix(space.horizon())?;
            let rival = space
                .classes()
                .map(|c| &c.prefix)
                .find(|p| **p != truth)
                .cloned()
                .ok_or_else(|| {
                    AppError::validation("the space holds no class besides the truth to bet on")
                })?;
            demo_confidence_tradeoff(
                &space,
                &process,
                |p| p == truth.as_slice(),
                |p| p == rival.as_slice(),
                resolved.gamma,
                resolved.theta,
            )?
        }
    };
    debug_assert_eq!(report.demo, name.as_str());
    write_report(&resolved, &report)
}

/// Every nonempty symbol string of length ≤ `max_len`, shortest first.
fn continuation_battery(alphabet: Alphabet, max_len: usize) -> Vec<Vec<Symbol>> {
    let k = alphabet.size() as u64;
    let mut battery = Vec::new();
    for len in 1..=max_len {
        let count = k.pow(len as u32);
        for mut value in 0..count {
            let mut s = vec![0u8; len];
            for slot in s.iter_mut().rev() {
                *slot = (value % k) as Symbol;
                value /= k;
            }
            battery.push(s);
        }
    }
    battery
}

fn privilege_inputs(
    resolved: &Resolved,
    space: &HypothesisSpace,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<PrivilegeColumn>, Vec<Vec<Symbol>>), AppError> {
    let cheapest = space
        .classes()
        .min_by_key(|c| (c.mdl_bits, &c.prefix))
        .ok_or_else(|| AppError::validation("cannot run the privilege demo on an empty space"))?;
    let candidates: Vec<_> =
        space.classes().filter(|c| c.mdl_bits > cheapest.mdl_bits).collect();
    if candidates.is_empty() {
        return Err(AppError::validation(
            "every class has the same MDL; no class can be privileged by a dictionary",
        ));
    }
    let favored = candidates[rng.random_range(0..candidates.len())];
    let wrapper = LanguageSpec::dictionary_wrapper(
        space.language().clone(),
        vec![favored.representative.clone()],
    )?;
    let wrapper_space = enumerate_space_with_ceiling(
        &wrapper,
        space.max_len_bits() + 1,
        space.max_steps() + 1,
        space.horizon(),
        resolved.ceiling,
    )?;
    let columns = vec![
        PrivilegeColumn {
            name: "base".to_string(),
            space: space.clone(),
            favored: vec![cheapest.prefix.clone()],
        },
        PrivilegeColumn {
            name: format!("favor-{}", symbols_to_string(&favored.prefix)),
            space: wrapper_space,
            favored: vec![favored.prefix.clone()],
        },
    ];
    let probes = vec![cheapest.prefix.clone(), favored.prefix.clone()];
    Ok((columns, probes))
}
