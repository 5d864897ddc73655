//! Property tests for the machine, the sweep, and the update rules.

use std::collections::BTreeMap;

use proptest::prelude::*;

use occamlab::enumeration::enumerate_space;
use occamlab::inference::Model;
use occamlab::udl::{Description, LanguageSpec, RunStatus, Symbol};

fn description_strategy(max_len: usize) -> impl Strategy<Value = Description> {
    proptest::collection::vec(any::<bool>(), 0..=max_len).prop_map(Description::from_bits)
}

fn permutation_strategy() -> impl Strategy<Value = [u8; 8]> {
    Just((0u8..8).collect::<Vec<u8>>()).prop_shuffle().prop_map(|v| {
        let mut perm = [0u8; 8];
        perm.copy_from_slice(&v);
        perm
    })
}

fn table_strategy() -> impl Strategy<Value = Vec<Description>> {
    proptest::collection::vec(description_strategy(12), 1..4)
}

/// Weights over distinct horizon-4 prefixes for a k=2 model.
fn weights_strategy() -> impl Strategy<Value = BTreeMap<Vec<Symbol>, f64>> {
    proptest::collection::btree_map(
        proptest::collection::vec(0u8..2, 4),
        0.001f64..10.0,
        1..12,
    )
}

fn model_from(weights: BTreeMap<Vec<Symbol>, f64>) -> Model {
    Model::from_weights("prop", 2, 4, weights).expect("generated weights are valid")
}

/// Re-encode a description with every complete 3-bit group sent through the
/// permutation, leaving trailing bits alone.
fn remap(d: &Description, perm: [u8; 8]) -> Description {
    let bits = d.bits();
    let mut out = Vec::with_capacity(bits.len());
    let mut i = 0;
    while i + 3 <= bits.len() {
        let g = (bits[i] as u8) << 2 | (bits[i + 1] as u8) << 1 | bits[i + 2] as u8;
        let mapped = perm[g as usize];
        out.extend([mapped & 4 != 0, mapped & 2 != 0, mapped & 1 != 0]);
        i += 3;
    }
    out.extend_from_slice(&bits[i..]);
    Description::from_bits(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn runs_are_deterministic_and_total(
        d in description_strategy(24),
        max_steps in 0u64..128,
        max_emit in 0usize..10,
    ) {
        let language = LanguageSpec::base(2).unwrap();
        let a = language.run(&d, max_steps, max_emit);
        let b = language.run(&d, max_steps, max_emit);
        prop_assert_eq!(&a, &b);
        prop_assert!(a.steps_used <= max_steps);
        prop_assert!(a.emitted.len() <= max_emit);
        match a.status {
            RunStatus::EmitBudgetReached => prop_assert_eq!(a.emitted.len(), max_emit),
            RunStatus::StepBudgetExhausted => prop_assert_eq!(a.steps_used, max_steps),
            RunStatus::Halted => {}
        }
        prop_assert!(a.emitted.iter().all(|&s| s < 2));
    }

    #[test]
    fn emitted_prefixes_are_stable_under_budget_growth(
        d in description_strategy(24),
        max_steps in 0u64..96,
        extra_steps in 0u64..64,
        max_emit in 0usize..8,
        extra_emit in 0usize..6,
    ) {
        let language = LanguageSpec::base(2).unwrap();
        let small = language.run(&d, max_steps, max_emit);
        let large = language.run(&d, max_steps + extra_steps, max_emit + extra_emit);
        prop_assert!(
            large.emitted.starts_with(&small.emitted),
            "growing budgets must only extend the output: {:?} vs {:?}",
            small.emitted,
            large.emitted
        );
    }

    #[test]
    fn dictionary_escape_simulates_the_base_language(
        d in description_strategy(18),
        table in table_strategy(),
        max_steps in 0u64..96,
        max_emit in 0usize..8,
    ) {
        let base = LanguageSpec::base(2).unwrap();
        let wrapper = LanguageSpec::dictionary_wrapper(base.clone(), table).unwrap();
        let direct = base.run(&d, max_steps, max_emit);
        let escaped = wrapper.run(&d.prepended(true), max_steps + 1, max_emit);
        prop_assert_eq!(&escaped.emitted, &direct.emitted);
        prop_assert_eq!(escaped.status, direct.status);
        if max_emit > 0 {
            prop_assert_eq!(escaped.steps_used, direct.steps_used + 1);
        }
    }

    #[test]
    fn permutation_wrapper_matches_remapped_base_runs(
        d in description_strategy(24),
        perm in permutation_strategy(),
        max_steps in 0u64..96,
        max_emit in 0usize..8,
    ) {
        let base = LanguageSpec::base(2).unwrap();
        let wrapper = LanguageSpec::permutation_wrapper(base.clone(), perm).unwrap();
        let via_wrapper = wrapper.run(&d, max_steps, max_emit);
        let via_remap = base.run(&remap(&d, perm), max_steps, max_emit);
        prop_assert_eq!(via_wrapper, via_remap);
    }

    #[test]
    fn hex_notation_round_trips(d in description_strategy(40)) {
        let hex = d.to_hex();
        let back = Description::from_hex(&hex).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn description_order_is_length_then_lexicographic(
        a in description_strategy(16),
        b in description_strategy(16),
    ) {
        let expected = (a.len(), a.bits()).cmp(&(b.len(), b.bits()));
        prop_assert_eq!(a.cmp(&b), expected);
    }

    #[test]
    fn sequential_and_batch_updates_agree(
        weights in weights_strategy(),
        pick in any::<prop::sample::Index>(),
        len in 0usize..=4,
    ) {
        let model = model_from(weights);
        let prefixes: Vec<Vec<Symbol>> = model.entries().map(|(p, _)| p.to_vec()).collect();
        let truth = &prefixes[pick.index(prefixes.len())];
        let observed = &truth[..len];

        let batch = model.batch_update(observed).unwrap();
        let mut sequential = model.clone();
        for &s in observed {
            sequential = sequential.observe_update(s).unwrap();
        }
        prop_assert_eq!(batch.entry_count(), sequential.entry_count());
        for (prefix, p) in batch.entries() {
            prop_assert!((p - sequential.probability(prefix)).abs() <= 1e-12);
        }
        let total: f64 = batch.entries().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn correspondence_never_drops_while_observing_the_truth(
        weights in weights_strategy(),
        pick in any::<prop::sample::Index>(),
    ) {
        let model = model_from(weights);
        let prefixes: Vec<Vec<Symbol>> = model.entries().map(|(p, _)| p.to_vec()).collect();
        let truth = prefixes[pick.index(prefixes.len())].clone();
        let process = occamlab::inference::Process::periodic(truth.clone()).unwrap();

        let mut current = model;
        let mut last = current.correspondence(&process).unwrap();
        for &s in &truth {
            current = current.observe_update(s).unwrap();
            let next = current.correspondence(&process).unwrap();
            prop_assert!(next >= last - 1e-12, "correspondence dropped: {last} -> {next}");
            last = next;
        }
        prop_assert!((last - 1.0).abs() < 1e-9, "full true prefix must leave only the truth");
    }

    #[test]
    fn reweighting_renormalizes_and_zeroes_absorb(
        weights in weights_strategy(),
        pick in any::<prop::sample::Index>(),
        gamma in 0.125f64..16.0,
    ) {
        let model = model_from(weights);
        if model.entry_count() < 2 {
            return Ok(());
        }
        let prefixes: Vec<Vec<Symbol>> = model.entries().map(|(p, _)| p.to_vec()).collect();
        let zeroed = prefixes[pick.index(prefixes.len())].clone();
        let special = model.make_special(|p| p == zeroed.as_slice()).unwrap();
        prop_assert_eq!(special.probability(&zeroed), 0.0);

        let reweighted = special.reweight(|p| p != zeroed.as_slice(), gamma).unwrap();
        prop_assert_eq!(reweighted.probability(&zeroed), 0.0, "zeros must survive reweighting");
        let total: f64 = reweighted.entries().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);

        // Observing a surviving prefix keeps the zero pinned at exactly 0.
        let survivor = prefixes.iter().find(|p| **p != zeroed).unwrap();
        let updated = reweighted.observe_update(survivor[0]).unwrap();
        if updated.entries().any(|(p, _)| p == zeroed.as_slice()) {
            prop_assert_eq!(updated.probability(&zeroed), 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn small_sweeps_are_reproducible_and_valid(
        max_len in 0u32..=6,
        max_steps in 1u64..32,
        horizon in 1usize..3,
    ) {
        let language = LanguageSpec::base(2).unwrap();
        let first = enumerate_space(&language, max_len, max_steps, horizon).unwrap();
        let second = enumerate_space(&language, max_len, max_steps, horizon).unwrap();
        prop_assert_eq!(&first, &second);
        for class in first.classes() {
            prop_assert_eq!(class.prefix.len(), horizon);
            prop_assert!(class.mdl_bits <= max_len);
            prop_assert!(class.program_count >= 1);
            let outcome = language.run(&class.representative, max_steps, horizon);
            prop_assert_eq!(outcome.status, RunStatus::EmitBudgetReached);
            prop_assert_eq!(&outcome.emitted, &class.prefix);
        }
    }

    #[test]
    fn permutation_wrappers_preserve_the_class_structure(
        perm in permutation_strategy(),
    ) {
        let base = LanguageSpec::base(2).unwrap();
        let wrapper = LanguageSpec::permutation_wrapper(base.clone(), perm).unwrap();
        let base_space = enumerate_space(&base, 9, 32, 2).unwrap();
        let perm_space = enumerate_space(&wrapper, 9, 32, 2).unwrap();
        prop_assert_eq!(base_space.class_count(), perm_space.class_count());
        for class in base_space.classes() {
            let twin = perm_space.get(&class.prefix);
            prop_assert!(twin.is_some(), "class {:?} vanished", class.prefix);
            let twin = twin.unwrap();
            prop_assert_eq!(twin.mdl_bits, class.mdl_bits);
            prop_assert_eq!(twin.program_count, class.program_count);
        }
    }
}
