#![allow(dead_code)]

use std::path::PathBuf;

use normargue::arguments::Argument;
use normargue::cli::{Pipeline, PipelineArgs};
use normargue::formula::{AgentId, Formula};
use normargue::semantics::ArgumentationFramework;
use proptest::prelude::*;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn pipeline(name: &str) -> Pipeline {
    pipeline_with(name, &PipelineArgs::default())
}

pub fn pipeline_with(name: &str, args: &PipelineArgs) -> Pipeline {
    Pipeline::load(&fixture(name), args).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The single argument whose premise or top rule is `label`.
pub fn by_label<'a>(p: &'a Pipeline, label: &str) -> &'a Argument {
    let mut found = p.arguments.iter().filter(|a| a.label() == label);
    let a = found
        .next()
        .unwrap_or_else(|| panic!("no argument labelled {label}"));
    assert!(found.next().is_none(), "several arguments labelled {label}");
    a
}

fn agent() -> impl Strategy<Value = AgentId> {
    prop::sample::select(vec!["a", "b", "c", "doctor"]).prop_map(AgentId::from)
}

fn leaf() -> impl Strategy<Value = Formula> {
    let names = prop::sample::select(vec![
        "p", "q", "r", "treat", "misuse", "data", "K", "Oo", "x_1",
    ]);
    let args = prop::collection::vec(prop::sample::select(vec!["a", "f", "patient"]), 0..3);
    prop_oneof![
        6 => (names, args).prop_map(|(n, a)| Formula::predicate(n, a)),
        1 => prop::sample::select(vec!["c2", "b4", "fcp#1", "owp#12"]).prop_map(Formula::rule_atom),
    ]
}

/// Arbitrary formulas over every constructor, unnormalized.
pub fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            inner.clone().prop_map(Formula::necessity),
            inner.clone().prop_map(Formula::possibility),
            (agent(), inner.clone()).prop_map(|(a, f)| Formula::know(a, f)),
            (agent(), inner.clone()).prop_map(|(a, f)| Formula::oblig(a, f)),
            (agent(), agent(), inner.clone())
                .prop_map(|(a, b, f)| Formula::directed_oblig(a, b, f)),
            inner.clone().prop_map(Formula::impersonal_oblig),
            (agent(), inner.clone()).prop_map(|(a, f)| Formula::perm(a, f)),
            inner.clone().prop_map(Formula::impersonal_perm),
            (agent(), inner.clone()).prop_map(|(a, f)| Formula::stit(a, f)),
            (agent(), inner.clone()).prop_map(|(a, f)| Formula::right(a, f)),
            (agent(), agent(), inner).prop_map(|(a, b, f)| Formula::power(a, b, f)),
        ]
    })
}

pub fn agent_strategy() -> impl Strategy<Value = AgentId> {
    agent()
}

/// A random framework with at most `max_n` arguments.
pub fn random_af(rng: &mut impl Rng, max_n: usize) -> ArgumentationFramework {
    let n = rng.gen_range(0..=max_n);
    let density: f64 = rng.gen_range(0.05..0.45);
    let mut attacks = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let p = if a == b { density / 4.0 } else { density };
            if rng.gen_bool(p) {
                attacks.push((a, b));
            }
        }
    }
    ArgumentationFramework::from_attacks(n, attacks)
}
