mod common;

use std::collections::BTreeSet;

use normargue::arguments::{classify, compare, Ordering, Preference, PremiseClass, RuleClass};
use normargue::cli::{Pipeline, PipelineArgs};
use normargue::formula::{parse, Formula};
use normargue::semantics::{
    acceptance, compute_defeats, grounded_extension, stable_extensions, verify_extension,
    AcceptanceMode, DefeatConfig, DefeatKind, Locus,
};
use normargue::theory::{instantiate_schemes, load_theory, parse_theory, LoadOptions, Strength};

use common::{by_label, fixture, pipeline, pipeline_with};

const ALL: [&str; 4] = ["abortion.naf", "doctor.naf", "knife.naf", "empty.naf"];

#[test]
fn abortion_theory_shape() {
    let t = load_theory(fixture("abortion.naf"), &LoadOptions::default()).unwrap();
    assert_eq!(t.premises.len(), 6);
    assert_eq!(t.rules.len(), 5);
    assert_eq!(t.contraries.len(), 1);
    assert_eq!(t.contraries[0].1, Formula::rule_atom("c2"));
    assert_eq!(pipeline("abortion.naf").arguments.len(), 10);
}

#[test]
fn abortion_classification() {
    let p = pipeline("abortion.naf");
    let class = |l: &str| classify(by_label(&p, l));
    assert_eq!(class("d"), (RuleClass::Strict, PremiseClass::Firm));
    assert_eq!(class("a4"), (RuleClass::Strict, PremiseClass::Firm));
    assert_eq!(
        class("b4"),
        (RuleClass::Defeasible, PremiseClass::Plausible)
    );
    assert_eq!(
        class("b5"),
        (RuleClass::Defeasible, PremiseClass::Plausible)
    );
    // c1 is ordinary so that D can undermine it
    assert_eq!(
        class("c2"),
        (RuleClass::Defeasible, PremiseClass::Plausible)
    );
    let (c2, a2) = (by_label(&p, "c2"), by_label(&p, "a2"));
    assert_eq!(compare(c2, a2, Ordering::PremiseBased), Preference::Equal);
}

#[test]
fn abortion_defeats_and_propagation() {
    let p = pipeline("abortion.naf");
    let id = |l: &str| by_label(&p, l).id;
    let has = |a: &str, b: &str, kind: DefeatKind, locus: Locus| {
        p.af.defeats
            .iter()
            .any(|d| d.attacker == id(a) && d.target == id(b) && d.kind == kind && d.locus == locus)
    };
    assert!(has(
        "a4",
        "b4",
        DefeatKind::Rebut,
        Locus::SubArgument(id("b4"))
    ));
    assert!(has(
        "a4",
        "b5",
        DefeatKind::Rebut,
        Locus::SubArgument(id("b4"))
    ));
    assert!(has(
        "a3",
        "b5",
        DefeatKind::Rebut,
        Locus::SubArgument(id("b5"))
    ));
    assert!(has(
        "a2",
        "c2",
        DefeatKind::Rebut,
        Locus::SubArgument(id("c2"))
    ));
    assert!(has(
        "c2",
        "a2",
        DefeatKind::Undermine,
        Locus::Premise("a2".into())
    ));
    assert!(has(
        "d",
        "c1",
        DefeatKind::Undermine,
        Locus::Premise("c1".into())
    ));
    assert!(has(
        "d",
        "c2",
        DefeatKind::Undermine,
        Locus::Premise("c1".into())
    ));
    assert!(has(
        "d",
        "c2",
        DefeatKind::Undercut,
        Locus::Rule("c2".into())
    ));
    // nothing attacks the duty to tell
    assert!(!p.af.defeats.iter().any(|d| d.target == id("a4")));
}

#[test]
fn abortion_extensions() {
    let p = pipeline("abortion.naf");
    let stable = stable_extensions(&p.af);
    assert_eq!(stable.len(), 1);
    let grounded = grounded_extension(&p.af);
    assert!(grounded.members.is_subset(&stable[0].members));
    let duty = parse("O_{d,p} [d](K_p(ill) | K_p(~ill))").unwrap();
    assert!(acceptance(
        &p.arguments,
        &stable,
        &duty,
        AcceptanceMode::Skeptical
    ));
    let no_abortion = parse("~P_p(abort)").unwrap();
    assert!(!acceptance(
        &p.arguments,
        &stable,
        &no_abortion,
        AcceptanceMode::Credulous
    ));
}

#[test]
fn undercut_gating_keeps_the_abortion_result() {
    let gated = pipeline_with(
        "abortion.naf",
        &PipelineArgs {
            undercut_gated: true,
            ..Default::default()
        },
    );
    let plain = pipeline("abortion.naf");
    assert_eq!(gated.af, plain.af);
    assert_eq!(stable_extensions(&gated.af), stable_extensions(&plain.af));
}

#[test]
fn doctor_permission_prevails() {
    let p = pipeline("doctor.naf");
    let (b3, a4) = (by_label(&p, "b3"), by_label(&p, "a4"));
    assert_eq!(compare(b3, a4, Ordering::RuleBased), Preference::Preferred);
    assert_eq!(
        compare(a4, b3, Ordering::RuleBased),
        Preference::Dispreferred
    );
    // even ungated, a4 cannot answer: b3 uses no defeasible rule
    let universal = compute_defeats(&p.arguments, &p.theory, &DefeatConfig::universal());
    assert!(!universal
        .iter()
        .any(|d| d.attacker == a4.id && d.target == b3.id));
    let exts = stable_extensions(&p.af);
    assert_eq!(exts.len(), 1);
    assert!(!exts[0].contains(a4.id));
    let position = by_label(&p, "pos#1");
    assert_eq!(
        position.conclusion,
        parse("O_{doctor,patient} [doctor](treat)").unwrap()
    );
}

#[test]
fn miswired_claim_right_warns() {
    let t = parse_theory(
        "AGENTS: doctor, patient\nPOSITION claim_right(patient, doctor): [patient](treat)\n",
    )
    .unwrap();
    assert_eq!(t.warnings.len(), 1);
    assert!(t.warnings[0].message.contains("own action"));
    assert!(load_theory(fixture("doctor.naf"), &LoadOptions::default())
        .unwrap()
        .warnings
        .is_empty());
}

#[test]
fn knife_schemes() {
    let p = pipeline("knife.naf");
    assert!(p.source.rules.is_empty());
    assert!(p.fixpoint);
    let ids: Vec<&str> = p.theory.rules.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, ["fcp#1", "fcp#2", "owp#1", "owp#2", "owp#3", "owp#4"]);
    assert_eq!(instantiate_schemes(&p.theory), p.theory);
    let c_prime = p.theory.rule("owp#1").unwrap();
    assert_eq!(
        c_prime.consequent,
        parse("[](K_c(customer) -> ~misuse)").unwrap()
    );
    // C collides with C' through the possibility/necessity duality
    let c = by_label(&p, "C");
    let c_arg = by_label(&p, "owp#1");
    assert!(p
        .af
        .defeats
        .iter()
        .any(|d| d.attacker == c.id && d.target == c_arg.id && d.kind == DefeatKind::Rebut));
}

#[test]
fn knife_query_verdicts() {
    let p = pipeline("knife.naf");
    let exts = stable_extensions(&p.af);
    let handle = parse("P_c(K_c(customer) & handle)").unwrap();
    let misuse = parse("P_c(K_c(customer) & misuse)").unwrap();
    for mode in [AcceptanceMode::Credulous, AcceptanceMode::Skeptical] {
        assert!(acceptance(&p.arguments, &exts, &handle, mode));
        assert!(!acceptance(&p.arguments, &exts, &misuse, mode));
    }
}

#[test]
fn empty_theory() {
    let p = pipeline("empty.naf");
    assert!(p.arguments.is_empty());
    assert!(p.af.defeats.is_empty());
    let exts = stable_extensions(&p.af);
    assert_eq!(exts.len(), 1);
    assert!(exts[0].members.is_empty());
}

#[test]
fn argument_invariants() {
    for name in ALL {
        let p = pipeline(name);
        for a in &p.arguments {
            let mut premises: BTreeSet<String> = a.premise.iter().cloned().collect();
            for &s in &a.sub_args {
                premises.extend(p.arguments[s].premise_ids.iter().cloned());
            }
            assert_eq!(premises, a.premise_ids, "{name} A{}", a.id);
            let ordinary = a
                .premise_ids
                .iter()
                .any(|id| p.theory.premise(id).unwrap().strength == Strength::Ordinary);
            assert_eq!(a.plausible, ordinary);
            let defeasible = a.all_subs.iter().any(|&s| {
                p.arguments[s]
                    .top_rule
                    .as_deref()
                    .is_some_and(|r| p.theory.rule(r).unwrap().is_defeasible())
            });
            assert_eq!(a.defeasible, defeasible);
            assert!(a.depth <= p.theory.max_depth);
            if a.is_premise() {
                assert!(a.sub_args.is_empty() && a.top_rule.is_none());
            }
        }
    }
}

#[test]
fn defeat_invariants() {
    for name in ALL {
        let p = pipeline(name);
        for d in &p.af.defeats {
            let target = &p.arguments[d.target];
            match &d.locus {
                Locus::SubArgument(s) => {
                    assert_eq!(d.kind, DefeatKind::Rebut);
                    assert!(target.all_subs.contains(s));
                    let rule = p.arguments[*s].top_rule.as_deref().unwrap();
                    assert!(p.theory.rule(rule).unwrap().is_defeasible());
                }
                Locus::Premise(id) => {
                    assert_eq!(d.kind, DefeatKind::Undermine);
                    assert!(target.premise_ids.contains(id));
                    assert_eq!(p.theory.premise(id).unwrap().strength, Strength::Ordinary);
                }
                Locus::Rule(r) => {
                    assert_eq!(d.kind, DefeatKind::Undercut);
                    assert!(p.theory.rule(r).unwrap().is_defeasible());
                    assert!(target
                        .all_subs
                        .iter()
                        .any(|&s| p.arguments[s].top_rule.as_deref() == Some(r)));
                }
            }
            // every argument built on the attacked part is attacked too
            let locus_arg = match &d.locus {
                Locus::SubArgument(s) => Some(*s),
                _ => None,
            };
            if let Some(s) = locus_arg {
                for b in p.arguments.iter().filter(|b| b.all_subs.contains(&s)) {
                    assert!(p.af.defeats.iter().any(|e| e.attacker == d.attacker
                        && e.target == b.id
                        && e.locus == d.locus));
                }
            }
        }
    }
}

#[test]
fn removing_gates_never_removes_defeats() {
    for name in ALL {
        let p = pipeline(name);
        let universal = compute_defeats(&p.arguments, &p.theory, &DefeatConfig::universal());
        for d in &p.af.defeats {
            assert!(universal.contains(d), "{name}: {d:?}");
        }
    }
}

#[test]
fn grounded_within_every_stable_extension() {
    for name in ALL {
        let p = pipeline(name);
        let grounded = grounded_extension(&p.af);
        for e in stable_extensions(&p.af) {
            assert!(verify_extension(&p.af, &e.members));
            assert!(grounded.members.is_subset(&e.members), "{name}");
        }
    }
}

#[test]
fn contrariness_is_symmetric_on_fixture_formulas() {
    for name in ALL {
        let p = pipeline(name);
        let formulas: Vec<&Formula> = p.arguments.iter().map(|a| &a.conclusion).collect();
        for f in &formulas {
            for g in &formulas {
                assert_eq!(p.theory.contrary(f, g), p.theory.contrary(g, f));
            }
        }
    }
}

type Triple = (String, Option<String>, Vec<String>);

fn triples(p: &Pipeline) -> BTreeSet<Triple> {
    p.arguments
        .iter()
        .map(|a| {
            (
                a.conclusion.to_string(),
                a.top_rule.clone(),
                a.premise_ids.iter().cloned().collect(),
            )
        })
        .collect()
}

#[test]
fn construction_is_confluent_under_reordering() {
    let text = std::fs::read_to_string(fixture("abortion.naf")).unwrap();
    let original = Pipeline::from_theory(parse_theory(&text).unwrap(), &DefeatConfig::default());
    let mut reversed_theory = parse_theory(&text).unwrap();
    reversed_theory.premises.reverse();
    reversed_theory.rules.reverse();
    let reversed = Pipeline::from_theory(reversed_theory, &DefeatConfig::default());
    assert_eq!(triples(&original), triples(&reversed));
    let conclusions = |p: &Pipeline| -> BTreeSet<BTreeSet<String>> {
        stable_extensions(&p.af)
            .iter()
            .map(|e| {
                e.members
                    .iter()
                    .map(|&i| p.arguments[i].conclusion.to_string())
                    .collect()
            })
            .collect()
    };
    assert_eq!(conclusions(&original), conclusions(&reversed));
}

#[test]
fn pipeline_is_deterministic() {
    for name in ALL {
        let a = pipeline(name);
        let b = pipeline(name);
        assert_eq!(a.theory, b.theory);
        assert_eq!(a.arguments, b.arguments);
        assert_eq!(a.af, b.af);
    }
}

#[test]
fn weak_mode_collapses_permission_into_obligation() {
    let p = pipeline_with(
        "knife.naf",
        &PipelineArgs {
            weak_mode: true,
            ..Default::default()
        },
    );
    let b = by_label(&p, "B");
    assert_eq!(b.conclusion, parse("~O_c ~K_c(customer)").unwrap());
    // schemes still see the permission in its weak spelling
    assert!(p.theory.rules.iter().any(|r| r.id == "owp#1"));
}
