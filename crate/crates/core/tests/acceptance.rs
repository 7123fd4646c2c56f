//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use normargue::cli::Pipeline;
use normargue::formula::{parse, parse_with_mode, print, Formula, PermissionMode};
use normargue::hohfeld::{NormativePosition, PositionKind};
use normargue::semantics::{
    acceptance, brute_force_stable, stable_extensions, verify_extension, AcceptanceMode,
    ArgumentationFramework, DefeatKind, Extension, Locus,
};
use normargue::theory::{parse_theory, Scheme, Theory};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{by_label, fixture, pipeline, random_af};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Solver output, checked against the stable conditions before use.
fn checked_extensions(af: &ArgumentationFramework) -> Result<Vec<Extension>, String> {
    let exts = stable_extensions(af);
    for e in &exts {
        ensure(verify_extension(af, &e.members), || {
            format!("solver returned a non-stable set {:?}", e.members)
        })?;
    }
    Ok(exts)
}

fn labels_of(p: &Pipeline, e: &Extension) -> BTreeSet<String> {
    e.members
        .iter()
        .map(|&i| p.arguments[i].label().to_string())
        .collect()
}

fn abortion_extension() -> Outcome {
    let start = Instant::now();
    let p = pipeline("abortion.naf");
    let exts = checked_extensions(&p.af)?;
    let elapsed = start.elapsed();
    ensure(exts.len() == 1, || {
        format!("expected one extension, got {}", exts.len())
    })?;
    let expected: BTreeSet<String> = ["a1", "a2", "a3", "a4", "b1", "d"]
        .into_iter()
        .map(String::from)
        .collect();
    let got = labels_of(&p, &exts[0]);
    ensure(got == expected, || format!("members {got:?}"))?;
    let want: BTreeSet<&Formula> = expected
        .iter()
        .map(|l| &by_label(&p, l).conclusion)
        .collect();
    let have: BTreeSet<&Formula> = exts[0]
        .members
        .iter()
        .map(|&i| &p.arguments[i].conclusion)
        .collect();
    ensure(want == have, || "conclusions differ".to_string())?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })
}

fn abortion_defeats() -> Outcome {
    let p = pipeline("abortion.naf");
    let id = |l: &str| by_label(&p, l).id;
    let wanted = [
        (
            id("a4"),
            id("b4"),
            DefeatKind::Rebut,
            Locus::SubArgument(id("b4")),
        ),
        (
            id("c2"),
            id("a2"),
            DefeatKind::Undermine,
            Locus::Premise("a2".into()),
        ),
        (
            id("d"),
            id("c2"),
            DefeatKind::Undercut,
            Locus::Rule("c2".into()),
        ),
    ];
    for (attacker, target, kind, locus) in wanted {
        ensure(
            p.af.defeats.iter().any(|d| {
                d.attacker == attacker && d.target == target && d.kind == kind && d.locus == locus
            }),
            || format!("missing {kind:?} A{attacker} -> A{target} at {locus:?}"),
        )?;
    }
    Ok(())
}

fn doctor() -> Outcome {
    let p = pipeline("doctor.naf");
    let b3 = by_label(&p, "b3").id;
    let a4 = by_label(&p, "a4").id;
    ensure(
        p.af.defeats
            .iter()
            .any(|d| d.attacker == b3 && d.target == a4),
        || "B3 does not defeat A4".into(),
    )?;
    ensure(
        !p.af
            .defeats
            .iter()
            .any(|d| d.attacker == a4 && d.target == b3),
        || "A4 defeats B3".into(),
    )?;
    let exts = checked_extensions(&p.af)?;
    let q = parse("P K_doctor(illness)").unwrap();
    ensure(
        acceptance(&p.arguments, &exts, &q, AcceptanceMode::Skeptical),
        || "P K_doctor(illness) not skeptically accepted".into(),
    )
}

fn knife() -> Outcome {
    let text = std::fs::read_to_string(fixture("knife.naf")).map_err(|e| e.to_string())?;
    ensure(
        !text.lines().any(|l| l.trim_start().starts_with("RULE")),
        || "knife fixture contains hand-written rules".into(),
    )?;
    let p = pipeline("knife.naf");
    let exts = checked_extensions(&p.af)?;
    let generated_by = |f: &Formula| -> Option<Scheme> {
        p.theory
            .rules
            .iter()
            .find(|r| &r.consequent == f)
            .and_then(|r| r.origin)
    };
    let f = |s: &str| parse(s).unwrap();
    let accepted = [
        ("A", f("O_c(~misuse)"), None),
        ("B", f("P_c K_c(customer)"), None),
        ("C", f("<>(K_c(customer) & misuse)"), None),
        ("A''", f("~P_c(K_c(customer) & misuse)"), Some(Scheme::Owp)),
        ("B''", f("P_c(K_c(customer) & handle)"), Some(Scheme::Fcp)),
    ];
    let rejected = [
        ("B'", f("P_c(K_c(customer) & misuse)"), Some(Scheme::Fcp)),
        ("C'", f("[](K_c(customer) -> ~misuse)"), Some(Scheme::Owp)),
    ];
    for (name, conclusion, scheme) in accepted.iter().chain(&rejected) {
        if scheme.is_some() {
            ensure(generated_by(conclusion) == *scheme, || {
                format!("{name} is not generated by {scheme:?}")
            })?;
        }
    }
    for (name, c, _) in &accepted {
        let cred = acceptance(&p.arguments, &exts, c, AcceptanceMode::Credulous);
        let skep = acceptance(&p.arguments, &exts, c, AcceptanceMode::Skeptical);
        ensure(cred && skep, || {
            format!("{name} = {c}: credulous {cred}, skeptical {skep}")
        })?;
    }
    for (name, c, _) in &rejected {
        let cred = acceptance(&p.arguments, &exts, c, AcceptanceMode::Credulous);
        let skep = acceptance(&p.arguments, &exts, c, AcceptanceMode::Skeptical);
        ensure(!cred && !skep, || {
            format!("{name} = {c}: credulous {cred}, skeptical {skep}")
        })?;
    }
    Ok(())
}

const AF_SEED: u64 = 0x5eed_a7f5;

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(AF_SEED);
    let mut disagreements = 0;
    for i in 0..200 {
        let af = random_af(&mut rng, 12);
        let solver = stable_extensions(&af);
        let brute = brute_force_stable(&af).map_err(|e| e.to_string())?;
        if solver != brute {
            disagreements += 1;
            eprintln!(
                "AF #{i} ({} args): solver {solver:?}, brute force {brute:?}",
                af.n_args
            );
        }
    }
    let elapsed = start.elapsed();
    ensure(disagreements == 0, || {
        format!("{disagreements} disagreements")
    })?;
    ensure(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })
}

fn extensions_verify() -> Outcome {
    for name in ["abortion.naf", "doctor.naf", "knife.naf", "empty.naf"] {
        let p = pipeline(name);
        checked_extensions(&p.af).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(AF_SEED ^ 1);
    for _ in 0..200 {
        checked_extensions(&random_af(&mut rng, 14))?;
    }
    Ok(())
}

/// `n` values drawn from `s` with a fixed seed.
fn sample<T: std::fmt::Debug>(n: usize, seed: u8, s: impl Strategy<Value = T>) -> Vec<T> {
    let mut r = TestRunner::new_with_rng(
        Config::default(),
        TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]),
    );
    (0..n)
        .map(|_| s.new_tree(&mut r).expect("strategy").current())
        .collect()
}

fn hohfeld_algebra() -> Outcome {
    let contents = sample(25, 7, common::formula());
    let mut checked = 0;
    for content in contents {
        for kind in PositionKind::ALL {
            let p = NormativePosition::new(kind, "a", "b", content.clone());
            ensure(p.correlative().correlative() == p, || {
                format!("correlative not involutive on {p}")
            })?;
            ensure(p.opposite().opposite() == p, || {
                format!("opposite not involutive on {p}")
            })?;
            let orbit = [
                p.clone(),
                p.correlative(),
                p.opposite(),
                p.opposite().correlative(),
            ];
            let kinds: BTreeSet<PositionKind> = orbit.iter().map(|q| q.kind).collect();
            ensure(kinds.len() == 4, || {
                format!("orbit of {p} has kinds {kinds:?}")
            })?;
            ensure(
                orbit.iter().all(|q| q.kind.square() == kind.square()),
                || format!("orbit of {p} leaves its square"),
            )?;
            ensure(
                p.correlative().opposite() == p.opposite().correlative(),
                || format!("squares do not commute at {p}"),
            )?;
            ensure(p.to_formula() == p.correlative().to_formula(), || {
                format!("to_formula differs across correlatives at {p}")
            })?;
            checked += 1;
        }
    }
    ensure(checked == 200, || format!("checked {checked}"))
}

fn round_trip() -> Outcome {
    for f in sample(500, 8, common::formula()) {
        let printed = print(&f);
        let back = parse(&printed).map_err(|e| format!("`{printed}`: {e}"))?;
        ensure(back == f.normalize(PermissionMode::Strong), || {
            format!("`{printed}` parsed to `{back}`")
        })?;
    }
    Ok(())
}

fn duality() -> Outcome {
    let phis = sample(100, 9, common::formula());
    let agents = sample(100, 10, common::agent_strategy());
    for weak in [true, false] {
        let t = Theory {
            weak_mode: weak,
            ..Theory::default()
        };
        for (phi, a) in phis.iter().zip(&agents) {
            let perm = Formula::perm(a.clone(), phi.clone()).normalize(t.mode());
            let ob = Formula::oblig(a.clone(), Formula::not(phi.clone())).normalize(t.mode());
            ensure(t.contrary(&perm, &ob) == weak, || {
                format!("weak_mode {weak}: contrary({perm}, {ob}) = {}", !weak)
            })?;
            ensure(t.contrary(&ob, &perm) == weak, || "not symmetric".into())?;
        }
    }
    // the same through a loaded theory and its own parser mode
    let t = parse_theory("AGENTS: a\nSCHEME weak_mode on\n").map_err(|e| e.to_string())?;
    let perm = parse_with_mode("P_a(x)", t.mode()).unwrap();
    let ob = parse_with_mode("O_a(~x)", t.mode()).unwrap();
    ensure(t.contrary(&perm, &ob), || {
        "loaded weak theory misses the duality".into()
    })
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "abortion: single stable extension {A1, A2, A3, A4, B1, D}",
            abortion_extension,
        ),
        (
            "abortion: rebut A4->B4, undermine C2->A2, undercut D->C2",
            abortion_defeats,
        ),
        (
            "doctor: B3 defeats A4, not conversely; P K_doctor(illness) skeptical",
            doctor,
        ),
        (
            "knife: A, B, C, A'', B'' accepted; B', C' not; schemes generate rules",
            knife,
        ),
        (
            "oracle: solver equals brute force on 200 random frameworks",
            oracle_equivalence,
        ),
        ("every solver extension is stable", extensions_verify),
        (
            "hohfeld: involutions, square orbits, correlatives share a formula",
            hohfeld_algebra,
        ),
        ("parse(print(f)) = normalize(f) on 500 formulas", round_trip),
        (
            "weak mode: P_a phi and O_a ~phi are contrary; strong mode: not",
            duality,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {}: {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
