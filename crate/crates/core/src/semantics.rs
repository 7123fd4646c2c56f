//! Defeats between arguments and Dung-style extensions over them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arguments::{compare, ArgId, Argument, Ordering, Preference};
use crate::formula::Formula;
use crate::theory::{Strength, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefeatKind {
    Rebut,
    Undermine,
    Undercut,
}

/// The part of the target that is attacked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locus {
    SubArgument(ArgId),
    Premise(String),
    Rule(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Defeat {
    pub attacker: ArgId,
    pub target: ArgId,
    pub kind: DefeatKind,
    pub locus: Locus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefeatConfig {
    pub rebut_ordering: Ordering,
    pub undermine_ordering: Ordering,
    /// `None` leaves undercutting preference-free.
    pub undercut_ordering: Option<Ordering>,
}

impl Default for DefeatConfig {
    fn default() -> Self {
        DefeatConfig {
            rebut_ordering: Ordering::RuleBased,
            undermine_ordering: Ordering::PremiseBased,
            undercut_ordering: None,
        }
    }
}

impl DefeatConfig {
    pub fn universal() -> Self {
        DefeatConfig {
            rebut_ordering: Ordering::Universal,
            undermine_ordering: Ordering::Universal,
            undercut_ordering: Some(Ordering::Universal),
        }
    }
}

fn admits(a: &Argument, b: &Argument, ord: Ordering) -> bool {
    compare(a, b, ord) != Preference::Dispreferred
}

/// All defeats among `args`, sorted. An attack on a sub-argument is also
/// an attack on every argument built on it, with the locus kept at the
/// sub-argument.
pub fn compute_defeats(args: &[Argument], theory: &Theory, config: &DefeatConfig) -> Vec<Defeat> {
    let mut out = BTreeSet::new();
    for a in args {
        for b in args {
            for &s in &b.all_subs {
                let sub = &args[s];
                if let Some(rule_id) = &sub.top_rule {
                    let defeasible_top = theory.rule(rule_id).is_some_and(|r| r.is_defeasible());
                    if !defeasible_top {
                        continue;
                    }
                    if theory.contrary(&a.conclusion, &sub.conclusion)
                        && admits(a, sub, config.rebut_ordering)
                    {
                        out.insert(Defeat {
                            attacker: a.id,
                            target: b.id,
                            kind: DefeatKind::Rebut,
                            locus: Locus::SubArgument(s),
                        });
                    }
                    if theory.contrary(&a.conclusion, &Formula::rule_atom(rule_id.clone()))
                        && config
                            .undercut_ordering
                            .is_none_or(|ord| admits(a, sub, ord))
                    {
                        out.insert(Defeat {
                            attacker: a.id,
                            target: b.id,
                            kind: DefeatKind::Undercut,
                            locus: Locus::Rule(rule_id.clone()),
                        });
                    }
                } else if let Some(pid) = &sub.premise {
                    let ordinary = theory
                        .premise(pid)
                        .is_some_and(|p| p.strength == Strength::Ordinary);
                    if ordinary
                        && theory.contrary(&a.conclusion, &sub.conclusion)
                        && admits(a, sub, config.undermine_ordering)
                    {
                        out.insert(Defeat {
                            attacker: a.id,
                            target: b.id,
                            kind: DefeatKind::Undermine,
                            locus: Locus::Premise(pid.clone()),
                        });
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentationFramework {
    pub n_args: usize,
    pub defeats: Vec<Defeat>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Extension {
    pub members: BTreeSet<ArgId>,
}

impl Extension {
    pub fn contains(&self, a: ArgId) -> bool {
        self.members.contains(&a)
    }
}

impl FromIterator<ArgId> for Extension {
    fn from_iter<I: IntoIterator<Item = ArgId>>(iter: I) -> Self {
        Extension {
            members: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("brute force is limited to {max} arguments, framework has {n}")]
pub struct TooLarge {
    pub n: usize,
    pub max: usize,
}

pub const BRUTE_FORCE_MAX: usize = 20;

impl ArgumentationFramework {
    pub fn new(n_args: usize, defeats: Vec<Defeat>) -> Self {
        ArgumentationFramework { n_args, defeats }
    }

    /// A framework from bare `(attacker, target)` pairs, for abstract use.
    pub fn from_attacks(n_args: usize, attacks: impl IntoIterator<Item = (ArgId, ArgId)>) -> Self {
        let defeats: BTreeSet<Defeat> = attacks
            .into_iter()
            .map(|(attacker, target)| Defeat {
                attacker,
                target,
                kind: DefeatKind::Rebut,
                locus: Locus::SubArgument(target),
            })
            .collect();
        ArgumentationFramework {
            n_args,
            defeats: defeats.into_iter().collect(),
        }
    }

    /// Distinct `(attacker, target)` pairs.
    pub fn attacks(&self) -> BTreeSet<(ArgId, ArgId)> {
        self.defeats
            .iter()
            .map(|d| (d.attacker, d.target))
            .collect()
    }

    fn attackers(&self) -> Vec<Vec<ArgId>> {
        let mut out = vec![Vec::new(); self.n_args];
        for (a, b) in self.attacks() {
            out[b].push(a);
        }
        out
    }

    fn targets(&self) -> Vec<Vec<ArgId>> {
        let mut out = vec![Vec::new(); self.n_args];
        for (a, b) in self.attacks() {
            out[a].push(b);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Undecided,
    In,
    Out,
}

struct Search<'a> {
    attackers: &'a [Vec<ArgId>],
    targets: &'a [Vec<ArgId>],
    found: Vec<Extension>,
}

impl Search<'_> {
    /// Labels `x` and propagates the consequences. Returns false on conflict.
    fn assign(&self, labels: &mut [Label], x: ArgId, l: Label) -> bool {
        let mut queue = vec![(x, l)];
        while let Some((x, l)) = queue.pop() {
            match labels[x] {
                Label::Undecided => labels[x] = l,
                current if current == l => continue,
                _ => return false,
            }
            match l {
                Label::In => {
                    // nothing in may attack or be attacked by an in member
                    for &y in self.targets[x].iter().chain(&self.attackers[x]) {
                        if y == x {
                            return false;
                        }
                        queue.push((y, Label::Out));
                    }
                }
                Label::Out => {
                    // an out argument needs an attacker that can still be in
                    if !self.check_out(labels, x, &mut queue) {
                        return false;
                    }
                    for &t in &self.targets[x] {
                        if labels[t] == Label::Out && !self.check_out(labels, t, &mut queue) {
                            return false;
                        }
                        if labels[t] == Label::Undecided
                            && self.attackers[t].iter().all(|&a| labels[a] == Label::Out)
                        {
                            queue.push((t, Label::In));
                        }
                    }
                }
                Label::Undecided => unreachable!(),
            }
        }
        true
    }

    fn check_out(&self, labels: &[Label], x: ArgId, queue: &mut Vec<(ArgId, Label)>) -> bool {
        let mut open = self.attackers[x]
            .iter()
            .filter(|&&a| labels[a] != Label::Out);
        match (open.next(), open.next()) {
            (None, _) => false,
            (Some(&a), None) if labels[a] == Label::Undecided => {
                queue.push((a, Label::In));
                true
            }
            _ => true,
        }
    }

    fn solve(&mut self, labels: Vec<Label>) {
        let Some(x) = labels.iter().position(|&l| l == Label::Undecided) else {
            self.found.push(
                labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l == Label::In)
                    .map(|(i, _)| i)
                    .collect(),
            );
            return;
        };
        for l in [Label::In, Label::Out] {
            let mut next = labels.clone();
            if self.assign(&mut next, x, l) {
                self.solve(next);
            }
        }
    }
}

/// Every stable extension, sorted by member sequence. Exact.
pub fn stable_extensions(af: &ArgumentationFramework) -> Vec<Extension> {
    let attackers = af.attackers();
    let targets = af.targets();
    let mut search = Search {
        attackers: &attackers,
        targets: &targets,
        found: Vec::new(),
    };
    let mut labels = vec![Label::Undecided; af.n_args];
    let mut ok = true;
    for x in 0..af.n_args {
        if !ok {
            break;
        }
        if labels[x] != Label::Undecided {
            continue;
        }
        if attackers[x].contains(&x) {
            ok = search.assign(&mut labels, x, Label::Out);
        } else if attackers[x].is_empty() {
            ok = search.assign(&mut labels, x, Label::In);
        }
    }
    if ok {
        search.solve(labels);
    }
    let mut found = search.found;
    found.sort_by(|a, b| a.members.iter().cmp(b.members.iter()));
    found.dedup();
    debug_assert!(found.iter().all(|e| verify_extension(af, &e.members)));
    found
}

/// Least fixpoint of the characteristic function.
pub fn grounded_extension(af: &ArgumentationFramework) -> Extension {
    let attackers = af.attackers();
    let mut accepted = vec![false; af.n_args];
    let mut defeated = vec![false; af.n_args];
    loop {
        let mut changed = false;
        for x in 0..af.n_args {
            if !accepted[x] && !defeated[x] && attackers[x].iter().all(|&a| defeated[a]) {
                accepted[x] = true;
                changed = true;
            }
        }
        for (a, b) in af.attacks() {
            if accepted[a] && !defeated[b] {
                defeated[b] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..af.n_args).filter(|&x| accepted[x]).collect()
}

/// Conflict-free, and every non-member is defeated by a member.
pub fn verify_extension(af: &ArgumentationFramework, s: &BTreeSet<ArgId>) -> bool {
    if s.iter().any(|&x| x >= af.n_args) {
        return false;
    }
    let attacks = af.attacks();
    if attacks.iter().any(|(a, b)| s.contains(a) && s.contains(b)) {
        return false;
    }
    (0..af.n_args)
        .filter(|x| !s.contains(x))
        .all(|x| attacks.iter().any(|(a, b)| *b == x && s.contains(a)))
}

/// Checks all `2^n` subsets; the oracle for [`stable_extensions`].
pub fn brute_force_stable(af: &ArgumentationFramework) -> Result<Vec<Extension>, TooLarge> {
    if af.n_args > BRUTE_FORCE_MAX {
        return Err(TooLarge {
            n: af.n_args,
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut found: Vec<Extension> = (0u32..1 << af.n_args)
        .map(|mask| {
            (0..af.n_args)
                .filter(|&i| mask & (1 << i) != 0)
                .collect::<Extension>()
        })
        .filter(|e| verify_extension(af, &e.members))
        .collect();
    found.sort_by(|a, b| a.members.iter().cmp(b.members.iter()));
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptanceMode {
    Credulous,
    Skeptical,
}

/// Whether some (credulous) or every (skeptical) extension contains an
/// argument for `conclusion`. Skeptical acceptance over no extensions is false.
pub fn acceptance(
    args: &[Argument],
    extensions: &[Extension],
    conclusion: &Formula,
    mode: AcceptanceMode,
) -> bool {
    let holds = |e: &Extension| {
        e.members
            .iter()
            .any(|&i| args.get(i).is_some_and(|a| &a.conclusion == conclusion))
    };
    match mode {
        AcceptanceMode::Credulous => extensions.iter().any(holds),
        AcceptanceMode::Skeptical => !extensions.is_empty() && extensions.iter().all(holds),
    }
}
