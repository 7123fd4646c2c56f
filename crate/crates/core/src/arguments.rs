//! Argument construction, classification and the class-level preferences.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::theory::{RuleKind, Strength, Theory};

pub type ArgId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument {
    pub id: ArgId,
    /// Set only for premise-arguments.
    pub premise: Option<String>,
    /// Premises used anywhere in the tree.
    pub premise_ids: BTreeSet<String>,
    /// Immediate sub-arguments, one per antecedent of `top_rule`.
    pub sub_args: Vec<ArgId>,
    /// Every sub-argument in the tree, including this argument itself.
    pub all_subs: BTreeSet<ArgId>,
    pub top_rule: Option<String>,
    pub conclusion: Formula,
    pub defeasible: bool,
    pub plausible: bool,
    pub depth: usize,
}

impl Argument {
    pub fn is_premise(&self) -> bool {
        self.premise.is_some()
    }

    /// The premise id or the top rule id.
    pub fn label(&self) -> &str {
        self.premise
            .as_deref()
            .or(self.top_rule.as_deref())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleClass {
    Strict,
    Defeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PremiseClass {
    Firm,
    Plausible,
}

pub fn classify(a: &Argument) -> (RuleClass, PremiseClass) {
    (
        if a.defeasible {
            RuleClass::Defeasible
        } else {
            RuleClass::Strict
        },
        if a.plausible {
            PremiseClass::Plausible
        } else {
            PremiseClass::Firm
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Every argument is as good as any other.
    Universal,
    /// Strict beats defeasible.
    RuleBased,
    /// Firm beats plausible.
    PremiseBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    Preferred,
    Dispreferred,
    Equal,
}

/// How `a` compares to `b` under `ord`.
pub fn compare(a: &Argument, b: &Argument, ord: Ordering) -> Preference {
    let (worse_a, worse_b) = match ord {
        Ordering::Universal => return Preference::Equal,
        Ordering::RuleBased => (a.defeasible, b.defeasible),
        Ordering::PremiseBased => (a.plausible, b.plausible),
    };
    match (worse_a, worse_b) {
        (false, true) => Preference::Preferred,
        (true, false) => Preference::Dispreferred,
        _ => Preference::Equal,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub arguments: Vec<Argument>,
    /// Some argument would have needed a deeper rule chain than `max_depth`.
    pub truncated: bool,
}

/// Every argument with a rule chain no longer than the theory's `max_depth`.
///
/// Ids are dense and follow construction order: premises in file order,
/// then by depth, rule order and lexicographic sub-argument tuples.
pub fn construct_arguments(t: &Theory) -> Construction {
    let mut args: Vec<Argument> = Vec::new();
    let mut by_conclusion: BTreeMap<Formula, Vec<ArgId>> = BTreeMap::new();
    for p in &t.premises {
        let id = args.len();
        args.push(Argument {
            id,
            premise: Some(p.id.clone()),
            premise_ids: BTreeSet::from([p.id.clone()]),
            sub_args: Vec::new(),
            all_subs: BTreeSet::from([id]),
            top_rule: None,
            conclusion: p.formula.clone(),
            defeasible: false,
            plausible: p.strength == Strength::Ordinary,
            depth: 0,
        });
    }
    for (i, p) in t.premises.iter().enumerate() {
        by_conclusion.entry(p.formula.clone()).or_default().push(i);
    }

    let mut seen: BTreeSet<(&str, Vec<ArgId>)> = BTreeSet::new();
    let mut truncated = false;
    for depth in 1.. {
        let mut layer = Vec::new();
        for rule in &t.rules {
            let candidates: Vec<&[ArgId]> = rule
                .antecedents
                .iter()
                .map(|f| by_conclusion.get(f).map_or(&[][..], Vec::as_slice))
                .collect();
            for tuple in tuples(&candidates) {
                // exactly one layer deeper than the deepest sub-argument
                if tuple.iter().map(|&i| args[i].depth).max().unwrap_or(0) + 1 != depth {
                    continue;
                }
                let mut key = tuple.clone();
                key.sort_unstable();
                if !seen.insert((rule.id.as_str(), key)) {
                    continue;
                }
                layer.push((rule, tuple));
            }
        }
        if layer.is_empty() {
            break;
        }
        if depth > t.max_depth {
            truncated = true;
            break;
        }
        let start = args.len();
        for (rule, subs) in layer {
            let id = args.len();
            let mut all_subs = BTreeSet::from([id]);
            let mut premise_ids = BTreeSet::new();
            let mut defeasible = rule.kind == RuleKind::Defeasible;
            let mut plausible = false;
            for &s in &subs {
                all_subs.extend(args[s].all_subs.iter().copied());
                premise_ids.extend(args[s].premise_ids.iter().cloned());
                defeasible |= args[s].defeasible;
                plausible |= args[s].plausible;
            }
            args.push(Argument {
                id,
                premise: None,
                premise_ids,
                sub_args: subs,
                all_subs,
                top_rule: Some(rule.id.clone()),
                conclusion: rule.consequent.clone(),
                defeasible,
                plausible,
                depth,
            });
        }
        for a in &args[start..] {
            by_conclusion
                .entry(a.conclusion.clone())
                .or_default()
                .push(a.id);
        }
    }
    Construction {
        arguments: args,
        truncated,
    }
}

/// Cartesian product in lexicographic order.
fn tuples(choices: &[&[ArgId]]) -> Vec<Vec<ArgId>> {
    let mut out = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for &o in *options {
                let mut t = prefix.clone();
                t.push(o);
                next.push(t);
            }
        }
        out = next;
    }
    out
}
