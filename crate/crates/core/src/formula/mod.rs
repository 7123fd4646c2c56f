//! The modal deontic-epistemic-action language.
//!
//! Formulas are plain trees; every operation here is a pure function. The
//! concrete syntax lives in [`parser`] and the inverse in the `Display`
//! implementation.

mod parser;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::{parse, parse_raw, parse_with_mode, ParseError, Parser, Token};

/// An agent name, e.g. `doctor` or `c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Self {
        AgentId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        AgentId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom {
        name: String,
        args: Vec<String>,
    },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Universal modality `[]`.
    Necessity(Box<Formula>),
    /// Dual of [`Formula::Necessity`], written `<>`.
    Possibility(Box<Formula>),
    Know {
        agent: AgentId,
        body: Box<Formula>,
    },
    /// `O(..)`, `O_a(..)` or the directed `O_{a,b}(..)`.
    Oblig {
        agent: Option<AgentId>,
        toward: Option<AgentId>,
        body: Box<Formula>,
    },
    Perm {
        agent: Option<AgentId>,
        body: Box<Formula>,
    },
    /// `[a]φ`: agent `a` sees to it that φ.
    Stit {
        agent: AgentId,
        body: Box<Formula>,
    },
    /// Claim-right `R_a φ`.
    Right {
        agent: AgentId,
        body: Box<Formula>,
    },
    Power {
        agent: AgentId,
        toward: AgentId,
        body: Box<Formula>,
    },
    /// Names a defeasible rule; the target of undercutters.
    RuleAtom(String),
}

/// Whether permission is a primitive (strong) or the dual of obligation (weak).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PermissionMode {
    #[default]
    Strong,
    Weak,
}

impl PermissionMode {
    pub fn from_weak_flag(weak: bool) -> Self {
        if weak {
            PermissionMode::Weak
        } else {
            PermissionMode::Strong
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("directed obligation toward `{toward}` has no bearer")]
    DirectedWithoutBearer { toward: AgentId },
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom {
            name: name.into(),
            args: Vec::new(),
        }
    }

    pub fn predicate<I, S>(name: impl Into<String>, args: I) -> Formula
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Formula::Atom {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Negation that cancels an outer negation instead of stacking one.
    pub fn negate(f: Formula) -> Formula {
        match f {
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn necessity(f: Formula) -> Formula {
        Formula::Necessity(Box::new(f))
    }

    pub fn possibility(f: Formula) -> Formula {
        Formula::Possibility(Box::new(f))
    }

    pub fn know(agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::Know {
            agent: agent.into(),
            body: Box::new(body),
        }
    }

    pub fn oblig(agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::Oblig {
            agent: Some(agent.into()),
            toward: None,
            body: Box::new(body),
        }
    }

    pub fn directed_oblig(
        agent: impl Into<AgentId>,
        toward: impl Into<AgentId>,
        body: Formula,
    ) -> Formula {
        Formula::Oblig {
            agent: Some(agent.into()),
            toward: Some(toward.into()),
            body: Box::new(body),
        }
    }

    pub fn impersonal_oblig(body: Formula) -> Formula {
        Formula::Oblig {
            agent: None,
            toward: None,
            body: Box::new(body),
        }
    }

    pub fn perm(agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::Perm {
            agent: Some(agent.into()),
            body: Box::new(body),
        }
    }

    pub fn impersonal_perm(body: Formula) -> Formula {
        Formula::Perm {
            agent: None,
            body: Box::new(body),
        }
    }

    pub fn stit(agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::Stit {
            agent: agent.into(),
            body: Box::new(body),
        }
    }

    pub fn right(agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::Right {
            agent: agent.into(),
            body: Box::new(body),
        }
    }

    pub fn power(agent: impl Into<AgentId>, toward: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::Power {
            agent: agent.into(),
            toward: toward.into(),
            body: Box::new(body),
        }
    }

    pub fn rule_atom(name: impl Into<String>) -> Formula {
        Formula::RuleAtom(name.into())
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom { .. } | Formula::RuleAtom(_) => Vec::new(),
            Formula::Not(f) | Formula::Necessity(f) | Formula::Possibility(f) => vec![f],
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => vec![l, r],
            Formula::Know { body, .. }
            | Formula::Oblig { body, .. }
            | Formula::Perm { body, .. }
            | Formula::Stit { body, .. }
            | Formula::Right { body, .. }
            | Formula::Power { body, .. } => vec![body],
        }
    }

    /// Pre-order traversal including `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            for c in f.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// True for operators that take an agent index or quantify over worlds.
    pub fn is_modal(&self) -> bool {
        matches!(
            self,
            Formula::Necessity(_)
                | Formula::Possibility(_)
                | Formula::Know { .. }
                | Formula::Oblig { .. }
                | Formula::Perm { .. }
                | Formula::Stit { .. }
                | Formula::Right { .. }
                | Formula::Power { .. }
        )
    }

    pub fn agents(&self) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        for f in self.subformulas() {
            match f {
                Formula::Know { agent, .. }
                | Formula::Stit { agent, .. }
                | Formula::Right { agent, .. } => {
                    out.insert(agent.clone());
                }
                Formula::Oblig { agent, toward, .. } => {
                    out.extend(agent.iter().cloned());
                    out.extend(toward.iter().cloned());
                }
                Formula::Perm { agent, .. } => {
                    out.extend(agent.iter().cloned());
                }
                Formula::Power { agent, toward, .. } => {
                    out.insert(agent.clone());
                    out.insert(toward.clone());
                }
                _ => {}
            }
        }
        out
    }

    pub fn atom_names(&self) -> BTreeSet<String> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom { name, .. } => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn rule_atoms(&self) -> BTreeSet<String> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::RuleAtom(name) => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn check_well_formed(&self) -> Result<(), FormulaError> {
        for f in self.subformulas() {
            if let Formula::Oblig {
                agent: None,
                toward: Some(t),
                ..
            } = f
            {
                return Err(FormulaError::DirectedWithoutBearer { toward: t.clone() });
            }
        }
        Ok(())
    }

    pub fn normalize(&self, mode: PermissionMode) -> Formula {
        normalize(self, mode)
    }
}

/// Removes double negations, rewrites `<>φ` as `~[]~φ`, and in weak mode
/// rewrites `P_a φ` as `~O_a ~φ`. Idempotent.
pub fn normalize(f: &Formula, mode: PermissionMode) -> Formula {
    let n = |g: &Formula| Box::new(normalize(g, mode));
    match f {
        Formula::Atom { .. } | Formula::RuleAtom(_) => f.clone(),
        Formula::Not(g) => Formula::negate(normalize(g, mode)),
        Formula::And(l, r) => Formula::And(n(l), n(r)),
        Formula::Or(l, r) => Formula::Or(n(l), n(r)),
        Formula::Implies(l, r) => Formula::Implies(n(l), n(r)),
        Formula::Necessity(g) => Formula::Necessity(n(g)),
        Formula::Possibility(g) => Formula::negate(Formula::Necessity(Box::new(Formula::negate(
            normalize(g, mode),
        )))),
        Formula::Know { agent, body } => Formula::Know {
            agent: agent.clone(),
            body: n(body),
        },
        Formula::Oblig {
            agent,
            toward,
            body,
        } => Formula::Oblig {
            agent: agent.clone(),
            toward: toward.clone(),
            body: n(body),
        },
        Formula::Perm { agent, body } => match mode {
            PermissionMode::Strong => Formula::Perm {
                agent: agent.clone(),
                body: n(body),
            },
            PermissionMode::Weak => Formula::negate(Formula::Oblig {
                agent: agent.clone(),
                toward: None,
                body: Box::new(Formula::negate(normalize(body, mode))),
            }),
        },
        Formula::Stit { agent, body } => Formula::Stit {
            agent: agent.clone(),
            body: n(body),
        },
        Formula::Right { agent, body } => Formula::Right {
            agent: agent.clone(),
            body: n(body),
        },
        Formula::Power {
            agent,
            toward,
            body,
        } => Formula::Power {
            agent: agent.clone(),
            toward: toward.clone(),
            body: n(body),
        },
    }
}

fn is_negation_of(f: &Formula, g: &Formula) -> bool {
    matches!(f, Formula::Not(inner) if inner.as_ref() == g)
}

/// `[](φ -> ~ψ)` against `~[]~(φ & ψ)`, in either conjunct order.
fn dual_collision(f: &Formula, g: &Formula) -> bool {
    let Formula::Necessity(imp) = f else {
        return false;
    };
    let Formula::Implies(ante, cons) = imp.as_ref() else {
        return false;
    };
    let Formula::Not(psi) = cons.as_ref() else {
        return false;
    };
    let Formula::Not(nec) = g else {
        return false;
    };
    let Formula::Necessity(neg) = nec.as_ref() else {
        return false;
    };
    let Formula::Not(conj) = neg.as_ref() else {
        return false;
    };
    let Formula::And(l, r) = conj.as_ref() else {
        return false;
    };
    (l == ante && r == psi) || (l == psi && r == ante)
}

fn deontic_conflict(f: &Formula, g: &Formula) -> bool {
    match (f, g) {
        (
            Formula::Oblig {
                agent: a1,
                toward: t1,
                body: b1,
            },
            Formula::Oblig {
                agent: a2,
                toward: t2,
                body: b2,
            },
        ) => a1 == a2 && t1 == t2 && (is_negation_of(b1, b2) || is_negation_of(b2, b1)),
        _ => false,
    }
}

/// Contrariness between two normalized formulas. Symmetric.
///
/// Covers syntactic negation, `O φ` against `O ~φ` for the same bearer and
/// direction, the necessity/possibility collision, and any explicitly
/// declared pair.
pub fn contrary(f: &Formula, g: &Formula, declared: &[(Formula, Formula)]) -> bool {
    is_negation_of(f, g)
        || is_negation_of(g, f)
        || deontic_conflict(f, g)
        || dual_collision(f, g)
        || dual_collision(g, f)
        || declared
            .iter()
            .any(|(a, b)| (a == f && b == g) || (a == g && b == f))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_formula(f, self)
    }
}

/// Renders `f` in the concrete syntax accepted by [`parse`].
pub fn print(f: &Formula) -> String {
    f.to_string()
}
