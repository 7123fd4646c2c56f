//! Hohfeld's two squares of normative positions.
//!
//! ```text
//!   claim-right ── freedom        power ──── immunity
//!        │    ╲  ╱    │             │    ╲  ╱    │
//!        │     ╳      │             │     ╳      │
//!        │    ╱  ╲    │             │    ╱  ╲    │
//!      duty ──── no-claim       liability ── disability
//! ```
//!
//! Verticals are correlatives (same relation seen from the other agent),
//! diagonals are opposites (same agent, negated position).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formula::{AgentId, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionKind {
    ClaimRight,
    Duty,
    Freedom,
    NoClaim,
    Power,
    Liability,
    Immunity,
    Disability,
}

impl PositionKind {
    pub const ALL: [PositionKind; 8] = [
        PositionKind::ClaimRight,
        PositionKind::Duty,
        PositionKind::Freedom,
        PositionKind::NoClaim,
        PositionKind::Power,
        PositionKind::Liability,
        PositionKind::Immunity,
        PositionKind::Disability,
    ];

    /// 0 for the first square (claim-right .. no-claim), 1 for the second.
    pub fn square(self) -> u8 {
        match self {
            PositionKind::ClaimRight
            | PositionKind::Duty
            | PositionKind::Freedom
            | PositionKind::NoClaim => 0,
            _ => 1,
        }
    }

    pub fn correlative(self) -> Self {
        use PositionKind::*;
        match self {
            ClaimRight => Duty,
            Duty => ClaimRight,
            Freedom => NoClaim,
            NoClaim => Freedom,
            Power => Liability,
            Liability => Power,
            Immunity => Disability,
            Disability => Immunity,
        }
    }

    pub fn opposite(self) -> Self {
        use PositionKind::*;
        match self {
            ClaimRight => NoClaim,
            NoClaim => ClaimRight,
            Duty => Freedom,
            Freedom => Duty,
            Power => Disability,
            Disability => Power,
            Liability => Immunity,
            Immunity => Liability,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PositionKind::ClaimRight => "claim_right",
            PositionKind::Duty => "duty",
            PositionKind::Freedom => "freedom",
            PositionKind::NoClaim => "no_claim",
            PositionKind::Power => "power",
            PositionKind::Liability => "liability",
            PositionKind::Immunity => "immunity",
            PositionKind::Disability => "disability",
        }
    }
}

impl fmt::Display for PositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PositionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PositionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown position kind `{s}`"))
    }
}

/// `holder` stands in position `kind` toward `counterparty` about `content`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormativePosition {
    pub kind: PositionKind,
    pub holder: AgentId,
    pub counterparty: AgentId,
    pub content: Formula,
}

impl NormativePosition {
    pub fn new(
        kind: PositionKind,
        holder: impl Into<AgentId>,
        counterparty: impl Into<AgentId>,
        content: Formula,
    ) -> Self {
        NormativePosition {
            kind,
            holder: holder.into(),
            counterparty: counterparty.into(),
            content,
        }
    }

    /// The other end of the same relation.
    pub fn correlative(&self) -> Self {
        NormativePosition {
            kind: self.kind.correlative(),
            holder: self.counterparty.clone(),
            counterparty: self.holder.clone(),
            content: self.content.clone(),
        }
    }

    /// The contradictory position of the same holder.
    pub fn opposite(&self) -> Self {
        NormativePosition {
            kind: self.kind.opposite(),
            holder: self.holder.clone(),
            counterparty: self.counterparty.clone(),
            content: self.content.clone(),
        }
    }

    pub fn to_formula(&self) -> Formula {
        to_formula(self)
    }

    /// Representable but suspicious configurations.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.holder == self.counterparty {
            out.push(format!(
                "{} of `{}` is directed at itself",
                self.kind, self.holder
            ));
        }
        if self.kind == PositionKind::ClaimRight {
            if let Formula::Stit { agent, .. } = &self.content {
                if agent == &self.holder {
                    out.push(format!(
                        "claim_right of `{}` concerns its own action; claim-rights are about another agent's action",
                        self.holder
                    ));
                }
            }
        }
        out
    }
}

impl fmt::Display for NormativePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}, {}): {}",
            self.kind, self.holder, self.counterparty, self.content
        )
    }
}

/// Modal rendering of a position. Correlatives render identically.
pub fn to_formula(p: &NormativePosition) -> Formula {
    let a = p.holder.clone();
    let b = p.counterparty.clone();
    let phi = p.content.clone();
    match p.kind {
        PositionKind::ClaimRight => Formula::directed_oblig(b, a, phi),
        PositionKind::Duty => Formula::directed_oblig(a, b, phi),
        // freedom is the absence of a duty not to
        PositionKind::Freedom => {
            Formula::negate(Formula::directed_oblig(a, b, Formula::negate(phi)))
        }
        PositionKind::NoClaim => {
            Formula::negate(Formula::directed_oblig(b, a, Formula::negate(phi)))
        }
        PositionKind::Power => Formula::power(a, b, phi),
        PositionKind::Liability => Formula::power(b, a, phi),
        PositionKind::Immunity => Formula::negate(Formula::power(b, a, phi)),
        PositionKind::Disability => Formula::negate(Formula::power(a, b, phi)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneralizeError {
    #[error("no duties given")]
    Empty,
    #[error("duties differ in kind, holder or content")]
    NotUniform,
    #[error("`{holder}` has no duty toward {}", .missing.iter().map(|a| format!("`{a}`")).collect::<Vec<_>>().join(", "))]
    IncompleteCover {
        holder: AgentId,
        missing: Vec<AgentId>,
    },
    #[error("counterparty `{0}` is not among the agents")]
    UnknownCounterparty(AgentId),
    #[error("content still mentions agents after removing the holder's action")]
    AgentDependent,
}

fn strip_own_action(f: &Formula, holder: &AgentId) -> Formula {
    match f {
        Formula::Stit { agent, body } if agent == holder => strip_own_action(body, holder),
        Formula::Not(g) => Formula::negate(strip_own_action(g, holder)),
        Formula::And(l, r) => {
            Formula::and(strip_own_action(l, holder), strip_own_action(r, holder))
        }
        Formula::Or(l, r) => Formula::or(strip_own_action(l, holder), strip_own_action(r, holder)),
        Formula::Implies(l, r) => {
            Formula::implies(strip_own_action(l, holder), strip_own_action(r, holder))
        }
        other => other.clone(),
    }
}

/// Collapses directed duties toward every other agent into one undirected
/// obligation of the holder, or into an impersonal obligation on request.
pub fn generalize(
    duties: &[NormativePosition],
    all_agents: &BTreeSet<AgentId>,
    impersonal: bool,
) -> Result<Formula, GeneralizeError> {
    let first = duties.first().ok_or(GeneralizeError::Empty)?;
    let holder = &first.holder;
    let content = &first.content;
    if duties
        .iter()
        .any(|d| d.kind != PositionKind::Duty || &d.holder != holder || &d.content != content)
    {
        return Err(GeneralizeError::NotUniform);
    }
    let covered: BTreeSet<&AgentId> = duties.iter().map(|d| &d.counterparty).collect();
    if let Some(stray) = covered.iter().find(|a| !all_agents.contains(**a)) {
        return Err(GeneralizeError::UnknownCounterparty((*stray).clone()));
    }
    let missing: Vec<AgentId> = all_agents
        .iter()
        .filter(|a| *a != holder && !covered.contains(a))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(GeneralizeError::IncompleteCover {
            holder: holder.clone(),
            missing,
        });
    }
    if impersonal {
        let stripped = strip_own_action(content, holder);
        if !stripped.agents().is_empty() {
            return Err(GeneralizeError::AgentDependent);
        }
        return Ok(Formula::impersonal_oblig(stripped));
    }
    Ok(Formula::oblig(holder.clone(), content.clone()))
}
