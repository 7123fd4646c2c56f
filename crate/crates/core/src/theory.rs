//! Knowledge bases: premises, rules, contrary declarations and scheme toggles.
//!
//! A theory file is line oriented:
//!
//! ```text
//! AGENTS: d, p
//! PREMISE axiom a1: need_know(p)
//! PREMISE prem b1: ~sue(p, d)
//! RULE strict a4: need_know(p); R_p(tell) |- O_{d,p}(tell)
//! RULE defeasible b4: ~sue(p, d) |~ ~O_{d,p}(tell)
//! CONTRARY: ~alive(f) ~ @c2
//! SCHEME fcp off
//! POSITION claim_right(p, d): [d](tell) axiom
//! MAX_DEPTH: 4
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::formula::{AgentId, Formula, ParseError, Parser, PermissionMode, Token};
use crate::hohfeld::{NormativePosition, PositionKind};

pub const DEFAULT_MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    /// Firm knowledge; cannot be undermined.
    Axiom,
    /// Plausible knowledge.
    Ordinary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Premise {
    pub id: String,
    pub formula: Formula,
    pub strength: Strength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Strict,
    Defeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Fcp,
    Owp,
    WeakClosure,
    KTruth,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Fcp,
        Scheme::Owp,
        Scheme::WeakClosure,
        Scheme::KTruth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Fcp => "fcp",
            Scheme::Owp => "owp",
            Scheme::WeakClosure => "weak_closure",
            Scheme::KTruth => "k_truth",
        }
    }

    fn from_name(s: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub antecedents: Vec<Formula>,
    pub consequent: Formula,
    pub kind: RuleKind,
    /// The scheme that generated this rule, if any.
    pub origin: Option<Scheme>,
}

impl Rule {
    pub fn is_defeasible(&self) -> bool {
        self.kind == RuleKind::Defeasible
    }

    fn signature(&self) -> (RuleKind, &[Formula], &Formula) {
        (self.kind, &self.antecedents, &self.consequent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schemes {
    pub fcp: bool,
    pub owp: bool,
    pub weak_closure: bool,
    pub k_truth: bool,
}

impl Default for Schemes {
    fn default() -> Self {
        Schemes {
            fcp: true,
            owp: true,
            weak_closure: false,
            k_truth: false,
        }
    }
}

impl Schemes {
    pub fn none() -> Self {
        Schemes {
            fcp: false,
            owp: false,
            weak_closure: false,
            k_truth: false,
        }
    }

    pub fn enabled(&self, s: Scheme) -> bool {
        match s {
            Scheme::Fcp => self.fcp,
            Scheme::Owp => self.owp,
            Scheme::WeakClosure => self.weak_closure,
            Scheme::KTruth => self.k_truth,
        }
    }

    fn set(&mut self, s: Scheme, on: bool) {
        match s {
            Scheme::Fcp => self.fcp = on,
            Scheme::Owp => self.owp = on,
            Scheme::WeakClosure => self.weak_closure = on,
            Scheme::KTruth => self.k_truth = on,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub agents: Vec<AgentId>,
    pub premises: Vec<Premise>,
    pub rules: Vec<Rule>,
    pub contraries: Vec<(Formula, Formula)>,
    pub schemes: Schemes,
    pub weak_mode: bool,
    pub max_depth: usize,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

impl Default for Theory {
    fn default() -> Self {
        Theory {
            agents: Vec::new(),
            premises: Vec::new(),
            rules: Vec::new(),
            contraries: Vec::new(),
            schemes: Schemes::default(),
            weak_mode: false,
            max_depth: DEFAULT_MAX_DEPTH,
            warnings: Vec::new(),
        }
    }
}

impl Theory {
    pub fn mode(&self) -> PermissionMode {
        PermissionMode::from_weak_flag(self.weak_mode)
    }

    pub fn premise(&self, id: &str) -> Option<&Premise> {
        self.premises.iter().find(|p| p.id == id)
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Contrariness under this theory's declarations.
    pub fn contrary(&self, f: &Formula, g: &Formula) -> bool {
        crate::formula::contrary(f, g, &self.contraries)
    }

    /// Every subformula of every premise and rule, first occurrence first.
    pub fn subformula_set(&self) -> IndexSet<Formula> {
        let mut s = IndexSet::new();
        let roots = self.premises.iter().map(|p| &p.formula).chain(
            self.rules
                .iter()
                .flat_map(|r| r.antecedents.iter().chain(std::iter::once(&r.consequent))),
        );
        for root in roots {
            for f in root.subformulas() {
                if !s.contains(f) {
                    s.insert(f.clone());
                }
            }
        }
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown agent `{agent}`")]
    UnknownAgent {
        line: usize,
        column: usize,
        agent: AgentId,
    },
    #[error("line {line}, column {column}: agent `{agent}` declared twice")]
    DuplicateAgent {
        line: usize,
        column: usize,
        agent: AgentId,
    },
    #[error("line {line}, column {column}: duplicate id `{id}`")]
    DuplicateId {
        line: usize,
        column: usize,
        id: String,
    },
    #[error("line {line}, column {column}: `@{rule}` does not name a defeasible rule")]
    DanglingRuleAtom {
        line: usize,
        column: usize,
        rule: String,
    },
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl LoadError {
    /// `(line, column)`, both 1-based, when the error has a source location.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            LoadError::Syntax { line, column, .. }
            | LoadError::UnknownAgent { line, column, .. }
            | LoadError::DuplicateAgent { line, column, .. }
            | LoadError::DuplicateId { line, column, .. }
            | LoadError::DanglingRuleAtom { line, column, .. } => Some((*line, *column)),
            LoadError::Io { .. } => None,
        }
    }
}

/// Command-line overrides applied on top of the file's own settings.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub weak_mode: Option<bool>,
    pub max_depth: Option<usize>,
}

pub fn load_theory(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Theory, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_theory_with(&text, opts)
}

pub fn parse_theory(text: &str) -> Result<Theory, LoadError> {
    parse_theory_with(text, &LoadOptions::default())
}

pub fn parse_theory_with(text: &str, opts: &LoadOptions) -> Result<Theory, LoadError> {
    let mut loader = Loader::default();
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    for (i, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        loader.line(i + 1, strip_comment(raw))?;
    }
    loader.finish(opts)
}

/// `#` opens a comment at the start of a line or after whitespace, so that
/// generated rule names like `@fcp#1` survive.
fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

/// Where a formula came from, for error reporting after the whole file is read.
#[derive(Debug, Clone, Copy)]
struct Span {
    line: usize,
    column: usize,
}

#[derive(Default)]
struct Loader {
    agents: Vec<(AgentId, Span)>,
    premises: Vec<(Premise, Span)>,
    rules: Vec<(Rule, Vec<Span>)>,
    contraries: Vec<((Formula, Formula), Span, Span)>,
    ids: BTreeSet<String>,
    schemes: Schemes,
    weak_mode: bool,
    max_depth: Option<usize>,
    warnings: Vec<Warning>,
    /// Position endpoints, checked against the agent list at the end.
    position_agents: Vec<(AgentId, Span)>,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn span_at(&self, byte: usize) -> Span {
        Span {
            line: self.line,
            column: self.text[..byte].chars().count() + 1,
        }
    }

    fn err(&self, byte: usize, message: impl Into<String>) -> LoadError {
        let s = self.span_at(byte);
        LoadError::Syntax {
            line: s.line,
            column: s.column,
            message: message.into(),
        }
    }

    fn word(&mut self) -> Option<(&'a str, usize)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((&self.text[start..start + len], start))
    }

    fn expect_word(&mut self, what: &str) -> Result<(&'a str, usize), LoadError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        self.word()
            .ok_or_else(|| self.err(at, format!("expected {what}")))
    }

    fn expect_ident(&mut self, what: &str) -> Result<(&'a str, usize), LoadError> {
        let (w, at) = self.expect_word(what)?;
        if w.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.err(at, format!("expected {what}, found `{w}`")));
        }
        Ok((w, at))
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), LoadError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(self.pos, format!("expected `{c}`")))
        }
    }

    fn rest(&mut self) -> (&'a str, usize) {
        self.skip_ws();
        (&self.text[self.pos..], self.pos)
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn parser(&mut self) -> Result<(Parser, usize), LoadError> {
        let (rest, base) = self.rest();
        let parser = Parser::new(rest).map_err(|e| self.parse_err(e, base))?;
        Ok((parser, base))
    }

    fn parse_err(&self, e: ParseError, base: usize) -> LoadError {
        let e = e.shifted(base);
        let at = e.offset().min(self.text.len());
        self.err(at, e.message())
    }
}

fn on_off(c: &mut Cursor<'_>) -> Result<bool, LoadError> {
    let (w, at) = c.expect_word("`on` or `off`")?;
    match w {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(c.err(at, format!("expected `on` or `off`, found `{w}`"))),
    }
}

const SECTION_HEADERS: [&str; 7] = [
    "PREMISES",
    "RULES",
    "CONTRARIES",
    "SCHEMES",
    "POSITIONS",
    "AXIOMS",
    "KNOWLEDGE",
];

impl Loader {
    fn claim_id(&mut self, id: &str, span: Span) -> Result<(), LoadError> {
        if !self.ids.insert(id.to_string()) {
            return Err(LoadError::DuplicateId {
                line: span.line,
                column: span.column,
                id: id.to_string(),
            });
        }
        Ok(())
    }

    fn line(&mut self, line: usize, text: &str) -> Result<(), LoadError> {
        let mut c = Cursor { text, pos: 0, line };
        let Some((keyword, kw_at)) = c.word() else {
            if c.at_end() {
                return Ok(());
            }
            return Err(c.err(c.pos, "expected a directive"));
        };
        match keyword.to_ascii_uppercase().as_str() {
            "AGENTS" => {
                c.expect(':')?;
                if c.at_end() {
                    return Ok(());
                }
                loop {
                    let (name, at) = c.expect_ident("agent name")?;
                    let agent = AgentId::new(name);
                    let span = c.span_at(at);
                    if self.agents.iter().any(|(a, _)| a == &agent) {
                        return Err(LoadError::DuplicateAgent {
                            line,
                            column: span.column,
                            agent,
                        });
                    }
                    self.agents.push((agent, span));
                    if !c.eat(',') {
                        break;
                    }
                }
                if !c.at_end() {
                    return Err(c.err(c.pos, "expected `,` or end of line"));
                }
            }
            "PREMISE" => {
                let (strength, at) = c.expect_word("`axiom` or `prem`")?;
                let strength = match strength {
                    "axiom" => Strength::Axiom,
                    "prem" => Strength::Ordinary,
                    other => {
                        return Err(
                            c.err(at, format!("expected `axiom` or `prem`, found `{other}`"))
                        )
                    }
                };
                let (id, id_at) = c.expect_ident("premise id")?;
                c.expect(':')?;
                let (mut p, base) = c.parser()?;
                let span = c.span_at(base);
                let formula = p.formula().map_err(|e| c.parse_err(e, base))?;
                p.expect_end().map_err(|e| c.parse_err(e, base))?;
                self.claim_id(id, c.span_at(id_at))?;
                self.premises.push((
                    Premise {
                        id: id.to_string(),
                        formula,
                        strength,
                    },
                    span,
                ));
            }
            "RULE" => {
                let (kind, at) = c.expect_word("`strict` or `defeasible`")?;
                let kind = match kind {
                    "strict" => RuleKind::Strict,
                    "defeasible" => RuleKind::Defeasible,
                    other => {
                        return Err(c.err(
                            at,
                            format!("expected `strict` or `defeasible`, found `{other}`"),
                        ))
                    }
                };
                let (id, id_at) = c.expect_ident("rule id")?;
                c.expect(':')?;
                let (mut p, base) = c.parser()?;
                let mut antecedents = Vec::new();
                let mut spans = Vec::new();
                loop {
                    spans.push(c.span_at(base + p.offset()));
                    antecedents.push(p.formula().map_err(|e| c.parse_err(e, base))?);
                    match p.peek() {
                        Some(Token::Semicolon) => {
                            p.next_token();
                        }
                        _ => break,
                    }
                }
                let arrow_at = p.offset();
                let arrow = p.next_token();
                let expected = match kind {
                    RuleKind::Strict => Token::StrictArrow,
                    RuleKind::Defeasible => Token::DefeasibleArrow,
                };
                if arrow.as_ref() != Some(&expected) {
                    let want = match kind {
                        RuleKind::Strict => "`|-` after the antecedents of a strict rule",
                        RuleKind::Defeasible => "`|~` after the antecedents of a defeasible rule",
                    };
                    return Err(c.err(base + arrow_at, format!("expected {want}")));
                }
                spans.push(c.span_at(base + p.offset()));
                let consequent = p.formula().map_err(|e| c.parse_err(e, base))?;
                p.expect_end().map_err(|e| c.parse_err(e, base))?;
                self.claim_id(id, c.span_at(id_at))?;
                self.rules.push((
                    Rule {
                        id: id.to_string(),
                        antecedents,
                        consequent,
                        kind,
                        origin: None,
                    },
                    spans,
                ));
            }
            "CONTRARY" => {
                c.expect(':')?;
                let (mut p, base) = c.parser()?;
                let left_span = c.span_at(base);
                let left = p.formula().map_err(|e| c.parse_err(e, base))?;
                p.expect(Token::Tilde, "`~` between the two formulas")
                    .map_err(|e| c.parse_err(e, base))?;
                let right_span = c.span_at(base + p.offset());
                let right = p.formula().map_err(|e| c.parse_err(e, base))?;
                p.expect_end().map_err(|e| c.parse_err(e, base))?;
                self.contraries.push(((left, right), left_span, right_span));
            }
            "SCHEME" => {
                let (name, at) = c.expect_word("scheme name")?;
                let on = on_off(&mut c)?;
                if name == "weak_mode" {
                    self.weak_mode = on;
                } else if let Some(s) = Scheme::from_name(name) {
                    self.schemes.set(s, on);
                } else {
                    return Err(c.err(at, format!("unknown scheme `{name}`")));
                }
                if !c.at_end() {
                    return Err(c.err(c.pos, "expected end of line"));
                }
            }
            "POSITION" => self.position(&mut c)?,
            "MAX_DEPTH" => {
                c.expect(':')?;
                let (n, at) = c.expect_word("a positive integer")?;
                match n.parse::<usize>() {
                    Ok(n) if n > 0 => self.max_depth = Some(n),
                    _ => return Err(c.err(at, format!("expected a positive integer, found `{n}`"))),
                }
                if !c.at_end() {
                    return Err(c.err(c.pos, "expected end of line"));
                }
            }
            header if SECTION_HEADERS.contains(&header) => {
                c.eat(':');
                if !c.at_end() {
                    return Err(c.err(c.pos, "expected end of line after section header"));
                }
            }
            _ => return Err(c.err(kw_at, format!("unknown directive `{keyword}`"))),
        }
        Ok(())
    }

    fn position(&mut self, c: &mut Cursor<'_>) -> Result<(), LoadError> {
        let (kind, at) = c.expect_word("position kind")?;
        let kind: PositionKind = kind.parse().map_err(|m: String| c.err(at, m))?;
        c.expect('(')?;
        let (holder, h_at) = c.expect_ident("holder agent")?;
        c.expect(',')?;
        let (counterparty, cp_at) = c.expect_ident("counterparty agent")?;
        c.expect(')')?;
        c.expect(':')?;
        let (mut p, base) = c.parser()?;
        let content = p.formula().map_err(|e| c.parse_err(e, base))?;
        let strength = match p.peek() {
            Some(Token::Ident(w)) if w == "axiom" => Strength::Axiom,
            Some(Token::Ident(w)) if w == "prem" => Strength::Ordinary,
            _ => {
                p.expect_end().map_err(|e| c.parse_err(e, base))?;
                Strength::Axiom
            }
        };
        if !p.at_end() {
            p.next_token();
            p.expect_end().map_err(|e| c.parse_err(e, base))?;
        }
        let position = NormativePosition::new(kind, holder, counterparty, content);
        for w in position.warnings() {
            self.warnings.push(Warning {
                line: c.line,
                message: w,
            });
        }
        self.position_agents
            .push((position.holder.clone(), c.span_at(h_at)));
        self.position_agents
            .push((position.counterparty.clone(), c.span_at(cp_at)));
        let id = format!(
            "pos#{}",
            self.premises
                .iter()
                .filter(|(p, _)| p.id.starts_with("pos#"))
                .count()
                + 1
        );
        let span = c.span_at(base);
        self.ids.insert(id.clone());
        self.premises.push((
            Premise {
                id,
                formula: position.to_formula(),
                strength,
            },
            span,
        ));
        Ok(())
    }

    fn finish(self, opts: &LoadOptions) -> Result<Theory, LoadError> {
        let weak_mode = opts.weak_mode.unwrap_or(self.weak_mode);
        let mode = PermissionMode::from_weak_flag(weak_mode);
        let declared: BTreeSet<&AgentId> = self.agents.iter().map(|(a, _)| a).collect();

        let check_agents = |f: &Formula, span: Span| -> Result<(), LoadError> {
            match f.agents().into_iter().find(|a| !declared.contains(a)) {
                Some(agent) => Err(LoadError::UnknownAgent {
                    line: span.line,
                    column: span.column,
                    agent,
                }),
                None => Ok(()),
            }
        };
        for (agent, span) in &self.position_agents {
            if !declared.contains(agent) {
                return Err(LoadError::UnknownAgent {
                    line: span.line,
                    column: span.column,
                    agent: agent.clone(),
                });
            }
        }
        for (p, span) in &self.premises {
            check_agents(&p.formula, *span)?;
        }
        for (r, spans) in &self.rules {
            for (f, span) in r.antecedents.iter().chain([&r.consequent]).zip(spans) {
                check_agents(f, *span)?;
            }
        }
        for ((l, r), ls, rs) in &self.contraries {
            check_agents(l, *ls)?;
            check_agents(r, *rs)?;
        }

        let theory = Theory {
            agents: self.agents.iter().map(|(a, _)| a.clone()).collect(),
            premises: self
                .premises
                .iter()
                .map(|(p, _)| Premise {
                    formula: p.formula.normalize(mode),
                    ..p.clone()
                })
                .collect(),
            rules: self
                .rules
                .iter()
                .map(|(r, _)| Rule {
                    antecedents: r.antecedents.iter().map(|f| f.normalize(mode)).collect(),
                    consequent: r.consequent.normalize(mode),
                    ..r.clone()
                })
                .collect(),
            contraries: self
                .contraries
                .iter()
                .map(|((l, r), _, _)| (l.normalize(mode), r.normalize(mode)))
                .collect(),
            schemes: self.schemes,
            weak_mode,
            max_depth: opts
                .max_depth
                .or(self.max_depth)
                .unwrap_or(DEFAULT_MAX_DEPTH),
            warnings: self.warnings,
        };

        // Rule atoms may name generated rules, which exist only after instantiation.
        let mut defeasible: Option<BTreeSet<String>> = None;
        let mut names_defeasible = |name: &str| -> bool {
            if theory.rule(name).is_some_and(Rule::is_defeasible) {
                return true;
            }
            if !name.contains('#') {
                return false;
            }
            defeasible
                .get_or_insert_with(|| {
                    instantiate_schemes(&theory)
                        .rules
                        .into_iter()
                        .filter(Rule::is_defeasible)
                        .map(|r| r.id)
                        .collect()
                })
                .contains(name)
        };
        let mut located: Vec<(&Formula, Span)> = Vec::new();
        for ((l, r), ls, rs) in &self.contraries {
            located.push((l, *ls));
            located.push((r, *rs));
        }
        for (p, span) in &self.premises {
            located.push((&p.formula, *span));
        }
        for (r, spans) in &self.rules {
            for (f, span) in r.antecedents.iter().chain([&r.consequent]).zip(spans) {
                located.push((f, *span));
            }
        }
        for (f, span) in located {
            for name in f.rule_atoms() {
                if !names_defeasible(&name) {
                    return Err(LoadError::DanglingRuleAtom {
                        line: span.line,
                        column: span.column,
                        rule: name,
                    });
                }
            }
        }
        Ok(theory)
    }
}

/// Outcome of scheme instantiation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub rounds: usize,
    pub generated: usize,
    /// False when the round cap stopped generation before it settled.
    pub fixpoint: bool,
}

/// Extends `t` with ground instances of the enabled schemes.
pub fn instantiate_schemes(t: &Theory) -> Theory {
    instantiate_schemes_report(t).0
}

pub fn instantiate_schemes_report(t: &Theory) -> (Theory, SchemeReport) {
    let mut out = t.clone();
    let mut report = SchemeReport {
        rounds: 0,
        generated: 0,
        fixpoint: true,
    };
    let mut counters: BTreeMap<Scheme, usize> = BTreeMap::new();
    for r in &out.rules {
        if let Some(s) = r.origin {
            *counters.entry(s).or_default() += 1;
        }
    }
    loop {
        let candidates = fresh_candidates(&out);
        if candidates.is_empty() {
            report.fixpoint = true;
            break;
        }
        if report.rounds == t.max_depth {
            report.fixpoint = false;
            break;
        }
        report.rounds += 1;
        report.generated += candidates.len();
        for (scheme, kind, antecedents, consequent) in candidates {
            let k = counters.entry(scheme).or_default();
            *k += 1;
            out.rules.push(Rule {
                id: format!("{}#{}", scheme.name(), k),
                antecedents,
                consequent,
                kind,
                origin: Some(scheme),
            });
        }
    }
    (out, report)
}

type Candidate = (Scheme, RuleKind, Vec<Formula>, Formula);

/// Scheme instances over the current subformula set that are not yet rules.
fn fresh_candidates(t: &Theory) -> Vec<Candidate> {
    let mode = t.mode();
    let s = t.subformula_set();
    let mut seen: BTreeSet<(RuleKind, Vec<Formula>, Formula)> = t
        .rules
        .iter()
        .map(|r| {
            let (k, a, c) = r.signature();
            (k, a.to_vec(), c.clone())
        })
        .collect();
    let mut out = Vec::new();
    let mut push = |scheme: Scheme, kind: RuleKind, ante: Vec<Formula>, cons: Formula| {
        let cons = cons.normalize(mode);
        if seen.insert((kind, ante.clone(), cons.clone())) {
            out.push((scheme, kind, ante, cons));
        }
    };

    let perms: Vec<(&Formula, Option<&AgentId>, &Formula)> = s
        .iter()
        .filter_map(|f| as_perm(f, mode).map(|(a, body)| (f, a, body)))
        .collect();
    let boxed_implications: Vec<(&Formula, &Formula, &Formula)> = s
        .iter()
        .filter_map(|f| match f {
            Formula::Necessity(inner) => match inner.as_ref() {
                Formula::Implies(l, r) => Some((f, l.as_ref(), r.as_ref())),
                _ => None,
            },
            _ => None,
        })
        .collect();

    if t.schemes.fcp {
        for &(pf, agent, phi) in &perms {
            for &(bf, psi, target) in &boxed_implications {
                if target == phi && psi != phi {
                    push(
                        Scheme::Fcp,
                        RuleKind::Defeasible,
                        vec![pf.clone(), bf.clone()],
                        make_perm(agent, psi.clone()),
                    );
                }
            }
            for conj in modal_conjunctions(&s) {
                let Formula::And(l, r) = conj else { continue };
                if l.as_ref() == phi || r.as_ref() == phi {
                    push(
                        Scheme::Fcp,
                        RuleKind::Defeasible,
                        vec![pf.clone()],
                        make_perm(agent, conj.clone()),
                    );
                }
            }
        }
    }

    if t.schemes.owp {
        let prohibitions: Vec<(&Formula, Option<&AgentId>, &Formula)> = s
            .iter()
            .filter_map(|f| match f {
                Formula::Oblig {
                    agent,
                    toward: None,
                    body,
                } => match body.as_ref() {
                    Formula::Not(psi) => Some((f, agent.as_ref(), psi.as_ref())),
                    _ => None,
                },
                _ => None,
            })
            .collect();
        for &(pf, agent, phi) in &perms {
            for &(of, bearer, psi) in &prohibitions {
                if agent == bearer {
                    push(
                        Scheme::Owp,
                        RuleKind::Defeasible,
                        vec![pf.clone(), of.clone()],
                        Formula::necessity(Formula::implies(
                            phi.clone(),
                            Formula::negate(psi.clone()),
                        )),
                    );
                }
            }
        }
        // What is possible only together with a prohibited outcome is not permitted.
        for &(of, bearer, psi) in &prohibitions {
            if !perms.iter().any(|(_, a, _)| *a == bearer) {
                continue;
            }
            for f in &s {
                let Some(chi) = possibility_body(f) else {
                    continue;
                };
                let Formula::And(l, r) = chi else { continue };
                if l.as_ref() == psi || r.as_ref() == psi {
                    push(
                        Scheme::Owp,
                        RuleKind::Strict,
                        vec![of.clone(), f.clone()],
                        Formula::negate(make_perm(bearer, chi.clone())),
                    );
                }
            }
        }
    }

    if t.schemes.weak_closure {
        for &(pf, agent, phi) in &perms {
            for &(bf, ante, psi) in &boxed_implications {
                if ante == phi && psi != phi {
                    push(
                        Scheme::WeakClosure,
                        RuleKind::Defeasible,
                        vec![pf.clone(), bf.clone()],
                        make_perm(agent, psi.clone()),
                    );
                }
            }
        }
    }

    if t.schemes.k_truth {
        for f in &s {
            if let Formula::Know { body, .. } = f {
                push(
                    Scheme::KTruth,
                    RuleKind::Strict,
                    vec![f.clone()],
                    body.as_ref().clone(),
                );
            }
        }
    }
    out
}

fn make_perm(agent: Option<&AgentId>, body: Formula) -> Formula {
    Formula::Perm {
        agent: agent.cloned(),
        body: Box::new(body),
    }
}

/// `P_a φ`, or its weak-mode spelling `~O_a ~φ`.
fn as_perm(f: &Formula, mode: PermissionMode) -> Option<(Option<&AgentId>, &Formula)> {
    match f {
        Formula::Perm { agent, body } => Some((agent.as_ref(), body)),
        Formula::Not(inner) if mode == PermissionMode::Weak => match inner.as_ref() {
            Formula::Oblig {
                agent,
                toward: None,
                body,
            } => match body.as_ref() {
                Formula::Not(phi) => Some((agent.as_ref(), phi)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// The χ of a normalized `~[]~χ`.
fn possibility_body(f: &Formula) -> Option<&Formula> {
    let Formula::Not(nec) = f else { return None };
    let Formula::Necessity(neg) = nec.as_ref() else {
        return None;
    };
    match neg.as_ref() {
        Formula::Not(chi) => Some(chi),
        _ => None,
    }
}

/// Conjunctions occurring inside the scope of some modal operator.
fn modal_conjunctions(s: &IndexSet<Formula>) -> Vec<&Formula> {
    fn walk<'a>(f: &'a Formula, under_modal: bool, out: &mut Vec<&'a Formula>) {
        if under_modal && matches!(f, Formula::And(..)) && !out.contains(&f) {
            out.push(f);
        }
        let inside = under_modal || f.is_modal();
        for c in f.children() {
            walk(c, inside, out);
        }
    }
    let mut out = Vec::new();
    for f in s {
        walk(f, false, &mut out);
    }
    out
}
