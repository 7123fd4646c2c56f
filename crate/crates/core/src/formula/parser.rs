//! Lexer and recursive-descent parser for the concrete formula syntax.
//!
//! Precedence from loosest to tightest: `->` (right-assoc), `|`, `&`, then
//! `~` and modal prefixes. Modal prefixes take a single unary operand.

use std::fmt;

use super::{normalize, AgentId, Formula, PermissionMode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown operator `{op}` at byte {offset}")]
    UnknownOperator { offset: usize, op: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownOperator { offset, .. } => {
                *offset
            }
        }
    }

    /// The error without its position, for callers that report their own.
    pub fn message(&self) -> String {
        match self {
            ParseError::Syntax {
                expected, found, ..
            } => format!("expected {}, found {found}", expected.join(" or ")),
            ParseError::UnknownOperator { op, .. } => format!("unknown operator `{op}`"),
        }
    }

    /// Shifts the reported offset, for parsers run over a slice of a larger input.
    pub fn shifted(self, by: usize) -> Self {
        match self {
            ParseError::Syntax {
                offset,
                expected,
                found,
            } => ParseError::Syntax {
                offset: offset + by,
                expected,
                found,
            },
            ParseError::UnknownOperator { offset, op } => ParseError::UnknownOperator {
                offset: offset + by,
                op,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Modal {
    Necessity,
    Possibility,
    Know(AgentId),
    Oblig(Option<AgentId>, Option<AgentId>),
    Perm(Option<AgentId>),
    Stit(AgentId),
    Right(AgentId),
    Power(AgentId, AgentId),
}

impl Modal {
    fn apply(self, body: Formula) -> Formula {
        let body = Box::new(body);
        match self {
            Modal::Necessity => Formula::Necessity(body),
            Modal::Possibility => Formula::Possibility(body),
            Modal::Know(agent) => Formula::Know { agent, body },
            Modal::Oblig(agent, toward) => Formula::Oblig {
                agent,
                toward,
                body,
            },
            Modal::Perm(agent) => Formula::Perm { agent, body },
            Modal::Stit(agent) => Formula::Stit { agent, body },
            Modal::Right(agent) => Formula::Right { agent, body },
            Modal::Power(agent, toward) => Formula::Power {
                agent,
                toward,
                body,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Modal(Modal),
    RuleAtom(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    LParen,
    RParen,
    Comma,
    Semicolon,
    /// `|-`
    StrictArrow,
    /// `|~`
    DefeasibleArrow,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Modal(_) => f.write_str("modal operator"),
            Token::RuleAtom(s) => write!(f, "`@{s}`"),
            Token::Tilde => f.write_str("`~`"),
            Token::Amp => f.write_str("`&`"),
            Token::Bar => f.write_str("`|`"),
            Token::Arrow => f.write_str("`->`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Semicolon => f.write_str("`;`"),
            Token::StrictArrow => f.write_str("`|-`"),
            Token::DefeasibleArrow => f.write_str("`|~`"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek_char() {
            Some(c) if is_ident_start(c) => self.pos += 1,
            _ => return None,
        }
        while let Some(c) = self.peek_char() {
            if is_ident_char(c) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(self.src[start..self.pos].to_string())
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek_char() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// `{a}` or `{a,b}` after a modal prefix such as `O_`.
    fn braced_agents(&mut self, op_start: usize) -> Result<Vec<AgentId>, ParseError> {
        let mut agents = Vec::new();
        loop {
            self.skip_ws();
            match self.ident() {
                Some(name) => agents.push(AgentId::new(name)),
                None => return Err(self.bad_operator(op_start)),
            }
            self.skip_ws();
            if self.eat('}') {
                return Ok(agents);
            }
            if !self.eat(',') {
                return Err(self.bad_operator(op_start));
            }
        }
    }

    fn bad_operator(&self, start: usize) -> ParseError {
        let end = (self.pos + 1).min(self.src.len());
        let end = (end..=self.src.len())
            .find(|&i| self.src.is_char_boundary(i))
            .unwrap_or(self.src.len());
        ParseError::UnknownOperator {
            offset: start,
            op: self.src[start..end].to_string(),
        }
    }

    fn modal_from_ident(&mut self, word: &str, start: usize) -> Result<Option<Modal>, ParseError> {
        // Bare O and P are the impersonal operators.
        match word {
            "O" => return Ok(Some(Modal::Oblig(None, None))),
            "P" => return Ok(Some(Modal::Perm(None))),
            _ => {}
        }
        let (kind, rest) = if let Some(rest) = word.strip_prefix("Power_") {
            ("Power", rest)
        } else if let Some(rest) = word.strip_prefix("K_") {
            ("K", rest)
        } else if let Some(rest) = word.strip_prefix("O_") {
            ("O", rest)
        } else if let Some(rest) = word.strip_prefix("P_") {
            ("P", rest)
        } else if let Some(rest) = word.strip_prefix("R_") {
            ("R", rest)
        } else {
            return Ok(None);
        };
        let agents = if rest.is_empty() {
            if !self.eat('{') {
                return Err(self.bad_operator(start));
            }
            self.braced_agents(start)?
        } else {
            vec![AgentId::new(rest)]
        };
        let modal = match (kind, agents.as_slice()) {
            ("K", [a]) => Modal::Know(a.clone()),
            ("O", [a]) => Modal::Oblig(Some(a.clone()), None),
            ("O", [a, b]) => Modal::Oblig(Some(a.clone()), Some(b.clone())),
            ("P", [a]) => Modal::Perm(Some(a.clone())),
            ("R", [a]) => Modal::Right(a.clone()),
            ("Power", [a, b]) => Modal::Power(a.clone(), b.clone()),
            _ => {
                return Err(ParseError::UnknownOperator {
                    offset: start,
                    op: self.src[start..self.pos].to_string(),
                })
            }
        };
        Ok(Some(modal))
    }

    fn tokenize(mut self) -> Result<Vec<(Token, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let Some(c) = self.peek_char() else {
                break;
            };
            let tok = match c {
                '~' => {
                    self.pos += 1;
                    Token::Tilde
                }
                '&' => {
                    self.pos += 1;
                    Token::Amp
                }
                '|' => {
                    self.pos += 1;
                    if self.eat('-') {
                        Token::StrictArrow
                    } else if self.eat('~') {
                        Token::DefeasibleArrow
                    } else {
                        Token::Bar
                    }
                }
                '-' => {
                    self.pos += 1;
                    if !self.eat('>') {
                        return Err(self.bad_operator(start));
                    }
                    Token::Arrow
                }
                '(' => {
                    self.pos += 1;
                    Token::LParen
                }
                ')' => {
                    self.pos += 1;
                    Token::RParen
                }
                ',' => {
                    self.pos += 1;
                    Token::Comma
                }
                ';' => {
                    self.pos += 1;
                    Token::Semicolon
                }
                '<' => {
                    self.pos += 1;
                    if !self.eat('>') {
                        return Err(self.bad_operator(start));
                    }
                    Token::Modal(Modal::Possibility)
                }
                '[' => {
                    self.pos += 1;
                    self.skip_ws();
                    if self.eat(']') {
                        Token::Modal(Modal::Necessity)
                    } else {
                        let Some(agent) = self.ident() else {
                            return Err(self.bad_operator(start));
                        };
                        self.skip_ws();
                        if !self.eat(']') {
                            return Err(self.bad_operator(start));
                        }
                        Token::Modal(Modal::Stit(AgentId::new(agent)))
                    }
                }
                '@' => {
                    self.pos += 1;
                    let Some(mut name) = self.ident() else {
                        return Err(self.bad_operator(start));
                    };
                    // generated rules are named `<scheme>#<k>`
                    if self.peek_char() == Some('#') {
                        let hash = self.pos;
                        self.pos += 1;
                        let digits_start = self.pos;
                        while matches!(self.peek_char(), Some(d) if d.is_ascii_digit()) {
                            self.pos += 1;
                        }
                        if self.pos == digits_start {
                            return Err(self.bad_operator(hash));
                        }
                        name.push_str(&self.src[hash..self.pos]);
                    }
                    Token::RuleAtom(name)
                }
                c if is_ident_start(c) => {
                    let word = self.ident().expect("identifier start checked");
                    match self.modal_from_ident(&word, start)? {
                        Some(m) => Token::Modal(m),
                        None => Token::Ident(word),
                    }
                }
                _ => return Err(self.bad_operator(start)),
            };
            out.push((tok, start));
        }
        Ok(out)
    }
}

/// Token-level parser. Public so that line-oriented formats can parse a
/// formula and then continue with their own separators.
pub struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        let tokens = Lexer { src, pos: 0 }.tokenize()?;
        Ok(Parser {
            tokens,
            pos: 0,
            end: src.len(),
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    pub fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn next_token(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .peek()
                .map_or_else(|| "end of input".to_string(), |t| t.to_string()),
        }
    }

    pub fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let right = self.formula()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(&Token::Bar) {
            self.pos += 1;
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Token::Amp) {
            self.pos += 1;
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        const EXPECTED: &[&str] = &["`~`", "modal operator", "`(`", "atom", "`@rule`"];
        match self.next_token() {
            Some(Token::Tilde) => Ok(Formula::not(self.unary()?)),
            Some(Token::Modal(m)) => Ok(m.apply(self.unary()?)),
            Some(Token::LParen) => {
                let f = self.formula()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(f)
            }
            Some(Token::RuleAtom(name)) => Ok(Formula::RuleAtom(name)),
            Some(Token::Ident(name)) => {
                let mut args = Vec::new();
                if self.peek() == Some(&Token::LParen) {
                    self.pos += 1;
                    loop {
                        match self.next_token() {
                            Some(Token::Ident(arg)) => args.push(arg),
                            _ => {
                                self.pos -= 1;
                                return Err(self.error(&["identifier"]));
                            }
                        }
                        match self.next_token() {
                            Some(Token::Comma) => continue,
                            Some(Token::RParen) => break,
                            _ => {
                                self.pos -= 1;
                                return Err(self.error(&["`,`", "`)`"]));
                            }
                        }
                    }
                }
                Ok(Formula::Atom { name, args })
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.error(EXPECTED))
            }
            None => Err(self.error(EXPECTED)),
        }
    }
}

/// Parses without normalizing.
pub fn parse_raw(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_with_mode(text: &str, mode: PermissionMode) -> Result<Formula, ParseError> {
    parse_raw(text).map(|f| normalize(&f, mode))
}

/// Parses and normalizes with permission as a primitive.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with_mode(text, PermissionMode::Strong)
}
