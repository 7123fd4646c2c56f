use std::fmt::{self, Write};

use super::Formula;

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

pub(super) fn write_formula(out: &mut impl Write, f: &Formula) -> fmt::Result {
    write_at(out, f, 0)
}

fn write_at(out: &mut impl Write, f: &Formula, ctx: u8) -> fmt::Result {
    let parens = precedence(f) < ctx;
    if parens {
        out.write_char('(')?;
    }
    match f {
        // implication is right-associative, the others associate left
        Formula::Implies(l, r) => {
            write_at(out, l, IMPLIES + 1)?;
            out.write_str(" -> ")?;
            write_at(out, r, IMPLIES)?;
        }
        Formula::Or(l, r) => {
            write_at(out, l, OR)?;
            out.write_str(" | ")?;
            write_at(out, r, OR + 1)?;
        }
        Formula::And(l, r) => {
            write_at(out, l, AND)?;
            out.write_str(" & ")?;
            write_at(out, r, AND + 1)?;
        }
        _ => write_unary(out, f)?,
    }
    if parens {
        out.write_char(')')?;
    }
    Ok(())
}

fn write_unary(out: &mut impl Write, f: &Formula) -> fmt::Result {
    match f {
        Formula::Atom { name, args } => {
            out.write_str(name)?;
            if !args.is_empty() {
                write!(out, "({})", args.join(", "))?;
            }
            Ok(())
        }
        Formula::RuleAtom(name) => write!(out, "@{name}"),
        Formula::Not(g) => {
            out.write_char('~')?;
            write_at(out, g, UNARY)
        }
        Formula::Necessity(g) => write_modal(out, "[]", g),
        Formula::Possibility(g) => write_modal(out, "<>", g),
        Formula::Know { agent, body } => write_modal(out, &format!("K_{agent}"), body),
        Formula::Oblig {
            agent,
            toward,
            body,
        } => {
            let prefix = match (agent, toward) {
                (None, None) => "O".to_string(),
                (Some(a), None) => format!("O_{a}"),
                (Some(a), Some(b)) => format!("O_{{{a},{b}}}"),
                // not well-formed; printed so that parsing reports it
                (None, Some(b)) => format!("O_{{,{b}}}"),
            };
            write_modal(out, &prefix, body)
        }
        Formula::Perm { agent, body } => {
            let prefix = match agent {
                None => "P".to_string(),
                Some(a) => format!("P_{a}"),
            };
            write_modal(out, &prefix, body)
        }
        Formula::Stit { agent, body } => write_modal(out, &format!("[{agent}]"), body),
        Formula::Right { agent, body } => write_modal(out, &format!("R_{agent}"), body),
        Formula::Power {
            agent,
            toward,
            body,
        } => write_modal(out, &format!("Power_{{{agent},{toward}}}"), body),
        Formula::Implies(..) | Formula::Or(..) | Formula::And(..) => write_at(out, f, UNARY),
    }
}

/// A modal prefix is followed by a space when its scope is another modal
/// operator, and by a parenthesised formula otherwise: `P_c K_c(customer)`.
fn write_modal(out: &mut impl Write, prefix: &str, body: &Formula) -> fmt::Result {
    out.write_str(prefix)?;
    if body.is_modal() {
        out.write_char(' ')?;
        write_unary(out, body)
    } else {
        out.write_char('(')?;
        write_at(out, body, 0)?;
        out.write_char(')')
    }
}
