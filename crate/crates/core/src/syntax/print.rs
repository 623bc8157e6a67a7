//! Pretty printer with minimal parentheses.
//!
//! The printer re-sugars the expansions produced by the derived-connective
//! constructors (`F`, `|`, `->`, `<π>`, `Kh`, `[[π]]`), so printed text reads
//! like the input syntax. Re-sugaring is safe because each sugared rendering
//! reparses to exactly the abstract syntax it was printed from.

use super::{Formula, Program};
use std::fmt;

// Formula binding strength, loosest to tightest.
const ARROW: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

// Program binding strength.
const CHOICE: u8 = 1;
const SEQ: u8 = 2;
const STAR: u8 = 3;

/// `F` = `~T`.
fn as_bot(f: &Formula) -> bool {
    matches!(f, Formula::Not(g) if matches!(**g, Formula::Top))
}

/// `Kh φ` = `~K~φ`.
fn as_khat(f: &Formula) -> Option<&Formula> {
    if let Formula::Not(g) = f {
        if let Formula::Know(h) = &**g {
            if let Formula::Not(body) = &**h {
                return Some(body);
            }
        }
    }
    None
}

/// `<π>φ` = `~[π]~φ`.
fn as_diamond(f: &Formula) -> Option<(&Program, &Formula)> {
    if let Formula::Not(g) = f {
        if let Formula::Box(p, h) = &**g {
            if let Formula::Not(body) = &**h {
                return Some((p, body));
            }
        }
    }
    None
}

/// `φ | ψ` = `~(~φ & ~ψ)`.
fn as_or(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(g) = f {
        if let Formula::And(l, r) = &**g {
            if let (Formula::Not(a), Formula::Not(b)) = (&**l, &**r) {
                return Some((a, b));
            }
        }
    }
    None
}

/// `φ -> ψ` = `~φ | ψ`, i.e. an `|` whose left operand is a negation.
fn as_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (l, r) = as_or(f)?;
    if let Formula::Not(body) = l {
        Some((body, r))
    } else {
        None
    }
}

/// `[[π]]φ` = `[π]φ & <π>φ`.
fn as_box_diamond(f: &Formula) -> Option<(&Program, &Formula)> {
    if let Formula::And(l, r) = f {
        if let Formula::Box(p1, f1) = &**l {
            if let Some((p2, f2)) = as_diamond(r) {
                if **p1 == *p2 && **f1 == *f2 {
                    return Some((p1, f1));
                }
            }
        }
    }
    None
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    // Sugared forms first; the tightest-matching pattern wins so nested
    // expansions (e.g. `->` inside `|`) print back as written.
    if as_bot(f) {
        return out.write_str("F");
    }
    if let Some((p, body)) = as_box_diamond(f) {
        return write_prefixed(out, "[[", p, "]]", body, min);
    }
    if let Some(body) = as_khat(f) {
        return write_unary(out, "Kh ", body, min);
    }
    if let Some((p, body)) = as_diamond(f) {
        return write_prefixed(out, "<", p, ">", body, min);
    }
    if let Some((l, r)) = as_implies(f) {
        return write_binary(out, l, " -> ", r, ARROW, OR, ARROW, min);
    }
    if let Some((l, r)) = as_or(f) {
        return write_binary(out, l, " | ", r, OR, OR, AND, min);
    }
    match f {
        Formula::Top => out.write_str("T"),
        Formula::Prop(name) => out.write_str(name),
        Formula::Not(g) => write_unary(out, "~", g, min),
        Formula::And(l, r) => write_binary(out, l, " & ", r, AND, AND, UNARY, min),
        Formula::Know(g) => write_unary(out, "K ", g, min),
        Formula::Box(p, g) => write_prefixed(out, "[", p, "]", g, min),
    }
}

fn write_unary(out: &mut fmt::Formatter<'_>, op: &str, body: &Formula, min: u8) -> fmt::Result {
    // Unary operators always bind at UNARY, which is the tightest level, so
    // they never need parentheses themselves.
    debug_assert!(min <= UNARY);
    out.write_str(op)?;
    write_formula(out, body, UNARY)
}

fn write_prefixed(
    out: &mut fmt::Formatter<'_>,
    open: &str,
    p: &Program,
    close: &str,
    body: &Formula,
    min: u8,
) -> fmt::Result {
    debug_assert!(min <= UNARY);
    out.write_str(open)?;
    write_program(out, p, 0)?;
    out.write_str(close)?;
    write_formula(out, body, UNARY)
}

#[allow(clippy::too_many_arguments)]
fn write_binary(
    out: &mut fmt::Formatter<'_>,
    l: &Formula,
    op: &str,
    r: &Formula,
    level: u8,
    lmin: u8,
    rmin: u8,
    min: u8,
) -> fmt::Result {
    let parens = level < min;
    if parens {
        out.write_str("(")?;
    }
    write_formula(out, l, lmin)?;
    out.write_str(op)?;
    write_formula(out, r, rmin)?;
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}

fn write_program(out: &mut fmt::Formatter<'_>, p: &Program, min: u8) -> fmt::Result {
    match p {
        Program::Atom(name) => out.write_str(name),
        Program::Test(f) => {
            out.write_str("?")?;
            // A test body is a full formula; it extends to the next program
            // operator, so it needs no parentheses of its own.
            write_formula(out, f, 0)
        }
        Program::Seq(l, r) => {
            let parens = SEQ < min;
            if parens {
                out.write_str("(")?;
            }
            write_program(out, l, SEQ)?;
            out.write_str(";")?;
            write_program(out, r, STAR)?;
            if parens {
                out.write_str(")")?;
            }
            Ok(())
        }
        Program::Choice(l, r) => {
            let parens = CHOICE < min;
            if parens {
                out.write_str("(")?;
            }
            write_program(out, l, CHOICE)?;
            out.write_str(" + ")?;
            write_program(out, r, SEQ)?;
            if parens {
                out.write_str(")")?;
            }
            Ok(())
        }
        Program::Star(q) => {
            write_program(out, q, STAR + 1)?;
            out.write_str("*")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_program(f, self, 0)
    }
}
