//! Lexer and recursive-descent parser for the concrete formula and program
//! syntax.
//!
//! Formula grammar (loosest to tightest): `->` is right-associative and binds
//! loosest, then `|`, then `&`, then the unary prefixes `~`, `K`, `Kh`,
//! `[π]`, `<π>`, `[[π]]`. Program grammar: `+` binds loosest, then `;`, then
//! postfix `*`; both binary operators are left-associative. `T`, `F`, `K`,
//! and `Kh` are reserved words; identifiers are `[A-Za-z][A-Za-z0-9_]*`.

use super::{Formula, Program};
use thiserror::Error;

/// A syntax error with 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Know,
    Khat,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LBrack,
    RBrack,
    LLBrack,
    RRBrack,
    Lt,
    Gt,
    Question,
    Semi,
    Plus,
    Star,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::True => "`T`".into(),
            Tok::False => "`F`".into(),
            Tok::Know => "`K`".into(),
            Tok::Khat => "`Kh`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LLBrack => "`[[`".into(),
            Tok::RRBrack => "`]]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Question => "`?`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Star => "`*`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

type CharStream<'a> = std::iter::Peekable<std::str::Chars<'a>>;

fn bump(chars: &mut CharStream<'_>, line: &mut usize, col: &mut usize) -> char {
    let c = chars.next().unwrap();
    if c == '\n' {
        *line += 1;
        *col = 1;
    } else {
        *col += 1;
    }
    c
}

fn lex(text: &str) -> Result<(Vec<Spanned>, (usize, usize)), ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        if c.is_whitespace() {
            bump(&mut chars, &mut line, &mut col);
            continue;
        }
        let tok = match c {
            'A'..='Z' | 'a'..='z' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(bump(&mut chars, &mut line, &mut col));
                    } else {
                        break;
                    }
                }
                match ident.as_str() {
                    "T" => Tok::True,
                    "F" => Tok::False,
                    "K" => Tok::Know,
                    "Kh" => Tok::Khat,
                    _ => Tok::Ident(ident),
                }
            }
            '~' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Tilde
            }
            '&' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Amp
            }
            '|' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Pipe
            }
            '-' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars, &mut line, &mut col);
                    Tok::Arrow
                } else {
                    return Err(ParseError {
                        line: tline,
                        col: tcol,
                        message: "expected `->` after `-`".into(),
                    });
                }
            }
            '[' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'[') {
                    bump(&mut chars, &mut line, &mut col);
                    Tok::LLBrack
                } else {
                    Tok::LBrack
                }
            }
            ']' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&']') {
                    bump(&mut chars, &mut line, &mut col);
                    Tok::RRBrack
                } else {
                    Tok::RBrack
                }
            }
            '<' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Lt
            }
            '>' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Gt
            }
            '?' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Question
            }
            ';' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Semi
            }
            '+' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Plus
            }
            '*' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Star
            }
            '(' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::RParen
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        toks.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok((toks, (line, col)))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|s| &s.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or(self.eof)
    }

    fn error(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        let found = match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".into(),
        };
        ParseError {
            line,
            col,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            // Right-associative: p -> q -> r is p -> (q -> r).
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let r = self.conjunction()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let r = self.unary()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Know) => {
                self.pos += 1;
                Ok(Formula::know(self.unary()?))
            }
            Some(Tok::Khat) => {
                self.pos += 1;
                Ok(Formula::khat(self.unary()?))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let p = self.program()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::boxp(p, self.unary()?))
            }
            Some(Tok::LLBrack) => {
                self.pos += 1;
                let p = self.program()?;
                self.expect(Tok::RRBrack)?;
                Ok(Formula::box_diamond(p, self.unary()?))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let p = self.program()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::diamond(p, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::bot())
            }
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(name)) = self.next().cloned() else {
                    unreachable!()
                };
                Ok(Formula::Prop(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => Err(self.error("a formula")),
        }
    }

    // ---- programs ----

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut p = self.sequence()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            let r = self.sequence()?;
            p = Program::choice(p, r);
        }
        Ok(p)
    }

    fn sequence(&mut self) -> Result<Program, ParseError> {
        let mut p = self.postfix()?;
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let r = self.postfix()?;
            p = Program::seq(p, r);
        }
        Ok(p)
    }

    fn postfix(&mut self) -> Result<Program, ParseError> {
        let mut p = self.primary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            p = Program::star(p);
        }
        Ok(p)
    }

    fn primary(&mut self) -> Result<Program, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(name)) = self.next().cloned() else {
                    unreachable!()
                };
                Ok(Program::Atom(name))
            }
            Some(Tok::Question) => {
                self.pos += 1;
                // The test body is a full formula; it naturally stops at the
                // first program-level token (`;`, `+`, `*`, `]`, `)`, …).
                Ok(Program::test(self.formula()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let p = self.program()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            _ => Err(self.error("a program")),
        }
    }
}

fn parser_for(text: &str) -> Result<Parser, ParseError> {
    let (toks, eof) = lex(text)?;
    Ok(Parser { toks, pos: 0, eof })
}

/// Parses a formula from concrete syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = parser_for(text)?;
    let f = p.formula()?;
    if p.peek().is_some() {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

/// Parses a program from concrete syntax.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = parser_for(text)?;
    let prog = p.program()?;
    if p.peek().is_some() {
        return Err(p.error("end of input"));
    }
    Ok(prog)
}
