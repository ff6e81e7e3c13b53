//! Concrete syntax.
//!
//! ```text
//! formula := imp
//! imp     := or ( ("->" | "<->") imp )?          right-associative
//! or      := and ( "||" and )*
//! and     := bin ( "&&" bin )*
//! bin     := unary ( ("U" | "R" | "W") bin )?    right-associative
//! unary   := ("!" | "X" | "F" | "G") unary | atom
//! atom    := "true" | "false" | ident | "(" formula ")"
//! ```
//!
//! `a <-> b` is sugar for `(a -> b) && (b -> a)`.

use std::fmt;

use thiserror::Error;

use super::formula::{Formula, Prop};
use super::vocab::Vocabulary;

const KEYWORDS: &[&str] = &["true", "false", "X", "F", "G", "U", "R", "W"];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown proposition `{name}`")]
    UnknownProposition {
        line: usize,
        column: usize,
        name: String,
    },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::UnknownProposition { line, .. } => *line,
        }
    }

    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. }
            | ParseError::UnknownProposition { column, .. } => *column,
        }
    }

    /// Shift the reported location, for formulas embedded in a larger file.
    pub fn offset(self, line: usize, column: usize) -> Self {
        let shift = |l: usize, c: usize| {
            if l == 1 {
                (line, column + c - 1)
            } else {
                (line + l - 1, c)
            }
        };
        match self {
            ParseError::Syntax {
                line: l,
                column: c,
                message,
            } => {
                let (line, column) = shift(l, c);
                ParseError::Syntax {
                    line,
                    column,
                    message,
                }
            }
            ParseError::UnknownProposition {
                line: l,
                column: c,
                name,
            } => {
                let (line, column) = shift(l, c);
                ParseError::UnknownProposition { line, column, name }
            }
        }
    }
}

/// Parse with the vocabulary inferred from the atoms encountered.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, None)?.run()
}

/// Parse, rejecting atoms that are not in `vocab`.
pub fn parse_with_vocab(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    Parser::new(text, Some(vocab))?.run()
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::AndAnd => f.write_str("`&&`"),
            Tok::OrOr => f.write_str("`||`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[start..j].iter().collect()), j - start)
        } else if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("&&") {
            (Tok::AndAnd, 2)
        } else if rest.starts_with("||") {
            (Tok::OrOr, 2)
        } else if c == '!' {
            (Tok::Bang, 1)
        } else if c == '(' {
            (Tok::LParen, 1)
        } else if c == ')' {
            (Tok::RParen, 1)
        } else {
            return Err(ParseError::Syntax {
                line: l0,
                column: c0,
                message: format!("unexpected character `{c}`"),
            });
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
        i += len;
        column += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'v> {
    toks: Vec<Spanned>,
    pos: usize,
    vocab: Option<&'v Vocabulary>,
}

impl<'v> Parser<'v> {
    fn new(text: &str, vocab: Option<&'v Vocabulary>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            vocab,
        })
    }

    fn run(mut self) -> Result<Formula, ParseError> {
        let f = self.implication()?;
        match self.peek() {
            Tok::Eof => Ok(f),
            other => Err(self.error(format!("expected end of input, found {other}"))),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            message,
        }
    }

    fn is_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                Ok(Formula::implies(lhs, self.implication()?))
            }
            Tok::Iff => {
                self.bump();
                let rhs = self.implication()?;
                Ok(Formula::and(
                    Formula::implies(lhs.clone(), rhs.clone()),
                    Formula::implies(rhs, lhs),
                ))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            lhs = Formula::and(lhs, self.binary_temporal()?);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        let ctor: fn(Formula, Formula) -> Formula = if self.is_ident("U") {
            Formula::until
        } else if self.is_ident("R") {
            Formula::release
        } else if self.is_ident("W") {
            Formula::weak_until
        } else {
            return Ok(lhs);
        };
        self.bump();
        Ok(ctor(lhs, self.binary_temporal()?))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let ctor: fn(Formula) -> Formula = if *self.peek() == Tok::Bang {
            Formula::not
        } else if self.is_ident("X") {
            Formula::next
        } else if self.is_ident("F") {
            Formula::eventually
        } else if self.is_ident("G") {
            Formula::always
        } else {
            return self.primary();
        };
        self.bump();
        Ok(ctor(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(format!("expected `)`, found {}", self.peek())));
                }
                self.bump();
                Ok(f)
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if !is_keyword(&name) => {
                let at = self.bump();
                if let Some(vocab) = self.vocab {
                    if !vocab.contains_name(&name) {
                        return Err(ParseError::UnknownProposition {
                            line: at.line,
                            column: at.column,
                            name,
                        });
                    }
                }
                Ok(Formula::Atom(Prop::new(&name)))
            }
            other => Err(self.error(format!("expected a formula, found {other}"))),
        }
    }
}

/// Fully parenthesised rendering: every compound operand is wrapped, so the
/// output re-parses to the identical tree regardless of precedence.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(g: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match g {
                Formula::True | Formula::False | Formula::Atom(_) => write!(f, "{g}"),
                _ => write!(f, "({g})"),
            }
        }
        let unary = |op: &str, a: &Formula, f: &mut fmt::Formatter<'_>| {
            write!(f, "{op} ")?;
            operand(a, f)
        };
        let binary = |op: &str, a: &Formula, b: &Formula, f: &mut fmt::Formatter<'_>| {
            operand(a, f)?;
            write!(f, " {op} ")?;
            operand(b, f)
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Not(a) => unary("!", a, f),
            Formula::Next(a) => unary("X", a, f),
            Formula::Eventually(a) => unary("F", a, f),
            Formula::Always(a) => unary("G", a, f),
            Formula::And(a, b) => binary("&&", a, b, f),
            Formula::Or(a, b) => binary("||", a, b, f),
            Formula::Implies(a, b) => binary("->", a, b, f),
            Formula::Until(a, b) => binary("U", a, b, f),
            Formula::Release(a, b) => binary("R", a, b, f),
            Formula::WeakUntil(a, b) => binary("W", a, b, f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn parses_goal_shapes() {
        assert_eq!(
            parse("G(h -> X p)").unwrap(),
            Formula::always(Formula::implies(a("h"), Formula::next(a("p"))))
        );
        assert_eq!(parse("true").unwrap(), Formula::True);
        assert_eq!(
            parse("F(h && m)").unwrap(),
            Formula::eventually(Formula::and(a("h"), a("m")))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        // unary binds tighter than U, U tighter than &&, && tighter than ||
        assert_eq!(
            parse("X a U b && c || d").unwrap(),
            Formula::or(
                Formula::and(Formula::until(Formula::next(a("a")), a("b")), a("c")),
                a("d")
            )
        );
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            Formula::implies(a("a"), Formula::implies(a("b"), a("c")))
        );
        assert_eq!(
            parse("a U b R c").unwrap(),
            Formula::until(a("a"), Formula::release(a("b"), a("c")))
        );
        assert_eq!(
            parse("a && b && c").unwrap(),
            Formula::and(Formula::and(a("a"), a("b")), a("c"))
        );
    }

    #[test]
    fn iff_desugars() {
        assert_eq!(
            parse("a <-> b").unwrap(),
            Formula::and(
                Formula::implies(a("a"), a("b")),
                Formula::implies(a("b"), a("a"))
            )
        );
    }

    #[test]
    fn renders_fully_parenthesised() {
        let f = Formula::eventually(Formula::and(a("h"), a("m")));
        assert_eq!(f.to_string(), "F (h && m)");
        assert_eq!(Formula::True.to_string(), "true");
        let g2 = Formula::always(Formula::implies(
            a("m"),
            Formula::next(Formula::not(a("p"))),
        ));
        assert_eq!(g2.to_string(), "G (m -> (X (! p)))");
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = parse("G(h ->\n  X && p)").unwrap_err();
        assert_eq!((err.line(), err.column()), (2, 5));
        let err = parse("(a && b").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let err = parse("a $ b").unwrap_err();
        assert_eq!(err.column(), 3);
        assert!(parse("").is_err());
        assert!(parse("a b").is_err());
    }

    #[test]
    fn unknown_proposition_with_fixed_vocab() {
        let vocab = Vocabulary::new(["h", "m"]).unwrap();
        assert!(parse_with_vocab("h && m", &vocab).is_ok());
        let err = parse_with_vocab("h && q", &vocab).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownProposition {
                line: 1,
                column: 6,
                name: "q".into()
            }
        );
    }

    #[test]
    fn offset_shifts_first_line_columns() {
        let err = parse("a &&").unwrap_err().offset(7, 10);
        assert_eq!((err.line(), err.column()), (7, 14));
    }
}
