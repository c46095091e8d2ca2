//! Concrete text syntax, pretty-printing, and the JSON structure format.
//!
//! ```text
//! formula  := iff ; iff := impl ("<->" impl)* ; impl := or ("->" or)*   (right-assoc)
//! or       := and ("|" and)* ; and := unary ("&" unary)*
//! unary    := "~" unary | "[" sexpr "]" unary | "<" sexpr ">" unary | atom
//! atom     := "true" | "false" | ident | "(" formula ")" | "(" sexpr "<=" sexpr ")"
//! sexpr    := sunion ("\" sunion)* ; sunion := sinter ("u" sinter)*
//! sinter   := sleaf ("n" sleaf)*   ; sleaf := "*" | ident | "(" sexpr ")"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{Formula, StandpointExpr};
use crate::semantics::{Structure, StructureError};

/// Byte range into the parsed text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at {}..{}", span.start, span.end)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

#[derive(Debug, Error)]
pub enum StructureParseError {
    #[error("invalid structure JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] StructureError),
}

pub(crate) const RESERVED: [&str; 4] = ["true", "false", "u", "n"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Le,
    Iff,
    Arrow,
    Bar,
    Amp,
    Tilde,
    Backslash,
    Star,
    Comma,
    Bang,
    Question,
    Dot,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::LBracket => "'['",
            Tok::RBracket => "']'",
            Tok::Lt => "'<'",
            Tok::Gt => "'>'",
            Tok::Le => "'<='",
            Tok::Iff => "'<->'",
            Tok::Arrow => "'->'",
            Tok::Bar => "'|'",
            Tok::Amp => "'&'",
            Tok::Tilde => "'~'",
            Tok::Backslash => "'\\'",
            Tok::Star => "'*'",
            Tok::Comma => "','",
            Tok::Bang => "'!'",
            Tok::Question => "'?'",
            Tok::Dot => "'.'",
            Tok::Ident(name) => return write!(f, "identifier '{name}'"),
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                .count();
            (Tok::Ident(rest[..len].to_string()), len)
        } else {
            let tok = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                b'|' => Tok::Bar,
                b'&' => Tok::Amp,
                b'~' => Tok::Tilde,
                b'\\' => Tok::Backslash,
                b'*' => Tok::Star,
                b',' => Tok::Comma,
                b'!' => Tok::Bang,
                b'?' => Tok::Question,
                b'.' => Tok::Dot,
                _ => {
                    let ch = rest.chars().next().unwrap();
                    return Err(ParseError {
                        message: format!("unexpected character '{ch}'"),
                        span: SourceSpan {
                            start,
                            end: start + ch.len_utf8(),
                        },
                    });
                }
            };
            (tok, 1)
        };
        out.push((
            tok,
            SourceSpan {
                start,
                end: start + len,
            },
        ));
        i += len;
    }
    out.push((
        Tok::Eof,
        SourceSpan {
            start: text.len(),
            end: text.len(),
        },
    ));
    Ok(out)
}

/// Cursor over a token vector, shared by the propositional and first-order parsers.
pub(crate) struct Tokens {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Tokens {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Tokens {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    pub(crate) fn mark(&self) -> usize {
        self.pos
    }

    pub(crate) fn reset(&mut self, mark: usize) {
        self.pos = mark;
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn error(&self, expected: &str) -> ParseError {
        ParseError {
            message: format!("expected {expected}, found {}", self.peek()),
            span: self.span(),
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    /// A non-reserved identifier.
    pub(crate) fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if RESERVED.contains(&name.as_str()) => Err(ParseError {
                message: format!("reserved word '{name}' cannot be used as {what}"),
                span: self.span(),
            }),
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error(what)),
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    pub(crate) fn sexpr(&mut self) -> Result<StandpointExpr, ParseError> {
        let mut left = self.sunion()?;
        while self.eat(&Tok::Backslash) {
            let right = self.sunion()?;
            left = StandpointExpr::diff(left, right);
        }
        Ok(left)
    }

    fn sunion(&mut self) -> Result<StandpointExpr, ParseError> {
        let mut left = self.sinter()?;
        while self.is_keyword("u") {
            self.bump();
            let right = self.sinter()?;
            left = StandpointExpr::union(left, right);
        }
        Ok(left)
    }

    fn sinter(&mut self) -> Result<StandpointExpr, ParseError> {
        let mut left = self.sleaf()?;
        while self.is_keyword("n") {
            self.bump();
            let right = self.sleaf()?;
            left = StandpointExpr::inter(left, right);
        }
        Ok(left)
    }

    fn sleaf(&mut self) -> Result<StandpointExpr, ParseError> {
        match self.peek() {
            Tok::Star => {
                self.bump();
                Ok(StandpointExpr::Star)
            }
            Tok::LParen => {
                self.bump();
                let e = self.sexpr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(_) => Ok(StandpointExpr::Named(self.ident("a standpoint symbol")?)),
            _ => Err(self.error("a standpoint expression")),
        }
    }

    /// Tries `"(" sexpr "<=" sexpr ")"`, restoring the cursor on failure.
    pub(crate) fn try_sharpening(&mut self) -> Option<(StandpointExpr, StandpointExpr)> {
        let mark = self.mark();
        let attempt = (|| {
            self.expect(Tok::LParen).ok()?;
            let l = self.sexpr().ok()?;
            if !self.eat(&Tok::Le) {
                return None;
            }
            let r = self.sexpr().ok()?;
            self.expect(Tok::RParen).ok()?;
            Some((l, r))
        })();
        if attempt.is_none() {
            self.reset(mark);
        }
        attempt
    }
}

struct PropParser {
    toks: Tokens,
}

impl PropParser {
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.implication()?;
        while self.toks.eat(&Tok::Iff) {
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.toks.eat(&Tok::Arrow) {
            let right = self.implication()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while self.toks.eat(&Tok::Bar) {
            left = Formula::or(left, self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.toks.eat(&Tok::Amp) {
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.toks.peek() {
            Tok::Tilde => {
                self.toks.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBracket => {
                self.toks.bump();
                let e = self.toks.sexpr()?;
                self.toks.expect(Tok::RBracket)?;
                Ok(Formula::boxed(e, self.unary()?))
            }
            Tok::Lt => {
                self.toks.bump();
                let e = self.toks.sexpr()?;
                self.toks.expect(Tok::Gt)?;
                Ok(Formula::diamond(e, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.toks.peek().clone() {
            Tok::Ident(w) if w == "true" => {
                self.toks.bump();
                Ok(Formula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.toks.bump();
                Ok(Formula::False)
            }
            Tok::Ident(_) => Ok(Formula::Atom(self.toks.ident("a propositional symbol")?)),
            Tok::LParen => {
                if let Some((l, r)) = self.toks.try_sharpening() {
                    return Ok(Formula::sharper(l, r));
                }
                self.toks.bump();
                let f = self.formula()?;
                self.toks.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => Err(self.toks.error("a formula")),
        }
    }
}

/// Parses a propositional standpoint formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = PropParser {
        toks: Tokens::new(text)?,
    };
    let f = p.formula()?;
    p.toks.expect_eof()?;
    Ok(f)
}

/// Parses a standpoint expression on its own, e.g. `s u (t \ r)`.
pub fn parse_standpoint_expr(text: &str) -> Result<StandpointExpr, ParseError> {
    let mut toks = Tokens::new(text)?;
    let e = toks.sexpr()?;
    toks.expect_eof()?;
    Ok(e)
}

pub(crate) const PREC_IMPLIES: u8 = 1;
pub(crate) const PREC_OR: u8 = 2;
pub(crate) const PREC_AND: u8 = 3;
pub(crate) const PREC_UNARY: u8 = 4;
pub(crate) const PREC_ATOM: u8 = 5;

pub(crate) fn wrap(text: String, prec: u8, min: u8) -> String {
    if prec < min {
        format!("({text})")
    } else {
        text
    }
}

pub fn print_standpoint_expr(e: &StandpointExpr) -> String {
    sexpr_text(e).0
}

fn sexpr_text(e: &StandpointExpr) -> (String, u8) {
    let bin = |l: &StandpointExpr, r: &StandpointExpr, op: &str, prec: u8| {
        let (lt, lp) = sexpr_text(l);
        let (rt, rp) = sexpr_text(r);
        (
            format!("{} {op} {}", wrap(lt, lp, prec), wrap(rt, rp, prec + 1)),
            prec,
        )
    };
    match e {
        StandpointExpr::Star => ("*".to_string(), 3),
        StandpointExpr::Named(s) => (s.clone(), 3),
        StandpointExpr::Diff(l, r) => bin(l, r, "\\", 0),
        StandpointExpr::Union(l, r) => bin(l, r, "u", 1),
        StandpointExpr::Inter(l, r) => bin(l, r, "n", 2),
    }
}

/// Renders a formula with the minimal parentheses the grammar needs.
pub fn print_formula(f: &Formula) -> String {
    formula_text(f).0
}

fn formula_text(f: &Formula) -> (String, u8) {
    match f {
        Formula::True => ("true".into(), PREC_ATOM),
        Formula::False => ("false".into(), PREC_ATOM),
        Formula::Atom(p) => (p.clone(), PREC_ATOM),
        Formula::Sharper(l, r) => (
            format!(
                "({} <= {})",
                print_standpoint_expr(l),
                print_standpoint_expr(r)
            ),
            PREC_ATOM,
        ),
        Formula::Not(g) => {
            let (t, p) = formula_text(g);
            (format!("~{}", wrap(t, p, PREC_UNARY)), PREC_UNARY)
        }
        Formula::Box(e, g) => {
            let (t, p) = formula_text(g);
            (
                format!("[{}] {}", print_standpoint_expr(e), wrap(t, p, PREC_UNARY)),
                PREC_UNARY,
            )
        }
        Formula::Diamond(e, g) => {
            let (t, p) = formula_text(g);
            (
                format!("<{}> {}", print_standpoint_expr(e), wrap(t, p, PREC_UNARY)),
                PREC_UNARY,
            )
        }
        Formula::And(l, r) => binary(l, r, "&", PREC_AND, PREC_AND, PREC_AND + 1),
        Formula::Or(l, r) => binary(l, r, "|", PREC_OR, PREC_OR, PREC_OR + 1),
        Formula::Implies(l, r) => binary(l, r, "->", PREC_IMPLIES, PREC_IMPLIES + 1, PREC_IMPLIES),
    }
}

fn binary(l: &Formula, r: &Formula, op: &str, prec: u8, lmin: u8, rmin: u8) -> (String, u8) {
    let (lt, lp) = formula_text(l);
    let (rt, rp) = formula_text(r);
    (
        format!("{} {op} {}", wrap(lt, lp, lmin), wrap(rt, rp, rmin)),
        prec,
    )
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for StandpointExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_standpoint_expr(self))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureJson {
    precisifications: Vec<String>,
    #[serde(default)]
    sigma: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    delta: BTreeMap<String, Vec<String>>,
}

/// Parses the JSON structure format.
pub fn parse_structure(text: &str) -> Result<Structure, StructureParseError> {
    let raw: StructureJson = serde_json::from_str(text)?;
    if raw.sigma.contains_key("*") {
        return Err(StructureError::StarInSigma.into());
    }
    let mut seen = BTreeSet::new();
    for p in &raw.precisifications {
        if !seen.insert(p.as_str()) {
            return Err(StructureError::DuplicatePrecisification(p.clone()).into());
        }
    }
    let resolve = |map: BTreeMap<String, Vec<String>>| -> Result<_, StructureError> {
        map.into_iter()
            .map(|(sym, names)| {
                let set = names
                    .iter()
                    .map(|n| {
                        raw.precisifications
                            .iter()
                            .position(|p| p == n)
                            .ok_or_else(|| StructureError::UnknownPrecisification(n.clone()))
                    })
                    .collect::<Result<BTreeSet<usize>, _>>()?;
                Ok((sym, set))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()
    };
    let sigma = resolve(raw.sigma.clone())?;
    let delta = resolve(raw.delta.clone())?;
    Ok(Structure::new(raw.precisifications, sigma, delta)?)
}

/// Serializes a structure to the JSON format read by [`parse_structure`].
pub fn print_structure(m: &Structure) -> String {
    let names = |map: &BTreeMap<String, BTreeSet<usize>>| {
        map.iter()
            .map(|(k, set)| {
                (
                    k.clone(),
                    set.iter().map(|&i| m.precisifications()[i].clone()).collect(),
                )
            })
            .collect()
    };
    let raw = StructureJson {
        precisifications: m.precisifications().to_vec(),
        sigma: names(m.sigma()),
        delta: names(m.delta()),
    };
    serde_json::to_string_pretty(&raw).expect("structure serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(s: &str) -> StandpointExpr {
        StandpointExpr::named(s)
    }

    #[test]
    fn parses_sharpening_conjunction() {
        let f = parse_formula("(LC <= BFO) & (LU <= BFO)").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::sharper(named("LC"), named("BFO")),
                Formula::sharper(named("LU"), named("BFO"))
            )
        );
    }

    #[test]
    fn parses_star_box() {
        assert_eq!(
            parse_formula("[*] p").unwrap(),
            Formula::boxed(StandpointExpr::Star, Formula::atom("p"))
        );
    }

    #[test]
    fn reports_missing_bracket() {
        let err = parse_formula("[s p").unwrap_err();
        assert!(err.message.contains("']'"), "{err}");
        assert_eq!(err.span.start, 3);
    }

    #[test]
    fn rejects_reserved_and_unknown_characters() {
        assert!(parse_formula("p & u").is_err());
        let err = parse_formula("p # q").unwrap_err();
        assert!(err.message.contains("unexpected character"));
        assert_eq!(err.span, SourceSpan { start: 2, end: 3 });
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("p | q & r -> s -> t").unwrap();
        let (p, q, r, s, t) = (
            Formula::atom("p"),
            Formula::atom("q"),
            Formula::atom("r"),
            Formula::atom("s"),
            Formula::atom("t"),
        );
        assert_eq!(
            f,
            Formula::implies(
                Formula::or(p, Formula::and(q, r)),
                Formula::implies(s, t)
            )
        );
        let e = parse_standpoint_expr("a \\ b u c n d").unwrap();
        assert_eq!(
            e,
            StandpointExpr::diff(
                named("a"),
                StandpointExpr::union(named("b"), StandpointExpr::inter(named("c"), named("d")))
            )
        );
    }

    #[test]
    fn parenthesised_formula_is_not_a_sharpening() {
        assert_eq!(parse_formula("(p)").unwrap(), Formula::atom("p"));
        assert_eq!(
            parse_formula("((s u t) <= *)").unwrap(),
            Formula::sharper(StandpointExpr::union(named("s"), named("t")), StandpointExpr::Star)
        );
    }

    #[test]
    fn printing_examples() {
        assert_eq!(print_formula(&Formula::atom("p")), "p");
        let f = Formula::and(
            Formula::or(Formula::atom("p"), Formula::atom("q")),
            Formula::atom("r"),
        );
        assert_eq!(print_formula(&f), "(p | q) & r");
        let g = Formula::boxed(StandpointExpr::diff(named("s"), named("t")), Formula::False);
        assert_eq!(print_formula(&g), "[s \\ t] false");
        let h = Formula::and(Formula::atom("a"), Formula::and(Formula::atom("b"), Formula::atom("c")));
        assert_eq!(print_formula(&h), "a & (b & c)");
        let i = Formula::implies(Formula::implies(Formula::atom("a"), Formula::atom("b")), Formula::atom("c"));
        assert_eq!(print_formula(&i), "(a -> b) -> c");
    }

    #[test]
    fn structure_json() {
        let m = parse_structure(r#"{"precisifications":["p1"],"sigma":{"s":["p1"]},"delta":{"a":["p1"]}}"#)
            .unwrap();
        assert_eq!(m.precisifications(), &["p1".to_string()]);
        assert_eq!(parse_structure(&print_structure(&m)).unwrap(), m);

        let err = parse_structure(r#"{"precisifications":[],"sigma":{},"delta":{}}"#).unwrap_err();
        assert_eq!(err.to_string(), "Π must be non-empty");

        let err = parse_structure(r#"{"precisifications":["p1"],"sigma":{"s":["p9"]},"delta":{}}"#)
            .unwrap_err();
        assert_eq!(err.to_string(), "unknown precisification p9");

        assert!(parse_structure(r#"{"precisifications":["a","a"]}"#).is_err());
        assert!(parse_structure(r#"{"precisifications":["a"],"sigma":{"*":["a"]}}"#).is_err());
        assert!(matches!(
            parse_structure("{"),
            Err(StructureParseError::Json(_))
        ));
    }
}
