//! Sentential first-order standpoint logic.
//!
//! Covers the formula syntax, the sentential-fragment check, the
//! structure-preserving normal form, the translation into plain first-order
//! logic over precisification-indexed predicates, a finite-domain evaluator
//! for standpoint structures, and TPTP FOF export.
//!
//! Translated predicates are named `P@piK` for a source predicate `P` at the
//! K-th precisification; standpoint memberships become nullary predicates
//! `s#piK`, with `*#piK` for the universal standpoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::ast::StandpointExpr;
use crate::frontend::{
    print_standpoint_expr, wrap, ParseError, Tok, Tokens, PREC_AND, PREC_ATOM, PREC_IMPLIES,
    PREC_OR, PREC_UNARY,
};
use crate::ssnf::LabelNames;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Const(x) => f.write_str(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoFormula {
    True,
    False,
    /// Predicate application; the arity is the number of arguments.
    Pred(String, Vec<Term>),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Box(StandpointExpr, Box<FoFormula>),
    Diamond(StandpointExpr, Box<FoFormula>),
    Sharper(StandpointExpr, StandpointExpr),
}

impl FoFormula {
    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Self {
        FoFormula::Pred(name.into(), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: FoFormula) -> Self {
        FoFormula::Not(Box::new(f))
    }

    pub fn and(l: FoFormula, r: FoFormula) -> Self {
        FoFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: FoFormula, r: FoFormula) -> Self {
        FoFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: FoFormula, r: FoFormula) -> Self {
        FoFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn forall(x: impl Into<String>, f: FoFormula) -> Self {
        FoFormula::Forall(x.into(), Box::new(f))
    }

    pub fn exists(x: impl Into<String>, f: FoFormula) -> Self {
        FoFormula::Exists(x.into(), Box::new(f))
    }

    pub fn boxed(e: StandpointExpr, f: FoFormula) -> Self {
        FoFormula::Box(e, Box::new(f))
    }

    pub fn diamond(e: StandpointExpr, f: FoFormula) -> Self {
        FoFormula::Diamond(e, Box::new(f))
    }

    pub fn conjunction(items: impl IntoIterator<Item = FoFormula>) -> Self {
        let mut iter = items.into_iter();
        match iter.next() {
            None => FoFormula::True,
            Some(first) => iter.fold(first, FoFormula::and),
        }
    }

    pub fn children(&self) -> Vec<&FoFormula> {
        match self {
            FoFormula::True | FoFormula::False | FoFormula::Pred(..) | FoFormula::Sharper(..) => {
                vec![]
            }
            FoFormula::Not(f)
            | FoFormula::Forall(_, f)
            | FoFormula::Exists(_, f)
            | FoFormula::Box(_, f)
            | FoFormula::Diamond(_, f) => vec![f],
            FoFormula::And(l, r) | FoFormula::Or(l, r) | FoFormula::Implies(l, r) => vec![l, r],
        }
    }

    /// Free variables, sorted by name.
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            FoFormula::Pred(_, args) => args
                .iter()
                .filter_map(|t| match t {
                    Term::Var(x) => Some(x.clone()),
                    Term::Const(_) => None,
                })
                .collect(),
            FoFormula::Forall(x, f) | FoFormula::Exists(x, f) => {
                let mut vars = f.free_vars();
                vars.remove(x);
                vars
            }
            other => other
                .children()
                .into_iter()
                .flat_map(|c| c.free_vars())
                .collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_literal(&self) -> bool {
        let leaf = |f: &FoFormula| {
            matches!(
                f,
                FoFormula::True | FoFormula::False | FoFormula::Pred(..) | FoFormula::Sharper(..)
            )
        };
        match self {
            FoFormula::Not(inner) => leaf(inner),
            f => leaf(f),
        }
    }

    /// True when no modal operator or sharpening statement occurs.
    pub fn is_modality_free(&self) -> bool {
        match self {
            FoFormula::Box(..) | FoFormula::Diamond(..) | FoFormula::Sharper(..) => false,
            other => other.children().into_iter().all(FoFormula::is_modality_free),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(FoFormula::node_count)
            .sum::<usize>()
    }

    /// Predicate symbols with their arities.
    pub fn predicates(&self) -> BTreeMap<String, BTreeSet<usize>> {
        let mut out: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        self.walk(&mut |f| {
            if let FoFormula::Pred(p, args) = f {
                out.entry(p.clone()).or_default().insert(args.len());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let FoFormula::Pred(_, args) = f {
                for t in args {
                    if let Term::Const(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
        });
        out
    }

    pub fn standpoints(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            FoFormula::Box(e, _) | FoFormula::Diamond(e, _) => {
                out.extend(e.symbols());
            }
            FoFormula::Sharper(l, r) => {
                out.extend(l.symbols());
                out.extend(r.symbols());
            }
            _ => {}
        });
        out
    }

    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a FoFormula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoslError {
    #[error("formula is not sentential: {subformula} has free variables {}", .free.join(", "))]
    NotSentential { subformula: String, free: Vec<String> },
    #[error("modal depth {0} exceeds 1; normalize the formula first")]
    ModalDepth(usize),
    #[error("the number of precisifications must be at least 1")]
    NoPrecisifications,
    #[error("formula has free variables {}", .0.join(", "))]
    OpenFormula(Vec<String>),
    #[error("formula still contains a modal operator or sharpening statement")]
    ResidualModality,
}

// ---------------------------------------------------------------------------
// Parsing and printing

struct FoParser {
    toks: Tokens,
    bound: Vec<String>,
}

impl FoParser {
    fn formula(&mut self) -> Result<FoFormula, ParseError> {
        let mut left = self.implication()?;
        while self.toks.eat(&Tok::Iff) {
            let right = self.implication()?;
            left = FoFormula::and(
                FoFormula::implies(left.clone(), right.clone()),
                FoFormula::implies(right, left),
            );
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<FoFormula, ParseError> {
        let left = self.disjunction()?;
        if self.toks.eat(&Tok::Arrow) {
            Ok(FoFormula::implies(left, self.implication()?))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<FoFormula, ParseError> {
        let mut left = self.conjunction()?;
        while self.toks.eat(&Tok::Bar) {
            left = FoFormula::or(left, self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<FoFormula, ParseError> {
        let mut left = self.unary()?;
        while self.toks.eat(&Tok::Amp) {
            left = FoFormula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<FoFormula, ParseError> {
        match self.toks.peek() {
            Tok::Tilde => {
                self.toks.bump();
                Ok(FoFormula::not(self.unary()?))
            }
            Tok::LBracket => {
                self.toks.bump();
                let e = self.toks.sexpr()?;
                self.toks.expect(Tok::RBracket)?;
                Ok(FoFormula::boxed(e, self.unary()?))
            }
            Tok::Lt => {
                self.toks.bump();
                let e = self.toks.sexpr()?;
                self.toks.expect(Tok::Gt)?;
                Ok(FoFormula::diamond(e, self.unary()?))
            }
            Tok::Bang | Tok::Question => {
                let universal = self.toks.bump() == Tok::Bang;
                let mut vars = vec![self.toks.ident("a variable")?];
                while matches!(self.toks.peek(), Tok::Ident(_)) {
                    vars.push(self.toks.ident("a variable")?);
                }
                self.toks.expect(Tok::Dot)?;
                let depth = self.bound.len();
                self.bound.extend(vars.iter().cloned());
                let body = self.unary();
                self.bound.truncate(depth);
                let body = body?;
                Ok(vars.into_iter().rev().fold(body, |acc, x| {
                    if universal {
                        FoFormula::forall(x, acc)
                    } else {
                        FoFormula::exists(x, acc)
                    }
                }))
            }
            _ => self.atom(),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let name = self.toks.ident("a term")?;
        if self.bound.contains(&name) {
            Ok(Term::Var(name))
        } else {
            Ok(Term::Const(name))
        }
    }

    fn atom(&mut self) -> Result<FoFormula, ParseError> {
        match self.toks.peek().clone() {
            Tok::Ident(w) if w == "true" => {
                self.toks.bump();
                Ok(FoFormula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.toks.bump();
                Ok(FoFormula::False)
            }
            Tok::Ident(_) => {
                let name = self.toks.ident("a predicate symbol")?;
                let mut args = Vec::new();
                if self.toks.eat(&Tok::LParen) {
                    args.push(self.term()?);
                    while self.toks.eat(&Tok::Comma) {
                        args.push(self.term()?);
                    }
                    self.toks.expect(Tok::RParen)?;
                }
                Ok(FoFormula::Pred(name, args))
            }
            Tok::LParen => {
                if let Some((l, r)) = self.toks.try_sharpening() {
                    return Ok(FoFormula::Sharper(l, r));
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

/// Parses a first-order standpoint formula.
///
/// Extends the propositional grammar with `P(t1,...,tk)`, `! x y . φ`
/// (universal) and `? x . φ` (existential). Quantifiers bind like unary
/// operators. A term is a variable when an enclosing quantifier binds its
/// name and a constant otherwise.
pub fn parse_fo_formula(text: &str) -> Result<FoFormula, ParseError> {
    let mut p = FoParser {
        toks: Tokens::new(text)?,
        bound: Vec::new(),
    };
    let f = p.formula()?;
    p.toks.expect_eof()?;
    Ok(f)
}

pub fn print_fo_formula(f: &FoFormula) -> String {
    fo_text(f).0
}

fn fo_text(f: &FoFormula) -> (String, u8) {
    let unary = |prefix: String, g: &FoFormula| {
        let (t, p) = fo_text(g);
        (format!("{prefix}{}", wrap(t, p, PREC_UNARY)), PREC_UNARY)
    };
    let binary = |l: &FoFormula, r: &FoFormula, op: &str, prec: u8, lmin: u8, rmin: u8| {
        let (lt, lp) = fo_text(l);
        let (rt, rp) = fo_text(r);
        (
            format!("{} {op} {}", wrap(lt, lp, lmin), wrap(rt, rp, rmin)),
            prec,
        )
    };
    match f {
        FoFormula::True => ("true".into(), PREC_ATOM),
        FoFormula::False => ("false".into(), PREC_ATOM),
        FoFormula::Pred(p, args) if args.is_empty() => (p.clone(), PREC_ATOM),
        FoFormula::Pred(p, args) => {
            let args: Vec<String> = args.iter().map(Term::to_string).collect();
            (format!("{p}({})", args.join(", ")), PREC_ATOM)
        }
        FoFormula::Sharper(l, r) => (
            format!(
                "({} <= {})",
                print_standpoint_expr(l),
                print_standpoint_expr(r)
            ),
            PREC_ATOM,
        ),
        FoFormula::Not(g) => unary("~".into(), g),
        FoFormula::Forall(x, g) => unary(format!("! {x} . "), g),
        FoFormula::Exists(x, g) => unary(format!("? {x} . "), g),
        FoFormula::Box(e, g) => unary(format!("[{}] ", print_standpoint_expr(e)), g),
        FoFormula::Diamond(e, g) => unary(format!("<{}> ", print_standpoint_expr(e)), g),
        FoFormula::And(l, r) => binary(l, r, "&", PREC_AND, PREC_AND, PREC_AND + 1),
        FoFormula::Or(l, r) => binary(l, r, "|", PREC_OR, PREC_OR, PREC_OR + 1),
        FoFormula::Implies(l, r) => {
            binary(l, r, "->", PREC_IMPLIES, PREC_IMPLIES + 1, PREC_IMPLIES)
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_fo_formula(self))
    }
}

// ---------------------------------------------------------------------------
// Sentential fragment

/// Outcome of [`is_sentential`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sentential {
    Accepted,
    /// The first modal subformula (pre-order) whose body has free variables.
    Rejected {
        subformula: FoFormula,
        free_vars: Vec<String>,
    },
}

impl Sentential {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Sentential::Accepted)
    }
}

/// Checks that the body of every modal operator is a sentence.
pub fn is_sentential(f: &FoFormula) -> Sentential {
    let mut verdict = Sentential::Accepted;
    f.walk(&mut |g| {
        if verdict.is_accepted() {
            if let FoFormula::Box(_, body) | FoFormula::Diamond(_, body) = g {
                let free = body.free_vars();
                if !free.is_empty() {
                    verdict = Sentential::Rejected {
                        subformula: g.clone(),
                        free_vars: free.into_iter().collect(),
                    };
                }
            }
        }
    });
    verdict
}

fn require_sentential(f: &FoFormula) -> Result<(), FoslError> {
    match is_sentential(f) {
        Sentential::Accepted => Ok(()),
        Sentential::Rejected {
            subformula,
            free_vars,
        } => Err(FoslError::NotSentential {
            subformula: print_fo_formula(&subformula),
            free: free_vars,
        }),
    }
}

pub fn fo_modal_depth(f: &FoFormula) -> usize {
    match f {
        FoFormula::Box(_, g) | FoFormula::Diamond(_, g) => 1 + fo_modal_depth(g),
        other => other
            .children()
            .into_iter()
            .map(fo_modal_depth)
            .max()
            .unwrap_or(0),
    }
}

// ---------------------------------------------------------------------------
// Normal form

struct FoBuilder {
    names: LabelNames<FoFormula>,
    defs: IndexSet<FoFormula>,
}

impl FoBuilder {
    fn label(&mut self, f: &FoFormula) -> FoFormula {
        if f.is_literal() {
            return f.clone();
        }
        if let FoFormula::Not(inner) = f {
            return FoFormula::not(self.label(inner));
        }
        let name = self.names.name(f, || print_fo_formula(f));
        let args = f.free_vars().into_iter().map(Term::Var).collect();
        FoFormula::Pred(name, args)
    }

    /// Adds `def` universally closed over its free variables.
    fn define(&mut self, def: FoFormula) {
        let closed = def
            .free_vars()
            .into_iter()
            .rev()
            .fold(def, |acc, x| FoFormula::forall(x, acc));
        self.defs.insert(closed);
    }

    fn body(&mut self, f: &FoFormula) -> FoFormula {
        match f {
            FoFormula::And(a, b) => FoFormula::and(self.label(a), self.label(b)),
            FoFormula::Or(a, b) => FoFormula::or(self.label(a), self.label(b)),
            FoFormula::Implies(a, b) => FoFormula::implies(self.label(a), self.label(b)),
            FoFormula::Forall(x, a) => FoFormula::forall(x.clone(), self.label(a)),
            FoFormula::Exists(x, a) => FoFormula::exists(x.clone(), self.label(a)),
            FoFormula::Box(e, a) => FoFormula::boxed(e.clone(), self.label(a)),
            FoFormula::Diamond(e, a) => FoFormula::diamond(e.clone(), self.label(a)),
            _ => unreachable!("body of a non-literal, non-negated formula"),
        }
    }

    fn polarity(&mut self, f: &FoFormula, positive: bool) {
        if f.is_literal() {
            return;
        }
        if let FoFormula::Not(g) = f {
            return self.polarity(g, !positive);
        }
        let me = self.label(f);
        let body = self.body(f);
        self.define(if positive {
            FoFormula::implies(me, body)
        } else {
            FoFormula::implies(body, me)
        });
        match f {
            FoFormula::Implies(a, b) => {
                self.polarity(a, !positive);
                self.polarity(b, positive);
            }
            other => {
                for c in other.children() {
                    self.polarity(c, positive);
                }
            }
        }
    }
}

/// Structure-preserving normal form of a sentential formula: modal depth at
/// most one, equisatisfiable with the input.
///
/// Labels of open subformulas are predicates over the subformula's free
/// variables; definitions are universally closed.
pub fn fo_ssnf(f: &FoFormula) -> Result<FoFormula, FoslError> {
    require_sentential(f)?;
    if f.is_literal() {
        return Ok(f.clone());
    }
    let mut b = FoBuilder {
        names: LabelNames::new(f.predicates().into_keys().collect()),
        defs: IndexSet::new(),
    };
    let root = b.label(f);
    b.polarity(f, true);
    Ok(FoFormula::conjunction(std::iter::once(root).chain(b.defs)))
}

// ---------------------------------------------------------------------------
// Translation

/// Name of the copy of predicate `p` at precisification index `pi`.
pub fn indexed_predicate(p: &str, pi: usize) -> String {
    format!("{p}@pi{}", pi + 1)
}

/// Name of the nullary predicate expressing `pi ∈ σ(s)`.
pub fn standpoint_predicate(s: &str, pi: usize) -> String {
    format!("{s}#pi{}", pi + 1)
}

pub fn star_predicate(pi: usize) -> String {
    standpoint_predicate("*", pi)
}

fn nullary(name: String) -> FoFormula {
    FoFormula::Pred(name, vec![])
}

fn fo_trans_expr(pi: usize, e: &StandpointExpr) -> FoFormula {
    match e {
        StandpointExpr::Star => nullary(star_predicate(pi)),
        StandpointExpr::Named(s) => nullary(standpoint_predicate(s, pi)),
        StandpointExpr::Union(l, r) => FoFormula::or(fo_trans_expr(pi, l), fo_trans_expr(pi, r)),
        StandpointExpr::Inter(l, r) => FoFormula::and(fo_trans_expr(pi, l), fo_trans_expr(pi, r)),
        StandpointExpr::Diff(l, r) => {
            FoFormula::and(fo_trans_expr(pi, l), FoFormula::not(fo_trans_expr(pi, r)))
        }
    }
}

fn fo_trans(pi: usize, f: &FoFormula, n: usize) -> FoFormula {
    match f {
        FoFormula::True | FoFormula::False => f.clone(),
        FoFormula::Pred(p, args) => FoFormula::Pred(indexed_predicate(p, pi), args.clone()),
        FoFormula::Not(g) => FoFormula::not(fo_trans(pi, g, n)),
        FoFormula::And(l, r) => FoFormula::and(fo_trans(pi, l, n), fo_trans(pi, r, n)),
        FoFormula::Or(l, r) => FoFormula::or(fo_trans(pi, l, n), fo_trans(pi, r, n)),
        FoFormula::Implies(l, r) => FoFormula::implies(fo_trans(pi, l, n), fo_trans(pi, r, n)),
        FoFormula::Forall(x, g) => FoFormula::forall(x.clone(), fo_trans(pi, g, n)),
        FoFormula::Exists(x, g) => FoFormula::exists(x.clone(), fo_trans(pi, g, n)),
        FoFormula::Box(e, g) => FoFormula::conjunction(
            (0..n).map(|q| FoFormula::implies(fo_trans_expr(q, e), fo_trans(q, g, n))),
        ),
        FoFormula::Diamond(e, g) => (0..n)
            .map(|q| FoFormula::and(fo_trans_expr(q, e), fo_trans(q, g, n)))
            .reduce(FoFormula::or)
            .unwrap_or(FoFormula::False),
        FoFormula::Sharper(l, r) => FoFormula::conjunction(
            (0..n).map(|q| FoFormula::implies(fo_trans_expr(q, l), fo_trans_expr(q, r))),
        ),
    }
}

/// Predicate symbols of a plain first-order formula with their arities, plus its constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

impl Signature {
    pub fn of(f: &FoFormula) -> Self {
        Signature {
            predicates: f
                .predicates()
                .into_iter()
                .map(|(p, arities)| (p, *arities.iter().next().unwrap()))
                .collect(),
            constants: f.constants(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FoTranslation {
    pub formula: FoFormula,
    pub signature: Signature,
    pub precisifications: usize,
}

/// `Trans_n(f)`: the modality-free first-order formula whose models
/// correspond to the standpoint models of `f` over `n` precisifications.
///
/// `n` defaults to `|Sub(f)|`, the number of distinct subformulas.
pub fn fo_translate(f: &FoFormula, n: Option<usize>) -> Result<FoTranslation, FoslError> {
    require_sentential(f)?;
    let depth = fo_modal_depth(f);
    if depth > 1 {
        return Err(FoslError::ModalDepth(depth));
    }
    let n = n.unwrap_or_else(|| fo_size(f));
    if n == 0 {
        return Err(FoslError::NoPrecisifications);
    }
    let mut conjuncts: IndexSet<FoFormula> = IndexSet::new();
    for pi in 0..n {
        conjuncts.extend(fo_conjuncts(fo_trans(pi, f, n)));
    }
    conjuncts.extend((0..n).map(|pi| nullary(star_predicate(pi))));
    let formula = FoFormula::conjunction(conjuncts);
    Ok(FoTranslation {
        signature: Signature::of(&formula),
        formula,
        precisifications: n,
    })
}

fn fo_conjuncts(f: FoFormula) -> Vec<FoFormula> {
    match f {
        FoFormula::And(l, r) => {
            let mut out = fo_conjuncts(*l);
            out.extend(fo_conjuncts(*r));
            out
        }
        other => vec![other],
    }
}

/// Number of distinct subformulas.
pub fn fo_size(f: &FoFormula) -> usize {
    let mut seen = BTreeSet::new();
    f.walk(&mut |g| {
        seen.insert(g);
    });
    seen.len()
}

// ---------------------------------------------------------------------------
// Finite structures

/// Predicate extensions and constant denotations of one precisification.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub predicates: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub constants: BTreeMap<String, usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoStructureError {
    #[error("the domain must be non-empty")]
    EmptyDomain,
    #[error("Π must be non-empty")]
    NoPrecisifications,
    #[error("expected one interpretation per precisification ({expected}), got {found}")]
    InterpretationCount { expected: usize, found: usize },
    #[error("constant {0} is not rigid across precisifications")]
    NonRigidConstant(String),
    #[error("element {0} is outside the domain")]
    OutOfDomain(usize),
    #[error("predicate {0} is interpreted with tuples of different arities")]
    MixedArity(String),
    #[error("precisification index {0} out of range")]
    PrecisificationOutOfRange(usize),
    #[error("'*' cannot appear in sigma")]
    StarInSigma,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoEvalError {
    #[error("predicate {predicate} has arity {expected} but is applied to {found} terms")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("variable {0} is not assigned")]
    UnboundVariable(String),
    #[error("constant {0} has no denotation")]
    UnknownConstant(String),
    #[error("element {0} is outside the domain")]
    OutOfDomain(usize),
    #[error("precisification index {0} is not in Π")]
    UnknownPrecisification(usize),
    #[error("formula still contains a modal operator or sharpening statement")]
    ResidualModality,
}

/// A standpoint structure with a constant domain: elements `0..domain.len()`,
/// one interpretation per precisification, rigid constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoStructure {
    domain: Vec<String>,
    precisifications: Vec<String>,
    sigma: BTreeMap<String, BTreeSet<usize>>,
    constants: BTreeMap<String, usize>,
    predicates: Vec<BTreeMap<String, BTreeSet<Vec<usize>>>>,
    arities: BTreeMap<String, usize>,
}

impl FoStructure {
    pub fn new(
        domain: Vec<String>,
        precisifications: Vec<String>,
        sigma: BTreeMap<String, BTreeSet<usize>>,
        interpretations: Vec<Interpretation>,
    ) -> Result<Self, FoStructureError> {
        if domain.is_empty() {
            return Err(FoStructureError::EmptyDomain);
        }
        if precisifications.is_empty() {
            return Err(FoStructureError::NoPrecisifications);
        }
        if interpretations.len() != precisifications.len() {
            return Err(FoStructureError::InterpretationCount {
                expected: precisifications.len(),
                found: interpretations.len(),
            });
        }
        if sigma.contains_key("*") {
            return Err(FoStructureError::StarInSigma);
        }
        if let Some(&bad) = sigma
            .values()
            .flatten()
            .find(|&&i| i >= precisifications.len())
        {
            return Err(FoStructureError::PrecisificationOutOfRange(bad));
        }
        let constants = interpretations[0].constants.clone();
        let mut arities = BTreeMap::new();
        for interp in &interpretations {
            if interp.constants != constants {
                let culprit = constants
                    .keys()
                    .chain(interp.constants.keys())
                    .find(|c| constants.get(*c) != interp.constants.get(*c))
                    .cloned()
                    .unwrap_or_default();
                return Err(FoStructureError::NonRigidConstant(culprit));
            }
            for (p, tuples) in &interp.predicates {
                for t in tuples {
                    if let Some(&bad) = t.iter().find(|&&d| d >= domain.len()) {
                        return Err(FoStructureError::OutOfDomain(bad));
                    }
                    if *arities.entry(p.clone()).or_insert(t.len()) != t.len() {
                        return Err(FoStructureError::MixedArity(p.clone()));
                    }
                }
            }
        }
        if let Some(&bad) = constants.values().find(|&&d| d >= domain.len()) {
            return Err(FoStructureError::OutOfDomain(bad));
        }
        Ok(FoStructure {
            domain,
            precisifications,
            sigma,
            constants,
            predicates: interpretations.into_iter().map(|i| i.predicates).collect(),
            arities,
        })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn precisifications(&self) -> &[String] {
        &self.precisifications
    }

    pub fn sigma(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.sigma
    }

    pub fn constants(&self) -> &BTreeMap<String, usize> {
        &self.constants
    }

    /// Extension of `p` at precisification `pi`.
    pub fn extension(&self, p: &str, pi: usize) -> Option<&BTreeSet<Vec<usize>>> {
        self.predicates.get(pi).and_then(|m| m.get(p))
    }

    fn sigma_eval(&self, e: &StandpointExpr) -> BTreeSet<usize> {
        match e {
            StandpointExpr::Star => (0..self.precisifications.len()).collect(),
            StandpointExpr::Named(s) => self.sigma.get(s).cloned().unwrap_or_default(),
            StandpointExpr::Union(l, r) => &self.sigma_eval(l) | &self.sigma_eval(r),
            StandpointExpr::Inter(l, r) => &self.sigma_eval(l) & &self.sigma_eval(r),
            StandpointExpr::Diff(l, r) => &self.sigma_eval(l) - &self.sigma_eval(r),
        }
    }
}

pub type VarAssignment = BTreeMap<String, usize>;

fn denote(
    t: &Term,
    v: &VarAssignment,
    constants: &BTreeMap<String, usize>,
    domain: usize,
) -> Result<usize, FoEvalError> {
    let d = match t {
        Term::Var(x) => *v
            .get(x)
            .ok_or_else(|| FoEvalError::UnboundVariable(x.clone()))?,
        Term::Const(c) => *constants
            .get(c)
            .ok_or_else(|| FoEvalError::UnknownConstant(c.clone()))?,
    };
    if d >= domain {
        return Err(FoEvalError::OutOfDomain(d));
    }
    Ok(d)
}

fn check_arity(
    arities: &BTreeMap<String, usize>,
    p: &str,
    found: usize,
) -> Result<(), FoEvalError> {
    match arities.get(p) {
        Some(&expected) if expected != found => Err(FoEvalError::ArityMismatch {
            predicate: p.to_string(),
            expected,
            found,
        }),
        _ => Ok(()),
    }
}

/// Satisfaction of `f` at precisification `pi` under the variable assignment `v`.
pub fn fo_eval(
    m: &FoStructure,
    pi: usize,
    v: &VarAssignment,
    f: &FoFormula,
) -> Result<bool, FoEvalError> {
    if pi >= m.precisifications.len() {
        return Err(FoEvalError::UnknownPrecisification(pi));
    }
    let n_dom = m.domain.len();
    Ok(match f {
        FoFormula::True => true,
        FoFormula::False => false,
        FoFormula::Pred(p, args) => {
            check_arity(&m.arities, p, args.len())?;
            let tuple = args
                .iter()
                .map(|t| denote(t, v, &m.constants, n_dom))
                .collect::<Result<Vec<_>, _>>()?;
            m.extension(p, pi).is_some_and(|ext| ext.contains(&tuple))
        }
        FoFormula::Not(g) => !fo_eval(m, pi, v, g)?,
        FoFormula::And(l, r) => fo_eval(m, pi, v, l)? && fo_eval(m, pi, v, r)?,
        FoFormula::Or(l, r) => fo_eval(m, pi, v, l)? || fo_eval(m, pi, v, r)?,
        FoFormula::Implies(l, r) => !fo_eval(m, pi, v, l)? || fo_eval(m, pi, v, r)?,
        FoFormula::Forall(x, g) | FoFormula::Exists(x, g) => {
            let universal = matches!(f, FoFormula::Forall(..));
            let mut inner = v.clone();
            let mut result = universal;
            for d in 0..n_dom {
                inner.insert(x.clone(), d);
                if fo_eval(m, pi, &inner, g)? != universal {
                    result = !universal;
                    break;
                }
            }
            result
        }
        FoFormula::Box(e, g) => {
            let mut all = true;
            for q in m.sigma_eval(e) {
                if !fo_eval(m, q, v, g)? {
                    all = false;
                    break;
                }
            }
            all
        }
        FoFormula::Diamond(e, g) => {
            let mut any = false;
            for q in m.sigma_eval(e) {
                if fo_eval(m, q, v, g)? {
                    any = true;
                    break;
                }
            }
            any
        }
        FoFormula::Sharper(l, r) => m.sigma_eval(l).is_subset(&m.sigma_eval(r)),
    })
}

/// All assignments of `vars` over `0..domain`.
fn assignments(vars: &[String], domain: usize) -> Vec<VarAssignment> {
    let mut out = vec![VarAssignment::new()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..domain).map(move |d| {
                    let mut w = v.clone();
                    w.insert(x.clone(), d);
                    w
                })
            })
            .collect();
    }
    out
}

/// Global satisfaction: every precisification, every assignment of the free variables.
pub fn fo_eval_global(m: &FoStructure, f: &FoFormula) -> Result<bool, FoEvalError> {
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    for v in assignments(&vars, m.domain.len()) {
        for pi in 0..m.precisifications.len() {
            if !fo_eval(m, pi, &v, f)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An ordinary first-order structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlainStructure {
    pub domain_size: usize,
    pub predicates: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub constants: BTreeMap<String, usize>,
}

/// The plain structure over the translated vocabulary that superposes all
/// precisifications of `m`: `P@piK` is `P` at the K-th precisification,
/// `s#piK` holds iff that precisification is in σ(s), and every `*#piK` holds.
pub fn superpose(m: &FoStructure) -> PlainStructure {
    let mut predicates = BTreeMap::new();
    for (pi, interp) in m.predicates.iter().enumerate() {
        for (p, ext) in interp {
            predicates.insert(indexed_predicate(p, pi), ext.clone());
        }
        predicates.insert(star_predicate(pi), BTreeSet::from([vec![]]));
    }
    for (s, set) in &m.sigma {
        for pi in 0..m.precisifications.len() {
            let ext = if set.contains(&pi) {
                BTreeSet::from([vec![]])
            } else {
                BTreeSet::new()
            };
            predicates.insert(standpoint_predicate(s, pi), ext);
        }
    }
    PlainStructure {
        domain_size: m.domain.len(),
        predicates,
        constants: m.constants.clone(),
    }
}

/// Satisfaction of a modality-free formula in a plain structure.
pub fn plain_eval(
    s: &PlainStructure,
    v: &VarAssignment,
    f: &FoFormula,
) -> Result<bool, FoEvalError> {
    Ok(match f {
        FoFormula::True => true,
        FoFormula::False => false,
        FoFormula::Pred(p, args) => {
            let tuple = args
                .iter()
                .map(|t| denote(t, v, &s.constants, s.domain_size))
                .collect::<Result<Vec<_>, _>>()?;
            match s.predicates.get(p) {
                Some(ext) => {
                    if let Some(first) = ext.iter().next() {
                        if first.len() != tuple.len() {
                            return Err(FoEvalError::ArityMismatch {
                                predicate: p.clone(),
                                expected: first.len(),
                                found: tuple.len(),
                            });
                        }
                    }
                    ext.contains(&tuple)
                }
                None => false,
            }
        }
        FoFormula::Not(g) => !plain_eval(s, v, g)?,
        FoFormula::And(l, r) => plain_eval(s, v, l)? && plain_eval(s, v, r)?,
        FoFormula::Or(l, r) => plain_eval(s, v, l)? || plain_eval(s, v, r)?,
        FoFormula::Implies(l, r) => !plain_eval(s, v, l)? || plain_eval(s, v, r)?,
        FoFormula::Forall(x, g) | FoFormula::Exists(x, g) => {
            let universal = matches!(f, FoFormula::Forall(..));
            let mut inner = v.clone();
            let mut result = universal;
            for d in 0..s.domain_size {
                inner.insert(x.clone(), d);
                if plain_eval(s, &inner, g)? != universal {
                    result = !universal;
                    break;
                }
            }
            result
        }
        FoFormula::Box(..) | FoFormula::Diamond(..) | FoFormula::Sharper(..) => {
            return Err(FoEvalError::ResidualModality)
        }
    })
}

// ---------------------------------------------------------------------------
// TPTP

/// One `fof` unit and the symbol renaming used to produce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TptpOutput {
    pub text: String,
    /// Source symbol → TPTP symbol, for predicates, constants and variables.
    pub mangling: BTreeMap<String, String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TptpError {
    #[error(transparent)]
    Formula(#[from] FoslError),
    #[error("invalid TPTP at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("predicate {0} is used with different arities")]
    Arity(String),
    #[error("variable {0} is not bound")]
    UnboundVariable(String),
}

fn sanitize(raw: &str) -> String {
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// TPTP `lower_word` for a predicate or constant.
fn lower_word(symbol: &str) -> String {
    let (base, suffix) = match symbol.split_once(['@', '#']) {
        Some((b, s)) => (b, Some(s)),
        None => (symbol, None),
    };
    let base = if base == "*" {
        "star".to_string()
    } else {
        sanitize(base).trim_start_matches('_').to_ascii_lowercase()
    };
    let mut word = match base.chars().next() {
        Some(c) if c.is_ascii_lowercase() => base,
        _ => format!("x{base}"),
    };
    if let Some(s) = suffix {
        word.push_str("__");
        word.push_str(&sanitize(s).to_ascii_lowercase());
    }
    word
}

fn upper_word(var: &str) -> String {
    let base = sanitize(var);
    let mut chars = base.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {
            format!("{}{}", c.to_ascii_uppercase(), chars.as_str())
        }
        _ => format!("V{base}"),
    }
}

struct Mangler {
    table: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl Mangler {
    fn get(&mut self, key: String, make: impl FnOnce(&str) -> String) -> String {
        if let Some(t) = self.table.get(&key) {
            return t.clone();
        }
        let base = make(&key);
        let mut candidate = base.clone();
        let mut k = 2;
        while self.used.contains(&candidate) {
            candidate = format!("{base}_{k}");
            k += 1;
        }
        self.used.insert(candidate.clone());
        self.table.insert(key, candidate.clone());
        candidate
    }
}

fn tptp_formula(f: &FoFormula, m: &mut Mangler, nested: bool) -> String {
    let paren = |s: String| if nested { format!("({s})") } else { s };
    match f {
        FoFormula::True => "$true".into(),
        FoFormula::False => "$false".into(),
        FoFormula::Pred(p, args) => {
            let name = m.get(format!("pred:{p}"), |k| lower_word(&k[5..]));
            if args.is_empty() {
                name
            } else {
                let args: Vec<String> = args
                    .iter()
                    .map(|t| match t {
                        Term::Var(x) => m.get(format!("var:{x}"), |k| upper_word(&k[4..])),
                        Term::Const(c) => m.get(format!("const:{c}"), |k| lower_word(&k[6..])),
                    })
                    .collect();
                format!("{name}({})", args.join(","))
            }
        }
        FoFormula::Not(g) => format!("~ {}", tptp_formula(g, m, true)),
        FoFormula::And(l, r) => paren(format!(
            "{} & {}",
            tptp_formula(l, m, true),
            tptp_formula(r, m, true)
        )),
        FoFormula::Or(l, r) => paren(format!(
            "{} | {}",
            tptp_formula(l, m, true),
            tptp_formula(r, m, true)
        )),
        FoFormula::Implies(l, r) => paren(format!(
            "{} => {}",
            tptp_formula(l, m, true),
            tptp_formula(r, m, true)
        )),
        FoFormula::Forall(x, g) | FoFormula::Exists(x, g) => {
            let q = if matches!(f, FoFormula::Forall(..)) { "!" } else { "?" };
            let var = m.get(format!("var:{x}"), |k| upper_word(&k[4..]));
            format!("{q} [{var}] : {}", tptp_formula(g, m, true))
        }
        FoFormula::Box(..) | FoFormula::Diamond(..) | FoFormula::Sharper(..) => {
            unreachable!("checked modality-free")
        }
    }
}

/// Renders a closed, modality-free formula as a TPTP `fof` axiom named `name`.
pub fn to_tptp(f: &FoFormula, name: &str) -> Result<TptpOutput, TptpError> {
    if !f.is_modality_free() {
        return Err(FoslError::ResidualModality.into());
    }
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(FoslError::OpenFormula(free.into_iter().collect()).into());
    }
    let mut m = Mangler {
        table: BTreeMap::new(),
        used: BTreeSet::new(),
    };
    let body = tptp_formula(f, &mut m, false);
    let text = format!("fof({}, axiom, {body}).", lower_word(name));
    validate_tptp(&text)?;
    let mangling = m
        .table
        .into_iter()
        .map(|(k, v)| (k.split_once(':').unwrap().1.to_string(), v))
        .collect();
    Ok(TptpOutput { text, mangling })
}

struct TptpChecker<'a> {
    src: &'a [u8],
    pos: usize,
    arities: BTreeMap<String, usize>,
    bound: Vec<String>,
}

impl TptpChecker<'_> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, TptpError> {
        Err(TptpError::Syntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), TptpError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.fail(format!("expected '{s}'"))
        }
    }

    fn word(&mut self) -> Result<String, TptpError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("expected a word");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn unit(&mut self) -> Result<(), TptpError> {
        self.expect("fof")?;
        self.expect("(")?;
        let name = self.word()?;
        if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
            return self.fail("unit name must be a lower word");
        }
        self.expect(",")?;
        let role = self.word()?;
        if !matches!(role.as_str(), "axiom" | "conjecture" | "hypothesis") {
            return self.fail(format!("unsupported role '{role}'"));
        }
        self.expect(",")?;
        self.formula()?;
        self.expect(")")?;
        self.expect(".")
    }

    fn formula(&mut self) -> Result<(), TptpError> {
        self.unitary()?;
        for op in ["<=>", "=>", "&", "|"] {
            if self.eat(op) {
                self.unitary()?;
                // associative chains of the same connective
                while (op == "&" || op == "|") && self.eat(op) {
                    self.unitary()?;
                }
                return Ok(());
            }
        }
        Ok(())
    }

    fn unitary(&mut self) -> Result<(), TptpError> {
        if self.eat("(") {
            self.formula()?;
            return self.expect(")");
        }
        if self.eat("~") {
            return self.unitary();
        }
        if self.eat("!") || self.eat("?") {
            self.expect("[")?;
            let mut vars = vec![self.word()?];
            while self.eat(",") {
                vars.push(self.word()?);
            }
            self.expect("]")?;
            self.expect(":")?;
            let depth = self.bound.len();
            for v in &vars {
                if !v.starts_with(|c: char| c.is_ascii_uppercase()) {
                    return self.fail("variables must be upper words");
                }
            }
            self.bound.extend(vars);
            let r = self.unitary();
            self.bound.truncate(depth);
            return r;
        }
        if self.eat("$true") || self.eat("$false") {
            return Ok(());
        }
        let pred = self.word()?;
        if !pred.starts_with(|c: char| c.is_ascii_lowercase()) {
            return self.fail("predicates must be lower words");
        }
        let mut arity = 0;
        if self.eat("(") {
            loop {
                let t = self.word()?;
                if t.starts_with(|c: char| c.is_ascii_uppercase()) && !self.bound.contains(&t) {
                    return Err(TptpError::UnboundVariable(t));
                }
                arity += 1;
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        if *self.arities.entry(pred.clone()).or_insert(arity) != arity {
            return Err(TptpError::Arity(pred));
        }
        Ok(())
    }
}

/// Checks TPTP FOF text produced by [`to_tptp`]: well-formed units, closed
/// formulas and consistent predicate arities across all units. Returns the
/// predicate arities.
pub fn validate_tptp(text: &str) -> Result<BTreeMap<String, usize>, TptpError> {
    let mut c = TptpChecker {
        src: text.as_bytes(),
        pos: 0,
        arities: BTreeMap::new(),
        bound: Vec::new(),
    };
    loop {
        c.skip_ws();
        if c.pos >= c.src.len() {
            break;
        }
        if c.src[c.pos] == b'%' {
            while c.pos < c.src.len() && c.src[c.pos] != b'\n' {
                c.pos += 1;
            }
            continue;
        }
        c.unit()?;
    }
    Ok(c.arities)
}
