//! Abstract syntax of propositional standpoint formulas.
//!
//! Formulas are plain owned trees. The "core" fragment produced by
//! [`desugar`] uses only `True`, `False`, `Atom`, `Not`, `And`, `Box` and
//! `Sharper`; [`nnf`] reintroduces `Or` and `Diamond` as duals.

use std::collections::{BTreeSet, HashMap};

/// A standpoint expression: `*`, a standpoint symbol, or a set-algebraic
/// combination of expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StandpointExpr {
    Star,
    Named(String),
    Union(Box<StandpointExpr>, Box<StandpointExpr>),
    Inter(Box<StandpointExpr>, Box<StandpointExpr>),
    Diff(Box<StandpointExpr>, Box<StandpointExpr>),
}

impl StandpointExpr {
    pub fn named(name: impl Into<String>) -> Self {
        StandpointExpr::Named(name.into())
    }

    pub fn union(l: StandpointExpr, r: StandpointExpr) -> Self {
        StandpointExpr::Union(Box::new(l), Box::new(r))
    }

    pub fn inter(l: StandpointExpr, r: StandpointExpr) -> Self {
        StandpointExpr::Inter(Box::new(l), Box::new(r))
    }

    pub fn diff(l: StandpointExpr, r: StandpointExpr) -> Self {
        StandpointExpr::Diff(Box::new(l), Box::new(r))
    }

    /// Standpoint symbols occurring in the expression (`*` excluded).
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    pub(crate) fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            StandpointExpr::Star => {}
            StandpointExpr::Named(s) => {
                out.insert(s.clone());
            }
            StandpointExpr::Union(l, r)
            | StandpointExpr::Inter(l, r)
            | StandpointExpr::Diff(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            StandpointExpr::Star | StandpointExpr::Named(_) => 1,
            StandpointExpr::Union(l, r)
            | StandpointExpr::Inter(l, r)
            | StandpointExpr::Diff(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }
}

/// A propositional standpoint formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `[e] φ`: φ holds at every precisification of `e`.
    Box(StandpointExpr, Box<Formula>),
    /// `<e> φ`: φ holds at some precisification of `e`.
    Diamond(StandpointExpr, Box<Formula>),
    /// `(e1 <= e2)`: every precisification of `e1` belongs to `e2`.
    Sharper(StandpointExpr, StandpointExpr),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    /// `l <-> r`, encoded as `(l -> r) & (r -> l)`.
    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::and(
            Formula::implies(l.clone(), r.clone()),
            Formula::implies(r, l),
        )
    }

    pub fn boxed(e: StandpointExpr, f: Formula) -> Self {
        Formula::Box(e, Box::new(f))
    }

    pub fn diamond(e: StandpointExpr, f: Formula) -> Self {
        Formula::Diamond(e, Box::new(f))
    }

    pub fn sharper(l: StandpointExpr, r: StandpointExpr) -> Self {
        Formula::Sharper(l, r)
    }

    /// Conjunction of all formulas, `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Sharper(..) => vec![],
            Formula::Not(f) | Formula::Box(_, f) | Formula::Diamond(_, f) => vec![f],
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => vec![l, r],
        }
    }

    /// Propositional symbols occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Standpoint symbols occurring in the formula (`*` excluded).
    pub fn standpoints(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Box(e, _) | Formula::Diamond(e, _) => e.collect_symbols(&mut out),
            Formula::Sharper(l, r) => {
                l.collect_symbols(&mut out);
                r.collect_symbols(&mut out);
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    /// Number of tree nodes (standpoint expressions not counted).
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// Number of distinct subformulas, `|Sub(φ)|`.
    pub fn size(&self) -> usize {
        subformulas(self).len()
    }

    /// Literals are atoms, constants and sharpening statements, possibly negated once.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(inner) => inner.is_leaf(),
            f => f.is_leaf(),
        }
    }

    fn is_leaf(&self) -> bool {
        matches!(
            self,
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Sharper(..)
        )
    }

    /// True when the formula uses only the core connectives.
    pub fn is_core(&self) -> bool {
        let mut core = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::Or(..) | Formula::Implies(..) | Formula::Diamond(..)) {
                core = false;
            }
        });
        core
    }
}

/// Eliminates `Or`, `Implies` and `Diamond` in favour of `Not`, `And` and `Box`.
///
/// With `lower_sharpening` set, `(e1 <= e2)` becomes `[e1 \ e2] false`.
pub fn desugar(f: &Formula, lower_sharpening: bool) -> Formula {
    let d = |g: &Formula| desugar(g, lower_sharpening);
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(d(g)),
        Formula::And(l, r) => Formula::and(d(l), d(r)),
        Formula::Or(l, r) => Formula::not(Formula::and(Formula::not(d(l)), Formula::not(d(r)))),
        Formula::Implies(l, r) => Formula::not(Formula::and(d(l), Formula::not(d(r)))),
        Formula::Box(e, g) => Formula::boxed(e.clone(), d(g)),
        Formula::Diamond(e, g) => Formula::not(Formula::boxed(e.clone(), Formula::not(d(g)))),
        Formula::Sharper(l, r) => {
            if lower_sharpening {
                Formula::boxed(StandpointExpr::diff(l.clone(), r.clone()), Formula::False)
            } else {
                f.clone()
            }
        }
    }
}

/// Negation normal form: negation only in front of atoms, constants and
/// sharpening statements.
pub fn nnf(f: &Formula) -> Formula {
    to_nnf(f, true)
}

fn to_nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::True => {
            if positive {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if positive {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Atom(_) | Formula::Sharper(..) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(g) => to_nnf(g, !positive),
        Formula::And(l, r) => {
            let (l, r) = (to_nnf(l, positive), to_nnf(r, positive));
            if positive {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        Formula::Or(l, r) => {
            let (l, r) = (to_nnf(l, positive), to_nnf(r, positive));
            if positive {
                Formula::or(l, r)
            } else {
                Formula::and(l, r)
            }
        }
        Formula::Implies(l, r) => {
            if positive {
                Formula::or(to_nnf(l, false), to_nnf(r, true))
            } else {
                Formula::and(to_nnf(l, true), to_nnf(r, false))
            }
        }
        Formula::Box(e, g) => {
            let body = to_nnf(g, positive);
            if positive {
                Formula::boxed(e.clone(), body)
            } else {
                Formula::diamond(e.clone(), body)
            }
        }
        Formula::Diamond(e, g) => {
            let body = to_nnf(g, positive);
            if positive {
                Formula::diamond(e.clone(), body)
            } else {
                Formula::boxed(e.clone(), body)
            }
        }
    }
}

/// The distinct subformulas of a root formula in children-first order.
#[derive(Clone, Debug)]
pub struct SubformulaIndex {
    entries: Vec<Formula>,
    children: Vec<Vec<usize>>,
    lookup: HashMap<Formula, usize>,
}

impl SubformulaIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Formula] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Formula {
        &self.entries[i]
    }

    /// Indices of the direct children of entry `i`.
    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.lookup.get(f).copied()
    }

    pub fn root(&self) -> usize {
        self.entries.len() - 1
    }

    /// Canonical precisification labels, one per subformula.
    pub fn labels(&self) -> Vec<String> {
        precisification_labels(self.len())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Formula)> {
        self.entries.iter().enumerate()
    }
}

/// Labels `pi1..pin`.
pub fn precisification_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("pi{i}")).collect()
}

pub fn subformulas(root: &Formula) -> SubformulaIndex {
    let mut index = SubformulaIndex {
        entries: Vec::new(),
        children: Vec::new(),
        lookup: HashMap::new(),
    };
    insert_postorder(root, &mut index);
    index
}

fn insert_postorder(f: &Formula, index: &mut SubformulaIndex) -> usize {
    if let Some(&i) = index.lookup.get(f) {
        return i;
    }
    let kids: Vec<usize> = f
        .children()
        .into_iter()
        .map(|c| insert_postorder(c, index))
        .collect();
    let i = index.entries.len();
    index.entries.push(f.clone());
    index.children.push(kids);
    index.lookup.insert(f.clone(), i);
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn s() -> StandpointExpr {
        StandpointExpr::named("s")
    }

    #[test]
    fn desugar_diamond_to_negated_box() {
        let f = Formula::diamond(s(), p());
        assert_eq!(
            desugar(&f, false),
            Formula::not(Formula::boxed(s(), Formula::not(p())))
        );
    }

    #[test]
    fn desugar_identity_on_core() {
        assert_eq!(desugar(&p(), false), p());
        let f = Formula::and(Formula::boxed(s(), p()), Formula::not(p()));
        assert_eq!(desugar(&f, true), f);
    }

    #[test]
    fn desugar_lowers_sharpening_on_request() {
        let t = StandpointExpr::named("t");
        let f = Formula::sharper(s(), t.clone());
        assert_eq!(desugar(&f, false), f);
        assert_eq!(
            desugar(&f, true),
            Formula::boxed(StandpointExpr::diff(s(), t), Formula::False)
        );
    }

    #[test]
    fn nnf_examples() {
        let q = Formula::atom("q");
        assert_eq!(
            nnf(&Formula::not(Formula::and(p(), q.clone()))),
            Formula::or(Formula::not(p()), Formula::not(q))
        );
        assert_eq!(
            nnf(&Formula::not(Formula::boxed(s(), p()))),
            Formula::diamond(s(), Formula::not(p()))
        );
        assert_eq!(nnf(&Formula::not(Formula::not(p()))), p());
    }

    #[test]
    fn subformula_order_and_dedup() {
        let idx = subformulas(&p());
        assert_eq!(idx.entries(), &[p()]);

        let bp = Formula::boxed(s(), p());
        let f = Formula::and(bp.clone(), p());
        let idx = subformulas(&f);
        assert_eq!(idx.entries(), &[p(), bp, f.clone()]);
        assert_eq!(idx.root(), 2);
        assert_eq!(idx.children(2), &[1, 0]);

        let pp = Formula::and(p(), p());
        let idx = subformulas(&pp);
        assert_eq!(idx.entries(), &[p(), pp.clone()]);
        assert_eq!(idx.labels(), vec!["pi1", "pi2"]);
    }

    #[test]
    fn symbol_collection() {
        let f = Formula::and(
            Formula::boxed(StandpointExpr::union(s(), StandpointExpr::Star), p()),
            Formula::sharper(StandpointExpr::named("t"), s()),
        );
        assert_eq!(f.atoms().into_iter().collect::<Vec<_>>(), vec!["p"]);
        assert_eq!(f.standpoints().into_iter().collect::<Vec<_>>(), vec!["s", "t"]);
    }
}
