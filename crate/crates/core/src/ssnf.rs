//! Standpoint standard normal form.
//!
//! [`ssnf`] introduces a fresh atom `L_ψ` for every compound subformula and
//! emits one definitional implication per subformula, oriented by the
//! polarity at which the subformula occurs. Every definition contains at
//! most one modal operator, applied to a literal, so the result has modal
//! depth at most one. Literals stand for themselves.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexSet;

use crate::ast::Formula;
use crate::frontend::print_formula;

/// Prefix of introduced definitional atoms.
pub const LABEL_PREFIX: &str = "_def_";

/// Nesting depth of `Box`/`Diamond`. Sharpening statements count as depth 0.
pub fn modal_depth(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Sharper(..) => 0,
        Formula::Not(g) => modal_depth(g),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            modal_depth(l).max(modal_depth(r))
        }
        Formula::Box(_, g) | Formula::Diamond(_, g) => 1 + modal_depth(g),
    }
}

/// 64-bit FNV-1a; stable across platforms and toolchains.
pub(crate) fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Deterministic fresh names for subformulas, derived from their printed form.
pub(crate) struct LabelNames<K> {
    taken: BTreeSet<String>,
    names: HashMap<K, String>,
}

impl<K: std::hash::Hash + Eq + Clone> LabelNames<K> {
    pub(crate) fn new(reserved: BTreeSet<String>) -> Self {
        LabelNames {
            taken: reserved,
            names: HashMap::new(),
        }
    }

    pub(crate) fn name(&mut self, key: &K, canonical: impl FnOnce() -> String) -> String {
        if let Some(n) = self.names.get(key) {
            return n.clone();
        }
        let base = format!("{LABEL_PREFIX}{:08x}", fnv1a(&canonical()) as u32);
        let mut candidate = base.clone();
        let mut k = 1;
        while self.taken.contains(&candidate) {
            candidate = format!("{base}_{k}");
            k += 1;
        }
        self.taken.insert(candidate.clone());
        self.names.insert(key.clone(), candidate.clone());
        candidate
    }
}

struct Builder {
    names: LabelNames<Formula>,
    defs: IndexSet<Formula>,
}

impl Builder {
    fn label(&mut self, f: &Formula) -> Formula {
        if f.is_literal() {
            return f.clone();
        }
        if let Formula::Not(inner) = f {
            return Formula::not(self.label(inner));
        }
        Formula::Atom(self.names.name(f, || print_formula(f)))
    }

    fn define(&mut self, def: Formula) {
        self.defs.insert(def);
    }

    fn positive(&mut self, f: &Formula) {
        if f.is_literal() {
            return;
        }
        let me = self.label(f);
        match f {
            Formula::Not(g) => self.negative(g),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (la, lb) = (self.label(a), self.label(b));
                let body = if matches!(f, Formula::And(..)) {
                    Formula::and(la, lb)
                } else {
                    Formula::or(la, lb)
                };
                self.define(Formula::implies(me, body));
                self.positive(a);
                self.positive(b);
            }
            Formula::Implies(a, b) => {
                let body = Formula::implies(self.label(a), self.label(b));
                self.define(Formula::implies(me, body));
                self.negative(a);
                self.positive(b);
            }
            Formula::Box(e, a) => {
                let body = Formula::boxed(e.clone(), self.label(a));
                self.define(Formula::implies(me, body));
                self.positive(a);
            }
            Formula::Diamond(e, a) => {
                let body = Formula::diamond(e.clone(), self.label(a));
                self.define(Formula::implies(me, body));
                self.positive(a);
            }
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Sharper(..) => {}
        }
    }

    fn negative(&mut self, f: &Formula) {
        if f.is_literal() {
            return;
        }
        let me = self.label(f);
        match f {
            Formula::Not(g) => self.positive(g),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (la, lb) = (self.label(a), self.label(b));
                let body = if matches!(f, Formula::And(..)) {
                    Formula::and(la, lb)
                } else {
                    Formula::or(la, lb)
                };
                self.define(Formula::implies(body, me));
                self.negative(a);
                self.negative(b);
            }
            Formula::Implies(a, b) => {
                let body = Formula::implies(self.label(a), self.label(b));
                self.define(Formula::implies(body, me));
                self.positive(a);
                self.negative(b);
            }
            Formula::Box(e, a) => {
                let body = Formula::boxed(e.clone(), self.label(a));
                self.define(Formula::implies(body, me));
                self.negative(a);
            }
            Formula::Diamond(e, a) => {
                let body = Formula::diamond(e.clone(), self.label(a));
                self.define(Formula::implies(body, me));
                self.negative(a);
            }
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Sharper(..) => {}
        }
    }
}

/// Structure-preserving translation into standpoint standard normal form.
///
/// The result is `L_φ ∧ def_1 ∧ … ∧ def_k` (or `φ` itself for a literal)
/// and is equisatisfiable with `f` under global satisfiability.
pub fn ssnf(f: &Formula) -> Formula {
    if f.is_literal() {
        return f.clone();
    }
    let mut b = Builder {
        names: LabelNames::new(f.atoms()),
        defs: IndexSet::new(),
    };
    let root = b.label(f);
    b.positive(f);
    Formula::conjunction(std::iter::once(root).chain(b.defs))
}

/// The top-level conjuncts of a formula, left to right.
pub fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(l, r) => {
            let mut out = conjuncts(l);
            out.extend(conjuncts(r));
            out
        }
        other => vec![other],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{nnf, StandpointExpr};
    use crate::frontend::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn literals_are_unchanged() {
        assert_eq!(ssnf(&f("p")), f("p"));
        assert_eq!(ssnf(&f("~p")), f("~p"));
        assert_eq!(ssnf(&f("(s <= t)")), f("(s <= t)"));
    }

    #[test]
    fn single_box() {
        let out = ssnf(&f("[s] p"));
        let parts = conjuncts(&out);
        assert_eq!(parts.len(), 2);
        let Formula::Atom(l1) = parts[0] else {
            panic!("root label must be an atom: {out}")
        };
        assert!(l1.starts_with(LABEL_PREFIX));
        assert_eq!(
            parts[1],
            &Formula::implies(Formula::atom(l1.clone()), f("[s] p"))
        );
    }

    #[test]
    fn nested_boxes_flatten() {
        let out = ssnf(&f("[s] [t] p"));
        let parts = conjuncts(&out);
        assert_eq!(parts.len(), 3);
        let (Formula::Atom(l1), Formula::Implies(a, b), Formula::Implies(c, d)) =
            (parts[0], parts[1], parts[2])
        else {
            panic!("unexpected shape: {out}")
        };
        assert_eq!(**a, Formula::atom(l1.clone()));
        let Formula::Box(StandpointExpr::Named(s), l2) = &**b else {
            panic!()
        };
        assert_eq!(s, "s");
        assert_eq!(**c, **l2);
        assert_eq!(**d, f("[t] p"));
        assert_eq!(modal_depth(&out), 1);
    }

    #[test]
    fn modal_depth_examples() {
        assert_eq!(modal_depth(&f("p & q")), 0);
        assert_eq!(modal_depth(&f("[s] p")), 1);
        assert_eq!(modal_depth(&f("[s] <t> p")), 2);
        assert_eq!(modal_depth(&f("(s <= t) & [s] p")), 1);
    }

    #[test]
    fn negative_polarity_definitions() {
        // ~[s] p: the box occurs negatively, so its definition points into the label.
        let out = ssnf(&f("~[s] p"));
        let parts = conjuncts(&out);
        assert!(matches!(parts[0], Formula::Not(_)));
        assert!(matches!(parts[1], Formula::Implies(l, _) if matches!(**l, Formula::Box(..))));
    }

    #[test]
    fn nnf_input_uses_positive_definitions_only() {
        let out = ssnf(&nnf(&f("~([s] (p -> <t> q) & ~[*] r)")));
        for def in conjuncts(&out).into_iter().skip(1) {
            let Formula::Implies(head, _) = def else {
                panic!("definition expected: {def}")
            };
            assert!(matches!(&**head, Formula::Atom(l) if l.starts_with(LABEL_PREFIX)));
        }
    }

    #[test]
    fn labels_avoid_user_atoms() {
        let phi = f("[s] p");
        let clash = format!("{LABEL_PREFIX}{:08x}", fnv1a(&print_formula(&phi)) as u32);
        let with_clash = Formula::and(phi, Formula::atom(clash.clone()));
        let out = ssnf(&with_clash);
        let introduced: BTreeSet<String> = out
            .atoms()
            .into_iter()
            .filter(|a| a.starts_with(LABEL_PREFIX) && *a != clash)
            .collect();
        assert_eq!(introduced.len(), 2);
    }
}
