//! Translation of standpoint formulas into plain propositional logic over
//! precisification-indexed atoms, and the correspondence between
//! valuations and standpoint structures.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::ast::{precisification_labels, Formula, StandpointExpr};
use crate::semantics::Structure;

/// An atom of the translated vocabulary. Precisifications are 0-based
/// indices and print as `pi1..pin`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropAtom {
    /// `p@π`: π belongs to δ(p).
    AtomAt(String, usize),
    /// `s@π`: π belongs to σ(s).
    StandAt(String, usize),
    /// `*@π`: π belongs to σ(*).
    StarAt(usize),
}

impl fmt::Display for PropAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropAtom::AtomAt(p, i) | PropAtom::StandAt(p, i) => write!(f, "{p}@pi{}", i + 1),
            PropAtom::StarAt(i) => write!(f, "*@pi{}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Const(bool),
    Lit(PropAtom),
    Not(Box<PropFormula>),
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn lit(a: PropAtom) -> Self {
        PropFormula::Lit(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn implies(l: PropFormula, r: PropFormula) -> Self {
        PropFormula::Implies(Box::new(l), Box::new(r))
    }

    /// Conjunction with nested conjunctions flattened; a single conjunct is returned as is.
    pub fn and(items: Vec<PropFormula>) -> Self {
        let mut flat = Vec::with_capacity(items.len());
        for item in items {
            match item {
                PropFormula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            PropFormula::And(flat)
        }
    }

    pub fn or(items: Vec<PropFormula>) -> Self {
        let mut flat = Vec::with_capacity(items.len());
        for item in items {
            match item {
                PropFormula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            PropFormula::Or(flat)
        }
    }

    /// Truth under `v`; atoms missing from `v` are false.
    pub fn eval(&self, v: &Valuation) -> bool {
        match self {
            PropFormula::Const(b) => *b,
            PropFormula::Lit(a) => v.get(a),
            PropFormula::Not(g) => !g.eval(v),
            PropFormula::And(xs) => xs.iter().all(|x| x.eval(v)),
            PropFormula::Or(xs) => xs.iter().any(|x| x.eval(v)),
            PropFormula::Implies(l, r) => !l.eval(v) || r.eval(v),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            PropFormula::Const(_) | PropFormula::Lit(_) => 1,
            PropFormula::Not(g) => 1 + g.node_count(),
            PropFormula::And(xs) | PropFormula::Or(xs) => {
                1 + xs.iter().map(PropFormula::node_count).sum::<usize>()
            }
            PropFormula::Implies(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<PropAtom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<PropAtom>) {
        match self {
            PropFormula::Const(_) => {}
            PropFormula::Lit(a) => {
                out.insert(a.clone());
            }
            PropFormula::Not(g) => g.collect_atoms(out),
            PropFormula::And(xs) | PropFormula::Or(xs) => {
                xs.iter().for_each(|x| x.collect_atoms(out))
            }
            PropFormula::Implies(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(x: &PropFormula, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
            let join = |f: &mut fmt::Formatter<'_>, xs: &[PropFormula], op: &str| {
                if !top {
                    f.write_str("(")?;
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {op} ")?;
                    }
                    go(x, f, false)?;
                }
                if !top {
                    f.write_str(")")?;
                }
                Ok(())
            };
            match x {
                PropFormula::Const(true) => f.write_str("true"),
                PropFormula::Const(false) => f.write_str("false"),
                PropFormula::Lit(a) => write!(f, "{a}"),
                PropFormula::Not(g) => {
                    f.write_str("~")?;
                    go(g, f, false)
                }
                PropFormula::And(xs) if xs.is_empty() => f.write_str("true"),
                PropFormula::Or(xs) if xs.is_empty() => f.write_str("false"),
                PropFormula::And(xs) => join(f, xs, "&"),
                PropFormula::Or(xs) => join(f, xs, "|"),
                PropFormula::Implies(l, r) => {
                    if !top {
                        f.write_str("(")?;
                    }
                    go(l, f, false)?;
                    f.write_str(" -> ")?;
                    go(r, f, false)?;
                    if !top {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, true)
    }
}

/// Truth assignment to translated atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation(BTreeMap<PropAtom, bool>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, a: PropAtom, value: bool) {
        self.0.insert(a, value);
    }

    pub fn get(&self, a: &PropAtom) -> bool {
        self.0.get(a).copied().unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PropAtom, bool)> {
        self.0.iter().map(|(a, b)| (a, *b))
    }

    /// True when every atom of `vocab` has an explicit value.
    pub fn is_total_over(&self, vocab: &Vocabulary) -> bool {
        vocab.atoms().all(|a| self.0.contains_key(&a))
    }
}

impl FromIterator<(PropAtom, bool)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (PropAtom, bool)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

/// The translated vocabulary: symbols of the source formula times `n` precisifications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    pub atoms: BTreeSet<String>,
    pub standpoints: BTreeSet<String>,
    pub precisifications: usize,
}

impl Vocabulary {
    pub fn of(f: &Formula, n: usize) -> Self {
        Vocabulary {
            atoms: f.atoms(),
            standpoints: f.standpoints(),
            precisifications: n,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        precisification_labels(self.precisifications)
    }

    /// Every atom of the vocabulary, grouped by precisification.
    pub fn atoms(&self) -> impl Iterator<Item = PropAtom> + '_ {
        (0..self.precisifications).flat_map(move |pi| {
            self.atoms
                .iter()
                .map(move |p| PropAtom::AtomAt(p.clone(), pi))
                .chain(
                    self.standpoints
                        .iter()
                        .map(move |s| PropAtom::StandAt(s.clone(), pi)),
                )
                .chain(std::iter::once(PropAtom::StarAt(pi)))
        })
    }
}

#[derive(Clone, Debug)]
pub struct Translation {
    pub formula: PropFormula,
    pub vocabulary: Vocabulary,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("the number of precisifications must be at least 1")]
    NoPrecisifications,
    #[error("structure precisifications {found:?} do not match the translation's {expected:?}")]
    PrecisificationMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
}

/// Membership of precisification `pi` in the denotation of `e`.
pub fn trans_expr(pi: usize, e: &StandpointExpr) -> PropFormula {
    match e {
        StandpointExpr::Star => PropFormula::lit(PropAtom::StarAt(pi)),
        StandpointExpr::Named(s) => PropFormula::lit(PropAtom::StandAt(s.clone(), pi)),
        StandpointExpr::Union(l, r) => PropFormula::or(vec![trans_expr(pi, l), trans_expr(pi, r)]),
        StandpointExpr::Inter(l, r) => {
            PropFormula::and(vec![trans_expr(pi, l), trans_expr(pi, r)])
        }
        StandpointExpr::Diff(l, r) => PropFormula::and(vec![
            trans_expr(pi, l),
            PropFormula::not(trans_expr(pi, r)),
        ]),
    }
}

struct Translator {
    n: usize,
    /// Translations of precisification-independent subformulas, keyed by node address.
    memo: HashMap<*const Formula, PropFormula>,
}

impl Translator {
    fn trans(&mut self, pi: usize, f: &Formula) -> PropFormula {
        match f {
            Formula::True => PropFormula::Const(true),
            Formula::False => PropFormula::Const(false),
            Formula::Atom(p) => PropFormula::lit(PropAtom::AtomAt(p.clone(), pi)),
            Formula::Not(g) => PropFormula::not(self.trans(pi, g)),
            Formula::And(l, r) => PropFormula::and(vec![self.trans(pi, l), self.trans(pi, r)]),
            Formula::Or(l, r) => PropFormula::or(vec![self.trans(pi, l), self.trans(pi, r)]),
            Formula::Implies(l, r) => PropFormula::implies(self.trans(pi, l), self.trans(pi, r)),
            Formula::Box(..) | Formula::Diamond(..) | Formula::Sharper(..) => {
                let key = f as *const Formula;
                if let Some(done) = self.memo.get(&key) {
                    return done.clone();
                }
                let out = self.trans_global(f);
                self.memo.insert(key, out.clone());
                out
            }
        }
    }

    fn trans_global(&mut self, f: &Formula) -> PropFormula {
        let n = self.n;
        match f {
            Formula::Box(e, g) => PropFormula::and(
                (0..n)
                    .map(|pi| PropFormula::implies(trans_expr(pi, e), self.trans(pi, g)))
                    .collect(),
            ),
            Formula::Diamond(e, g) => PropFormula::or(
                (0..n)
                    .map(|pi| PropFormula::and(vec![trans_expr(pi, e), self.trans(pi, g)]))
                    .collect(),
            ),
            Formula::Sharper(l, r) => PropFormula::and(
                (0..n)
                    .map(|pi| PropFormula::implies(trans_expr(pi, l), trans_expr(pi, r)))
                    .collect(),
            ),
            _ => unreachable!("only precisification-independent nodes are translated globally"),
        }
    }
}

/// `trans(π, f)` over `n` precisifications.
pub fn trans(pi: usize, f: &Formula, n: usize) -> PropFormula {
    Translator {
        n,
        memo: HashMap::new(),
    }
    .trans(pi, f)
}

/// `Trans_n(f)`: `f` at every precisification, plus `*@π` for every π.
///
/// `n` defaults to `|Sub(f)|`. Syntactically identical top-level conjuncts
/// are emitted once.
pub fn translate_formula(f: &Formula, n: Option<usize>) -> Result<Translation, TranslateError> {
    let n = n.unwrap_or_else(|| f.size());
    if n == 0 {
        return Err(TranslateError::NoPrecisifications);
    }
    let mut translator = Translator {
        n,
        memo: HashMap::new(),
    };
    let mut conjuncts: IndexSet<PropFormula> = IndexSet::new();
    for pi in 0..n {
        match translator.trans(pi, f) {
            PropFormula::And(parts) => conjuncts.extend(parts),
            other => {
                conjuncts.insert(other);
            }
        }
    }
    conjuncts.extend((0..n).map(|pi| PropFormula::lit(PropAtom::StarAt(pi))));
    Ok(Translation {
        formula: PropFormula::and(conjuncts.into_iter().collect()),
        vocabulary: Vocabulary::of(f, n),
    })
}

/// The structure `M_v` over the vocabulary's precisifications.
///
/// Every standpoint and atom of the vocabulary gets an entry, possibly empty.
/// `*@π` atoms are not consulted.
pub fn extract_model(v: &Valuation, vocab: &Vocabulary) -> Structure {
    let n = vocab.precisifications;
    let collect = |names: &BTreeSet<String>, make: &dyn Fn(String, usize) -> PropAtom| {
        names
            .iter()
            .map(|name| {
                let set: BTreeSet<usize> =
                    (0..n).filter(|&pi| v.get(&make(name.clone(), pi))).collect();
                (name.clone(), set)
            })
            .collect::<BTreeMap<_, _>>()
    };
    let sigma = collect(&vocab.standpoints, &PropAtom::StandAt);
    let delta = collect(&vocab.atoms, &PropAtom::AtomAt);
    Structure::new(vocab.labels(), sigma, delta).expect("extracted structures are well-formed")
}

/// True when all `*@π` atoms are set, as `Trans_n` requires.
pub fn stars_pinned(v: &Valuation, vocab: &Vocabulary) -> bool {
    (0..vocab.precisifications).all(|pi| v.get(&PropAtom::StarAt(pi)))
}

/// The valuation `v_M` of a structure over the vocabulary's precisifications.
pub fn encode_model(m: &Structure, vocab: &Vocabulary) -> Result<Valuation, TranslateError> {
    let expected = vocab.labels();
    if m.precisifications() != expected.as_slice() {
        return Err(TranslateError::PrecisificationMismatch {
            expected,
            found: m.precisifications().to_vec(),
        });
    }
    Ok(vocab
        .atoms()
        .map(|a| {
            let value = match &a {
                PropAtom::AtomAt(p, pi) => m.holds(p, *pi),
                PropAtom::StandAt(s, pi) => m.standpoint(s).contains(pi),
                PropAtom::StarAt(_) => true,
            };
            (a, value)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn lit_stand(s: &str, pi: usize) -> PropFormula {
        PropFormula::lit(PropAtom::StandAt(s.into(), pi))
    }

    fn lit_atom(p: &str, pi: usize) -> PropFormula {
        PropFormula::lit(PropAtom::AtomAt(p.into(), pi))
    }

    fn star(pi: usize) -> PropFormula {
        PropFormula::lit(PropAtom::StarAt(pi))
    }

    #[test]
    fn trans_expr_examples() {
        let s = StandpointExpr::named("s");
        let t = StandpointExpr::named("t");
        assert_eq!(trans_expr(0, &s), lit_stand("s", 0));
        assert_eq!(
            trans_expr(0, &StandpointExpr::union(s.clone(), t.clone())),
            PropFormula::Or(vec![lit_stand("s", 0), lit_stand("t", 0)])
        );
        assert_eq!(trans_expr(0, &StandpointExpr::Star), star(0));
        assert_eq!(
            trans_expr(1, &StandpointExpr::diff(s, t)),
            PropFormula::And(vec![lit_stand("s", 1), PropFormula::not(lit_stand("t", 1))])
        );
    }

    #[test]
    fn translate_examples() {
        assert_eq!(trans(0, &f("p"), 1), lit_atom("p", 0));

        let t = translate_formula(&f("[s] p"), Some(2)).unwrap();
        assert_eq!(
            t.formula,
            PropFormula::And(vec![
                PropFormula::implies(lit_stand("s", 0), lit_atom("p", 0)),
                PropFormula::implies(lit_stand("s", 1), lit_atom("p", 1)),
                star(0),
                star(1),
            ])
        );

        let t = translate_formula(&f("p"), Some(1)).unwrap();
        assert_eq!(t.formula, PropFormula::And(vec![lit_atom("p", 0), star(0)]));
        assert_eq!(t.formula.to_string(), "p@pi1 & *@pi1");

        assert_eq!(
            translate_formula(&f("p"), Some(0)).unwrap_err(),
            TranslateError::NoPrecisifications
        );
        assert_eq!(translate_formula(&f("[s] p & p"), None).unwrap().vocabulary.precisifications, 3);
    }

    #[test]
    fn sharpening_over_expressions() {
        let t = trans(0, &f("(s <= t u *)"), 1);
        assert_eq!(
            t,
            PropFormula::implies(lit_stand("s", 0), PropFormula::Or(vec![lit_stand("t", 0), star(0)]))
        );
    }

    #[test]
    fn extract_and_encode() {
        let vocab = Vocabulary::of(&f("[s] p"), 1);
        let v: Valuation = [(PropAtom::StandAt("s".into(), 0), true)].into_iter().collect();
        let m = extract_model(&v, &vocab);
        assert_eq!(m.standpoint("s"), BTreeSet::from([0]));
        assert!(m.delta()["p"].is_empty());

        let all_false: Valuation = vocab.atoms().map(|a| (a, false)).collect();
        let m = extract_model(&all_false, &vocab);
        assert_eq!(m.precisifications(), &["pi1".to_string()]);
        assert!(m.delta()["p"].is_empty());

        let vocab = Vocabulary::of(&f("[s] p"), 2);
        let m = Structure::new(
            vocab.labels(),
            [("s".to_string(), BTreeSet::from([0]))].into(),
            [("p".to_string(), BTreeSet::new())].into(),
        )
        .unwrap();
        let v = encode_model(&m, &vocab).unwrap();
        assert!(v.is_total_over(&vocab));
        assert!(v.get(&PropAtom::StandAt("s".into(), 0)));
        assert!(!v.get(&PropAtom::StandAt("s".into(), 1)));
        assert!(v.get(&PropAtom::StarAt(0)) && v.get(&PropAtom::StarAt(1)));
        assert!(!v.get(&PropAtom::AtomAt("p".into(), 0)));
        assert!(stars_pinned(&v, &vocab));
        assert_eq!(extract_model(&v, &vocab), m);

        let wrong = Structure::new(vec!["x".into()], BTreeMap::new(), BTreeMap::new()).unwrap();
        assert!(encode_model(&wrong, &vocab).is_err());
    }
}
