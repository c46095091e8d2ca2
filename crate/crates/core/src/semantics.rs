//! Reference semantics of propositional standpoint logic.
//!
//! A [`Structure`] is a finite, non-empty list of precisifications together
//! with a standpoint assignment `sigma` and an atom valuation `delta`, both
//! mapping symbols to sets of precisification indices. Symbols missing from
//! either map denote the empty set.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ast::{subformulas, Formula, StandpointExpr, SubformulaIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("Π must be non-empty")]
    Empty,
    #[error("unknown precisification {0}")]
    UnknownPrecisification(String),
    #[error("duplicate precisification {0}")]
    DuplicatePrecisification(String),
    #[error("precisification index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("'*' cannot appear in sigma: it always denotes every precisification")]
    StarInSigma,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    precisifications: Vec<String>,
    sigma: BTreeMap<String, BTreeSet<usize>>,
    delta: BTreeMap<String, BTreeSet<usize>>,
}

impl Structure {
    pub fn new(
        precisifications: Vec<String>,
        sigma: BTreeMap<String, BTreeSet<usize>>,
        delta: BTreeMap<String, BTreeSet<usize>>,
    ) -> Result<Self, StructureError> {
        if precisifications.is_empty() {
            return Err(StructureError::Empty);
        }
        let mut seen = BTreeSet::new();
        for p in &precisifications {
            if !seen.insert(p) {
                return Err(StructureError::DuplicatePrecisification(p.clone()));
            }
        }
        if sigma.contains_key("*") {
            return Err(StructureError::StarInSigma);
        }
        let n = precisifications.len();
        for set in sigma.values().chain(delta.values()) {
            if let Some(&bad) = set.iter().find(|&&i| i >= n) {
                return Err(StructureError::IndexOutOfRange(bad));
            }
        }
        Ok(Structure {
            precisifications,
            sigma,
            delta,
        })
    }

    pub fn precisifications(&self) -> &[String] {
        &self.precisifications
    }

    pub fn len(&self) -> usize {
        self.precisifications.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sigma(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.sigma
    }

    pub fn delta(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.delta
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.precisifications.iter().position(|p| p == label)
    }

    pub fn standpoint(&self, s: &str) -> BTreeSet<usize> {
        self.sigma.get(s).cloned().unwrap_or_default()
    }

    pub fn holds(&self, atom: &str, pi: usize) -> bool {
        self.delta.get(atom).is_some_and(|set| set.contains(&pi))
    }

    /// Substructure on the kept precisifications, in their original order.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Structure {
        let remap: BTreeMap<usize, usize> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let project = |map: &BTreeMap<String, BTreeSet<usize>>| {
            map.iter()
                .map(|(k, set)| {
                    (
                        k.clone(),
                        set.iter().filter_map(|i| remap.get(i).copied()).collect(),
                    )
                })
                .collect()
        };
        Structure {
            precisifications: keep
                .iter()
                .map(|&i| self.precisifications[i].clone())
                .collect(),
            sigma: project(&self.sigma),
            delta: project(&self.delta),
        }
    }

    fn all(&self) -> BTreeSet<usize> {
        (0..self.len()).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("precisification index {0} is not in Π")]
    UnknownPrecisification(usize),
}

/// Precisifications denoted by a standpoint expression.
pub fn sigma_eval(m: &Structure, e: &StandpointExpr) -> BTreeSet<usize> {
    match e {
        StandpointExpr::Star => m.all(),
        StandpointExpr::Named(s) => m.standpoint(s),
        StandpointExpr::Union(l, r) => &sigma_eval(m, l) | &sigma_eval(m, r),
        StandpointExpr::Inter(l, r) => &sigma_eval(m, l) & &sigma_eval(m, r),
        StandpointExpr::Diff(l, r) => &sigma_eval(m, l) - &sigma_eval(m, r),
    }
}

/// Truth of `f` at precisification `pi` (an index into `m.precisifications()`).
pub fn eval(m: &Structure, pi: usize, f: &Formula) -> Result<bool, EvalError> {
    if pi >= m.len() {
        return Err(EvalError::UnknownPrecisification(pi));
    }
    Ok(eval_unchecked(m, pi, f))
}

fn eval_unchecked(m: &Structure, pi: usize, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => m.holds(p, pi),
        Formula::Not(g) => !eval_unchecked(m, pi, g),
        Formula::And(l, r) => eval_unchecked(m, pi, l) && eval_unchecked(m, pi, r),
        Formula::Or(l, r) => eval_unchecked(m, pi, l) || eval_unchecked(m, pi, r),
        Formula::Implies(l, r) => !eval_unchecked(m, pi, l) || eval_unchecked(m, pi, r),
        Formula::Box(e, g) => sigma_eval(m, e).into_iter().all(|q| eval_unchecked(m, q, g)),
        Formula::Diamond(e, g) => sigma_eval(m, e).into_iter().any(|q| eval_unchecked(m, q, g)),
        Formula::Sharper(l, r) => sigma_eval(m, l).is_subset(&sigma_eval(m, r)),
    }
}

/// `M ⊨ φ`: truth at every precisification.
pub fn eval_global(m: &Structure, f: &Formula) -> bool {
    (0..m.len()).all(|pi| eval_unchecked(m, pi, f))
}

/// Labels computed by [`model_check`] for one subformula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    /// One truth value per precisification.
    Local(Vec<bool>),
    /// A single truth value shared by all precisifications.
    Model(bool),
}

impl Label {
    pub fn at(&self, pi: usize) -> bool {
        match self {
            Label::Local(v) => v[pi],
            Label::Model(b) => *b,
        }
    }
}

/// Output of the labelling model checker.
#[derive(Clone, Debug)]
pub struct LabelTable {
    index: SubformulaIndex,
    labels: Vec<Label>,
    steps: u64,
}

impl LabelTable {
    pub fn index(&self) -> &SubformulaIndex {
        &self.index
    }

    pub fn label(&self, entry: usize) -> &Label {
        &self.labels[entry]
    }

    /// Truth of the root formula at `pi`.
    pub fn root_at(&self, pi: usize) -> bool {
        self.labels[self.index.root()].at(pi)
    }

    pub fn holds_globally(&self, precisifications: usize) -> bool {
        (0..precisifications).all(|pi| self.root_at(pi))
    }

    /// Number of elementary labelling operations performed.
    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Bottom-up labelling over the subformula index: precisifications are
/// labelled for atoms and Boolean nodes, the model itself for modal and
/// sharpening nodes.
pub fn model_check(m: &Structure, f: &Formula) -> LabelTable {
    let index = subformulas(f);
    let n = m.len();
    let mut steps: u64 = 0;
    let mut labels: Vec<Label> = Vec::with_capacity(index.len());

    let expr_eval = |e: &StandpointExpr, steps: &mut u64| {
        *steps += (n * e.node_count()) as u64;
        sigma_eval(m, e)
    };

    for (i, entry) in index.iter() {
        let kids = index.children(i);
        let label = match entry {
            Formula::True | Formula::False => Label::Model(matches!(entry, Formula::True)),
            Formula::Atom(p) => {
                steps += n as u64;
                Label::Local((0..n).map(|pi| m.holds(p, pi)).collect())
            }
            Formula::Not(_) => {
                steps += n as u64;
                match &labels[kids[0]] {
                    Label::Model(b) => Label::Model(!b),
                    Label::Local(v) => Label::Local(v.iter().map(|b| !b).collect()),
                }
            }
            Formula::And(..) | Formula::Or(..) | Formula::Implies(..) => {
                steps += n as u64;
                let (l, r) = (&labels[kids[0]], &labels[kids[1]]);
                let op = |a: bool, b: bool| match entry {
                    Formula::And(..) => a && b,
                    Formula::Or(..) => a || b,
                    _ => !a || b,
                };
                match (l, r) {
                    (Label::Model(a), Label::Model(b)) => Label::Model(op(*a, *b)),
                    _ => Label::Local((0..n).map(|pi| op(l.at(pi), r.at(pi))).collect()),
                }
            }
            Formula::Box(e, _) | Formula::Diamond(e, _) => {
                let members = expr_eval(e, &mut steps);
                steps += members.len() as u64;
                let body = &labels[kids[0]];
                let value = if matches!(entry, Formula::Box(..)) {
                    members.iter().all(|&pi| body.at(pi))
                } else {
                    members.iter().any(|&pi| body.at(pi))
                };
                Label::Model(value)
            }
            Formula::Sharper(l, r) => {
                let (a, b) = (expr_eval(l, &mut steps), expr_eval(r, &mut steps));
                steps += n as u64;
                Label::Model(a.is_subset(&b))
            }
        };
        labels.push(label);
    }
    LabelTable {
        index,
        labels,
        steps,
    }
}

/// Satisfiability mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Truth at every precisification of some structure.
    #[default]
    Global,
    /// Truth at some precisification of some structure.
    Local,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "global" => Ok(Mode::Global),
            "local" => Ok(Mode::Local),
            other => Err(format!("unknown mode '{other}' (expected global or local)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub mode: Mode,
    /// Only consider structures where every standpoint symbol of the formula is non-empty.
    pub nonempty: bool,
    /// Maximum number of precisifications; `None` means `|Sub(φ)|`.
    pub cap: Option<usize>,
    /// Maximum number of candidate structures.
    pub budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            mode: Mode::Global,
            nonempty: false,
            cap: None,
            budget: 10_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space too large: {states} candidate structures exceed the budget of {budget}")]
    TooLarge { states: u128, budget: u64 },
    #[error("precisification cap must be at least 1")]
    ZeroCap,
}

/// Subformula truth sets as bitmasks over at most 64 precisifications.
struct MaskEvaluator<'a> {
    index: &'a SubformulaIndex,
    atoms: Vec<String>,
    standpoints: Vec<String>,
}

impl<'a> MaskEvaluator<'a> {
    fn expr(&self, e: &StandpointExpr, sp_masks: &[u64], full: u64) -> u64 {
        match e {
            StandpointExpr::Star => full,
            StandpointExpr::Named(s) => self
                .standpoints
                .iter()
                .position(|x| x == s)
                .map_or(0, |i| sp_masks[i]),
            StandpointExpr::Union(l, r) => self.expr(l, sp_masks, full) | self.expr(r, sp_masks, full),
            StandpointExpr::Inter(l, r) => self.expr(l, sp_masks, full) & self.expr(r, sp_masks, full),
            StandpointExpr::Diff(l, r) => self.expr(l, sp_masks, full) & !self.expr(r, sp_masks, full),
        }
    }

    /// Mask of precisifications at which the root holds.
    fn root_mask(&self, atom_masks: &[u64], sp_masks: &[u64], full: u64, scratch: &mut Vec<u64>) -> u64 {
        scratch.clear();
        let all_or_none = |b: bool| if b { full } else { 0 };
        for (i, entry) in self.index.iter() {
            let kids = self.index.children(i);
            let v = match entry {
                Formula::True => full,
                Formula::False => 0,
                Formula::Atom(p) => self
                    .atoms
                    .iter()
                    .position(|x| x == p)
                    .map_or(0, |j| atom_masks[j]),
                Formula::Not(_) => full & !scratch[kids[0]],
                Formula::And(..) => scratch[kids[0]] & scratch[kids[1]],
                Formula::Or(..) => scratch[kids[0]] | scratch[kids[1]],
                Formula::Implies(..) => full & (!scratch[kids[0]] | scratch[kids[1]]),
                Formula::Box(e, _) => {
                    let members = self.expr(e, sp_masks, full);
                    all_or_none(members & !scratch[kids[0]] == 0)
                }
                Formula::Diamond(e, _) => {
                    let members = self.expr(e, sp_masks, full);
                    all_or_none(members & scratch[kids[0]] != 0)
                }
                Formula::Sharper(l, r) => {
                    let (a, b) = (self.expr(l, sp_masks, full), self.expr(r, sp_masks, full));
                    all_or_none(a & !b == 0)
                }
            };
            scratch.push(v);
        }
        scratch[self.index.root()]
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Exhaustive bounded search for a satisfying structure.
///
/// A precisification is characterised by its *type*: the set of atoms and
/// standpoint symbols of `f` it belongs to. Two precisifications of the same
/// type agree on every formula, so a structure with `n` precisifications
/// satisfies exactly what the set of its distinct types satisfies. The search
/// therefore enumerates, for `n = 1..=cap`, every `n`-element set of distinct
/// types in increasing order, which covers every structure of size at most
/// `cap` up to duplicate precisifications.
pub fn sat_oracle(f: &Formula, config: &OracleConfig) -> Result<Option<Structure>, OracleError> {
    let index = subformulas(f);
    let cap = config.cap.unwrap_or(index.len());
    if cap == 0 {
        return Err(OracleError::ZeroCap);
    }
    let evaluator = MaskEvaluator {
        index: &index,
        atoms: f.atoms().into_iter().collect(),
        standpoints: f.standpoints().into_iter().collect(),
    };
    let n_atoms = evaluator.atoms.len();
    let symbols = n_atoms + evaluator.standpoints.len();
    let too_large = |states| OracleError::TooLarge {
        states,
        budget: config.budget,
    };
    if symbols >= 64 {
        return Err(too_large(u128::MAX));
    }
    let types: u64 = 1u64 << symbols;
    let max_n = (cap.min(index.len()) as u64).min(types) as usize;
    let states: u128 = (1..=max_n as u128)
        .map(|k| binomial(types as u128, k))
        .fold(0u128, |a, b| a.saturating_add(b));
    if states > config.budget as u128 || max_n > 64 {
        return Err(too_large(states));
    }

    let standpoint_bits: u64 = ((1u64 << symbols) - 1) & !((1u64 << n_atoms) - 1);
    let mut scratch = Vec::with_capacity(index.len());
    let mut atom_masks = vec![0u64; n_atoms];
    let mut sp_masks = vec![0u64; evaluator.standpoints.len()];

    for n in 1..=max_n {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut combo: Vec<u64> = (0..n as u64).collect();
        loop {
            let covered = combo.iter().fold(0u64, |acc, t| acc | t);
            if !config.nonempty || covered & standpoint_bits == standpoint_bits {
                for (j, mask) in atom_masks.iter_mut().enumerate() {
                    *mask = bits_with(&combo, j);
                }
                for (j, mask) in sp_masks.iter_mut().enumerate() {
                    *mask = bits_with(&combo, n_atoms + j);
                }
                let root = evaluator.root_mask(&atom_masks, &sp_masks, full, &mut scratch);
                let satisfied = match config.mode {
                    Mode::Global => root == full,
                    Mode::Local => root != 0,
                };
                if satisfied {
                    return Ok(Some(structure_from_types(&evaluator, &combo)));
                }
            }
            if !next_combination(&mut combo, types) {
                break;
            }
        }
    }
    Ok(None)
}

fn bits_with(combo: &[u64], symbol: usize) -> u64 {
    combo
        .iter()
        .enumerate()
        .filter(|(_, t)| (*t >> symbol) & 1 == 1)
        .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
}

/// Advances to the next strictly increasing combination of values below `bound`.
fn next_combination(combo: &mut [u64], bound: u64) -> bool {
    let n = combo.len();
    let mut i = n;
    while i > 0 {
        i -= 1;
        if combo[i] < bound - (n - i) as u64 {
            combo[i] += 1;
            for j in i + 1..n {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn structure_from_types(ev: &MaskEvaluator<'_>, combo: &[u64]) -> Structure {
    let n_atoms = ev.atoms.len();
    let members = |bit: usize| -> BTreeSet<usize> {
        combo
            .iter()
            .enumerate()
            .filter(|(_, t)| (*t >> bit) & 1 == 1)
            .map(|(i, _)| i)
            .collect()
    };
    let delta = ev
        .atoms
        .iter()
        .enumerate()
        .map(|(j, p)| (p.clone(), members(j)))
        .collect();
    let sigma = ev
        .standpoints
        .iter()
        .enumerate()
        .map(|(j, s)| (s.clone(), members(n_atoms + j)))
        .collect();
    Structure::new(crate::ast::precisification_labels(combo.len()), sigma, delta)
        .expect("oracle structures are well-formed")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PruneError {
    #[error("the structure does not globally satisfy the formula")]
    NotAModel,
}

/// Shrinks a model of `f` to the precisifications that witness its falsified
/// boxes, satisfied diamonds and falsified sharpenings.
///
/// Witnesses are the smallest eligible precisification index. When no witness
/// is needed the result keeps only the first precisification.
pub fn prune(m: &Structure, f: &Formula) -> Result<Structure, PruneError> {
    let table = model_check(m, f);
    if !table.holds_globally(m.len()) {
        return Err(PruneError::NotAModel);
    }
    let index = table.index();
    let mut keep = BTreeSet::new();
    for (i, entry) in index.iter() {
        let witness = match entry {
            Formula::Box(e, _) if !table.label(i).at(0) => {
                let body = table.label(index.children(i)[0]);
                sigma_eval(m, e).into_iter().find(|&pi| !body.at(pi))
            }
            Formula::Diamond(e, _) if table.label(i).at(0) => {
                let body = table.label(index.children(i)[0]);
                sigma_eval(m, e).into_iter().find(|&pi| body.at(pi))
            }
            Formula::Sharper(l, r) if !table.label(i).at(0) => {
                (&sigma_eval(m, l) - &sigma_eval(m, r)).into_iter().next()
            }
            _ => None,
        };
        keep.extend(witness);
    }
    if keep.is_empty() {
        keep.insert(0);
    }
    Ok(m.restrict(&keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_formula;

    fn structure(n: usize, sigma: &[(&str, &[usize])], delta: &[(&str, &[usize])]) -> Structure {
        let conv = |xs: &[(&str, &[usize])]| {
            xs.iter()
                .map(|(k, v)| (k.to_string(), v.iter().copied().collect()))
                .collect()
        };
        Structure::new(crate::ast::precisification_labels(n), conv(sigma), conv(delta)).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn sigma_eval_examples() {
        let m = structure(3, &[("s", &[0, 1]), ("t", &[1, 2])], &[]);
        assert_eq!(sigma_eval(&m, &StandpointExpr::Star), BTreeSet::from([0, 1, 2]));
        let s = StandpointExpr::named("s");
        assert!(sigma_eval(&m, &StandpointExpr::diff(s.clone(), s.clone())).is_empty());
        let st = crate::frontend::parse_standpoint_expr("s n t").unwrap();
        assert_eq!(sigma_eval(&m, &st), BTreeSet::from([1]));
        assert!(sigma_eval(&m, &StandpointExpr::named("zzz")).is_empty());
    }

    #[test]
    fn eval_examples() {
        let m = structure(1, &[("s", &[])], &[("p", &[0])]);
        assert!(eval(&m, 0, &f("[s] false")).unwrap());
        assert!(eval(&m, 0, &f("p")).unwrap());
        assert_eq!(eval(&m, 3, &f("p")), Err(EvalError::UnknownPrecisification(3)));

        let m = structure(2, &[("s", &[1])], &[("p", &[0])]);
        assert!(!eval(&m, 0, &f("[s] p")).unwrap());
    }

    #[test]
    fn eval_global_examples() {
        let m = structure(2, &[], &[("p", &[0])]);
        assert!(eval_global(&m, &Formula::True));
        assert!(!eval_global(&m, &f("p")));
        assert!(eval_global(&m, &f("<*> p")));
    }

    #[test]
    fn model_check_examples() {
        let m = structure(2, &[("s", &[0, 1]), ("t", &[0, 1])], &[("p", &[0])]);
        let table = model_check(&m, &f("p"));
        assert_eq!(table.label(0), &Label::Local(vec![true, false]));

        let table = model_check(&m, &f("(s <= t)"));
        assert_eq!(table.label(table.index().root()), &Label::Model(true));

        let table = model_check(&m, &f("[s] p"));
        assert_eq!(table.label(table.index().root()), &Label::Model(false));
        assert!(table.steps() > 0);
    }

    #[test]
    fn oracle_examples() {
        let cfg = OracleConfig::default();
        assert_eq!(sat_oracle(&f("p & ~p"), &cfg).unwrap(), None);
        assert_eq!(sat_oracle(&f("[s] p & <s> ~p"), &cfg).unwrap(), None);

        let m = sat_oracle(&f("<s> p & <s> ~p"), &cfg).unwrap().unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.standpoint("s"), BTreeSet::from([0, 1]));
        assert_eq!(m.delta()["p"].len(), 1);
    }

    #[test]
    fn oracle_modes_and_nonempty() {
        let cfg = OracleConfig::default();
        // p & <*> ~p is globally unsatisfiable but locally satisfiable.
        let g = f("p & <*> ~p");
        assert_eq!(sat_oracle(&g, &cfg).unwrap(), None);
        let local = OracleConfig {
            mode: Mode::Local,
            ..cfg.clone()
        };
        let m = sat_oracle(&g, &local).unwrap().unwrap();
        assert!((0..m.len()).any(|pi| eval(&m, pi, &g).unwrap()));

        // [s] p & [s] ~p only has models with an empty standpoint.
        let d = f("[s] p & [s] ~p");
        assert!(sat_oracle(&d, &cfg).unwrap().is_some());
        let nonempty = OracleConfig {
            nonempty: true,
            ..cfg
        };
        assert_eq!(sat_oracle(&d, &nonempty).unwrap(), None);
    }

    #[test]
    fn oracle_budget_guard() {
        let cfg = OracleConfig {
            budget: 10,
            ..OracleConfig::default()
        };
        let err = sat_oracle(&f("<a> p & <b> q & <c> r & [a] ~p"), &cfg).unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { .. }));
        assert!(err.to_string().starts_with("search space too large"));
    }

    #[test]
    fn prune_examples() {
        let m = structure(1, &[("s", &[0])], &[("p", &[0])]);
        assert_eq!(prune(&m, &f("[s] p")).unwrap(), m);

        let m = structure(3, &[("s", &[0, 1, 2])], &[("p", &[0])]);
        let phi = f("<s> p");
        let pruned = prune(&m, &phi).unwrap();
        assert_eq!(pruned.precisifications(), &["pi1".to_string()]);
        assert!(eval_global(&pruned, &phi));

        // Same formula in desugared form: the falsified [s] ~p needs the same witness.
        let phi = crate::ast::desugar(&phi, false);
        let pruned = prune(&m, &phi).unwrap();
        assert_eq!(pruned.precisifications(), &["pi1".to_string()]);

        let m = structure(2, &[("s", &[1]), ("t", &[])], &[]);
        let phi = f("~(s <= t)");
        let pruned = prune(&m, &phi).unwrap();
        assert_eq!(pruned.precisifications(), &["pi2".to_string()]);
        assert!(eval_global(&pruned, &phi));

        assert_eq!(prune(&m, &f("(s <= t)")), Err(PruneError::NotAModel));
    }

    #[test]
    fn next_combination_enumerates_all_subsets() {
        let mut combo = vec![0, 1];
        let mut seen = vec![combo.clone()];
        while next_combination(&mut combo, 4) {
            seen.push(combo.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen.last().unwrap(), &vec![2, 3]);
        assert_eq!(binomial(16, 3), 560);
    }
}
