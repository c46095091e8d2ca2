//! Clausification, a DPLL satisfiability core and DIMACS interchange.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::translate::{PropAtom, PropFormula, Valuation};

/// A formula in conjunctive normal form over variables `1..=num_vars`.
///
/// `names` maps variable indices to display names; `atoms` records which
/// variable stands for which translated atom (empty for parsed input).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    pub names: BTreeMap<u32, String>,
    pub atoms: BTreeMap<PropAtom, u32>,
}

impl CnfFormula {
    pub fn var_of(&self, atom: &PropAtom) -> Option<u32> {
        self.atoms.get(atom).copied()
    }

    /// Valuation of the translated atoms under `assignment`.
    pub fn valuation(&self, assignment: &Assignment) -> Valuation {
        self.atoms
            .iter()
            .map(|(a, &v)| (a.clone(), assignment.value(v)))
            .collect()
    }
}

/// Total assignment to variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn value(&self, var: u32) -> bool {
        self.0[var as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lit_true(&self, lit: i32) -> bool {
        self.value(lit.unsigned_abs()) == (lit > 0)
    }

    pub fn satisfies(&self, cnf: &CnfFormula) -> bool {
        cnf.clauses
            .iter()
            .all(|c| c.iter().any(|&l| self.lit_true(l)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("decision budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("solver produced an assignment that falsifies clause {0}")]
    VerificationFailed(usize),
}

struct Tseitin {
    cnf: CnfFormula,
    cache: HashMap<PropFormula, i32>,
    aux: u32,
}

impl Tseitin {
    fn fresh(&mut self, name: String) -> i32 {
        self.cnf.num_vars += 1;
        let v = self.cnf.num_vars;
        self.cnf.names.insert(v, name);
        v as i32
    }

    fn atom(&mut self, a: &PropAtom) -> i32 {
        if let Some(&v) = self.cnf.atoms.get(a) {
            return v as i32;
        }
        let v = self.fresh(a.to_string());
        self.cnf.atoms.insert(a.clone(), v as u32);
        v
    }

    /// A literal equivalent to `f`, which must be constant-free.
    fn encode(&mut self, f: &PropFormula) -> i32 {
        match f {
            PropFormula::Lit(a) => return self.atom(a),
            PropFormula::Not(g) => return -self.encode(g),
            _ => {}
        }
        if let Some(&l) = self.cache.get(f) {
            return l;
        }
        let (xs, conj): (Vec<i32>, bool) = match f {
            PropFormula::And(items) => (items.iter().map(|x| self.encode(x)).collect(), true),
            PropFormula::Or(items) => (items.iter().map(|x| self.encode(x)).collect(), false),
            PropFormula::Implies(l, r) => (vec![-self.encode(l), self.encode(r)], false),
            PropFormula::Const(_) | PropFormula::Lit(_) | PropFormula::Not(_) => unreachable!(),
        };
        self.aux += 1;
        let a = self.fresh(format!("_aux{}", self.aux));
        if conj {
            for &x in &xs {
                self.cnf.clauses.push(vec![-a, x]);
            }
            let mut big = vec![a];
            big.extend(xs.iter().map(|x| -x));
            self.cnf.clauses.push(big);
        } else {
            for &x in &xs {
                self.cnf.clauses.push(vec![a, -x]);
            }
            let mut big = vec![-a];
            big.extend(xs);
            self.cnf.clauses.push(big);
        }
        self.cache.insert(f.clone(), a);
        a
    }

    fn assert(&mut self, f: &PropFormula) {
        match f {
            PropFormula::And(items) => items.iter().for_each(|x| self.assert(x)),
            PropFormula::Or(items) if items.iter().all(is_literal) => {
                let clause = items.iter().map(|x| self.encode(x)).collect();
                self.cnf.clauses.push(clause);
            }
            PropFormula::Implies(l, r) if is_literal(l) && is_literal(r) => {
                let clause = vec![-self.encode(l), self.encode(r)];
                self.cnf.clauses.push(clause);
            }
            other => {
                let l = self.encode(other);
                self.cnf.clauses.push(vec![l]);
            }
        }
    }
}

fn is_literal(f: &PropFormula) -> bool {
    match f {
        PropFormula::Lit(_) => true,
        PropFormula::Not(g) => matches!(**g, PropFormula::Lit(_)),
        _ => false,
    }
}

/// Propagates constants; the result is either `Const` or constant-free.
fn fold_constants(f: &PropFormula) -> PropFormula {
    match f {
        PropFormula::Const(_) | PropFormula::Lit(_) => f.clone(),
        PropFormula::Not(g) => match fold_constants(g) {
            PropFormula::Const(b) => PropFormula::Const(!b),
            g => PropFormula::not(g),
        },
        PropFormula::And(items) | PropFormula::Or(items) => {
            let conj = matches!(f, PropFormula::And(_));
            let mut kept = Vec::with_capacity(items.len());
            for item in items {
                match fold_constants(item) {
                    // absorbing element
                    PropFormula::Const(b) if b != conj => return PropFormula::Const(b),
                    PropFormula::Const(_) => {}
                    other => kept.push(other),
                }
            }
            match kept.len() {
                0 => PropFormula::Const(conj),
                _ if conj => PropFormula::and(kept),
                _ => PropFormula::or(kept),
            }
        }
        PropFormula::Implies(l, r) => match (fold_constants(l), fold_constants(r)) {
            (PropFormula::Const(false), _) | (_, PropFormula::Const(true)) => PropFormula::Const(true),
            (PropFormula::Const(true), r) => r,
            (l, PropFormula::Const(false)) => fold_constants(&PropFormula::not(l)),
            (l, r) => PropFormula::implies(l, r),
        },
    }
}

/// Equisatisfiable clausal form (Tseitin encoding with shared subterms).
///
/// Every translated atom of `f` receives a variable, named after the atom,
/// with standpoint memberships numbered first; auxiliary variables are named
/// `_auxK`.
pub fn to_cnf(f: &PropFormula) -> CnfFormula {
    let mut t = Tseitin {
        cnf: CnfFormula::default(),
        cache: HashMap::new(),
        aux: 0,
    };
    // standpoint membership first: branching on it settles which
    // precisifications matter before their per-precisification labels
    let mut atoms: Vec<PropAtom> = f.atoms().into_iter().collect();
    atoms.sort_by_key(|a| !matches!(a, PropAtom::StandAt(..) | PropAtom::StarAt(_)));
    for a in &atoms {
        t.atom(a);
    }
    match fold_constants(f) {
        PropFormula::Const(true) => {}
        PropFormula::Const(false) => t.cnf.clauses.push(vec![]),
        g => t.assert(&g),
    }
    t.cnf
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Maximum number of branching decisions.
    pub decision_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            decision_budget: 50_000_000,
        }
    }
}

const UNASSIGNED: i8 = 0;

fn lit_index(lit: i32) -> usize {
    let v = lit.unsigned_abs() as usize;
    2 * v + usize::from(lit < 0)
}

fn lit_value(values: &[i8], lit: i32) -> i8 {
    let v = values[lit.unsigned_abs() as usize];
    if lit > 0 {
        v
    } else {
        -v
    }
}

/// Why a variable holds its value.
#[derive(Clone, Debug)]
enum Reason {
    Decision,
    /// Forced by the clause with this index.
    Clause(usize),
    /// Second branch of a decision; forced by the decisions at these levels.
    Flip(Vec<usize>),
    /// Level-zero fact or pure literal; depends on no decision.
    Free,
}

struct Frame {
    trail_len: usize,
    lit: i32,
    flipped: bool,
}

/// DPLL search state: one instance per solve.
///
/// Backtracking is conflict-directed: a failed branch returns to the most
/// recent decision the conflict depends on, skipping decisions that played
/// no part. No clauses are learned.
struct Dpll {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    watches: Vec<Vec<usize>>,
    values: Vec<i8>,
    reasons: Vec<Reason>,
    levels: Vec<usize>,
    trail: Vec<i32>,
    queue_head: usize,
    frames: Vec<Frame>,
    decisions: u64,
    budget: u64,
}

impl Dpll {
    fn value(&self, lit: i32) -> i8 {
        lit_value(&self.values, lit)
    }

    fn assign(&mut self, lit: i32, reason: Reason) {
        let v = lit.unsigned_abs() as usize;
        self.values[v] = if lit > 0 { 1 } else { -1 };
        self.reasons[v] = reason;
        self.levels[v] = self.frames.len();
        self.trail.push(lit);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let lit = self.trail.pop().unwrap();
            self.values[lit.unsigned_abs() as usize] = UNASSIGNED;
        }
        self.queue_head = self.queue_head.min(len);
    }

    /// Unit propagation over two watched literals. Returns the falsified
    /// clause on conflict.
    fn propagate(&mut self) -> Option<usize> {
        while self.queue_head < self.trail.len() {
            let falsified = -self.trail[self.queue_head];
            self.queue_head += 1;
            let watching = std::mem::take(&mut self.watches[lit_index(falsified)]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = None;
            for (pos, &ci) in watching.iter().enumerate() {
                if conflict.is_some() {
                    keep.extend_from_slice(&watching[pos..]);
                    break;
                }
                let values = &self.values;
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                if lit_value(values, other) == 1 {
                    keep.push(ci);
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| lit_value(values, clause[k]) != -1);
                match replacement {
                    Some(k) => {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[lit_index(new_watch)].push(ci);
                    }
                    None => {
                        keep.push(ci);
                        if lit_value(&self.values, other) == -1 {
                            conflict = Some(ci);
                        } else {
                            self.assign(other, Reason::Clause(ci));
                        }
                    }
                }
            }
            self.watches[lit_index(falsified)] = keep;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// Decision levels the falsity of clause `ci` depends on.
    fn conflict_levels(&self, ci: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut seen = vec![false; self.num_vars + 1];
        let mut stack: Vec<usize> = self.clauses[ci]
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .collect();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) || self.levels[v] == 0 {
                continue;
            }
            match &self.reasons[v] {
                Reason::Decision => {
                    out.insert(self.levels[v]);
                }
                Reason::Clause(r) => stack.extend(
                    self.clauses[*r]
                        .iter()
                        .map(|l| l.unsigned_abs() as usize)
                        .filter(|&u| u != v),
                ),
                Reason::Flip(deps) => out.extend(deps.iter().copied()),
                Reason::Free => debug_assert!(false, "pure literal in a conflict"),
            }
        }
        out
    }

    /// Assigns pure literals of the unsatisfied clauses and picks the next
    /// branching variable. `None` means every clause is satisfied.
    fn pure_literals_and_branch(&mut self) -> Option<u32> {
        let mut polarity = vec![0u8; self.num_vars + 1];
        for clause in &self.clauses {
            if clause.iter().any(|&l| self.value(l) == 1) {
                continue;
            }
            for &l in clause {
                if self.value(l) == UNASSIGNED {
                    polarity[l.unsigned_abs() as usize] |= if l > 0 { 1 } else { 2 };
                }
            }
        }
        let mut branch = None;
        for (v, &p) in polarity.iter().enumerate().skip(1) {
            match p {
                1 => self.assign(v as i32, Reason::Free),
                2 => self.assign(-(v as i32), Reason::Free),
                3 if branch.is_none() => branch = Some(v as u32),
                _ => {}
            }
        }
        // without a mixed-polarity variable, the pure literals close every open clause
        branch
    }

    /// Returns to the latest decision in `conflict` and takes its other
    /// branch. False when the conflict depends on no open decision.
    fn backjump(&mut self, mut conflict: BTreeSet<usize>) -> bool {
        while let Some(level) = conflict.pop_last() {
            self.frames.truncate(level);
            let frame = self.frames.last_mut().expect("levels start at 1");
            let (trail_len, lit) = (frame.trail_len, frame.lit);
            if frame.flipped {
                // both branches failed; the flip's own dependencies were
                // already folded in when it was assigned
                let v = lit.unsigned_abs() as usize;
                if let Reason::Flip(deps) = &self.reasons[v] {
                    conflict.extend(deps.iter().copied());
                }
                self.frames.pop();
                self.undo_to(trail_len);
                continue;
            }
            frame.flipped = true;
            frame.lit = -lit;
            self.undo_to(trail_len);
            self.assign(-lit, Reason::Flip(conflict.into_iter().collect()));
            return true;
        }
        false
    }

    fn run(&mut self) -> Result<bool, SolveError> {
        loop {
            if let Some(ci) = self.propagate() {
                let levels = self.conflict_levels(ci);
                if !self.backjump(levels) {
                    return Ok(false);
                }
                continue;
            }
            let before = self.trail.len();
            let branch = self.pure_literals_and_branch();
            if self.trail.len() != before && self.propagate().is_some() {
                // pure literals never falsify an open clause
                unreachable!("pure literal assignment caused a conflict");
            }
            let Some(var) = branch else {
                return Ok(true);
            };
            if self.value(var as i32) != UNASSIGNED {
                continue;
            }
            self.decisions += 1;
            if self.decisions > self.budget {
                return Err(SolveError::BudgetExceeded(self.budget));
            }
            self.frames.push(Frame {
                trail_len: self.trail.len(),
                lit: var as i32,
                flipped: false,
            });
            self.assign(var as i32, Reason::Decision);
        }
    }
}

/// Decides satisfiability with the default decision budget.
pub fn solve(cnf: &CnfFormula) -> Result<SolveResult, SolveError> {
    solve_with(cnf, SolverConfig::default())
}

/// DPLL with unit propagation, pure-literal elimination and branching on the
/// lowest-numbered open variable (true first). Unconstrained variables are
/// reported false.
pub fn solve_with(cnf: &CnfFormula, config: SolverConfig) -> Result<SolveResult, SolveError> {
    let n = cnf.num_vars as usize;
    let mut dpll = Dpll {
        num_vars: n,
        clauses: Vec::with_capacity(cnf.clauses.len()),
        watches: vec![Vec::new(); 2 * n + 2],
        values: vec![UNASSIGNED; n + 1],
        reasons: vec![Reason::Free; n + 1],
        levels: vec![0; n + 1],
        trail: Vec::new(),
        queue_head: 0,
        frames: Vec::new(),
        decisions: 0,
        budget: config.decision_budget,
    };
    let mut units = Vec::new();
    for raw in &cnf.clauses {
        let mut clause: Vec<i32> = Vec::with_capacity(raw.len());
        for &l in raw {
            if !clause.contains(&l) {
                clause.push(l);
            }
        }
        if clause.iter().any(|&l| clause.contains(&-l)) {
            continue;
        }
        match clause.len() {
            0 => return Ok(SolveResult::Unsat),
            1 => units.push(clause[0]),
            _ => {
                let ci = dpll.clauses.len();
                dpll.watches[lit_index(clause[0])].push(ci);
                dpll.watches[lit_index(clause[1])].push(ci);
                dpll.clauses.push(clause);
            }
        }
    }
    for u in units {
        match dpll.value(u) {
            1 => {}
            -1 => return Ok(SolveResult::Unsat),
            _ => dpll.assign(u, Reason::Free),
        }
    }
    if !dpll.run()? {
        return Ok(SolveResult::Unsat);
    }
    let assignment = Assignment((1..=n).map(|v| dpll.values[v] == 1).collect());
    if let Some(bad) = cnf
        .clauses
        .iter()
        .position(|c| !c.iter().any(|&l| assignment.lit_true(l)))
    {
        return Err(SolveError::VerificationFailed(bad));
    }
    Ok(SolveResult::Sat(assignment))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header (expected 'p cnf <vars> <clauses>')")]
    MalformedHeader { line: usize },
    #[error("line {line}: clause data before the 'p cnf' header")]
    MissingHeader { line: usize },
    #[error("line {line}: invalid literal '{token}'")]
    InvalidLiteral { line: usize, token: String },
    #[error("literal {literal} exceeds declared {vars} variables")]
    LiteralOutOfRange { literal: i32, vars: u32 },
    #[error("last clause is missing its terminating 0")]
    MissingTerminator,
    #[error("header declares {declared} clauses but {found} were given")]
    ClauseCount { declared: usize, found: usize },
}

/// DIMACS CNF text; variable names become `c var <index> <name>` comments.
pub fn emit_dimacs(cnf: &CnfFormula) -> String {
    let mut out = String::new();
    for (v, name) in &cnf.names {
        let _ = writeln!(out, "c var {v} {name}");
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for clause in &cnf.clauses {
        for l in clause {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut cnf = CnfFormula::default();
    let mut header: Option<(u32, usize)> = None;
    let mut current: Vec<i32> = Vec::new();
    let mut open = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "c" || trimmed.starts_with("c ") {
            let mut parts = trimmed.splitn(4, ' ');
            if let (Some("c"), Some("var"), Some(idx), Some(name)) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            {
                if let Ok(v) = idx.parse::<u32>() {
                    cnf.names.insert(v, name.to_string());
                }
            }
            continue;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            match (parsed, header) {
                (Some(h), None) => header = Some(h),
                _ => return Err(DimacsError::MalformedHeader { line: lineno }),
            }
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(DimacsError::MissingHeader { line: lineno });
        };
        for token in trimmed.split_whitespace() {
            let literal: i32 = token.parse().map_err(|_| DimacsError::InvalidLiteral {
                line: lineno,
                token: token.to_string(),
            })?;
            if literal == 0 {
                cnf.clauses.push(std::mem::take(&mut current));
                open = false;
            } else {
                if literal.unsigned_abs() > vars {
                    return Err(DimacsError::LiteralOutOfRange { literal, vars });
                }
                current.push(literal);
                open = true;
            }
        }
    }
    let Some((vars, declared)) = header else {
        return Err(DimacsError::MalformedHeader { line: 0 });
    };
    if open {
        return Err(DimacsError::MissingTerminator);
    }
    if declared != cnf.clauses.len() {
        return Err(DimacsError::ClauseCount {
            declared,
            found: cnf.clauses.len(),
        });
    }
    cnf.num_vars = vars;
    Ok(cnf)
}
