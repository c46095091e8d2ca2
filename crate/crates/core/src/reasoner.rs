//! The satisfiability pipeline: normal form, translation, clausification,
//! search, and model extraction with a semantic re-check.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ast::{Formula, StandpointExpr};
use crate::sat::{solve_with, to_cnf, SolveError, SolveResult, SolverConfig};
use crate::semantics::{eval_global, Mode, Structure};
use crate::ssnf::ssnf;
use crate::translate::{extract_model, translate_formula, TranslateError};

#[derive(Clone, Copy, Debug)]
pub struct DecideConfig {
    pub mode: Mode,
    /// Require every standpoint occurring in the input to be non-empty.
    pub nonempty: bool,
    /// Number of precisifications; defaults to the subformula count.
    pub precisifications: Option<usize>,
    /// Normalise before translating.
    pub normalize: bool,
    pub solver: SolverConfig,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig {
            mode: Mode::Global,
            nonempty: false,
            precisifications: None,
            normalize: true,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A model; the formula holds at every precisification (global mode) or
    /// at some precisification (local mode).
    Sat(Structure),
    Unsat,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn model(&self) -> Option<&Structure> {
        match self {
            Verdict::Sat(m) => Some(m),
            Verdict::Unsat => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// A structure with a precisification falsifying the formula.
    Invalid(Structure),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("internal error: the extracted structure does not satisfy the formula")]
    ModelRejected,
}

/// The formula actually decided: `◇_* f` in local mode, conjoined with
/// `◇_s true` for every standpoint when non-emptiness is requested.
pub fn prepare(f: &Formula, config: &DecideConfig) -> Formula {
    let base = match config.mode {
        Mode::Global => f.clone(),
        Mode::Local => Formula::diamond(StandpointExpr::Star, f.clone()),
    };
    if !config.nonempty {
        return base;
    }
    let seriality = f
        .standpoints()
        .into_iter()
        .map(|s| Formula::diamond(StandpointExpr::Named(s), Formula::True));
    Formula::conjunction(std::iter::once(base).chain(seriality))
}

/// Decides satisfiability of `f` and returns a verified model when one exists.
pub fn decide(f: &Formula, config: &DecideConfig) -> Result<Verdict, DecideError> {
    let goal = prepare(f, config);
    let n = config.precisifications.unwrap_or_else(|| goal.size());
    let input = if config.normalize { ssnf(&goal) } else { goal.clone() };
    let translation = translate_formula(&input, Some(n))?;
    let cnf = to_cnf(&translation.formula);
    match solve_with(&cnf, config.solver)? {
        SolveResult::Unsat => Ok(Verdict::Unsat),
        SolveResult::Sat(assignment) => {
            let full = extract_model(&cnf.valuation(&assignment), &translation.vocabulary);
            let atoms = goal.atoms();
            let delta: BTreeMap<_, _> = full
                .delta()
                .iter()
                .filter(|(p, _)| atoms.contains(*p))
                .map(|(p, set)| (p.clone(), set.clone()))
                .collect();
            let model = Structure::new(
                full.precisifications().to_vec(),
                full.sigma().clone(),
                delta,
            )
            .expect("restriction of a well-formed structure");
            if !eval_global(&model, &goal) {
                return Err(DecideError::ModelRejected);
            }
            Ok(Verdict::Sat(model))
        }
    }
}

/// Validity: `f` holds at every precisification of every structure, i.e.
/// `¬f` is not locally satisfiable.
pub fn valid(f: &Formula, config: &DecideConfig) -> Result<Validity, DecideError> {
    let local = DecideConfig {
        mode: Mode::Local,
        ..*config
    };
    match decide(&Formula::not(f.clone()), &local)? {
        Verdict::Unsat => Ok(Validity::Valid),
        Verdict::Sat(m) => Ok(Validity::Invalid(m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn sat(text: &str) -> bool {
        decide(&f(text), &DecideConfig::default()).unwrap().is_sat()
    }

    #[test]
    fn global_examples() {
        assert!(!sat("p & ~p"));
        assert!(sat("[s] p & <s> ~q"));
        assert!(!sat("p & [*] ~p"));
        assert!(sat("<s> p & <s> ~p"));
        assert!(!sat("(s <= t) & [t] p & <s> ~p"));
    }

    #[test]
    fn local_differs_from_global() {
        let phi = f("p & <*> ~p");
        assert!(!decide(&phi, &DecideConfig::default()).unwrap().is_sat());
        let local = DecideConfig {
            mode: Mode::Local,
            ..Default::default()
        };
        assert!(decide(&phi, &local).unwrap().is_sat());
    }

    #[test]
    fn validity_examples() {
        let config = DecideConfig::default();
        assert_eq!(valid(&f("[*] p -> p"), &config).unwrap(), Validity::Valid);
        assert!(matches!(valid(&f("[s] p -> p"), &config).unwrap(), Validity::Invalid(_)));

        let d = f("[s] p -> <s> p");
        let Validity::Invalid(m) = valid(&d, &config).unwrap() else {
            panic!("D needs non-empty standpoints")
        };
        assert!(m.standpoint("s").is_empty());
        let serial = DecideConfig {
            nonempty: true,
            ..config
        };
        assert_eq!(valid(&d, &serial).unwrap(), Validity::Valid);
    }

    #[test]
    fn models_are_over_input_atoms() {
        let Verdict::Sat(m) = decide(&f("[s] (p | q)"), &DecideConfig::default()).unwrap() else {
            panic!()
        };
        assert!(m.delta().keys().all(|p| p == "p" || p == "q"));
    }
}
