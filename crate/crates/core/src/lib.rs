//! Reasoning toolkit for standpoint logic.
//!
//! Propositional and sentential first-order standpoint formulas are parsed,
//! normalised, translated into plain propositional or first-order logic over
//! precisification-indexed symbols, and decided with a built-in DPLL core.
//! Reference semantics, a labelling model checker and a bounded model
//! search provide independent checks of the translation.

pub mod ast;
pub mod cli;
pub mod fosl;
pub mod frontend;
pub mod reasoner;
pub mod sat;
pub mod semantics;
pub mod ssnf;
pub mod translate;

pub use ast::{desugar, nnf, subformulas, Formula, StandpointExpr, SubformulaIndex};
pub use frontend::{parse_formula, parse_structure, print_formula, print_structure};
pub use reasoner::{decide, Verdict};
pub use semantics::{eval, eval_global, model_check, prune, sat_oracle, Mode, OracleConfig, Structure};
