//! Batch command-line driver.
//!
//! [`run`] executes one command and returns the exit code with the text for
//! both output streams, so the binary and the tests share one code path.
//! Exit codes: 0 valid or holds, 10 satisfiable, 20 unsatisfiable or
//! invalid, 1 error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::ast::{nnf, Formula};
use crate::fosl::{
    fo_modal_depth, fo_ssnf, fo_translate, is_sentential, parse_fo_formula, print_fo_formula,
    to_tptp, FoFormula, Sentential,
};
use crate::frontend::{parse_formula, parse_structure, print_formula, print_structure};
use crate::reasoner::{decide, prepare, valid, DecideConfig, Validity, Verdict};
use crate::sat::{emit_dimacs, to_cnf, SolverConfig};
use crate::semantics::{model_check, sat_oracle, Mode, OracleConfig, Structure};
use crate::ssnf::ssnf;
use crate::translate::translate_formula;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_ERROR: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sat,
    Valid,
    Translate,
    Check,
    Normalize,
    Oracle,
    FoSentential,
    FoTranslate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Prop,
    Dimacs,
    Tptp,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum NormalForm {
    Nnf,
    #[default]
    Ssnf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Inline(String),
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input: Input,
    pub mode: Mode,
    pub nonempty: bool,
    pub precisifications: Option<usize>,
    pub format: Format,
    pub normal_form: NormalForm,
    /// Decision budget for the SAT core and state budget for the oracle.
    pub budget: Option<u64>,
    pub structure: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, formula: impl Into<String>) -> Self {
        RunConfig {
            command,
            input: Input::Inline(formula.into()),
            mode: Mode::Global,
            nonempty: false,
            precisifications: None,
            format: Format::Prop,
            normal_form: NormalForm::Ssnf,
            budget: None,
            structure: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn out(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

type Fallible<T> = Result<T, String>;

fn read_input(input: &Input) -> Fallible<String> {
    match input {
        Input::Inline(text) => Ok(text.clone()),
        Input::File(path) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display())),
    }
}

fn prop_input(config: &RunConfig) -> Fallible<Formula> {
    let text = read_input(&config.input)?;
    parse_formula(text.trim()).map_err(|e| format!("parse error: {e}"))
}

fn fo_input(config: &RunConfig) -> Fallible<FoFormula> {
    let text = read_input(&config.input)?;
    parse_fo_formula(text.trim()).map_err(|e| format!("parse error: {e}"))
}

fn decide_config(config: &RunConfig) -> DecideConfig {
    let mut solver = SolverConfig::default();
    if let Some(b) = config.budget {
        solver.decision_budget = b;
    }
    DecideConfig {
        mode: config.mode,
        nonempty: config.nonempty,
        precisifications: config.precisifications,
        normalize: true,
        solver,
    }
}

fn verdict_report(word: &str, model: Option<&Structure>, format: Format) -> String {
    if format == Format::Json {
        let model = model
            .map(|m| serde_json::from_str(&print_structure(m)).expect("structure JSON"))
            .unwrap_or(serde_json::Value::Null);
        let doc = serde_json::json!({ "verdict": word, "model": model });
        return format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON"));
    }
    match model {
        Some(m) => format!("{word}\n{}\n", print_structure(m)),
        None => format!("{word}\n"),
    }
}

fn cmd_sat(config: &RunConfig) -> Fallible<Outcome> {
    let f = prop_input(config)?;
    let verdict = decide(&f, &decide_config(config)).map_err(|e| e.to_string())?;
    Ok(match verdict {
        Verdict::Sat(m) => Outcome::out(EXIT_SAT, verdict_report("SAT", Some(&m), config.format)),
        Verdict::Unsat => Outcome::out(EXIT_UNSAT, verdict_report("UNSAT", None, config.format)),
    })
}

fn cmd_valid(config: &RunConfig) -> Fallible<Outcome> {
    let f = prop_input(config)?;
    let verdict = valid(&f, &decide_config(config)).map_err(|e| e.to_string())?;
    Ok(match verdict {
        Validity::Valid => Outcome::out(EXIT_OK, verdict_report("VALID", None, config.format)),
        Validity::Invalid(m) => {
            Outcome::out(EXIT_UNSAT, verdict_report("INVALID", Some(&m), config.format))
        }
    })
}

fn fo_for_translation(f: &FoFormula) -> Fallible<FoFormula> {
    if fo_modal_depth(f) > 1 {
        fo_ssnf(f).map_err(|e| e.to_string())
    } else {
        Ok(f.clone())
    }
}

fn tptp_report(f: &FoFormula) -> Fallible<String> {
    let out = to_tptp(f, "f0").map_err(|e| e.to_string())?;
    let mut text = String::new();
    for (from, to) in &out.mangling {
        writeln!(text, "% {from} -> {to}").unwrap();
    }
    writeln!(text, "{}", out.text).unwrap();
    Ok(text)
}

fn fo_translate_report(config: &RunConfig) -> Fallible<Outcome> {
    let f = fo_for_translation(&fo_input(config)?)?;
    let t = fo_translate(&f, config.precisifications).map_err(|e| e.to_string())?;
    let text = match config.format {
        Format::Tptp => tptp_report(&t.formula)?,
        Format::Json => {
            let doc = serde_json::json!({
                "precisifications": t.precisifications,
                "formula": print_fo_formula(&t.formula),
                "predicates": t.signature.predicates,
                "constants": t.signature.constants,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON"))
        }
        Format::Prop => format!("{}\n", print_fo_formula(&t.formula)),
        Format::Dimacs => return Err("DIMACS output needs propositional input".into()),
    };
    Ok(Outcome::out(EXIT_OK, text))
}

fn cmd_translate(config: &RunConfig) -> Fallible<Outcome> {
    if config.format == Format::Tptp {
        return fo_translate_report(config);
    }
    let f = prepare(&prop_input(config)?, &decide_config(config));
    let t = translate_formula(&f, config.precisifications).map_err(|e| e.to_string())?;
    let text = match config.format {
        Format::Dimacs => emit_dimacs(&to_cnf(&t.formula)),
        Format::Json => {
            let doc = serde_json::json!({
                "precisifications": t.vocabulary.precisifications,
                "formula": t.formula.to_string(),
                "nodes": t.formula.node_count(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON"))
        }
        _ => format!("{}\n", t.formula),
    };
    Ok(Outcome::out(EXIT_OK, text))
}

fn cmd_check(config: &RunConfig) -> Fallible<Outcome> {
    let f = prop_input(config)?;
    let path = config
        .structure
        .as_ref()
        .ok_or("check needs --structure FILE")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let m = parse_structure(&text).map_err(|e| format!("structure error: {e}"))?;
    let table = model_check(&m, &f);
    let holds = table.holds_globally(m.len());
    let code = if holds { EXIT_OK } else { EXIT_UNSAT };
    let out = if config.format == Format::Json {
        let at: serde_json::Map<String, serde_json::Value> = m
            .precisifications()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), table.root_at(i).into()))
            .collect();
        let doc = serde_json::json!({ "holds": holds, "at": at, "steps": table.steps() });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON"))
    } else {
        let mut s = String::new();
        for (i, p) in m.precisifications().iter().enumerate() {
            writeln!(s, "{p}: {}", table.root_at(i)).unwrap();
        }
        writeln!(s, "{}", if holds { "HOLDS" } else { "FAILS" }).unwrap();
        s
    };
    Ok(Outcome::out(code, out))
}

fn cmd_normalize(config: &RunConfig) -> Fallible<Outcome> {
    let f = prop_input(config)?;
    let g = match config.normal_form {
        NormalForm::Nnf => nnf(&f),
        NormalForm::Ssnf => ssnf(&f),
    };
    Ok(Outcome::out(EXIT_OK, format!("{}\n", print_formula(&g))))
}

fn cmd_oracle(config: &RunConfig) -> Fallible<Outcome> {
    let f = prop_input(config)?;
    let mut oracle = OracleConfig {
        mode: config.mode,
        nonempty: config.nonempty,
        cap: config.precisifications,
        ..OracleConfig::default()
    };
    if let Some(b) = config.budget {
        oracle.budget = b;
    }
    Ok(match sat_oracle(&f, &oracle).map_err(|e| e.to_string())? {
        Some(m) => Outcome::out(EXIT_SAT, verdict_report("SAT", Some(&m), config.format)),
        None => Outcome::out(EXIT_UNSAT, verdict_report("UNSAT", None, config.format)),
    })
}

fn cmd_fo_sentential(config: &RunConfig) -> Fallible<Outcome> {
    let f = fo_input(config)?;
    Ok(match is_sentential(&f) {
        Sentential::Accepted => Outcome::out(EXIT_OK, "SENTENTIAL\n".into()),
        Sentential::Rejected {
            subformula,
            free_vars,
        } => Outcome::out(
            EXIT_UNSAT,
            format!(
                "NOT SENTENTIAL\n{}\nfree variables: {}\n",
                print_fo_formula(&subformula),
                free_vars.join(", ")
            ),
        ),
    })
}

pub fn run(config: &RunConfig) -> Outcome {
    if config.precisifications == Some(0) {
        return Outcome::error("--precisifications must be at least 1");
    }
    let result = match config.command {
        Command::Sat => cmd_sat(config),
        Command::Valid => cmd_valid(config),
        Command::Translate => cmd_translate(config),
        Command::Check => cmd_check(config),
        Command::Normalize => cmd_normalize(config),
        Command::Oracle => cmd_oracle(config),
        Command::FoSentential => cmd_fo_sentential(config),
        Command::FoTranslate => fo_translate_report(config),
    };
    result.unwrap_or_else(Outcome::error)
}

/// Command-line arguments.
#[derive(Debug, Parser)]
#[command(name = "standpoint", version, about = "Standpoint logic reasoner")]
pub struct Args {
    #[command(subcommand)]
    command: CliCommand,
    /// global: true at every precisification; local: at some precisification
    #[arg(long, global = true, default_value = "global")]
    mode: Mode,
    /// Require every standpoint of the input to be non-empty
    #[arg(long, global = true)]
    nonempty_standpoints: bool,
    /// Number of precisifications (default: number of subformulas)
    #[arg(long, global = true, value_name = "N")]
    precisifications: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Decision budget (SAT core) or state budget (oracle)
    #[arg(long, global = true, value_name = "N")]
    budget: Option<u64>,
    /// Read the formula from FILE instead of the command line
    #[arg(long, global = true, value_name = "FILE")]
    file: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct FormulaArg {
    formula: Option<String>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Decide satisfiability
    Sat(FormulaArg),
    /// Decide validity
    Valid(FormulaArg),
    /// Print the precisification-indexed translation
    Translate(FormulaArg),
    /// Model-check a formula against a structure
    Check {
        #[arg(long, value_name = "FILE")]
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Print a normal form
    Normalize {
        #[arg(long, value_enum, default_value = "ssnf")]
        to: NormalForm,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Exhaustive small-model search
    Oracle(FormulaArg),
    /// Check that modal operators only apply to sentences
    FoSentential(FormulaArg),
    /// Translate a first-order formula
    FoTranslate(FormulaArg),
}

impl Args {
    pub fn into_config(self) -> Result<RunConfig, String> {
        let (command, formula, structure, normal_form) = match self.command {
            CliCommand::Sat(a) => (Command::Sat, a, None, NormalForm::default()),
            CliCommand::Valid(a) => (Command::Valid, a, None, NormalForm::default()),
            CliCommand::Translate(a) => (Command::Translate, a, None, NormalForm::default()),
            CliCommand::Check { structure, formula } => {
                (Command::Check, formula, Some(structure), NormalForm::default())
            }
            CliCommand::Normalize { to, formula } => (Command::Normalize, formula, None, to),
            CliCommand::Oracle(a) => (Command::Oracle, a, None, NormalForm::default()),
            CliCommand::FoSentential(a) => (Command::FoSentential, a, None, NormalForm::default()),
            CliCommand::FoTranslate(a) => (Command::FoTranslate, a, None, NormalForm::default()),
        };
        let input = match (formula.formula, self.file) {
            (Some(text), None) => Input::Inline(text),
            (None, Some(path)) => Input::File(path),
            (Some(_), Some(_)) => return Err("give either a formula or --file, not both".into()),
            (None, None) => return Err("missing formula (argument or --file)".into()),
        };
        Ok(RunConfig {
            command,
            input,
            mode: self.mode,
            nonempty: self.nonempty_standpoints,
            precisifications: self.precisifications,
            format: self.format.unwrap_or_default(),
            normal_form,
            budget: self.budget,
            structure,
        })
    }
}
