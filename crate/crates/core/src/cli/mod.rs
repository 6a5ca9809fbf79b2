//! Command-line front end. Machine output numbers elements from 0;
//! `--paper-style` switches structure listings to 1-based display.
//!
//! Exit status: 0 for success or a true verdict, 1 for a false verdict or a
//! failed self-test, 2 for errors and usage problems, 3 when a budget runs
//! out.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::acceptance;
use crate::eval::{eval_grounded, eval_naive, ground, Budget, Environment, EvalError};
use crate::library::{build, LibraryError, Params};
use crate::logic::{parse_formula, pretty_print, LogicError};
use crate::qbf::{
    decode_word_model, encode_word_model, export_qdimacs, parse_qbf, sat_via_alternating_valuations, solve_recursive,
    QbfError,
};
use crate::structures::{
    generate, is_hypercube, is_regular, parse_structure, serialize_structure, Family, FiniteStructure, StructureError,
    WordModel,
};

#[derive(Debug, Parser)]
#[command(name = "somc", version, about = "Model checking for second- and third-order logic on finite structures")]
pub struct Cli {
    /// Cap on candidate witnesses (naive engine) or solver steps (grounded
    /// engine). Overrides SOMC_BUDGET.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Number elements from 1 in structure listings.
    #[arg(long, global = true)]
    pub paper_style: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a generated structure: hypercube, linear, cycle or complete.
    Gen { kind: String, n: usize },
    /// Decide a graph property with its reference algorithm.
    Oracle { property: Property, structure: PathBuf },
    /// Encode a QBF (file or stdin) as a word model.
    Encode { input: Option<PathBuf> },
    /// Decode a word-model structure (file or stdin) back into a QBF.
    Decode { input: Option<PathBuf> },
    /// Decide a QBF.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Recursive)]
        method: Method,
    },
    /// Print a catalog formula.
    Build {
        #[arg(long)]
        name: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Relation symbol replacing the default of auxiliary and
        /// arithmetic entries.
        #[arg(long)]
        relation: Option<String>,
    },
    /// Evaluate a sentence on a structure.
    Eval {
        #[arg(long, value_enum)]
        engine: Engine,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Ground a sentence on a structure and write the result as QDIMACS.
    Ground {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        qdimacs: PathBuf,
    },
    /// Run the acceptance checks.
    Selftest {
        /// Criterion number or a substring of its name.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Hypercube,
    Regular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Recursive,
    Alttree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Naive,
    Ground,
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    False = 1,
    Error = 2,
    BudgetExceeded = 3,
}

impl Status {
    fn verdict(b: bool) -> Status {
        if b {
            Status::Success
        } else {
            Status::False
        }
    }
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Qbf(#[from] QbfError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Library(#[from] LibraryError),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Eval(e) if e.is_budget_exceeded() => Status::BudgetExceeded,
            CliError::Qbf(QbfError::BudgetExceeded { .. }) => Status::BudgetExceeded,
            _ => Status::Error,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_error(path))
}

/// Reads `input`, or `stdin` when it is absent or `-`.
fn read_input(input: Option<&Path>, stdin: &mut dyn Read) -> Result<String, CliError> {
    match input {
        Some(p) if p != Path::new("-") => read_file(p),
        _ => {
            let mut text = String::new();
            stdin.read_to_string(&mut text).map_err(io_error(Path::new("<stdin>")))?;
            Ok(text)
        }
    }
}

fn read_structure(path: &Path) -> Result<FiniteStructure, CliError> {
    Ok(parse_structure(&read_file(path)?)?)
}

/// Relation listing with elements numbered from 1, one line per relation.
fn one_based_listing(s: &FiniteStructure) -> String {
    let mut out = format!("domain {{1..{}}}\n", s.size());
    for (i, r) in s.vocabulary().relations().iter().enumerate() {
        let items: Vec<String> = s
            .tuples_at(i)
            .iter()
            .map(|t| {
                let xs: Vec<String> = t.iter().map(|x| (x + 1).to_string()).collect();
                if xs.len() == 1 {
                    xs[0].clone()
                } else {
                    format!("({})", xs.join(","))
                }
            })
            .collect();
        out.push_str(&format!("{} = {{{}}}\n", r.name, items.join(",")));
    }
    out
}

/// Budget from `--budget`, else from `SOMC_BUDGET`, else the default.
fn budget(flag: Option<u64>) -> Result<Budget, CliError> {
    Ok(match flag {
        Some(n) => Budget::with_candidates(n),
        None => Budget::from_env()?,
    })
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(io_error(Path::new("<stdout>")))
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<Status, CliError> {
    let listing = |s: &FiniteStructure| if cli.paper_style { one_based_listing(s) } else { serialize_structure(s) };
    match &cli.command {
        Command::Gen { kind, n } => {
            let s = generate(Family::from_name(kind, *n)?)?;
            write_out(out, &listing(&s))?;
            Ok(Status::Success)
        }
        Command::Oracle { property, structure } => {
            let s = read_structure(structure)?;
            let verdict = match property {
                Property::Hypercube => is_hypercube(&s)?,
                Property::Regular => is_regular(&s)?,
            };
            write_out(out, &format!("{verdict}\n"))?;
            Ok(Status::verdict(verdict))
        }
        Command::Encode { input } => {
            let q = parse_qbf(read_input(input.as_deref(), stdin)?.trim())?;
            let w = encode_word_model(&q)?;
            let text = if cli.paper_style { w.describe(1) } else { serialize_structure(w.structure()) };
            write_out(out, &text)?;
            Ok(Status::Success)
        }
        Command::Decode { input } => {
            let s = parse_structure(&read_input(input.as_deref(), stdin)?)?;
            let q = decode_word_model(&WordModel::from_structure(&s)?)?;
            write_out(out, &format!("{q}\n"))?;
            Ok(Status::Success)
        }
        Command::Solve { input, method } => {
            let q = parse_qbf(read_file(input)?.trim())?;
            let verdict = match method {
                Method::Recursive => solve_recursive(&q)?,
                Method::Alttree => sat_via_alternating_valuations(&q)?,
            };
            write_out(out, &format!("{verdict}\n"))?;
            Ok(Status::verdict(verdict))
        }
        Command::Build { name, k, n, relation } => {
            let f = build(name, &Params { k: *k, n: *n, relation: relation.clone() })?;
            write_out(out, &pretty_print(&f))?;
            Ok(Status::Success)
        }
        Command::Eval { engine, formula, structure } => {
            let f = parse_formula(&read_file(formula)?)?;
            let s = read_structure(structure)?;
            let b = budget(cli.budget)?;
            let verdict = match engine {
                Engine::Naive => eval_naive(&s, &f, &Environment::new(), b)?,
                Engine::Ground => eval_grounded(&s, &f, b)?,
            };
            write_out(out, &format!("{verdict}\n"))?;
            Ok(Status::verdict(verdict))
        }
        Command::Ground { formula, structure, qdimacs } => {
            let f = parse_formula(&read_file(formula)?)?;
            let s = read_structure(structure)?;
            let g = ground(&s, &f, budget(cli.budget)?)?;
            let doc = export_qdimacs(&g);
            fs::write(qdimacs, doc.to_string()).map_err(io_error(qdimacs))?;
            write_out(out, &format!("{} Boolean variables, {} clauses\n", doc.num_vars(), doc.clauses().len()))?;
            Ok(Status::Success)
        }
        Command::Selftest { filter } => {
            let reports = acceptance::run(filter.as_deref());
            for r in &reports {
                write_out(out, &format!("{r}\n"))?;
            }
            Ok(Status::verdict(reports.iter().all(|r| r.passed)))
        }
    }
}

/// Parses `args`, runs the command and reports errors on stderr.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write) -> Status
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Error } else { Status::Success };
        }
    };
    match execute(&cli, stdin, out) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    }
}

pub fn main() -> ExitCode {
    run(std::env::args_os(), &mut io::stdin().lock(), &mut io::stdout().lock()).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (Status, String) {
        let mut out = Vec::new();
        let argv = std::iter::once("somc").chain(args.iter().copied());
        let status = run(argv, &mut stdin.as_bytes(), &mut out);
        (status, String::from_utf8(out).unwrap())
    }

    #[test]
    fn encode_uses_zero_based_positions() {
        let (status, text) = call(&["encode"], "E x1 A x2 ((!x1)|x2)");
        assert_eq!(status, Status::Success);
        let s = parse_structure(&text).unwrap();
        assert_eq!(s.tuples("P_not").unwrap().iter().collect::<Vec<_>>(), [&vec![9]]);
        let (_, listing) = call(&["encode", "--paper-style"], "E x1 A x2 ((!x1)|x2)");
        assert!(listing.contains("P_not = {10}"), "{listing}");
    }

    #[test]
    fn encode_then_decode() {
        let (_, text) = call(&["encode"], "E x1 A x2 ((!x1)|x2)");
        let (status, back) = call(&["decode"], &text);
        assert_eq!(status, Status::Success);
        assert_eq!(parse_qbf(back.trim()).unwrap(), parse_qbf("E x1 A x2 ((!x1)|x2)").unwrap());
    }

    #[test]
    fn generated_structures_parse() {
        let (status, text) = call(&["gen", "hypercube", "3"], "");
        assert_eq!(status, Status::Success);
        assert!(is_hypercube(&parse_structure(&text).unwrap()).unwrap());
        let (_, listing) = call(&["gen", "linear", "2", "--paper-style"], "");
        assert_eq!(listing, "domain {1..2}\nsucc = {(1,2)}\n");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"], "").0, Status::Error);
        assert_eq!(call(&["gen", "hypercube"], "").0, Status::Error);
        assert_eq!(call(&["gen", "moebius", "3"], "").0, Status::Error);
        assert_eq!(call(&["build", "--name", "nope"], "").0, Status::Error);
    }

    #[test]
    fn build_output_parses() {
        let (status, text) = call(&["build", "--name", "numeral", "--n", "2"], "");
        assert_eq!(status, Status::Success);
        assert_eq!(parse_formula(&text).unwrap(), build("numeral", &Params::n(2)).unwrap());
    }

    #[test]
    fn budget_errors_exit_three() {
        let e = CliError::Eval(EvalError::BudgetExceeded { resource: crate::eval::Resource::Candidates, limit: 1 });
        assert_eq!(e.status(), Status::BudgetExceeded);
        assert_eq!(budget(Some(7)).unwrap().max_candidates, 7);
    }
}
