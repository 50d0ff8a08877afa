//! Command implementations behind the `sbvr2ocl` binary.

pub mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use sbvr2ocl_core::eval::{eval_ocl, eval_sbvr, load_snapshot};
use sbvr2ocl_core::ocl::ConstraintKind;
use sbvr2ocl_core::sbvr::{parse_rules, Severity};
use sbvr2ocl_core::vocabulary::{derive_class_model, load_vocabulary};
use sbvr2ocl_core::{transpile, ClassModel, Transpiled, Vocabulary};

pub use report::{FeatureMatrix, FeatureRow};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "sbvr2ocl", version, about = "Translate SBVR business rules into OCL constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the OCL constraints for a rule file.
    Transpile {
        #[command(flatten)]
        inputs: Inputs,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Run the pipeline and report counts without writing OCL.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate each rule on a snapshot.
    Eval {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, value_enum, default_value_t = Semantics::Both)]
        semantics: Semantics,
    },
    /// Print the SBVR/OCL feature matrix with usage counts for the corpus.
    Report {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub rules: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Semantics {
    Sbvr,
    Ocl,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// What a command produced: standard output, standard error, exit code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn fail(code: u8, stderr: String) -> Self {
        Outcome { stdout: String::new(), stderr, code }
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_USAGE, format!("error: cannot read {}: {e}\n", path.display())))
}

struct Loaded {
    vocab: Vocabulary,
    model: ClassModel,
    rules_path: PathBuf,
    rules: String,
}

fn load(inputs: &Inputs) -> Result<Loaded, Outcome> {
    let vocab_src = read(&inputs.vocab)?;
    let rules = read(&inputs.rules)?;
    let vocab = load_vocabulary(&vocab_src).map_err(|errs| {
        let mut err = String::new();
        for e in errs {
            let _ = writeln!(err, "{}:{e}: error {}", inputs.vocab.display(), e.code());
        }
        Outcome::fail(EXIT_INPUT, err)
    })?;
    let model = derive_class_model(&vocab).map_err(|e| {
        Outcome::fail(EXIT_INPUT, format!("{}: error {}: {e}\n", inputs.vocab.display(), e.code()))
    })?;
    Ok(Loaded { vocab, model, rules_path: inputs.rules.clone(), rules })
}

/// Diagnostics in source order: parse problems first, then per-rule issues.
fn diagnostics(path: &Path, t: &Transpiled) -> String {
    let mut err = String::new();
    for d in &t.diagnostics {
        let level = match d.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let _ = writeln!(err, "{}:{}:{}: {level} {}: {}", path.display(), d.line, d.col, d.code, d.message);
    }
    for r in &t.rules {
        let i = r.rule.index;
        for w in &r.mapped.warnings {
            let _ = writeln!(err, "rule_{i}: warning {w}");
        }
        for e in &r.mapped.errors {
            let _ = writeln!(err, "rule_{i}: error {e}");
        }
        for e in &r.type_errors {
            let _ = writeln!(err, "rule_{i}: error {e}");
        }
    }
    err
}

fn status(t: &Transpiled, strict: bool) -> u8 {
    if t.errors() > 0 || (strict && t.warnings() > 0) {
        EXIT_INPUT
    } else {
        EXIT_OK
    }
}

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Transpile { inputs, out, strict } => cmd_transpile(&inputs, out.as_deref(), strict),
        Command::Check { inputs, strict } => cmd_check(&inputs, strict),
        Command::Eval { inputs, snapshot, semantics } => cmd_eval(&inputs, &snapshot, semantics),
        Command::Report { inputs, format } => cmd_report(&inputs, format),
    };
    result.unwrap_or_else(|o| o)
}

pub fn cmd_transpile(inputs: &Inputs, out: Option<&Path>, strict: bool) -> Result<Outcome, Outcome> {
    let l = load(inputs)?;
    let t = transpile(&l.rules, &l.vocab, &l.model);
    let text = t.ocl_text();
    let stdout = match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| {
                Outcome::fail(EXIT_USAGE, format!("error: cannot write {}: {e}\n", path.display()))
            })?;
            String::new()
        }
        None => text,
    };
    Ok(Outcome { stdout, stderr: diagnostics(&l.rules_path, &t), code: status(&t, strict) })
}

pub fn cmd_check(inputs: &Inputs, strict: bool) -> Result<Outcome, Outcome> {
    let l = load(inputs)?;
    let t = transpile(&l.rules, &l.vocab, &l.model);
    let stdout = format!(
        "parsed={} mapped={} warnings={} errors={}\n",
        t.rules.len(),
        t.mapped(),
        t.warnings(),
        t.errors()
    );
    Ok(Outcome { stdout, stderr: diagnostics(&l.rules_path, &t), code: status(&t, strict) })
}

pub fn cmd_eval(inputs: &Inputs, snapshot: &Path, semantics: Semantics) -> Result<Outcome, Outcome> {
    let l = load(inputs)?;
    let snap_src = read(snapshot)?;
    let snap = load_snapshot(&snap_src, &l.vocab, &l.model).map_err(|e| {
        Outcome::fail(EXIT_INPUT, format!("{}: error {}: {e}\n", snapshot.display(), e.code()))
    })?;
    let t = transpile(&l.rules, &l.vocab, &l.model);
    let mut stdout = String::new();
    for r in &t.rules {
        let mut line = format!("rule_{}", r.rule.index);
        if semantics != Semantics::Ocl {
            let b = eval_sbvr(&r.rule, &snap, &l.vocab).map_err(|e| {
                Outcome::fail(EXIT_INPUT, format!("rule_{}: error {}: {e}\n", r.rule.index, e.code()))
            })?;
            line.push_str(if b { " sbvr=t" } else { " sbvr=f" });
        }
        if semantics != Semantics::Sbvr {
            let symbol = match r.constraint() {
                Some(c) if c.kind == ConstraintKind::Inv => eval_ocl(c, &snap, &l.model)
                    .map_err(|e| {
                        Outcome::fail(EXIT_INPUT, format!("rule_{}: error {}: {e}\n", r.rule.index, e.code()))
                    })?
                    .symbol(),
                _ => '-',
            };
            let _ = write!(line, " ocl={symbol}");
        }
        stdout.push_str(&line);
        stdout.push('\n');
    }
    let code = if t.errors() > 0 { EXIT_INPUT } else { EXIT_OK };
    Ok(Outcome { stdout, stderr: diagnostics(&l.rules_path, &t), code })
}

pub fn cmd_report(inputs: &Inputs, format: Format) -> Result<Outcome, Outcome> {
    let l = load(inputs)?;
    let parsed = parse_rules(&l.rules, &l.vocab);
    if parsed.diagnostics.iter().any(|d| d.severity == Severity::Error) {
        let t = Transpiled { diagnostics: parsed.diagnostics, rules: Vec::new() };
        return Err(Outcome::fail(EXIT_INPUT, diagnostics(&l.rules_path, &t)));
    }
    let matrix = FeatureMatrix::build(&parsed.rules, &l.vocab, &l.model);
    let stdout = match format {
        Format::Text => matrix.to_text(),
        Format::Json => matrix.to_json(),
    };
    Ok(Outcome { stdout, code: EXIT_OK, ..Outcome::default() })
}
