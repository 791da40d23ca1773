use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use expfield::axiomgen;
use expfield::session::{Overrides, Session};
use expfield::Error;

#[derive(Parser)]
#[command(name = "expfield", version, about = "Exact algebra for exponential fields")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a session file and print its report.
    Run {
        /// Path to a session file.
        session: PathBuf,
        /// Entry bound for rotundity matrices.
        #[arg(long, value_name = "N")]
        bound_rotund: Option<u32>,
        /// Exponent bound for multiplicative freeness.
        #[arg(long, value_name = "N")]
        bound_mult: Option<u32>,
        /// Coefficient bound for strongness and hull searches.
        #[arg(long, value_name = "N")]
        bound_strong: Option<u32>,
        /// Largest root scaling tried by `isomorphic`.
        #[arg(long, value_name = "N")]
        m_max: Option<u32>,
        /// Reduction steps allowed per Groebner computation.
        #[arg(long, value_name = "N")]
        budget: Option<u64>,
        /// Report format.
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        emit: ReportFormat,
    },
    /// Parse a formula and print it in canonical form or as a JSON syntax tree.
    Formula {
        /// The formula text; `-` reads standard input.
        text: String,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormulaFormat::Text)]
        emit: FormulaFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaFormat {
    Text,
    JsonAst,
}

/// Writes to stdout; a closed pipe is not an error.
fn write_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn syntax_message(source: &str, e: &Error) -> String {
    match e {
        Error::Syntax { line, column, message } => format!("{source}:{line}:{column}: {message}"),
        other => format!("{source}: {other}"),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Cmd::Run {
            session,
            bound_rotund,
            bound_mult,
            bound_strong,
            m_max,
            budget,
            emit,
        } => {
            let name = session.display().to_string();
            let src = match std::fs::read_to_string(&session) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{name}: {e}");
                    return ExitCode::from(2);
                }
            };
            let parsed = match Session::parse(&src) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{}", syntax_message(&name, &e));
                    return ExitCode::from(2);
                }
            };
            let overrides = Overrides {
                rotund: bound_rotund,
                mult: bound_mult,
                strong: bound_strong,
                m_max,
                budget,
            };
            let report = parsed.run(&overrides);
            match emit {
                ReportFormat::Text => write_stdout(&report.to_text()),
                ReportFormat::Json => write_stdout(&report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Cmd::Formula { text, emit } => {
            let text = if text == "-" {
                let mut s = String::new();
                if let Err(e) = std::io::Read::read_to_string(&mut std::io::stdin(), &mut s) {
                    eprintln!("<stdin>: {e}");
                    return ExitCode::from(2);
                }
                s
            } else {
                text
            };
            match axiomgen::parse(text.trim()) {
                Ok(f) => {
                    match emit {
                        FormulaFormat::Text => write_stdout(&format!("{}\n", f.render())),
                        FormulaFormat::JsonAst => {
                            write_stdout(&format!("{}\n", serde_json::to_string_pretty(&f).expect("formulas serialize")))
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}", syntax_message("<formula>", &e));
                    ExitCode::from(2)
                }
            }
        }
    }
}
