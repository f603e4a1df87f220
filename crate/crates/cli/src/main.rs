use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

mod commands;
mod error;
mod files;

use error::CliError;
use files::Loader;

/// Finite categories, set-valued diagrams, Ramsey witnesses and
/// structure classes.
///
/// Reports go to standard output as JSON. Exit code 0 means the property
/// holds or a solution exists, 1 that it fails, 2 that the input is invalid.
#[derive(Parser)]
#[command(name = "konig", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Compact JSON output (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads for witness searches; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write the file built by a builder command here instead of
    /// embedding it in the report.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct Pair {
    #[arg(short = 'A')]
    pub a: String,
    #[arg(short = 'B')]
    pub b: String,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check any workspace file against its schema and laws.
    Validate { file: PathBuf },
    /// Connected components of a category.
    Components { file: PathBuf },
    /// Confluence, with the chosen cocones or the first failing pair.
    Confluent { file: PathBuf },
    /// Ramsey property for every pair of objects.
    Ramsey {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        colors: usize,
    },
    /// First Ramsey witness of (A, B), or check the candidate C.
    Witness {
        file: PathBuf,
        #[command(flatten)]
        pair: Pair,
        #[arg(short = 'C')]
        c: Option<String>,
        #[arg(long, default_value_t = 2)]
        colors: usize,
    },
    /// Solve a diagram, or only the arrows given with --arrows.
    Solve {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        arrows: Option<Vec<String>>,
        /// Enumerate solutions in lexicographic order.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Diagram without solutions built from a bad coloring of (A, B).
    BadDiagram {
        file: PathBuf,
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 2)]
        colors: usize,
    },
    /// Diagram without solutions built from a pair with no common target.
    ConflDiagram {
        file: PathBuf,
        #[command(flatten)]
        pair: Pair,
    },
    /// Is the functor a discrete fibration?
    Fibration { file: PathBuf },
    /// A section of an expansion.
    Section { file: PathBuf },
    /// Core of an expansion.
    Core { file: PathBuf },
    /// Expansion property.
    Ep { file: PathBuf },
    /// Homomorphisms between two expansions over the same base.
    HomExpansion {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Product of two categories.
    Product { left: PathBuf, right: PathBuf },
    /// Slice under the object A, with its projection.
    Slice {
        file: PathBuf,
        #[arg(short = 'A')]
        a: String,
    },
    /// Category of elements of a Cat-valued functor, with its projection.
    Elts { file: PathBuf },
    /// Blowup of the left structure class by the right one.
    Blowup { left: PathBuf, right: PathBuf },
    /// Structure over a surjection onto member C whose sections all embed.
    Superpose {
        file: PathBuf,
        #[arg(short = 'C')]
        member: String,
        /// Image of each point, e.g. `0,0,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        map: Vec<usize>,
    },
    /// Strong amalgamation up to a size bound.
    Amalgamation {
        file: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// Quantifier-free definitions of the symbols of BASE in EXPANDED.
    Formulas { expanded: PathBuf, base: PathBuf },
    /// Compare solvability of diagrams with confluence and the Ramsey
    /// property on one category.
    Report {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Components { .. } => "components",
            Command::Confluent { .. } => "confluent",
            Command::Ramsey { .. } => "ramsey",
            Command::Witness { .. } => "witness",
            Command::Solve { .. } => "solve",
            Command::BadDiagram { .. } => "bad-diagram",
            Command::ConflDiagram { .. } => "confl-diagram",
            Command::Fibration { .. } => "fibration",
            Command::Section { .. } => "section",
            Command::Core { .. } => "core",
            Command::Ep { .. } => "ep",
            Command::HomExpansion { .. } => "hom-expansion",
            Command::Product { .. } => "product",
            Command::Slice { .. } => "slice",
            Command::Elts { .. } => "elts",
            Command::Blowup { .. } => "blowup",
            Command::Superpose { .. } => "superpose",
            Command::Amalgamation { .. } => "amalgamation",
            Command::Formulas { .. } => "formulas",
            Command::Report { .. } => "report",
        }
    }
}

fn render(v: &Value, pretty: bool) -> String {
    let mut s = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    }
    .expect("serializable");
    s.push('\n');
    s
}

fn header(cli: &Cli, loader: &Loader) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("input_hash".into(), json!(loader.input_hash()));
    m.insert("command".into(), json!(cli.command.name()));
    m
}

fn execute(cli: &Cli, loader: &mut Loader) -> Result<(Map<String, Value>, bool), CliError> {
    let mut out = commands::run(&cli.command, cli.threads.max(1), loader)?;
    if let Some(artifact) = out.artifact.take() {
        match &cli.output {
            Some(path) => {
                std::fs::write(path, render(&artifact, true)).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                out.body.insert("written".into(), json!(path.display().to_string()));
            }
            None => {
                out.body.insert("artifact".into(), artifact);
            }
        }
    } else if cli.output.is_some() {
        return Err(CliError::Usage(format!("`{}` does not build a file; drop -o", cli.command.name())));
    }
    let mut report = header(cli, loader);
    report.extend(out.body);
    Ok((report, out.holds))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut loader = Loader::new();
    let (report, code) = match execute(&cli, &mut loader) {
        Ok((report, holds)) => (report, if holds { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            let mut report = header(&cli, &loader);
            report.insert(
                "error".into(),
                json!({ "file": e.file(), "pointer": e.pointer(), "message": e.to_string() }),
            );
            (report, 2)
        }
    };
    let text = render(&Value::Object(report), cli.pretty);
    if std::io::stdout().write_all(text.as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
