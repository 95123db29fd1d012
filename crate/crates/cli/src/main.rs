use algfac_cli::{
    corpus_export, corpus_list, corpus_run_all, run_task, CmdOutput, Opts, TaskKind,
    EXIT_INPUT_ERROR,
};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::time::Instant;

/// Exact engine for algebra factorisations and their formal deformations.
#[derive(Parser)]
#[command(name = "algfac", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the factorisation axioms of the document's twisting map.
    CheckTwist {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        degree_cap: Option<u32>,
        /// "formal" or an exact rational like "2/1".
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Verify a deformation mod t^{n+1}, including the order-1 cocycle check.
    CheckDeformation {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        degree_cap: Option<u32>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Compute the order-n obstruction, cross-check its two routes, verify
    /// D(Obs) = 0, and optionally solve the removal equations.
    Obstruction {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        degree_cap: Option<u32>,
        /// Solve D(x) = Obs over the capped basis and report the family.
        #[arg(long)]
        extend: bool,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Cohomology dimension (finite factorisations) or capped sub-complex
    /// ranks; --order selects the degree k.
    Cohomology {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        degree_cap: Option<u32>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Built-in example factorisations and deformations.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// List the available entries.
    List {
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Write an entry as a self-contained input document (JSON to stdout or
    /// --output FILE).
    Export {
        id: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        degree_cap: Option<u32>,
        /// The free constant of the closed-form plane deformation.
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every entry's headline checks.
    RunAll {
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

fn load_document(path: &PathBuf) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid JSON in {}: {e}", path.display()))
}

fn emit(out: CmdOutput, format: Format, started: Instant) -> i32 {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).unwrap()),
        Format::Human => {
            println!("{}", out.human);
            println!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
        }
    }
    out.exit
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match cli.command {
        Command::CheckTwist {
            input,
            degree_cap,
            q,
            format,
        } => match load_document(&input) {
            Ok(doc) => emit(
                run_task(&TaskKind::CheckTwist, &doc, &Opts { degree_cap, q }),
                format,
                started,
            ),
            Err(e) => {
                eprintln!("{e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::CheckDeformation {
            input,
            order,
            degree_cap,
            q,
            format,
        } => match load_document(&input) {
            Ok(doc) => emit(
                run_task(
                    &TaskKind::CheckDeformation { order },
                    &doc,
                    &Opts { degree_cap, q },
                ),
                format,
                started,
            ),
            Err(e) => {
                eprintln!("{e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::Obstruction {
            input,
            order,
            degree_cap,
            extend,
            q,
            format,
        } => match load_document(&input) {
            Ok(doc) => emit(
                run_task(
                    &TaskKind::Obstruction { order, extend },
                    &doc,
                    &Opts { degree_cap, q },
                ),
                format,
                started,
            ),
            Err(e) => {
                eprintln!("{e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::Cohomology {
            input,
            order,
            degree_cap,
            q,
            format,
        } => match load_document(&input) {
            Ok(doc) => emit(
                run_task(
                    &TaskKind::Cohomology { degree: order },
                    &doc,
                    &Opts { degree_cap, q },
                ),
                format,
                started,
            ),
            Err(e) => {
                eprintln!("{e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::Corpus { command } => match command {
            CorpusCommand::List { format } => emit(corpus_list(), format, started),
            CorpusCommand::Export {
                id,
                order,
                degree_cap,
                c,
                output,
            } => {
                let out = corpus_export(&id, order, degree_cap, c.as_deref());
                match output {
                    Some(path) if out.exit == 0 => {
                        let text = serde_json::to_string_pretty(&out.json).unwrap();
                        match std::fs::write(&path, text) {
                            Ok(()) => {
                                println!("wrote {}", path.display());
                                out.exit
                            }
                            Err(e) => {
                                eprintln!("cannot write {}: {e}", path.display());
                                EXIT_INPUT_ERROR
                            }
                        }
                    }
                    _ => emit(out, Format::Json, started),
                }
            }
            CorpusCommand::RunAll { format } => emit(corpus_run_all(), format, started),
        },
    };
    std::process::exit(code);
}
