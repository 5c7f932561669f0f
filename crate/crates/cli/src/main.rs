use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Duration;

use clap::{Parser, Subcommand};
use tcsp_cli::commands::{self, Outcome, Settings, SolverChoice};
use tcsp_cli::manifest::{parse_manifest, Manifest};
use tcsp_cli::report::{Report, Status};
use tcsp_cli::{CliError, CliResult};
use tcsp_core::Caps;

#[derive(Debug, Parser)]
#[command(name = "tcsp", version, about = "Temporal constraint languages: classification, solving, definability")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Resource cap, one of arity, oracle-vars, pp-vars (repeatable).
    #[arg(long = "cap", global = true, value_name = "KEY=VALUE")]
    caps: Vec<String>,

    /// Wall-clock limit for the command in seconds.
    #[arg(long, global = true, value_name = "SECS")]
    time_budget: Option<u64>,

    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complexity of the CSP of one structure.
    Classify {
        file: PathBuf,
        #[arg(long)]
        structure: Option<String>,
    },
    /// Complexity of the CSP of the generic combination of two structures.
    ClassifyComb {
        file: PathBuf,
        #[arg(long)]
        first: Option<String>,
        #[arg(long)]
        second: Option<String>,
    },
    /// Decide an instance over one structure.
    Solve {
        file: PathBuf,
        #[arg(long)]
        instance: Option<String>,
        #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
        solver: SolverChoice,
    },
    /// Decide an instance over two structures with the exact oracle.
    SolveComb {
        file: PathBuf,
        #[arg(long)]
        instance: Option<String>,
    },
    /// Decide an instance over two structures by equality propagation.
    Combine {
        file: PathBuf,
        #[arg(long)]
        instance: Option<String>,
        /// Random instances for the independence check of each side.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Check whether an operation preserves a relation or a structure.
    PolyCheck {
        file: Option<PathBuf>,
        #[arg(long)]
        structure: Option<String>,
        #[arg(long)]
        op: String,
        /// `@Name`, a symbol of the structure, or a formula over x1..xk.
        #[arg(long)]
        rel: Option<String>,
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Synthesize or recognize a syntactic normal form.
    NormalForm {
        file: Option<PathBuf>,
        #[arg(long)]
        structure: Option<String>,
        /// One of pp, min, mi, mix, ll.
        #[arg(long)]
        form: String,
        #[arg(long)]
        rel: Option<String>,
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Bounded search for a primitive positive definition.
    PpdefSearch {
        file: PathBuf,
        #[arg(long)]
        structure: Option<String>,
        /// `@Name` or a formula over x1..xk.
        #[arg(long)]
        target: String,
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long, default_value_t = tcsp_core::ppdef::search::DEFAULT_MAX_BOUND)]
        max_bound: usize,
        #[arg(long, default_value_t = tcsp_core::ppdef::search::DEFAULT_MAX_ATOMS)]
        max_atoms: usize,
    },
    /// Build a pp-definition of R^mix over the structure.
    ExtractRmix {
        file: PathBuf,
        #[arg(long)]
        structure: Option<String>,
    },
    /// Check or search for a cross-prevention formula in x, y, u, v.
    CrossPrevention {
        file: PathBuf,
        #[arg(long)]
        structure: Option<String>,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, default_value_t = 1)]
        max_bound: usize,
        #[arg(long, default_value_t = 3)]
        max_atoms: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::ClassifyComb { .. } => "classify-comb",
            Command::Solve { .. } => "solve",
            Command::SolveComb { .. } => "solve-comb",
            Command::Combine { .. } => "combine",
            Command::PolyCheck { .. } => "poly-check",
            Command::NormalForm { .. } => "normal-form",
            Command::PpdefSearch { .. } => "ppdef-search",
            Command::ExtractRmix { .. } => "extract-rmix",
            Command::CrossPrevention { .. } => "cross-prevention",
        }
    }
}

fn parse_caps(items: &[String]) -> CliResult<Caps> {
    let mut caps = Caps::default();
    for item in items {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--cap expects KEY=VALUE, got `{item}`")))?;
        let value: usize = value
            .parse()
            .map_err(|_| CliError::Usage(format!("--cap {key}: `{value}` is not a number")))?;
        match key {
            "arity" => caps.arity = value,
            "oracle-vars" => caps.oracle_vars = value,
            "pp-vars" => caps.pp_vars = value,
            _ => return Err(CliError::Usage(format!("unknown cap `{key}`"))),
        }
    }
    Ok(caps)
}

fn load(path: &Path) -> CliResult<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_manifest(&text)?)
}

fn load_opt(path: Option<&Path>) -> CliResult<Option<Manifest>> {
    path.map(load).transpose()
}

fn execute(command: Command, st: Settings) -> CliResult<Outcome> {
    match command {
        Command::Classify { file, structure } => commands::classify(&load(&file)?, structure.as_deref(), &st),
        Command::ClassifyComb { file, first, second } => {
            commands::classify_comb(&load(&file)?, first.as_deref(), second.as_deref(), &st)
        }
        Command::Solve { file, instance, solver } => commands::solve(&load(&file)?, instance.as_deref(), solver, &st),
        Command::SolveComb { file, instance } => commands::solve_comb(&load(&file)?, instance.as_deref(), &st),
        Command::Combine { file, instance, trials } => {
            commands::combine(&load(&file)?, instance.as_deref(), trials, &st)
        }
        Command::PolyCheck {
            file,
            structure,
            op,
            rel,
            arity,
        } => {
            let m = load_opt(file.as_deref())?;
            commands::poly_check(m.as_ref(), structure.as_deref(), &op, rel.as_deref(), arity, &st)
        }
        Command::NormalForm {
            file,
            structure,
            form,
            rel,
            arity,
        } => {
            let m = load_opt(file.as_deref())?;
            let form = commands::parse_form(&form)?;
            commands::normal_form(m.as_ref(), structure.as_deref(), form, rel.as_deref(), arity, &st)
        }
        Command::PpdefSearch {
            file,
            structure,
            target,
            arity,
            max_bound,
            max_atoms,
        } => commands::ppdef_search(
            &load(&file)?,
            structure.as_deref(),
            &target,
            arity,
            max_bound,
            max_atoms,
            &st,
        ),
        Command::ExtractRmix { file, structure } => commands::extract_rmix(&load(&file)?, structure.as_deref(), &st),
        Command::CrossPrevention {
            file,
            structure,
            formula,
            max_bound,
            max_atoms,
        } => commands::cross_prevention(
            &load(&file)?,
            structure.as_deref(),
            formula.as_deref(),
            max_bound,
            max_atoms,
            &st,
        ),
    }
}

/// Runs the command on a worker thread and gives up after the budget.
fn execute_with_budget(command: Command, st: Settings, budget: Option<u64>) -> CliResult<Outcome> {
    let Some(secs) = budget else {
        return execute(command, st);
    };
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(execute(command, st));
    });
    rx.recv_timeout(Duration::from_secs(secs))
        .map_err(|_| CliError::TimeBudget(secs))?
}

fn main() {
    let cli = Cli::parse();
    let name = cli.command.name();
    let caps = parse_caps(&cli.caps);
    let report = match caps {
        Err(e) => Report::error(name, cli.seed, Caps::default(), cli.time_budget, &e),
        Ok(caps) => {
            let st = Settings { seed: cli.seed, caps };
            match execute_with_budget(cli.command, st, cli.time_budget) {
                Ok(out) => {
                    let status = if out.positive { Status::Positive } else { Status::Negative };
                    Report::new(name, cli.seed, caps, cli.time_budget, status, out.result)
                }
                Err(e) => {
                    eprintln!("tcsp {name}: error [{}]: {e}", e.module());
                    Report::error(name, cli.seed, caps, cli.time_budget, &e)
                }
            }
        }
    };
    let text = report.render();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("tcsp: cannot write {}: {e}", path.display());
                std::process::exit(2);
            }
        }
        None => print!("{text}"),
    }
    std::process::exit(report.status.exit_code());
}
