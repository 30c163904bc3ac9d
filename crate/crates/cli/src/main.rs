//! `fracmin`: fractional perimeters, curvatures and discrete s-minimal sets
//! from the command line.
//!
//! Exit status is 0 on success, 1 on invalid input and 2 when `verify`
//! finds a failing check.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;

#[derive(Parser, Debug)]
#[command(name = "fracmin", version, about = "Fractional perimeters, nonlocal curvature and exact discrete s-minimal sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per_s(E, R²) of a shape by the boundary integral and by cell interactions.
    Perimeter {
        /// Shape; the same as --shape.
        #[arg(id = "shape_name", value_name = "SHAPE")]
        shape: Option<String>,
        #[command(flatten)]
        flags: Overrides,
    },
    /// Nonlocal mean curvature at a boundary point.
    Curvature {
        /// Shape; the same as --shape.
        #[arg(id = "shape_name", value_name = "SHAPE")]
        shape: Option<String>,
        #[command(flatten)]
        flags: Overrides,
    },
    /// Exact discrete minimizer of the problem in --input (JSON).
    Minimize {
        #[command(flatten)]
        flags: Overrides,
    },
    /// A named experiment; `experiment list` prints the names.
    Experiment {
        name: String,
        #[command(flatten)]
        flags: Overrides,
    },
    /// Limit sweeps: `half` (s -> 1/2) or `zero` (s -> 0).
    Sweep {
        limit: String,
        #[command(flatten)]
        flags: Overrides,
    },
    /// Invariant suites and acceptance criteria.
    Verify {
        #[command(flatten)]
        flags: Overrides,
    },
}

fn run(cli: Cli) -> fracmin::Result<(serde_json::Value, bool)> {
    let (flags, command, name) = match &cli.command {
        Command::Perimeter { shape, flags } | Command::Curvature { shape, flags } => {
            let mut f = flags.clone();
            if shape.is_some() {
                f.shape = shape.clone();
            }
            let cmd = if matches!(cli.command, Command::Perimeter { .. }) { "perimeter" } else { "curvature" };
            (f, cmd, String::new())
        }
        Command::Minimize { flags } => (flags.clone(), "minimize", String::new()),
        Command::Experiment { name, flags } => (flags.clone(), "experiment", name.clone()),
        Command::Sweep { limit, flags } => (flags.clone(), "sweep", limit.clone()),
        Command::Verify { flags } => (flags.clone(), "verify", String::new()),
    };
    let mut c = flags.resolve(command, &name)?;
    if matches!(command, "perimeter" | "curvature") {
        c.name = c.shape.clone();
    }
    if let Some(n) = c.threads {
        fracmin::par::init_threads(n);
    }
    match command {
        "perimeter" => commands::perimeter(&c).map(|v| (v, true)),
        "curvature" => commands::curvature(&c).map(|v| (v, true)),
        "minimize" => commands::minimize_cmd(&c).map(|v| (v, true)),
        "experiment" => commands::experiment(&c).map(|v| (v, true)),
        "sweep" => commands::sweep(&c).map(|v| (v, true)),
        _ => commands::verify(&c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let verify = matches!(cli.command, Command::Verify { .. });
    match run(cli) {
        Ok((doc, passed)) => {
            if !verify {
                println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
