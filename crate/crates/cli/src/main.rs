//! `whitney`: build, verify and inspect `C^{m,omega}` extensions from problem files.
//!
//! Exit codes: 0 pass, 1 I/O, 2 verification failure, 3 failed precondition
//! or domain error, 4 schema or input error.

mod commands;
mod input;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use whitney_core::Error;

#[derive(Parser)]
#[command(name = "whitney", version, about = "Explicit Whitney extensions of C^{m,omega} jets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify the extension of one problem.
    Extend(Common),
    /// Extend every member of a batch and compare norms.
    Family {
        #[command(flatten)]
        common: Common,
        /// Overrides the file's "mode".
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Re-verify a construction written by `extend --out`.
    Verify(Common),
    /// Check the derivative bounds for a univariate function.
    Gromov(Common),
    /// Whitney constants of a sampled jet.
    Whitney(Common),
    /// Build a modulus from a plain C^m jet and extend under it.
    Cm(Common),
    /// Metric and Lipschitz norm of the Taylor field of a jet.
    Shvartsman(Common),
    /// Glue per-annulus extensions with the partition of unity.
    Glue(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fixed,
    PerMember,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Directory for report.txt and other artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Probe cloud size.
    #[arg(long)]
    pub probes: Option<usize>,
    /// Probe cloud seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Plateau half-width of the bump profile, in (0,1).
    #[arg(long)]
    pub plateau: Option<f64>,
    /// Reject unknown fields instead of warning.
    #[arg(long)]
    pub strict: bool,
    /// Also write probe values as CSV into the output directory.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Core(Error::Precondition(_) | Error::Domain(_)) => 3,
            Failure::Core(Error::Input(_) | Error::Schema(_)) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Io(_) => "io",
            Failure::Core(Error::Precondition(_)) => "precondition",
            Failure::Core(Error::Domain(_)) => "domain",
            Failure::Core(Error::Input(_)) => "input",
            Failure::Core(Error::Schema(_)) => "schema",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

/// What a command produced: the report, its verdict, and files for `--out`.
pub struct Outcome {
    pub report: report::Report,
    pub pass: bool,
    pub files: Vec<(String, String)>,
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let (common, run): (Common, Box<dyn Fn(&input::ProblemFile, &commands::Opts) -> Result<Outcome, Failure>>) =
        match cli.command {
            Command::Extend(c) => (c, Box::new(commands::extend)),
            Command::Family { common, mode } => {
                let mode = mode.map(|m| match m {
                    Mode::Fixed => whitney_core::extend::FamilyMode::Fixed,
                    Mode::PerMember => whitney_core::extend::FamilyMode::PerMember,
                });
                (common, Box::new(move |f: &input::ProblemFile, o: &commands::Opts| commands::family(f, o, mode)))
            }
            Command::Verify(c) => (c, Box::new(commands::verify)),
            Command::Gromov(c) => (c, Box::new(commands::gromov)),
            Command::Whitney(c) => (c, Box::new(commands::whitney)),
            Command::Cm(c) => (c, Box::new(commands::cm)),
            Command::Shvartsman(c) => (c, Box::new(commands::shvartsman)),
            Command::Glue(c) => (c, Box::new(commands::glue)),
        };
    let (file, warnings) = input::load(&common.problem, common.strict)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let opts = commands::Opts::new(&common, file.options.clone().unwrap_or_default())?;
    let mut outcome = run(&file, &opts)?;
    if !opts.csv {
        outcome.files.retain(|(name, _)| !name.ends_with(".csv"));
    }
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        let mut files = outcome.files.clone();
        files.push(("report.txt".into(), outcome.report.text()));
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        }
    } else if opts.csv {
        eprintln!("warning: --csv needs --out; no CSV written");
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.report.text());
            ExitCode::from(if outcome.pass { 0 } else { 2 })
        }
        Err(f) => {
            eprintln!("error: kind={} code={} message={:?}", f.kind(), f.code(), f.message());
            ExitCode::from(f.code())
        }
    }
}
