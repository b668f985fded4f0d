//! `tdss`: the command-line front end. Commands follow the method's
//! activities: ingest requirements, generate tests, verify the scenario
//! specification against them, validate goals, and inspect views.

mod commands;
mod project;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdss_core::engine::DEFAULT_STEP_BUDGET;
use tdss_core::Timestamp;

use commands::RunSettings;
use project::ProjectLayout;

const USAGE_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "tdss", version, about = "Test-driven scenario specification toolkit")]
struct Cli {
    /// Project root; every relative path is resolved against it.
    #[arg(long, global = true, default_value = ".")]
    root: PathBuf,
    /// Model file, relative to the root.
    #[arg(long, global = true, default_value = "model.json")]
    model: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Execution {
    /// Maximum number of engine steps per run.
    #[arg(long, env = "TDSS_BUDGET", default_value_t = DEFAULT_STEP_BUDGET)]
    budget: usize,
    /// Fixed `now` for all runs, in milliseconds since the Unix epoch.
    /// Defaults to the system clock.
    #[arg(long, env = "TDSS_NOW")]
    now: Option<i64>,
}

impl Execution {
    fn settings(&self) -> Result<RunSettings, String> {
        if self.budget == 0 {
            return Err("--budget must be at least 1".into());
        }
        Ok(RunSettings {
            budget: self.budget,
            now: self.now.map_or_else(Timestamp::now, Timestamp),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Create the project layout, optionally with the timer-charging example.
    Init {
        #[arg(long)]
        example: bool,
    },
    /// Model stakeholder requirements from a `<id> TAB <kind> TAB <text>` file.
    Ingest {
        /// Tab-separated requirements, one per line.
        file: PathBuf,
    },
    /// Derive test cases for conditional requirements and write scenario stubs.
    Gentests {
        /// Requirement ids.
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        ids: Vec<String>,
        /// Every requirement in the model.
        #[arg(long)]
        all: bool,
    },
    /// Run the tests against the scenario specification and record results.
    Verify {
        /// Specification scenarios [default: scenarios/spec.scn]
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Test scenarios [default: scenarios/tests.scn]
        #[arg(long)]
        tests: Option<PathBuf>,
        #[command(flatten)]
        execution: Execution,
    },
    /// Run the test scenarios of a validation goal and emit sequence diagrams.
    Validate {
        goal: String,
        /// Run even when a goal this one depends on is not green.
        #[arg(long)]
        force: bool,
        /// Specification scenarios [default: scenarios/spec.scn]
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Test scenarios [default: scenarios/tests.scn]
        #[arg(long)]
        tests: Option<PathBuf>,
        #[command(flatten)]
        execution: Execution,
    },
    /// Print a view of the model, or export it as CSV.
    View {
        /// validation-concern-overview, test-case-specification,
        /// validation-goal-specification, requirement-structure or context.
        kind: String,
        /// Element the view is centered on.
        focus: Option<String>,
        /// Write the rows to FILE as CSV instead of printing them.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Report traceability gaps in the model.
    Check,
    /// Execute every scenario of one file and print the trace.
    Run {
        file: PathBuf,
        /// Also write a sequence diagram with this title.
        #[arg(long, value_name = "TITLE")]
        diagram: Option<String>,
        #[command(flatten)]
        execution: Execution,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    let layout = ProjectLayout::new(&cli.root, &cli.model)?;
    let settings = |e: &Execution| e.settings().map_err(anyhow::Error::msg);
    match cli.command {
        Command::Init { example } => commands::init(&layout, example),
        Command::Ingest { file } => commands::ingest(&layout, &file),
        Command::Gentests { ids, all } => commands::gentests(&layout, &ids, all),
        Command::Verify { spec, tests, execution } => {
            commands::verify(&layout, spec.as_deref(), tests.as_deref(), &settings(&execution)?)
        }
        Command::Validate {
            goal,
            force,
            spec,
            tests,
            execution,
        } => commands::validate(
            &layout,
            &goal,
            force,
            spec.as_deref(),
            tests.as_deref(),
            &settings(&execution)?,
        ),
        Command::View { kind, focus, csv } => commands::view(&layout, &kind, focus.as_deref(), csv.as_deref()),
        Command::Check => commands::check(&layout),
        Command::Run {
            file,
            diagram,
            execution,
        } => commands::run(&layout, &file, diagram.as_deref(), &settings(&execution)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
