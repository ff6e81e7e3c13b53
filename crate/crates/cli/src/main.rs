//! `speclab`: boundary-condition analysis for LTL goal specifications.
//!
//! Exit status: 0 affirmative, 1 negative verdict, 2 usage or input error,
//! 3 solver budget exhausted.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use speclab_core::analysis::Interpretation;
use speclab_core::SolverBudget;

#[derive(Parser)]
#[command(name = "speclab", version, about = "Identify and filter boundary conditions of LTL specs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the BC conditions for each given formula.
    CheckBc(CommonArgs),
    /// Filter a BC list by generality or by contrast.
    Filter {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = Mode::Contrasty)]
        mode: Mode,
    },
    /// Search for BCs and reduce them to a contrastive set.
    Identify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Compute and rank likelihoods.
    Likelihood(CommonArgs),
    /// Search, filter, and tabulate everything for one spec.
    Report {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Spec file, or the name of a bundled corpus case.
    pub spec: String,
    /// Named fixture from the spec file (repeatable).
    #[arg(long = "fixture")]
    pub fixtures: Vec<String>,
    /// Formula text (repeatable).
    #[arg(long = "formula")]
    pub formulas: Vec<String>,
    /// Prefix length for likelihood.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, value_parser = parse_interpretation, default_value = "prefix-extendable")]
    pub interpretation: Interpretation,
    /// Tableau states allowed per solver query.
    #[arg(long, default_value_t = 200_000)]
    pub budget_states: usize,
    /// Seconds allowed per solver query.
    #[arg(long, default_value_t = 30.0)]
    pub budget_secs: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write report records here (`-` for stdout, replacing the summary).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value_t = Framework::Jfc)]
    pub framework: Framework,
    #[arg(long, value_enum, default_value_t = Searcher::Pattern)]
    pub searcher: Searcher,
    /// Candidates the pattern searcher may examine, or BCs the genetic
    /// searcher may yield, per search.
    #[arg(long, default_value_t = 10_000)]
    pub max_candidates: usize,
    #[arg(long, default_value_t = 50)]
    pub max_rounds: usize,
    /// Check the no-BC certificate before the first JFc round.
    #[arg(long)]
    pub check_termination_first: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Generality,
    Contrasty,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum Framework {
    Ppfc,
    Jfc,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum Searcher {
    Pattern,
    Genetic,
}

fn parse_interpretation(s: &str) -> Result<Interpretation, String> {
    s.parse()
}

impl CommonArgs {
    pub fn budget(&self) -> Result<SolverBudget, commands::Failure> {
        if !(self.budget_secs.is_finite() && self.budget_secs > 0.0) {
            return Err(commands::Failure::Input(anyhow::anyhow!(
                "--budget-secs must be positive"
            )));
        }
        SolverBudget::new(self.budget_states, Duration::from_secs_f64(self.budget_secs))
            .map_err(|e| commands::Failure::Input(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::CheckBc(c) => commands::check_bc(c),
        Command::Filter { common, mode } => commands::filter(common, *mode),
        Command::Identify { common, search } => commands::identify(common, search),
        Command::Likelihood(c) => commands::likelihood(c),
        Command::Report { common, search } => commands::report(common, search),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("speclab: {}", f.error());
            ExitCode::from(f.code())
        }
    }
}
