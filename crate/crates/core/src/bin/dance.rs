use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dance_core::report::{compare, summarize, TrialSummary};
use dance_core::sim::{corridor_scenario, paper_scenario};
use dance_core::{run_trial, Error, ScenarioConfig, StrategyKind, TrialLog};

/// Stopping-region simulator.
#[derive(Parser)]
#[command(name = "dance", version)]
struct Cli {
    /// Accepted and echoed; trials are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        /// Override the strategy of every moving agent.
        #[arg(long)]
        strategy: Option<StrategyKind>,
        /// Directory for trial.csv, summary.json and log.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the vehicle and cyclist scenario.
    PaperScenario {
        #[arg(long)]
        strategy: StrategyKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run two unmitigated vehicles head-on in one corridor.
    Corridor {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate summary files.
    Compare {
        #[arg(required = true, num_args = 1..)]
        summaries: Vec<PathBuf>,
        /// Print JSON instead of the aligned table.
        #[arg(long)]
        json: bool,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
}

fn load(path: &Path) -> Result<ScenarioConfig, Error> {
    let cfg = ScenarioConfig::from_json(&fs::read_to_string(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<ExitCode, Error> {
    let log: TrialLog = run_trial(cfg)?;
    let summary = summarize(&log);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("trial.csv"), log.to_csv())?;
        fs::write(dir.join("summary.json"), summary.to_json())?;
        fs::write(dir.join("log.json"), log.to_json())?;
    }
    println!("{}", summary.to_json());
    Ok(if log.terminated_by_collision {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Verb::Run { scenario, strategy, out } => {
            let mut cfg = load(&scenario)?;
            if let Some(kind) = strategy {
                cfg = cfg.with_strategy(kind);
            }
            execute(&cfg, out.as_deref())
        }
        Verb::PaperScenario { strategy, out } => execute(&paper_scenario(strategy), out.as_deref()),
        Verb::Corridor { out } => execute(&corridor_scenario(), out.as_deref()),
        Verb::Compare { summaries, json } => {
            let rows = summaries
                .iter()
                .map(|p| TrialSummary::from_json(&fs::read_to_string(p)?))
                .collect::<Result<Vec<_>, Error>>()?;
            if rows.len() < 2 {
                return Err(Error::Parse("compare needs at least two summaries".into()));
            }
            let table = compare(&rows);
            if json {
                println!("{}", table.to_json());
            } else {
                print!("{}", table.to_table());
            }
            Ok(ExitCode::SUCCESS)
        }
        Verb::Validate { scenario } => {
            load(&scenario)?;
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(seed) = cli.seed {
        eprintln!("seed: {seed}");
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
