use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use finsler_jet::checks::CheckKind;
use finsler_jet::registry::{list_examples, registry};
use finsler_jet::report::{run_report, Report, RunConfig};
use finsler_jet::Result;

#[derive(Parser)]
#[command(name = "finsler", version, about = "Pointwise Finsler tensor checks on sampled points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks from a JSON config or a registry entry.
    Run {
        /// Config file; registry entries and saved reports are valid too.
        config: Option<PathBuf>,
        #[arg(long)]
        example: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Default tolerance for items without a pinned one.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Comma-separated check names.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<CheckKind>>,
    },
    /// List registry entries.
    ListExamples,
    /// Run only the identity suite on a registry entry.
    CheckIdentities {
        #[arg(long)]
        example: String,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(config: Option<PathBuf>, example: Option<String>) -> Result<RunConfig> {
    match (config, example) {
        (Some(_), Some(_)) => Err(finsler_jet::Error::Config("give either a config file or --example, not both".into())),
        (Some(path), None) => {
            let mut value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            // A saved report re-runs its own config.
            if value.get("schemaVersion").is_some() {
                if let Some(cfg) = value.get_mut("config") {
                    value = cfg.take();
                }
            }
            Ok(serde_json::from_value(value)?)
        }
        (None, Some(name)) => Ok(registry(&name)?.into()),
        (None, None) => Err(finsler_jet::Error::Config("a config file or --example is required".into())),
    }
}

fn emit(report: &Report, json: Option<PathBuf>) -> Result<()> {
    match json {
        Some(p) if p.as_os_str() == "-" => println!("{}", report.to_json()?),
        Some(p) => {
            std::fs::write(&p, report.to_json()? + "\n")?;
            print!("{}", report.render());
        }
        None => print!("{}", report.render()),
    }
    Ok(())
}

fn verdict(report: &Report) -> ExitCode {
    let failing = report.failing();
    if failing.is_empty() {
        return ExitCode::SUCCESS;
    }
    for c in failing {
        let items: Vec<&str> = c.items.iter().filter(|i| !i.verdict.holds()).map(|i| i.name.as_str()).collect();
        eprintln!("failed: {} ({})", c.check, items.join(", "));
    }
    ExitCode::from(1)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::ListExamples => {
            for line in list_examples() {
                println!("{line}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            config,
            example,
            points,
            seed,
            tol,
            json,
            checks,
        } => {
            let mut cfg = load(config, example)?;
            if let Some(n) = points {
                cfg.points.count = n;
            }
            if let Some(s) = seed {
                cfg.points.seed = s;
            }
            if tol.is_some() {
                cfg.tolerance = tol;
            }
            if let Some(c) = checks {
                cfg.checks = c;
            }
            let report = run_report(&cfg)?;
            emit(&report, json)?;
            Ok(verdict(&report))
        }
        Command::CheckIdentities { example, points, seed } => {
            let mut cfg = RunConfig::from(registry(&example)?).with_checks(&[CheckKind::Identities]);
            cfg.points.count = points.unwrap_or(cfg.points.count);
            cfg.points.seed = seed.unwrap_or(cfg.points.seed);
            let report = run_report(&cfg)?;
            emit(&report, None)?;
            Ok(verdict(&report))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
