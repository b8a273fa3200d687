use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cybundle::fixtures::{run_all, FixtureReport};
use cybundle::search::{run_search, CheckInput, SearchConfig};
use serde_json::Value;

const BOUND_VAR: &str = "CYBUNDLE_BOUND";

#[derive(Parser)]
#[command(name = "cybundle", version, about = "Chern class, stability and anomaly checks for bundle extensions on elliptic Calabi-Yau threefolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in reference fixtures and print computed against expected values.
    #[command(name = "verify-paper")]
    Verify {
        /// Emit the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Check one model described by a JSON file.
    Check { file: PathBuf },
    /// Scan a parameter box described by a JSON config and write JSONL records.
    Search {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        limit: Option<u64>,
    },
}

enum Failure {
    Verification,
    Input(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { json } => verify(json),
        Command::Check { file } => check(&file),
        Command::Search { config, jobs, out, limit } => search(&config, jobs, out.as_deref(), limit),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn verify(json: bool) -> Result<(), Failure> {
    let reports = run_all();
    if json {
        let text = serde_json::to_string_pretty(&reports).map_err(|e| Failure::Input(e.to_string()))?;
        println!("{text}");
    } else {
        print_table(&reports);
    }
    if reports.iter().all(FixtureReport::pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn print_table(reports: &[FixtureReport]) {
    for r in reports {
        println!("{} ({})", r.id, r.description);
        for c in &r.checks {
            let status = match (c.pass, c.informational) {
                (true, false) => "PASS",
                (false, false) => "FAIL",
                (_, true) => "INFO",
            };
            println!("  [{status}] {}: expected {}, computed {} [{}]", c.quantity, c.expected, c.computed, c.source);
        }
    }
    let failed = reports.iter().filter(|r| !r.pass()).count();
    println!("{} fixtures, {} failed", reports.len(), failed);
}

/// Read a JSON file and fill in `bound` from the environment when it is absent.
fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: malformed JSON: {e}", path.display())))?;
    if let (Ok(raw), Some(obj)) = (std::env::var(BOUND_VAR), value.as_object_mut()) {
        let bound: i64 = raw.trim().parse().map_err(|_| Failure::Input(format!("{BOUND_VAR}={raw:?} is not an integer")))?;
        obj.entry("bound").or_insert(Value::from(bound));
    }
    Ok(value)
}

fn decode<T: serde::de::DeserializeOwned>(path: &Path, value: Value) -> Result<T, Failure> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        Failure::Input(format!("{}: invalid field `{field}`: {}", path.display(), e.inner()))
    })
}

fn check(path: &Path) -> Result<(), Failure> {
    let input: CheckInput = decode(path, read_json(path)?)?;
    let record = input.run().map_err(|e| Failure::Input(e.to_string()))?;
    let text = serde_json::to_string_pretty(&record).map_err(|e| Failure::Input(e.to_string()))?;
    println!("{text}");
    if record.passed() {
        Ok(())
    } else {
        for e in &record.errors {
            eprintln!("{}: {}", e.stage, e.message);
        }
        if let Some(stage) = record.overall.failed_stage {
            eprintln!("failed at stage {stage}");
        }
        Err(Failure::Verification)
    }
}

fn search(path: &Path, jobs: usize, out: Option<&Path>, limit: Option<u64>) -> Result<(), Failure> {
    let config: SearchConfig = decode(path, read_json(path)?)?;
    config.plan().map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let summary = match out {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            run_search(&config, jobs, limit, &mut w)
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let r = run_search(&config, jobs, limit, &mut w);
            let _ = w.flush();
            r
        }
    }
    .map_err(|e| Failure::Input(e.to_string()))?;
    let text = serde_json::to_string(&summary).map_err(|e| Failure::Input(e.to_string()))?;
    eprintln!("{text}");
    Ok(())
}
