//! Batch front end: reads a TOML scenario, runs one task and writes a
//! report plus CSV tables.
//!
//! Exit codes: 0 when every check passed, 1 when a check failed or the
//! computation broke down, 2 for unreadable or invalid input.

use std::path::{Path, PathBuf};

use clap::Parser;

mod error;
pub mod output;
pub mod scenario;
mod tasks;

pub use error::CliError;
pub use scenario::{Scenario, Task};

/// Environment variable holding the `env_logger` filter.
pub const LOG_ENV: &str = "LOEWNER_LOG";

#[derive(Debug, Parser)]
#[command(name = "loewner-control", version, about = "Loewner flows, needle variations and maximum-principle checks")]
pub struct Cli {
    /// Task to run.
    #[arg(value_enum)]
    pub task: Task,
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory; defaults to the scenario's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Absolute integrator tolerance, overriding the scenario.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Relative integrator tolerance, overriding the scenario.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Step budget per trajectory, overriding the scenario.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Stabilization tolerance of infinite-horizon limits.
    #[arg(long)]
    pub limit_tol: Option<f64>,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).try_init();
    match run(&cli) {
        Ok(pass) => {
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("loewner-control: {e}");
            e.exit_code()
        }
    }
}

/// Runs the task; `Ok(false)` means a check failed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let sc = scenario::load(&cli.scenario)?;
    if let Some(t) = sc.task {
        if t != cli.task {
            return Err(CliError::Input(format!(
                "scenario declares task {} but {} was requested",
                t.name(),
                cli.task.name()
            )));
        }
    }
    let overrides = scenario::TolSpec {
        abs: cli.abs_tol,
        rel: cli.rel_tol,
        max_steps: cli.max_steps,
        limit: cli.limit_tol,
    };
    let opts = sc.limit_options(&overrides)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    log::info!("running {} on {}", cli.task.name(), cli.scenario.display());
    let dir = output_dir(cli);
    let stem = format!("{}.{}", file_stem(&sc.name), cli.task.name());
    match pool.install(|| tasks::run(cli.task, &sc, &opts)) {
        Ok(outcome) => {
            let mut report = outcome.report;
            report.set("status", if outcome.pass { "pass" } else { "fail" });
            let files = output::write_all(&dir, &stem, &report, &outcome.tables)?;
            for f in files {
                log::info!("wrote {}", f.display());
            }
            if !outcome.pass {
                eprintln!("loewner-control: {} check failed; see {}", cli.task.name(), dir.join(format!("{stem}.report.toml")).display());
            }
            Ok(outcome.pass)
        }
        Err(e) => {
            if let CliError::Numerical(inner) = &e {
                let mut report = output::Report::new();
                report
                    .set("scenario", sc.name.as_str())
                    .set("task", cli.task.name())
                    .set("status", "error")
                    .set("diagnostics", inner.to_string());
                output::write_all(&dir, &stem, &report, &[])?;
            }
            Err(e)
        }
    }
}

fn output_dir(cli: &Cli) -> PathBuf {
    match &cli.out {
        Some(d) => d.clone(),
        None => cli
            .scenario
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    }
}

/// Scenario name restricted to characters safe in file names.
fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() { "scenario".into() } else { s }
}
