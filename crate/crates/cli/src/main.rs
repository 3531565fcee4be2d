use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smoothlab::lab;
use smoothlab_cli::{emit, execute, listing, CliError, ExperimentConfig};

/// Numerical checks of Jackson-type inequalities in Orlicz and L_p spaces
/// on periodic grids.
#[derive(Parser)]
#[command(name = "smoothlab", version)]
struct Cli {
    /// Print the registered checks and exit.
    #[arg(long)]
    list: bool,
    /// Number of checks run concurrently.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for checks that do not set their own (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks listed in a JSON config.
    Run { config: PathBuf },
    /// Print the formulas, parameters and defaults of one check.
    Describe { id: String },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        print!("{}", listing());
        return ExitCode::SUCCESS;
    }
    match cli.cmd {
        None => {
            eprintln!("error: nothing to do; use `run <config>`, `describe <id>` or `--list`");
            ExitCode::from(2)
        }
        Some(Cmd::Describe { id }) => match lab::describe(&id) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Some(Cmd::Run { config }) => {
            if cli.jobs == Some(0) {
                eprintln!("error: --jobs must be at least 1");
                return ExitCode::from(2);
            }
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if cli.seed.is_some() {
                cfg.seed = cli.seed;
            }
            if let Some(out) = cli.out {
                cfg.out = out;
            }
            let outcomes = match execute(&cfg, cli.jobs) {
                Ok(o) => o,
                Err(e) => return fail(&e),
            };
            if let Err(e) = emit(&cfg.out, &cfg.formats, &outcomes) {
                return fail(&e);
            }
            let mut all = true;
            for o in &outcomes {
                let r = &o.report;
                let c = r.constant.map(|c| format!("{c:.6}")).unwrap_or_else(|| "-".into());
                println!("{:<16} {:<4} constant {c} ({} ms)", r.id, if r.passed() { "pass" } else { "FAIL" }, r.runtime_ms);
                all &= r.passed();
            }
            println!("reports in {}", cfg.out.display());
            if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
