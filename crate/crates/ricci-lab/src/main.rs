use clap::Parser;
use ricci_lab::cli::{load_config, run, Format, RunOptions, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

/// Run a numerical scenario and write CSV/JSON tables plus `summary.json`.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
/// configuration or I/O error.
#[derive(Parser, Debug)]
#[command(name = "ricci-lab", version)]
struct Args {
    #[arg(value_enum)]
    scenario: Scenario,
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include wall-clock seconds in the summary.
    #[arg(long)]
    timings: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = RunOptions { out: args.out, format: args.format, seed: args.seed, timings: args.timings };
    let cfg = match load_config(args.config.as_deref(), &opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if args.print_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    match run(&cfg, args.scenario, &opts) {
        Ok(summary) => {
            for c in &summary.checks {
                let value = c.value.map(|v| format!(" {v:e}")).unwrap_or_default();
                println!("{} {}{}{}", if c.pass { "PASS" } else { "FAIL" }, c.name, value, if c.detail.is_empty() { String::new() } else { format!("  ({})", c.detail) });
            }
            if summary.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
