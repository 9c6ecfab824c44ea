use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use braidtower::cli::{parse_config, run, CliError, OutputFormat, Task};

/// Braided tensor bialgebras, Nichols algebras and enveloping towers at bounded degree.
///
/// Exit codes: 0 success, 1 assertion failure, 2 config error, 3 truncation instability.
#[derive(Parser, Debug)]
#[command(name = "braidtower", version)]
struct Args {
    /// JSON job file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the task in the config.
    #[arg(long)]
    task: Option<Task>,
    /// Overrides the truncation degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Emit one structured JSON report.
    #[arg(long)]
    json: bool,
    /// Include stage generators and the config echo in text output.
    #[arg(long)]
    verbose: bool,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(t) = args.task {
        cfg.task = t;
    }
    if let Some(d) = args.degree {
        cfg.degree = d;
    }
    if args.json {
        cfg.output = OutputFormat::Structured;
    }
    let report = run(&cfg)?;
    let out = match cfg.output {
        OutputFormat::Structured => report.to_json() + "\n",
        OutputFormat::Text => report.render_text(args.verbose),
    };
    // A closed pipe downstream is not an error of the job.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
