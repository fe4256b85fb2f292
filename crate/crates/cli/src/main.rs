use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use segal_dyn_cli::error::{EXIT_OK, EXIT_VIOLATION};
use segal_dyn_cli::{run, Command, Format, UniverseFile};

#[derive(Debug, Parser)]
#[command(name = "segal-dyn", version, about = "Endofunctor dynamics on finite categories")]
struct Args {
    #[arg(long, global = true)]
    universe: Option<PathBuf>,
    /// Bound on enumerated entities.
    #[arg(long, global = true, env = "SEGALDYN_MAX", default_value_t = segal_dyn::fincat::DEFAULT_MAX_ENTITIES)]
    max: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(path) = args.universe.as_deref() else {
        eprintln!("error: --universe <path> is required");
        return ExitCode::from(2);
    };
    let started = Instant::now();
    let outcome = UniverseFile::load(path).and_then(|(u, bytes)| run(&args.command, &u, &bytes, args.max));
    match outcome {
        Ok(mut report) => {
            if args.timing {
                report.timing_ms = Some(started.elapsed().as_millis());
            }
            print!("{}", report.render(args.format));
            let code = if report.violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            };
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
