use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use degbeam::config::{parse_config, RunConfig};
use degbeam::run::{execute, Command, Invocation, OUT_ENV};

/// Degenerate beam with boundary feedback: simulation and decay checks.
///
/// Exit status is 0 when every verdict holds, 1 when a verdict fails and 2
/// on an error (bad config, I/O, numerical breakdown).
#[derive(Parser, Debug)]
#[command(name = "degbeam", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root; the run writes into `<out>/<label>/`.
    #[arg(long, global = true, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Run label (defaults to `output.label` of the config).
    #[arg(long, global = true)]
    label: Option<String>,
    /// Worker threads for `sweep` (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Dump assembled matrices next to the trace (`simulate` only).
    #[arg(long, global = true)]
    debug_matrices: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Simulate one configuration and check the decay certificate.
    Simulate,
    /// Print the stability constants.
    Constants,
    /// Solve the static problem and compare with the cubic solution.
    StaticSolve,
    /// Estimate the weighted Hardy constant.
    Hardy,
    /// Simulate the whole (alpha, beta, gamma) grid.
    Sweep,
    /// Check a stored trace against stored constants.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        constants: PathBuf,
    },
}

fn invocation(cli: Cli) -> degbeam::Result<Invocation> {
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Constants => Command::Constants,
        Cmd::StaticSolve => Command::StaticSolve,
        Cmd::Hardy => Command::Hardy,
        Cmd::Sweep => Command::Sweep,
        Cmd::Verify { trace, constants } => Command::Verify { trace, constants },
    };
    let config = match (&cli.config, &command) {
        (Some(p), _) => parse_config(p)?,
        (None, Command::Verify { .. }) => RunConfig::with_alpha(0.5),
        (None, _) => {
            return Err(degbeam::Error::Config(format!(
                "`{}` needs --config <file>",
                command.name()
            )))
        }
    };
    Ok(Invocation {
        out_root: cli.out.unwrap_or_else(|| config.output.directory.clone()),
        label: cli.label.unwrap_or_else(|| config.output.label.clone()),
        command,
        config,
        jobs: cli.jobs,
        debug_matrices: cli.debug_matrices,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = invocation(cli).and_then(|inv| execute(&inv));
    match result {
        Ok(o) => {
            print!("{}", o.text);
            for f in &o.files {
                eprintln!("wrote {}", f.display());
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("degbeam: some verdicts failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("degbeam: {e}");
            ExitCode::from(2)
        }
    }
}
