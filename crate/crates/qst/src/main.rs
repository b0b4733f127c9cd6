use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qst::config::parse_override;
use qst::{
    emit_csv, emit_summary, parse_config_with, run_scenario, sidecar_path, write_csv, CliError,
    Mode,
};

/// Quantum state transfer through Krawtchouk spin chains.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Isolated chain: end-to-end fidelity and the |sin t|^(M-1) law.
    Closed(RunArgs),
    /// Chains in a common Lorentzian reservoir, closed-form solution.
    Open(RunArgs),
    /// Same system, fixed-step RK4 on the memory-kernel equation.
    Oracle(RunArgs),
    /// Closed-form and RK4 fidelity side by side.
    Compare(RunArgs),
    /// Closed-form fidelity for each N in the config's N list.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML scenario file.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; a JSON summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. --set lambda=20 or --set 'N=[1,5]'.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn execute(mode: Mode, args: RunArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let overrides = args
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let config = parse_config_with(&text, Some(mode), &overrides)?;
    let out_path = args
        .out
        .or_else(|| config.output.as_ref().map(PathBuf::from));
    let sidecar = out_path.as_deref().map(sidecar_path).transpose()?;

    let result = run_scenario(&config)?;
    match (&out_path, &sidecar) {
        (Some(csv), Some(json)) => {
            emit_csv(&result.table, csv)?;
            emit_summary(&result.summary, json)?;
        }
        _ => {
            let stdout = std::io::stdout();
            write_csv(&result.table, stdout.lock())
                .map_err(|e| CliError::io("<stdout>", std::io::Error::other(e)))?;
        }
    }
    eprintln!("{}", result.summary.line());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (mode, args) = match cli.command {
        Command::Closed(a) => (Mode::Closed, a),
        Command::Open(a) => (Mode::Open, a),
        Command::Oracle(a) => (Mode::Oracle, a),
        Command::Compare(a) => (Mode::Compare, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    match execute(mode, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
