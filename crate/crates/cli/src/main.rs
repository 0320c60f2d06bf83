use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdpb_cli::{
    cmd_build, cmd_hermitize, cmd_spectrum, cmd_verify, read_config, BuildOptions, TolFlags, UsageError, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "fdpb",
    version,
    about = "Build and audit finite-dimensional pseudo-boson representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a representation from a JSON config
    Build(Flags),
    /// Run every check on a representation file
    Verify(Flags),
    /// Compare chain labels with the eigensolver, or audit a model spectrum
    Spectrum(Flags),
    /// Write the hermitized system of a representation
    Hermitize(Flags),
}

#[derive(Args)]
struct Flags {
    /// Run configuration (build)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Representation file (verify, spectrum, hermitize)
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// h, swanson:<theta> or shifted:<beta>
    #[arg(long, value_name = "STR")]
    model: Option<String>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    tol_abs: Option<f64>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    tol_rel: Option<f64>,
    /// Machine-readable report
    #[arg(long)]
    json: bool,
    /// Seed for the similarity generator
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
}

impl Flags {
    fn tol(&self) -> TolFlags {
        TolFlags {
            abs: self.tol_abs,
            rel: self.tol_rel,
        }
    }

    fn input(&self) -> Result<&PathBuf, UsageError> {
        self.input
            .as_ref()
            .ok_or_else(|| UsageError("--input is required".into()))
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, UsageError> {
    match cli.command {
        Command::Build(f) => {
            let path = f
                .config
                .as_ref()
                .ok_or_else(|| UsageError("--config is required".into()))?;
            let opts = BuildOptions {
                config: read_config(path)?,
                seed: f.seed,
                output: f.output.clone(),
                tol: f.tol(),
            };
            cmd_build(&opts, out)
        }
        Command::Verify(f) => cmd_verify(f.input()?, f.tol(), f.json, out),
        Command::Spectrum(f) => cmd_spectrum(f.input()?, f.model.as_deref(), f.tol(), f.json, out),
        Command::Hermitize(f) => cmd_hermitize(f.input()?, f.output.as_deref(), f.tol(), f.json, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
