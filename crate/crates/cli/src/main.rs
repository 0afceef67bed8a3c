use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use magic_cli::error::{EXIT_OK, EXIT_USAGE};
use magic_cli::{run, write_report, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "magic",
    version,
    about = "Stabilizer Rényi entropy and entanglement experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// SRE of W, ω, φ or ground states by several estimators
    Sre(Flags),
    /// Critical field h* over a (Jy, Jz) grid
    HstarMap(Flags),
    /// Finite-size scaling of the SRE and entropy jumps across h*
    JumpScaling(Flags),
    /// Ratio of frustrated to non-frustrated-plus-W magic
    Ratio(Flags),
    /// Block entropy as a function of block position
    EntProfile(Flags),
    /// Closed forms against numerics
    Verify(Flags),
}

/// Lists accept `a,b,c` and inclusive ranges `start:stop:step`.
#[derive(clap::Args)]
struct Flags {
    #[arg(long = "L", allow_hyphen_values = true)]
    l: Option<String>,
    /// Momentum index list, or `all`
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    jy: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    jz: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// SRE estimators: brute, structured, closed
    #[arg(long)]
    method: Option<String>,
    /// Entropy measures: renyi2, von_neumann, von_neumann_nats
    #[arg(long)]
    measure: Option<String>,
    /// Output file, `-` for standard output
    #[arg(long)]
    out: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// key = value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads, 0 for all cores
    #[arg(long)]
    workers: Option<String>,
    /// State family: w, omega, phi, ground
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Block length
    #[arg(long)]
    a: Option<String>,
    /// Eigensolver: lanczos, lanczos-full, dense
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    h_max: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(String, String)> {
        [
            ("L", &self.l),
            ("ell", &self.ell),
            ("jy", &self.jy),
            ("jz", &self.jz),
            ("h", &self.h),
            ("eps", &self.eps),
            ("tol", &self.tol),
            ("method", &self.method),
            ("measure", &self.measure),
            ("out", &self.out),
            ("format", &self.format),
            ("workers", &self.workers),
            ("kind", &self.kind),
            ("theta", &self.theta),
            ("a", &self.a),
            ("solver", &self.solver),
            ("h_max", &self.h_max),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    let (name, flags) = match &cli.command {
        Command::Sre(f) => ("sre", f),
        Command::HstarMap(f) => ("hstar-map", f),
        Command::JumpScaling(f) => ("jump-scaling", f),
        Command::Ratio(f) => ("ratio", f),
        Command::EntProfile(f) => ("ent-profile", f),
        Command::Verify(f) => ("verify", f),
    };
    let outcome = ExperimentConfig::load(name, flags.config.as_deref(), &flags.overrides())
        .and_then(|cfg| {
            let report = run(&cfg)?;
            let written = write_report(&report, &cfg)?;
            Ok((report, written))
        });
    match outcome {
        Ok((report, written)) => {
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            for line in report.failures.iter().chain(&report.breaches) {
                eprintln!("{line}");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
