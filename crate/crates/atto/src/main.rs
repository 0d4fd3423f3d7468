use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use atto::commands::{self, MethodChoice, Output};
use atto::config::{parse_complex, ConfigFile, Overrides};
use atto::format::{BasisName, OperatorJson, SymbolJson};
use atto::{selftest, CliError, JobConfig};
use atto_core::Complex64;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "atto",
    version,
    about = "Asymmetric truncated Toeplitz operators on model spaces"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Blaschke product for K_α: z2, z3, zn:<k>, inline JSON or a file.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Blaschke product for K_β.
    #[arg(long, global = true)]
    beta: Option<String>,
    #[arg(long, global = true, alias = "lambda", value_parser = parse_complex, allow_hyphen_values = true)]
    lambda1: Option<Complex64>,
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda2: Option<Complex64>,
    #[arg(long, global = true)]
    residual: Option<f64>,
    #[arg(long = "match", global = true)]
    matching: Option<f64>,
    #[arg(long, global = true)]
    decision: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clark points of α (and β if given).
    Clark,
    /// Matrix of A_φ for a symbol file.
    Atto {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value = "tm", value_parser = parse_basis)]
        in_basis: BasisName,
        #[arg(long, default_value = "tm", value_parser = parse_basis)]
        out_basis: BasisName,
    },
    /// Compressed shift of α, or the modified shift with --c.
    Shift {
        #[arg(long, default_value = "tm", value_parser = parse_basis)]
        basis: BasisName,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        c: Option<Complex64>,
    },
    /// Clark unitary U_λ of α for λ = lambda1.
    Unitary {
        #[arg(long, default_value = "tm", value_parser = parse_basis)]
        basis: BasisName,
    },
    /// Decide whether a matrix belongs to T(α,β).
    Membership {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value = "all", value_parser = MethodChoice::parse)]
        method: MethodChoice,
        #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
        b: Complex64,
    },
    /// Classify a rank-one member.
    Rankone {
        #[arg(long, required_unless_present = "example_4_1")]
        matrix: Option<PathBuf>,
        #[arg(long = "example-4-1")]
        example_4_1: bool,
        #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
    },
    /// Numerical dimension of T(α,β).
    Dim,
    /// Full report on the rank-one example with parameter a.
    #[command(name = "example-4-1")]
    Example {
        #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
    },
    /// Seeded end-to-end checks.
    Selftest,
}

fn parse_basis(s: &str) -> Result<BasisName, String> {
    BasisName::parse(s).map_err(|e| e.to_string())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let file = match &cli.common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let c = cli.common;
    let over = Overrides {
        alpha: c.alpha,
        beta: c.beta,
        lambda1: c.lambda1,
        lambda2: c.lambda2,
        residual: c.residual,
        matching: c.matching,
        decision: c.decision,
        seed: c.seed,
        trials: c.trials,
    };
    let cfg = JobConfig::resolve(file, over)?;
    match cli.command {
        Command::Clark => commands::clark(&cfg),
        Command::Atto {
            symbol,
            in_basis,
            out_basis,
        } => commands::atto(
            &cfg,
            &read_json::<SymbolJson>(&symbol)?,
            in_basis,
            out_basis,
        ),
        Command::Shift { basis, c } => commands::shift(&cfg, basis, c),
        Command::Unitary { basis } => commands::unitary(&cfg, basis),
        Command::Membership {
            matrix,
            method,
            a,
            b,
        } => {
            let op = read_json::<OperatorJson>(&matrix)?.to_operator()?;
            commands::membership(&cfg, &op, method, (a, b))
        }
        Command::Rankone {
            matrix,
            example_4_1,
            a,
        } => {
            if example_4_1 {
                commands::rankone_example(&cfg, a)
            } else {
                let path = matrix.ok_or_else(|| CliError::Usage("--matrix is required".into()))?;
                commands::rankone(&cfg, &read_json::<OperatorJson>(&path)?.to_operator()?)
            }
        }
        Command::Dim => commands::dim(&cfg),
        Command::Example { a } => commands::example(&cfg, a),
        Command::Selftest => {
            let report = selftest::run(cfg.seed, cfg.trials, &cfg.tolerances)?;
            let exit = if report.passed { 0 } else { 4 };
            Ok(Output {
                json: serde_json::to_value(report)?,
                exit,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.json).expect("JSON values serialize");
            // A closed pipe on stdout is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("atto: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
