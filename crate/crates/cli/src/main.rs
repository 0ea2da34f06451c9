use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

mod commands;
mod error;
mod output;
mod scenario;
mod simulate;

use commands::Temperature;
use error::{exit, CliError};

#[derive(Parser)]
#[command(name = "egtq", version, about = "Replicator, Lax and von Neumann dynamics; equilibria; Gibbs ensembles")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Print the parsed scenario with defaults filled in (or a template when
    /// no scenario is given) and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses of a scenario file and write series plus a manifest.
    Simulate { scenario: PathBuf },
    /// Check a strategy for Nash and evolutionary stability.
    Certify {
        /// Game file: {"payoff": [[...], ...]}.
        game: PathBuf,
        /// Comma-separated weights, e.g. "0.5,0.5".
        strategy: String,
        #[arg(long, default_value_t = commands::CERTIFY_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Gibbs state of an energy spectrum at a given β or mean energy.
    #[command(group(ArgGroup::new("temperature").required(true).args(["beta", "target_energy"])))]
    Maxent {
        /// Spectrum file: {"levels": [...]}.
        spectrum: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        target_energy: Option<f64>,
        /// Append finite-difference checks of the thermodynamic identities.
        #[arg(long)]
        verify: bool,
        /// Step for the finite differences.
        #[arg(long, default_value_t = 1e-4, requires = "verify")]
        h: f64,
        #[arg(long)]
        json: bool,
    },
}

fn dump_config(scenario: Option<&PathBuf>) -> Result<u8, CliError> {
    let file = match scenario {
        Some(path) => scenario::Scenario::parse(&scenario::read_file(path)?)?.file,
        None => scenario::example(),
    };
    println!("{}", serde_json::to_string_pretty(&file).expect("scenario serializes"));
    Ok(exit::OK)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if cli.dump_config {
        return match &cli.command {
            Some(Command::Simulate { scenario }) => dump_config(Some(scenario)),
            None => dump_config(None),
            Some(_) => Err(CliError::schema("--dump-config", "only applies to `simulate`")),
        };
    }
    match cli.command.expect("clap requires a subcommand") {
        Command::Simulate { scenario } => {
            let summary = simulate::run(&scenario)?;
            println!("wrote {}", summary.dir.join("manifest.json").display());
            for v in &summary.violations {
                eprintln!("tolerance exceeded: {v}");
            }
            Ok(if summary.passed { exit::OK } else { exit::REJECTED })
        }
        Command::Certify { game, strategy, tol, json } => {
            let game = scenario::load_game(&game)?;
            let (text, code) = commands::certify(&game, &strategy, tol, json)?;
            print!("{text}");
            Ok(code)
        }
        Command::Maxent { spectrum, beta, target_energy, verify, h, json } => {
            let spectrum = scenario::load_spectrum(&spectrum)?;
            let temp = match (beta, target_energy) {
                (Some(b), None) => Temperature::Beta(b),
                (None, Some(u)) => Temperature::TargetEnergy(u),
                _ => unreachable!("clap enforces exactly one"),
            };
            print!("{}", commands::maxent(&spectrum, temp, verify.then_some(h), json)?);
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::SCHEMA } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
