use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use axion_optomech::config::{parse_regimes, RunConfig};
use axion_optomech::{acceptance, commands, ConstantsMode, Error, Result};

/// Levitated-nanosphere optomechanics: transmission spectra, axion-exchange
/// force gradients, detection thresholds and exclusion curves.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// TOML run configuration; omitted keys take the default parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// printed | codata
    #[arg(long, global = true)]
    constants_mode: Option<String>,

    /// proton | neutron | equal | all
    #[arg(long, global = true)]
    regime: Option<String>,

    /// Run the acceptance suite; exits nonzero on any failure.
    #[arg(long)]
    check: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission spectra, one CSV per mechanical offset, plus peaks.json.
    Spectrum {
        /// omega_m - omega0 values in Hz.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = commands::DEFAULT_OFFSETS)]
        offsets: Vec<f64>,
        /// Coarse samples across the -100..100 Hz window.
        #[arg(long, default_value_t = commands::DEFAULT_N_COARSE)]
        n_coarse: usize,
    },
    /// Minimum detectable shift and force-gradient threshold, linewidth and thermal.
    NoiseFloor,
    /// Al, Au and differential force gradients at the configured couplings.
    ForceGradient,
    /// Exclusion curves over the configured mass grid.
    Constrain {
        /// Reference curves (CSV: m_a,unit,g2_over_4pi[,series]) to merge into overlay.csv.
        #[arg(long = "reference")]
        references: Vec<PathBuf>,
    },
    /// Dump all physical constants and conversion factors as JSON.
    Constants,
    /// Run the acceptance suite.
    Check,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(mode) = &cli.constants_mode {
        cfg.constants_mode = mode.parse::<ConstantsMode>()?;
    }
    if let Some(r) = &cli.regime {
        cfg.regimes = parse_regimes(r)?;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn check() -> Result<bool> {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.check || matches!(cli.command, Some(Command::Check)) {
        return check();
    }
    let Some(command) = &cli.command else {
        return Err(Error::Usage("no subcommand given (try --help)".into()));
    };
    let cfg = load(cli)?;
    let out = cfg.output_dir.clone();
    let files = match command {
        Command::Spectrum { offsets, n_coarse } => {
            commands::spectrum(&cfg, offsets, *n_coarse, &out)?
        }
        Command::NoiseFloor => {
            let (report, files) = commands::noise_floor(&cfg, &out)?;
            print_json(&report)?;
            files
        }
        Command::ForceGradient => {
            let (report, files) = commands::force_gradient(&cfg, &out)?;
            print_json(&report)?;
            files
        }
        Command::Constrain { references } => commands::constrain(&cfg, references, &out)?,
        Command::Constants => {
            print_json(&cfg.constants().dump())?;
            Vec::new()
        }
        Command::Check => unreachable!(),
    };
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
