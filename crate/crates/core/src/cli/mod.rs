//! Command-line interface of the `nclass` binary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical rejection
//! (truncation, accuracy, range, symmetry), 1 I/O failure.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Defaults, FilterChoice, Format, RunConfig, Settings};

#[derive(Parser, Debug)]
#[command(
    name = "nclass",
    version,
    about = "Universal nonclassicality witnesses for single-mode states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Photon statistics and the standard nonclassicality tests of one state.
    StateInfo(CommonArgs),
    /// Witness expectation over a range of filter widths.
    WitnessScan(CommonArgs),
    /// Filtered P function on a square phase-space grid.
    NfpGrid(CommonArgs),
    /// Width scans of lossy photon-added thermal states for several thermal means.
    Fig2(CommonArgs),
    /// Sampled checks of the filter conditions.
    VerifyFilter(CommonArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// vacuum | fock:N | coherent:RE,IM | thermal:NBAR | spats:NBAR,ETA
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub nbar: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Fock truncation.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Filter width for single-width commands.
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub w_min: Option<f64>,
    #[arg(long)]
    pub w_max: Option<f64>,
    #[arg(long)]
    pub w_step: Option<f64>,
    /// Bisection tolerance for the crossing width.
    #[arg(long)]
    pub w_tol: Option<f64>,
    /// Comma-separated widths for verify-filter.
    #[arg(long)]
    pub widths: Option<String>,
    /// Comma-separated thermal means for fig2.
    #[arg(long)]
    pub nbars: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    /// Points per axis of the phase-space grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the phase-space grid.
    #[arg(long)]
    pub grid_extent: Option<f64>,
    /// disc | disc-normalized | reference | appendix
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub quad_radial: Option<usize>,
    #[arg(long)]
    pub quad_angular: Option<usize>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, ConfigError> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        macro_rules! flag {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field {
                    s.set_flag(stringify!($field), v);
                })*
            };
        }
        flag!(
            state,
            nbar,
            eta,
            dim,
            tail_tol,
            w,
            w_min,
            w_max,
            w_step,
            w_tol,
            widths,
            nbars,
            alpha_re,
            alpha_im,
            grid,
            grid_extent,
            filter,
            quad_radial,
            quad_angular,
            quad_tol,
            format
        );
        if let Some(out) = &self.out {
            s.set_flag("out", out.display());
        }
        Ok(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Numerical(#[from] crate::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(crate::Error::Domain(_) | crate::Error::Dimension(_)) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

fn defaults(command: &Command) -> Defaults {
    let base = Defaults {
        dim: 128,
        filter: FilterChoice::DiscNormalized,
        eta: 1.0,
        state_required: true,
    };
    match command {
        Command::Fig2(_) => Defaults {
            dim: 256,
            eta: 0.5,
            state_required: false,
            ..base
        },
        Command::VerifyFilter(_) => Defaults {
            filter: FilterChoice::Disc,
            state_required: false,
            ..base
        },
        _ => base,
    }
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(value) = std::env::var("NCLASS_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError {
            location: "environment NCLASS_THREADS".into(),
            message: format!("expected a positive integer, got `{value}`"),
        })?;
    // a second call in the same process fails harmlessly
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Runs one parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<(String, Option<PathBuf>), CliError> {
    configure_threads()?;
    let (name, args) = match &cli.command {
        Command::StateInfo(a) => ("state-info", a),
        Command::WitnessScan(a) => ("witness-scan", a),
        Command::NfpGrid(a) => ("nfp-grid", a),
        Command::Fig2(a) => ("fig2", a),
        Command::VerifyFilter(a) => ("verify-filter", a),
    };
    let cfg = RunConfig::resolve(&args.settings()?, defaults(&cli.command))?;
    let table = match &cli.command {
        Command::StateInfo(_) => commands::state_info(&cfg)?,
        Command::WitnessScan(_) => commands::witness_scan(&cfg)?,
        Command::NfpGrid(_) => commands::nfp_grid_cmd(&cfg)?,
        Command::Fig2(_) => commands::fig2(&cfg)?,
        Command::VerifyFilter(_) => commands::verify_filter(&cfg)?,
    };
    let text = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(name, &cfg),
    };
    Ok((text, cfg.out.clone()))
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|(text, out)| {
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nclass: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
