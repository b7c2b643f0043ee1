//! `qubit-gp` command-line tool: geometric-phase sweeps, Bloch-sphere
//! image clouds, and cross-route verification for a qubit in a squeezed
//! thermal bath. Emits CSV on stdout or to `--out`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod config;
mod run;

use clap::Parser;
use config::{Family, Mode, PartialConfig, Sector, Sweep};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "qubit-gp",
    version,
    about = "Geometric phase of an open qubit in a squeezed thermal bath"
)]
struct Cli {
    /// gp-qnd | gp-dissipative | sweep | bloch-spheroid | verify
    #[arg(long)]
    mode: Option<Mode>,

    /// Dynamics sector: qnd | dissipative (required for mode=sweep)
    #[arg(long)]
    sector: Option<Sector>,

    /// Initial polar angle theta_0 in [0, pi] (radians)
    #[arg(long)]
    theta0: Option<f64>,

    /// Initial azimuthal angle phi_0 in [0, 2pi) (radians)
    #[arg(long)]
    phi0: Option<f64>,

    /// Bath temperature T (units of hbar*omega/k_B)
    #[arg(long)]
    temp: Option<f64>,

    /// Coupling strength gamma_0
    #[arg(long)]
    gamma0: Option<f64>,

    /// Squeezing magnitude r
    #[arg(long)]
    squeeze_r: Option<f64>,

    /// Dephasing-sector squeezing parameter a
    #[arg(long)]
    squeeze_a: Option<f64>,

    /// Squeezing phase Phi (radians)
    #[arg(long)]
    squeeze_phi: Option<f64>,

    /// Qubit level splitting omega
    #[arg(long)]
    omega: Option<f64>,

    /// Bath cutoff frequency omega_c
    #[arg(long)]
    omega_c: Option<f64>,

    /// Evolution time for bloch-spheroid mode
    #[arg(long)]
    time: Option<f64>,

    /// Sweep grid as axis:lo:hi:n (axes: theta0, phi0, temp, gamma0,
    /// squeeze-r, squeeze-a, squeeze-phi)
    #[arg(long)]
    sweep: Option<Sweep>,

    /// Curve family as axis:v1,v2,... (one output curve per value)
    #[arg(long)]
    family: Option<Family>,

    /// Add a gamma_0 = 0 (unitary) reference curve to GP sweeps
    #[arg(long)]
    include_unitary: bool,

    /// Grid resolution: GP integration points / sphere sample count
    #[arg(long)]
    samples: Option<usize>,

    /// RNG seed for randomized verification checks
    #[arg(long)]
    seed: Option<u64>,

    /// Report angles in degrees instead of radians
    #[arg(long)]
    degrees: bool,

    /// Write CSV to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Read `key = value` defaults from this file (flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Cli {
    fn to_partial(&self) -> PartialConfig {
        PartialConfig {
            mode: self.mode,
            sector: self.sector,
            theta0: self.theta0,
            phi0: self.phi0,
            temp: self.temp,
            gamma0: self.gamma0,
            squeeze_r: self.squeeze_r,
            squeeze_a: self.squeeze_a,
            squeeze_phi: self.squeeze_phi,
            omega: self.omega,
            omega_c: self.omega_c,
            time: self.time,
            sweep: self.sweep,
            family: self.family.clone(),
            include_unitary: if self.include_unitary { Some(true) } else { None },
            samples: self.samples,
            seed: self.seed,
            degrees: if self.degrees { Some(true) } else { None },
            out: self.out.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let base = match &cli.config {
        Some(path) => match config::parse_config_file(path) {
            Ok(p) => p,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        },
        None => PartialConfig::default(),
    };

    let resolved = match cli.to_partial().over(base).resolve() {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };

    match run::run(&resolved) {
        Ok(()) => ExitCode::SUCCESS,
        Err(run::RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(run::RunError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
