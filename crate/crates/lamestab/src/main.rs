use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use lamestab::config::ExperimentConfig;
use lamestab::io::{read_displacement, write_atomic, write_mesh, write_scalar};
use lamestab::runner::{prepare, realize_pair};
use lamestab_core::reconstruct::{reconstruct_mu, InteriorMeasurement};

/// Stability and unique-continuation experiments for the Lamé system.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every check requested by the config and write the reports.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print problem sizes and solve counts without solving.
    Describe { config: PathBuf },
    /// Reconstruct μ from a measured displacement file on the config mesh.
    Reconstruct {
        config: PathBuf,
        /// Displacement in the `nd 2` text format.
        #[arg(long)]
        measurement: PathBuf,
        /// Standard deviation of the measurement noise, for the record.
        #[arg(long, default_value_t = 0.0)]
        noise_level: f64,
        /// Tikhonov weight; defaults to 1e-6 times the mean strain energy density.
        #[arg(long)]
        reg_weight: Option<f64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

/// Default output directory when neither the flag nor the config names one.
const OUTPUT_ENV: &str = "LAME_OUTPUT_DIR";

/// `--output-dir`, then the config entry, then `$LAME_OUTPUT_DIR`, then
/// `./lamestab-out`.
fn output_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("lamestab-out"))
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            config,
            output_dir: dir,
            seed,
            jobs,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = output_dir(dir, &cfg);
            let report = lamestab::run(&cfg, jobs)?;
            for p in report
                .write(&dir)
                .with_context(|| format!("writing reports to {}", dir.display()))?
            {
                println!("wrote {}", p.display());
            }
            let s = &report.summary;
            println!(
                "{} checks, {} failed; exit status {}",
                s.checks.len(),
                s.failed_checks,
                s.exit_status
            );
            Ok(ExitCode::from(report.exit_status() as u8))
        }
        Command::Describe { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            print!("{}", lamestab::describe(&cfg)?.text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Reconstruct {
            config,
            measurement,
            noise_level,
            reg_weight,
            output_dir: dir,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let setup = prepare(&cfg)?;
            let file = File::open(&measurement)
                .with_context(|| format!("opening {}", measurement.display()))?;
            let u = read_displacement(file, Arc::clone(&setup.mesh))
                .with_context(|| format!("reading {}", measurement.display()))?;
            let meas = InteriorMeasurement::new(u, noise_level)?;
            let pair = realize_pair(&cfg, &setup.mesh, cfg.lame.degree)?;
            let w =
                reg_weight.unwrap_or_else(|| lamestab_core::reconstruct::default_reg_weight(&meas));
            let rec = reconstruct_mu(&meas, &pair.lambda, &pair.mu, w)?;
            let dir = output_dir(dir, &cfg);
            let path = dir.join("mu_rec.txt");
            write_atomic(&path, |f| write_scalar(&rec.mu_rec, f))?;
            write_atomic(&dir.join("mesh.txt"), |f| write_mesh(&setup.mesh, f))?;
            println!(
                "wrote {} (residual {:e}, weight {:e}, {} iterations)",
                path.display(),
                rec.residual_norm,
                w,
                rec.iterations
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
