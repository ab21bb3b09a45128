use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use beamsim::harness::{
    self, figure_preset, parse_config, run_experiment, write_csv, write_law_histogram,
    write_trials_csv, ExperimentConfig, ExperimentResult, FigureId, Sweep, SweepParam,
};
use beamsim::Error;

#[derive(Parser)]
#[command(
    name = "beamsim",
    version,
    about = "Hybrid beamforming Monte-Carlo simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        config: PathBuf,
        /// Directory for CSV output; prints the summary to stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a config with its sweep replaced.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce one of the published figures as CSV.
    Figure {
        id: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run the self-check suite and print a JSON report.
    Validate {
        /// Include the full-size statistical checks.
        #[arg(long)]
        strict: bool,
    },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Csv(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn env_seed() -> Result<Option<u64>, Error> {
    match std::env::var("BEAMSIM_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| Error::Config {
            path: None,
            line: None,
            field: Some("BEAMSIM_SEED".into()),
            message: format!("`{s}` is not an unsigned 64-bit seed"),
        }),
        Err(_) => Ok(None),
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    let mut cfg = parse_config(path)?;
    if let Some(seed) = env_seed()? {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn emit(results: &[ExperimentResult], out: Option<&Path>, stem: &str) -> Result<(), Error> {
    match out {
        Some(dir) => {
            let summary = dir.join(format!("{stem}.csv"));
            write_csv(results, &summary)?;
            write_trials_csv(results, &dir.join(format!("{stem}_trials.csv")))?;
            let laws: Vec<_> = results
                .iter()
                .flat_map(|r| r.points.iter())
                .filter_map(|p| p.law.clone().map(|l| (p.config.name.clone(), l)))
                .collect();
            if !laws.is_empty() {
                write_law_histogram(&laws, 60, &dir.join(format!("{stem}_law.csv")))?;
                for (name, law) in &laws {
                    eprintln!("{name}: KS distance {:.4}", law.ks_distance);
                }
            }
            eprintln!("wrote {}", summary.display());
        }
        None => {
            let stdout = std::io::stdout().lock();
            let mut w = harness::output::write_summary(results, stdout)?;
            w.flush().map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let res = run_experiment(&cfg)?;
            emit(&[res], out.as_deref(), &cfg.name)?;
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let mut cfg = load(&config)?;
            let param: SweepParam = param.parse()?;
            cfg.sweep = Some(Sweep { param, values });
            let res = run_experiment(&cfg)?;
            emit(
                &[res],
                out.as_deref(),
                &format!("{}_{}", cfg.name, param.name()),
            )?;
        }
        Command::Figure {
            id,
            trials,
            seed,
            out,
        } => {
            let id: FigureId = id.parse()?;
            let seed = match seed {
                Some(s) => Some(s),
                None => env_seed()?,
            };
            let mut results = Vec::new();
            for mut cfg in figure_preset(id) {
                if let Some(t) = trials {
                    cfg.trials = t;
                }
                if let Some(s) = seed {
                    cfg.master_seed = s;
                }
                eprintln!("running {} ({} trials)", cfg.name, cfg.trials);
                results.push(run_experiment(&cfg)?);
            }
            emit(&results, Some(&out), id.as_str())?;
        }
        Command::Validate { strict } => {
            let report = harness::validate(strict);
            println!("{}", report.to_json());
            if !report.passed {
                return Ok(EXIT_VALIDATION);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
