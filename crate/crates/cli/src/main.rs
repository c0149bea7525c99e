use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dwlab_cli::config::{defaults_json, load_config, Experiment, Overrides};
use dwlab_cli::run::run_experiment;

/// Damped-wave laboratory: spectra, pressure estimates and energy decay.
#[derive(Parser, Debug)]
#[command(name = "dwlab", version)]
struct Cli {
    experiment: Experiment,

    /// JSON configuration file.
    #[arg(long, required_unless_present = "print_defaults")]
    config: Option<PathBuf>,

    /// Output directory (overrides `output` in the config).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for stochastic stages (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,

    /// Worker thread cap.
    #[arg(long, env = "DWLAB_THREADS")]
    threads: Option<usize>,

    /// Print a documented default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.print_defaults {
        let text = serde_json::to_string_pretty(&defaults_json(cli.experiment)).expect("json");
        // a closed pipe (`| head`) is not an error worth reporting
        let _ = writeln!(std::io::stdout(), "{text}");
        return ExitCode::SUCCESS;
    }
    let over = Overrides {
        experiment: Some(cli.experiment),
        seed: cli.seed,
        output: cli.out.clone(),
    };
    let cfg = match load_config(cli.config.as_deref().expect("required by clap"), &over) {
        Ok(c) => c,
        Err(v) => {
            eprint!("{v}");
            return ExitCode::from(2);
        }
    };
    let Some(out) = cfg.output.clone() else {
        eprintln!("no output directory: pass --out or set 'output' in the config");
        return ExitCode::from(2);
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("--threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run_experiment(&cfg, &out, cli.threads) {
        Ok(outcome) => match outcome.error {
            None => {
                eprintln!(
                    "{} finished in {:.2} s; {} files in {}",
                    cfg.experiment.as_str(),
                    outcome.manifest.wall_time_seconds,
                    outcome.manifest.files.len() + 1,
                    out.display()
                );
                ExitCode::SUCCESS
            }
            Some(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
