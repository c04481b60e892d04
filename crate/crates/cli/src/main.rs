use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use csmimo::baselines::Method;
use csmimo::cs::MeasurementKind;
use csmimo::output::{
    write_json, write_prr_csv, write_spectra_csv, write_spectra_dat, write_summary_csv, write_summary_dat,
    write_sweep_csv,
};
use csmimo::runner::{run_scenario, run_sjr, summarize, sweep, Axis};
use csmimo::scenario::{load_scenario, Scenario};
use csmimo::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "csmimo", version, about = "Compressive-sensing DOA estimation for colocated MIMO radar")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scene and write spectra, PRR values and run metadata.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated subset of cs, capon, apes, glrt.
        #[arg(long, value_delimiter = ',', default_value = "cs,capon,apes,glrt")]
        methods: Vec<String>,
    },
    /// Repeat trials over the values of one scenario parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// L, M, N_r or snr_db.
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Defaults to the config's trial count.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "cs,capon,apes,glrt")]
        methods: Vec<String>,
    },
    /// Monte-Carlo signal-to-jammer ratio after compression; prints JSON.
    Sjr {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum, default_value_t = Kind::Matched)]
        kind: Kind,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the report to this directory as sjr.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Plain,
    Matched,
}

impl From<Kind> for MeasurementKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Plain => MeasurementKind::Plain,
            Kind::Matched => MeasurementKind::Matched,
        }
    }
}

fn parse_methods(list: &[String]) -> Result<Vec<Method>, Error> {
    let mut methods = Vec::new();
    for m in list.iter().filter(|s| !s.trim().is_empty()) {
        let m: Method = m.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(Error::Config("no methods selected".into()));
    }
    Ok(methods)
}

fn load(config: &Path, seed: Option<u64>) -> Result<(Scenario, u64), Error> {
    let scenario = load_scenario(config)?;
    let seed = seed.unwrap_or(scenario.seed);
    Ok((scenario, seed))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            out,
            methods,
        } => {
            let (scenario, seed) = load(&config, seed)?;
            let methods = parse_methods(&methods)?;
            std::fs::create_dir_all(&out)?;
            let run = run_scenario(&scenario, &methods, seed)?;
            write_spectra_csv(out.join("spectra.csv"), &run)?;
            write_prr_csv(out.join("prr.csv"), &run)?;
            write_spectra_dat(&out, &run)?;
            write_json(out.join("run.json"), &run)?;
            for m in &run.methods {
                match (&m.error, m.prr_db()) {
                    (Some(e), _) => log::warn!("{}: {}", m.method, e.message),
                    (None, Some(db)) => log::info!("{}: PRR {db:.2} dB", m.method),
                    (None, None) => log::info!("{}: PRR undefined", m.method),
                }
            }
        }
        Command::Sweep {
            config,
            axis,
            values,
            trials,
            seed,
            out,
            methods,
        } => {
            let (scenario, seed) = load(&config, seed)?;
            let axis: Axis = axis.parse()?;
            let methods = parse_methods(&methods)?;
            let trials = trials.unwrap_or(scenario.trials);
            std::fs::create_dir_all(&out)?;
            let rows = sweep(&scenario, axis, &values, trials, &methods, seed)?;
            let summary = summarize(&rows);
            write_sweep_csv(out.join("sweep.csv"), &rows)?;
            write_summary_csv(out.join("summary.csv"), &summary)?;
            write_summary_dat(&out, &summary)?;
            for s in &summary {
                log::info!(
                    "{axis}={} {}: {:.2} ± {:.2} dB over {} trials",
                    s.value,
                    s.method,
                    s.mean_prr_db,
                    s.stderr_prr_db,
                    s.ok
                );
            }
        }
        Command::Sjr {
            config,
            trials,
            kind,
            seed,
            out,
        } => {
            let (scenario, seed) = load(&config, seed)?;
            let trials = trials.unwrap_or(scenario.trials);
            let report = run_sjr(&scenario, kind.into(), trials, seed)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                write_json(dir.join("sjr.json"), &report)?;
            }
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
            println!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            ExitCode::FAILURE
        }
    }
}
