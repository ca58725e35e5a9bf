//! `mumimo` command-line interface.
//!
//! ```text
//! mumimo classify-sweep --config figs/fig2.cfg --seed 1 --out fig2.csv
//! mumimo ber-sweep --config figs/ber.cfg --format json
//! mumimo count-distances
//! ```
//!
//! `MUMIMO_THREADS` caps the number of worker threads.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mumimo::detect::{count_distances, CountConfig};
use mumimo::harness::{self, ExperimentConfig};
use mumimo::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "mumimo", version, about = "Two-user MU-MIMO receiver simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct CommonArgs {
    /// Experiment configuration (flat key = value); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probability of correct interferer classification versus SNR.
    ClassifySweep(CommonArgs),
    /// Uncoded bit error rate versus SNR.
    BerSweep(CommonArgs),
    /// Coded block error rate versus SNR (requires fec = on).
    BlerSweep(CommonArgs),
    /// Distance computations per resource block: genie versus joint detection.
    CountDistances(CommonArgs),
}

fn load_config(args: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(args: &CommonArgs, text: &str, sidecar: Option<String>) -> Result<()> {
    match &args.out {
        Some(path) => {
            write_file(path, text)?;
            if let Some(meta) = sidecar {
                let mut meta_path = path.clone().into_os_string();
                meta_path.push(".meta.json");
                write_file(Path::new(&meta_path), &meta)?;
            }
            Ok(())
        }
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}

fn run_sweep(
    args: &CommonArgs,
    sweep: fn(&ExperimentConfig) -> Result<Vec<harness::CurveRecord>>,
) -> Result<()> {
    let cfg = load_config(args)?;
    let records = sweep(&cfg)?;
    match args.format {
        Format::Csv => emit(args, &harness::to_csv(&records), Some(harness::metadata_json(&cfg))),
        Format::Json => emit(args, &harness::to_json(&records, &cfg), None),
    }
}

fn run_count(args: &CommonArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let mut count_cfg = CountConfig {
        seed: cfg.seed,
        ..CountConfig::default()
    };
    // the distance count follows the first desired alphabet only when a config names one
    if args.config.is_some() {
        count_cfg.ms = cfg.ms[0];
    }
    let c = count_distances(&count_cfg)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&c).expect("serializable") + "\n",
        Format::Csv if args.out.is_some() => format!(
            "ms,data_tones,n_classify,genie_entries,joint_entries,overhead_pct,reference_overhead_pct\n\
             {},{},{},{},{},{:.3},{:.1}\n",
            c.ms, c.data_tones, c.n_classify, c.genie_entries, c.joint_entries, c.overhead_pct,
            c.reference_overhead_pct
        ),
        Format::Csv => format!(
            "desired alphabet:        {} ({} points)\n\
             data elements per block: {}\n\
             genie distances:         {}\n\
             joint ML distances:      {} (classification on {} elements)\n\
             overhead:                {:.1} % (reference {:.1} %)\n",
            c.ms, c.ms_size, c.data_tones, c.genie_entries, c.joint_entries, c.n_classify,
            c.overhead_pct, c.reference_overhead_pct
        ),
    };
    emit(args, &text, None)
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("MUMIMO_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Config {
            field: "MUMIMO_THREADS".into(),
            message: format!("expected a positive integer, got {value:?}"),
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config {
            field: "MUMIMO_THREADS".into(),
            message: e.to_string(),
        })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::ClassifySweep(a) => run_sweep(a, harness::run_classification_sweep),
        Command::BerSweep(a) => run_sweep(a, harness::run_ber_sweep),
        Command::BlerSweep(a) => run_sweep(a, harness::run_bler_sweep),
        Command::CountDistances(a) => run_count(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mumimo: {e}");
            ExitCode::FAILURE
        }
    }
}
