use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cs_dsss::harness::{
    parse_ebn0_grid, parse_path_model, write_header, write_record, Experiment, Method, SimConfig,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_CAPPED: u8 = 3;

#[derive(Parser)]
#[command(version, about = "DSSS O-QPSK BER simulator with a compressive matched-filter receiver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER sweep and write CSV.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML config file; command-line options override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Receiver(s): classic, cs, or a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// Undersampling ratio of the cs receiver; 1/kappa must be an integer.
    #[arg(long)]
    kappa: Option<f64>,
    /// Eb/N0 grid in dB: a list `0,2,4` or an inclusive range `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    ebn0: Option<String>,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    max_bits: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Signal model: chip or waveform.
    #[arg(long)]
    path: Option<String>,
    /// Samples per chip for the waveform path.
    #[arg(long)]
    oversample: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Write elapsed_s as 0 so repeated runs produce identical files.
    #[arg(long)]
    no_timing: bool,
    /// CSV output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append coherent and non-coherent MFSK reference columns.
    #[arg(long)]
    theory: bool,
    /// Chip-table file replacing the built-in 802.15.4 table.
    #[arg(long)]
    chipmap: Option<PathBuf>,
}

fn build_config(args: &RunArgs) -> anyhow::Result<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => SimConfig::from_toml(&std::fs::read_to_string(path)?)?,
        None => SimConfig::default(),
    };
    if !args.method.is_empty() {
        cfg.methods = args
            .method
            .iter()
            .map(|m| m.parse::<Method>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(k) = args.kappa {
        cfg.kappa = k;
    }
    if let Some(g) = &args.ebn0 {
        cfg.ebn0_grid_db = parse_ebn0_grid(g)?;
    }
    if let Some(v) = args.min_errors {
        cfg.min_errors = v;
    }
    if let Some(v) = args.max_bits {
        cfg.max_bits = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(p) = &args.path {
        cfg.path_model = parse_path_model(p)?;
    }
    if let Some(v) = args.oversample {
        cfg.oversample = v;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    if args.no_timing {
        cfg.timing = false;
    }
    if args.theory {
        cfg.theory = true;
    }
    if args.chipmap.is_some() {
        cfg.chipmap = args.chipmap.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> ExitCode {
    let cfg = match build_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let theory = cfg.theory;
    let experiment = match Experiment::new(cfg) {
        Ok(x) => x,
        Err(e @ (cs_dsss::Error::Io(_) | cs_dsss::Error::Csv(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return ExitCode::from(EXIT_RUNTIME);
            }
        },
        None => Box::new(io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    let mut capped = false;
    let result = write_header(&mut writer, theory).and_then(|_| {
        experiment.run_sweep_with(|r| {
            capped |= r.capped;
            write_record(&mut writer, r, theory)?;
            // Flush every point so an interrupted sweep keeps what it finished.
            writer.flush()?;
            eprintln!(
                "{:>7} kappa={:<6} {:>6} dB  errors={:<8} bits={:<11} ber={:.3e}{}",
                r.method,
                r.kappa,
                r.ebn0_db,
                r.bit_errors,
                r.bits_sent,
                r.ber,
                if r.capped { "  (capped)" } else { "" }
            );
            Ok(())
        })
    });
    match result {
        Ok(_) if capped => ExitCode::from(EXIT_CAPPED),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
    }
}
