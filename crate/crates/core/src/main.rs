use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chaoscomm::config::{Config, Diagnostic};
use chaoscomm::experiment::{apply_overrides, write_atomic, Experiment, ExperimentKind};

#[derive(Parser)]
#[command(name = "chaoscomm", version, about = "Delay-oscillator chaos communication experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a coupled network and report pairwise synchronization.
    Simulate(Common),
    /// Sweep one node parameter and record the correlation it leaves.
    SyncScan(Common),
    /// Chaotic masking of a bit stream and its recovery.
    Mask(Common),
    /// Monte-Carlo BER curves for BPSK, CSK and DCSK.
    Ber(Common),
    /// Entropy, LMC, neural complexity and Lyapunov estimates.
    Complexity(Common),
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Print the normalized config.
        #[arg(long)]
        echo: bool,
    },
}

enum Failure {
    Config(Vec<Diagnostic>),
    Runtime(String),
}

fn load(path: Option<&PathBuf>, default_kind: Option<ExperimentKind>) -> Result<Config, Failure> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::Config(vec![Diagnostic::new(None, None, format!("{}: {e}", p.display()))]))?,
        None => format!("experiment = {}\n", default_kind.expect("subcommand names the experiment").as_str()),
    };
    Config::parse(&text).map_err(Failure::Config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (kind, common) = match cli.command {
        Command::Validate { config, echo } => {
            let cfg = load(Some(&config), None)?;
            let exp = Experiment::new(cfg).map_err(Failure::Config)?;
            if echo {
                print!("{}", exp.config().normalize());
            } else {
                println!("ok: {}", exp.kind().as_str());
            }
            return Ok(());
        }
        Command::Simulate(c) => (ExperimentKind::Simulate, c),
        Command::SyncScan(c) => (ExperimentKind::SyncScan, c),
        Command::Mask(c) => (ExperimentKind::Mask, c),
        Command::Ber(c) => (ExperimentKind::Ber, c),
        Command::Complexity(c) => (ExperimentKind::Complexity, c),
    };
    let mut cfg = load(common.config.as_ref(), Some(kind))?;
    if cfg.text("experiment") != kind.as_str() {
        return Err(Failure::Config(vec![Diagnostic::new(
            cfg.line("experiment"),
            Some("experiment"),
            format!("config is for `{}` but the subcommand is `{}`", cfg.text("experiment"), kind.as_str()),
        )]));
    }
    apply_overrides(&mut cfg, common.seed, common.out.as_deref(), common.svg);
    let exp = Experiment::new(cfg).map_err(Failure::Config)?;
    let outcome = exp.run().map_err(Failure::Runtime)?;
    let dir = exp.out_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    for a in &outcome.artifacts {
        let path = dir.join(&a.name);
        write_atomic(&path, &a.contents).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    }
    println!("{}", outcome.summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("CHAOSCOMM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(diags)) => {
            for d in diags {
                eprintln!("error: {d}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
