use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use srl::cli::{execute, load_config, RunConfig, COMMANDS, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(name = "srl", about = "Sharp Stein-Tomas / Strichartz verification suites")]
struct Args {
    /// One of constants, strichartz, expansion, optimize, refined, concmaps, verify.
    #[arg(long, default_value = "verify")]
    command: String,
    /// JSON run configuration; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for reports.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sphere dimension N (2 or 3).
    #[arg(long)]
    n: Option<usize>,
    /// Reduced resolutions for CI.
    #[arg(long)]
    quick: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Ok(t) = std::env::var("SRL_THREADS") {
        match t.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("config error: SRL_THREADS must be a positive integer");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }
    if !COMMANDS.contains(&args.command.as_str()) {
        eprintln!("config error: unknown command {:?}; expected one of {COMMANDS:?}", args.command);
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let mut cfg = match &args.config {
        Some(p) => match load_config(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(o) = args.out {
        cfg.out_dir = o;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    cfg.quick |= args.quick;
    ExitCode::from(execute(&args.command, &cfg) as u8)
}
