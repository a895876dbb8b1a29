use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use transport_bench::output::{default_output_base, OUTPUT_ENV};
use transport_bench::{emit_outputs, presets, run, with_threads, BenchError, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "transport-bench",
    version,
    about = "Run transport and inverse-design experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a shipped preset name.
    Run {
        config: String,
        /// Base directory for results (default: $TRANSPORT_BENCH_OUT or ./results).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the inverse-design situations, or print one preset's config.
    Presets {
        /// Print this preset's config text.
        #[arg(long)]
        show: Option<String>,
        /// Also list the forward-study presets.
        #[arg(long)]
        all: bool,
    },
    /// Check a config without running it.
    Validate { config: String },
}

fn load(arg: &str) -> Result<ExperimentConfig, BenchError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(p) = presets::find(arg) {
            return Ok(ExperimentConfig::parse(p.text, p.name)?);
        }
    }
    ExperimentConfig::from_path(path)
}

/// Plain decimals, but `1e-6` rather than `0.000001`.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn describe(cfg: &ExperimentConfig) -> String {
    let grids: Vec<String> = cfg.grids.iter().map(|(nx, ny)| format!("{nx}x{ny}")).collect();
    let times: Vec<String> = cfg.times.iter().map(|t| t.to_string()).collect();
    format!(
        "{} ({}): grid {}, T {}, delta {}, vbar {}",
        cfg.name,
        cfg.kind,
        grids.join(" "),
        times.join(" "),
        num(cfg.delta),
        cfg.vbar
    )
}

fn execute(cmd: Command) -> Result<(), BenchError> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            for s in cfg.unreferenced_strategies() {
                eprintln!("warning: {s} has no reference values; running anyway");
            }
            println!("{}", describe(&cfg));
            let exp = with_threads(&cfg, || run(&cfg))??;
            println!("{}", exp.render());
            for note in &exp.notes {
                println!("note: {note}");
            }
            let dir = cfg.output_dir(&out.unwrap_or_else(default_output_base));
            let written = emit_outputs(&exp, &dir)?;
            println!("wrote {} files to {}", written.len(), dir.display());
        }
        Command::Presets { show: Some(name), .. } => match presets::find(&name) {
            Some(p) => print!("{}", p.text),
            None => {
                let names: Vec<&str> = presets::all().map(|p| p.name).collect();
                return Err(transport_bench::ConfigError {
                    issues: vec![transport_bench::Issue::new(
                        "preset",
                        format!("no preset {name:?} (have {})", names.join(", ")),
                    )],
                }
                .into());
            }
        },
        Command::Presets { show: None, all } => {
            println!("{:<14} {:>9} {:>6} {:>10}", "situation", "grid", "T", "delta");
            for p in &presets::SITUATIONS {
                let cfg = ExperimentConfig::parse(p.text, p.name)?;
                let (nx, ny) = cfg.grids[0];
                println!(
                    "{:<14} {:>9} {:>6} {:>10}",
                    p.name,
                    format!("{nx}x{ny}"),
                    cfg.times[0],
                    num(cfg.delta)
                );
            }
            if all {
                println!();
                for p in &presets::EXTRAS {
                    println!("{}", describe(&ExperimentConfig::parse(p.text, p.name)?));
                }
            }
            println!("\nresults go to ${OUTPUT_ENV} or ./results unless the config sets `output`");
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            for s in cfg.unreferenced_strategies() {
                eprintln!("warning: {s} has no reference values");
            }
            println!("ok: {}", describe(&cfg));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
