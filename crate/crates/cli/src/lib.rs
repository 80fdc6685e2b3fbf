//! Command-line front end: configuration, report documents and the
//! verify, flow, scan and golden commands.

pub mod commands;
pub mod config;
pub mod report;

use clap::{Parser, Subcommand};
use config::RunConfig;
use report::ReportDocument;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gkbrane", version, about = "Generalized Kahler structures from holomorphic symplectic branes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides [output].dir.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true, env = "GKBRANE_THREADS")]
    pub threads: Option<usize>,
    /// Seed for sampled points; overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Pipeline and invariant checks on the configured points.
    Verify,
    /// Flow construction on the configured points.
    Flow,
    /// Positivity scan over the grid and along rays.
    Scan,
    /// Regenerate a report and compare it with a stored golden file.
    Golden,
}

fn write_outputs(doc: &ReportDocument, dir: &Path, stem: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    doc.write_json(BufWriter::new(File::create(dir.join(format!("{stem}.json")))?))?;
    doc.write_csv(BufWriter::new(File::create(dir.join(format!("{stem}.csv")))?))?;
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let Some(path) = &cli.config else {
        eprintln!("error: --config is required");
        return EXIT_USAGE;
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let cfg = match RunConfig::parse_with_seed(&text, cli.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    if let Some(n) = cli.threads {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let seed = cfg.seed;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    let out_dir = cli.out.clone().unwrap_or_else(|| base_dir.join(&cfg.output.dir));
    let result = match cli.command {
        Command::Verify => commands::cmd_verify(&cfg, &text, seed).map(|d| (d, None)),
        Command::Flow => commands::cmd_flow(&cfg, &text, seed).map(|d| (d, None)),
        Command::Scan => commands::cmd_scan(&cfg, &text, seed).map(|d| (d, None)),
        Command::Golden => commands::cmd_golden(&cfg, &text, seed, base_dir).map(|(d, diffs)| (d, Some(diffs))),
    };
    let (doc, diffs) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.0);
            return EXIT_USAGE;
        }
    };
    let stem = if diffs.is_some() { format!("{}.regenerated", cfg.output.stem) } else { cfg.output.stem.clone() };
    if let Err(e) = write_outputs(&doc, &out_dir, &stem) {
        eprintln!("error: writing reports to {}: {e}", out_dir.display());
        return EXIT_USAGE;
    }
    if let Some(diffs) = diffs {
        if diffs.is_empty() {
            println!("golden: no differences");
            return EXIT_OK;
        }
        println!("golden: {} differences", diffs.len());
        for d in diffs.iter().take(10) {
            println!("  {d}");
        }
        return EXIT_FAILED;
    }
    let s = &doc.summary;
    println!("{}: {} points, {} failures, {}", doc.command, s.points, s.failures, if s.passed { "passed" } else { "FAILED" });
    for (k, v) in &s.extrema {
        println!("  {k} = {v:.3e}");
    }
    for (i, b) in s.boundaries.iter().enumerate() {
        println!("  ray {i}: boundaries {b:?}");
    }
    for c in &s.checks {
        println!("  {c}");
    }
    if s.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
