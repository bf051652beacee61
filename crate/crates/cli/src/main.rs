use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use topicburst_core::pipeline::{run_pipeline, run_stage, Manifest, PipelineConfig, Stage};

/// Burst-annotated topic maps from a bibliographic corpus.
#[derive(Parser)]
#[command(name = "topicburst", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Pipeline config (flat TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the layout seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load and filter the corpus.
    Ingest(Common),
    /// Yearly term counts, frequency table and chart.
    Freq(Common),
    /// Burst detection for every term.
    Burst(Common),
    /// Map vocabulary from the frequency and burst rankings.
    Select(Common),
    /// Co-occurrence and cosine matrices.
    Coword(Common),
    /// Pathfinder pruning.
    Pfnet(Common),
    /// Force-directed node positions.
    Layout(Common),
    /// SVG map and Pajek network.
    Render(Common),
    /// All stages in order.
    Run(Common),
}

fn load(common: &Common) -> anyhow::Result<PipelineConfig> {
    let mut config = PipelineConfig::from_file(&common.config)
        .with_context(|| format!("loading config {}", common.config.display()))?;
    if let Some(seed) = common.seed {
        config.layout.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output = out.clone();
    }
    Ok(config)
}

fn execute(cli: Cli) -> anyhow::Result<Manifest> {
    let (stage, common) = match &cli.command {
        Command::Ingest(c) => (Some(Stage::Ingest), c),
        Command::Freq(c) => (Some(Stage::Freq), c),
        Command::Burst(c) => (Some(Stage::Burst), c),
        Command::Select(c) => (Some(Stage::Select), c),
        Command::Coword(c) => (Some(Stage::Coword), c),
        Command::Pfnet(c) => (Some(Stage::Pfnet), c),
        Command::Layout(c) => (Some(Stage::Layout), c),
        Command::Render(c) => (Some(Stage::Render), c),
        Command::Run(c) => (None, c),
    };
    let config = load(common)?;
    let manifest = match stage {
        Some(stage) => run_stage(stage, &config)?,
        None => run_pipeline(&config)?,
    };
    Ok(manifest)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(manifest) => {
            for entry in &manifest.entries {
                println!("{}  {}", entry.sha256, entry.artifact);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
