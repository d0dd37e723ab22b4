use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use commgraph::commands::{cmd_build_graph, cmd_evaluate, cmd_export_embeddings, cmd_synth, cmd_train};
use commgraph::{Error, PipelineConfig};
use commgraph_core::methods::MethodKind;

#[derive(Parser)]
#[command(name = "commgraph", version, about = "Community-aware author profiling and abusive-language classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Pipeline config (TOML, or a manifest written by an earlier command).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.set_seed(s);
        }
        if let Some(o) = &self.output {
            cfg.output = o.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus and follower graph.
    Synth(Common),
    /// Validate the data and dump both graphs.
    BuildGraph(Common),
    /// Train one method on the first split and save its artifacts.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_method)]
        method: MethodKind,
    },
    /// Run the repeated-split comparison and write reports.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Worker threads across runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write embeddings from a training checkpoint.
    ExportEmbeddings {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<MethodKind, String> {
    s.parse().map_err(|e: commgraph_core::Error| e.to_string())
}

fn run(cli: Cli) -> Result<String, Error> {
    let out = match cli.command {
        Command::Synth(c) => cmd_synth(&c.load()?)?,
        Command::BuildGraph(c) => cmd_build_graph(&c.load()?)?,
        Command::Train { common, method } => cmd_train(&common.load()?, method)?,
        Command::Evaluate { common, jobs } => cmd_evaluate(&common.load()?, jobs.max(1))?,
        Command::ExportEmbeddings { checkpoint, output } => cmd_export_embeddings(&checkpoint, output.as_deref())?,
    };
    let mut s = out.summary;
    for f in &out.files {
        s.push_str(&format!("wrote {}\n", f.display()));
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
