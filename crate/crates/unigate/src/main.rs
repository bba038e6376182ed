use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unigate::commands::{self, CompileArgs, IndexBuildArgs};
use unigate::config::{self, IndexConfig, IndexKind, MeshConfig, ModeName, QecConfig, ScalingConfig};
use unigate::output::write_json;
use unigate::{CliError, Result};
use unigate_core::compile::DEFAULT_BUDGET_BYTES;

#[derive(Parser)]
#[command(
    name = "unigate",
    version,
    about = "Compile two-qubit targets from one arbitrary gate and its variants"
)]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Meet-in-the-middle compilation of one target.
    Compile(CompileCmd),
    /// Depth scaling experiment from a JSON config.
    Scaling {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sampled mesh-size estimate from a JSON config.
    Mesh {
        #[arg(long)]
        config: PathBuf,
    },
    /// Coherent-error sweep from a JSON config, or the exactness suite.
    Qec {
        #[arg(long, required_unless_present = "verify")]
        config: Option<PathBuf>,
        /// Run the single-error correction checks instead of a sweep.
        #[arg(long, conflicts_with = "config")]
        verify: bool,
    },
    /// Build a graph index over a half-depth product set and save it.
    IndexBuild(IndexBuildCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Four,
    Two,
}

impl From<ModeArg> for ModeName {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Four => ModeName::Four,
            ModeArg::Two => ModeName::Two,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexArg {
    Exact,
    Approx,
}

#[derive(Args)]
struct GraphFlags {
    #[arg(long, default_value_t = 16)]
    max_degree: usize,
    #[arg(long, default_value_t = 200)]
    build_beam: usize,
    #[arg(long, default_value_t = 64)]
    query_beam: usize,
    #[arg(long, default_value_t = 8)]
    rerank: usize,
    /// Seed for the graph's layer assignment.
    #[arg(long, default_value_t = 0)]
    index_seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET_BYTES)]
    budget_bytes: u64,
}

impl GraphFlags {
    fn index_config(&self, mode: IndexKind) -> IndexConfig {
        IndexConfig {
            mode,
            max_degree: self.max_degree,
            build_beam: self.build_beam,
            query_beam: self.query_beam,
            rerank: self.rerank,
            seed: self.index_seed,
        }
    }
}

#[derive(Args)]
struct CompileCmd {
    /// `cnot`, `swap`, `identity`, or a JSON matrix file.
    #[arg(long, default_value = "cnot")]
    target: String,
    #[arg(long, value_enum, default_value = "four")]
    mode: ModeArg,
    #[arg(long)]
    half_depth: usize,
    /// Seed of the Haar-random source gate.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    index: IndexArg,
    /// Load the index from a snapshot written by `index-build`.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Result JSON path (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphFlags,
}

#[derive(Args)]
struct IndexBuildCmd {
    #[arg(long, value_enum, default_value = "four")]
    mode: ModeArg,
    #[arg(long)]
    half_depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    graph: GraphFlags,
}

fn emit(value: &serde_json::Value, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("json values serialize")
            );
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("`threads`: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Resource(e.to_string()))?;
    }
    match cli.command {
        Command::Compile(c) => {
            let kind = match (c.index, &c.snapshot) {
                (_, Some(_)) | (IndexArg::Approx, _) => IndexKind::Approx,
                (IndexArg::Exact, None) => IndexKind::Exact,
            };
            let args = CompileArgs {
                target: c.target,
                mode: c.mode.into(),
                half_depth: c.half_depth,
                seed: c.seed,
                index: c.graph.index_config(kind),
                budget_bytes: c.graph.budget_bytes,
                snapshot: c.snapshot,
            };
            emit(&commands::compile(&args)?, c.output.as_ref())
        }
        Command::Scaling { config } => {
            let cfg: ScalingConfig = config::load(&config)?;
            emit(&commands::scaling(&cfg)?, None)
        }
        Command::Mesh { config } => {
            let cfg: MeshConfig = config::load(&config)?;
            emit(&commands::mesh(&cfg)?, None)
        }
        Command::Qec { verify: true, .. } => {
            let checks = commands::verify()?;
            for c in &checks {
                println!("{}", commands::verify_line(c));
            }
            match checks.iter().filter(|c| !c.passed()).count() {
                0 => Ok(()),
                failed => Err(CliError::VerifyFailed(failed)),
            }
        }
        Command::Qec { config, .. } => {
            let path = config.expect("clap requires --config without --verify");
            let cfg: QecConfig = config::load(&path)?;
            emit(&commands::qec(&cfg)?, None)
        }
        Command::IndexBuild(c) => {
            let args = IndexBuildArgs {
                mode: c.mode.into(),
                half_depth: c.half_depth,
                seed: c.seed,
                index: c.graph.index_config(IndexKind::Approx),
                budget_bytes: c.graph.budget_bytes,
                output: c.output,
            };
            emit(&commands::index_build(&args)?, None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
