//! Subcommand bodies, independent of argument parsing.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use unigate_core::compile::MitmCompiler;
use unigate_core::estimate::{theoretical_min_depth, volume_lower_bound};
use unigate_core::experiment::{mesh_size_estimate, scaling_experiment, seeded_gate_set, LinearFit};
use unigate_core::qec::{envelope_slope, sweep, upper_envelope, verification_suite, Check, SweepConfig};
use unigate_core::{IndexMode, NnIndex, ProductTable};

use crate::config::{config_hash, IndexConfig, MeshConfig, ModeName, QecConfig, ScalingConfig};
use crate::error::{CliError, Result};
use crate::matrix::{resolve_target, to_json};
use crate::output::{qec_fields, scaling_fields, write_json, CsvSink, MESH_COLUMNS, QEC_COLUMNS, SCALING_COLUMNS};
use crate::snapshot;

fn tool() -> String {
    format!("unigate {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, Serialize)]
pub struct CompileArgs {
    pub target: String,
    pub mode: ModeName,
    pub half_depth: usize,
    pub seed: u64,
    pub index: IndexConfig,
    pub budget_bytes: u64,
    pub snapshot: Option<PathBuf>,
}

/// Compiles one target and returns the result document.
pub fn compile(args: &CompileArgs) -> Result<Value> {
    args.index.validate()?;
    let target = resolve_target(&args.target)?;
    let gs = seeded_gate_set(args.seed, args.mode.into())?;
    let options = args.index.compile_options(args.budget_bytes);
    let compiler = match &args.snapshot {
        None => MitmCompiler::new(&gs, args.half_depth, options)?,
        Some(path) => {
            let table = ProductTable::build(&gs, args.half_depth, args.budget_bytes)?;
            let file = File::open(path).map_err(CliError::io(path))?;
            let index = snapshot::read(BufReader::new(file), &gs, &table)?;
            MitmCompiler::with_index(&gs, table, index, options)?
        }
    };
    let r = compiler.compile(&target)?;
    Ok(json!({
        "tool": tool(),
        "config_hash": config_hash(args),
        "gate_set_seed": args.seed,
        "mode": gs.mode().as_str(),
        "index_mode": compiler.index().mode().as_str(),
        "half_depth": r.half_depth,
        "word": r.word.to_digits(),
        "depth": r.word.depth(),
        "infidelity": r.infidelity,
        "frobenius": r.frobenius,
        "target": to_json(&target),
        "stats": {
            "index_seconds": r.stats.index_seconds,
            "query_seconds": r.stats.query_seconds,
            "points": r.stats.points,
            "candidates": r.stats.candidates,
        },
    }))
}

fn fit_json(fit: &Option<LinearFit>) -> Value {
    match fit {
        Some(f) => json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "points": f.points.iter().map(|p| [p.0, p.1]).collect::<Vec<_>>(),
        }),
        None => Value::Null,
    }
}

/// Runs a scaling experiment; rows go to the CSV as they complete and the
/// fit summary is written next to it.
pub fn scaling(config: &ScalingConfig) -> Result<Value> {
    config.validate()?;
    let hash = config_hash(config);
    let target = resolve_target(&config.target)?;
    let mut sink = CsvSink::create(&config.output, &hash, &SCALING_COLUMNS)?;
    let mut write_error = None;
    let report = scaling_experiment(
        config.mode.into(),
        &target,
        &config.seeds,
        &config.depths,
        config.index.compile_options(config.budget_bytes),
        |row| {
            if write_error.is_none() {
                write_error = sink.row(scaling_fields(row)).err();
            }
        },
    );
    if let Some(e) = write_error {
        return Err(e);
    }
    let report = report?;
    let set_size = unigate_core::VariantMode::from(config.mode).set_size();
    let reference = theoretical_min_depth(4, set_size, 0.5)?.slope;
    // Depth per decade of 1/eps_F, from the covering bound.
    let volume_slope = volume_lower_bound(4, set_size, 0.1)?;
    let mut summary = json!({
        "tool": tool(),
        "config_hash": hash,
        "rows": report.rows.len(),
        "infidelity_fit": fit_json(&report.infidelity_fit),
        "frobenius_fit": fit_json(&report.frobenius_fit),
        "reference_infidelity_slope": reference,
        "volume_bound_frobenius_slope": volume_slope,
    });
    if report.infidelity_fit.is_none() {
        summary["warning"] = json!("fit refused: fewer than two depths with a positive median infidelity");
    }
    write_json(&config.summary_path(), &summary)?;
    Ok(summary)
}

pub fn mesh(config: &MeshConfig) -> Result<Value> {
    config.validate()?;
    let hash = config_hash(config);
    let gs = seeded_gate_set(config.gate_set_seed, config.mode.into())?;
    let mut sink = CsvSink::create(&config.output, &hash, &MESH_COLUMNS)?;
    let mut rows = Vec::new();
    for &h in &config.half_depths {
        let est = mesh_size_estimate(
            &gs,
            h,
            config.n_targets,
            config.target_seed,
            config.index.compile_options(config.budget_bytes),
        )?;
        sink.row([
            h.to_string(),
            (2 * h).to_string(),
            config.n_targets.to_string(),
            est.infidelity.to_string(),
            est.frobenius.to_string(),
        ])?;
        rows.push(json!({"half_depth": h, "infidelity": est.infidelity, "frobenius": est.frobenius}));
    }
    Ok(json!({"tool": tool(), "config_hash": hash, "mesh": rows}))
}

/// Runs a Monte-Carlo sweep, writes the CSV and returns per-protocol
/// upper envelopes with their log-log slopes over `[1e-4, 1e-2]`.
pub fn qec(config: &QecConfig) -> Result<Value> {
    config.validate()?;
    let hash = config_hash(config);
    let epsilons = config.epsilons()?;
    let sweep_config = SweepConfig {
        protocols: config.protocols()?,
        epsilons: epsilons.clone(),
        samples_per_point: config.samples_per_point,
        seed: config.seed,
        sites: config.sites()?,
        sampling: config.sampling(),
    };
    let mut sink = CsvSink::create(&config.output, &hash, &QEC_COLUMNS)?;
    let reports = sweep(&sweep_config)?;
    for r in &reports {
        sink.row(qec_fields(r))?;
    }
    let mut envelopes = serde_json::Map::new();
    let mut slopes = serde_json::Map::new();
    for &p in &sweep_config.protocols {
        let env = upper_envelope(&reports, p, &epsilons);
        envelopes.insert(
            p.as_str().into(),
            json!(env.iter().map(|e| [e.0, e.1]).collect::<Vec<_>>()),
        );
        let slope = envelope_slope(&reports, p, &epsilons, 1e-4, 1e-2).ok().map(|f| f.slope);
        slopes.insert(p.as_str().into(), json!(slope));
    }
    Ok(json!({
        "tool": tool(),
        "config_hash": hash,
        "rows": reports.len(),
        "upper_envelope": envelopes,
        "envelope_slope": slopes,
    }))
}

pub fn verify() -> Result<Vec<Check>> {
    Ok(verification_suite()?)
}

pub fn verify_line(c: &Check) -> String {
    format!(
        "{} {} fidelity={:.15}",
        if c.passed() { "PASS" } else { "FAIL" },
        c.name,
        c.fidelity
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexBuildArgs {
    pub mode: ModeName,
    pub half_depth: usize,
    pub seed: u64,
    pub index: IndexConfig,
    pub budget_bytes: u64,
    pub output: PathBuf,
}

/// Builds the graph index over a half-depth product set and persists it.
pub fn index_build(args: &IndexBuildArgs) -> Result<Value> {
    args.index.validate()?;
    let gs = seeded_gate_set(args.seed, args.mode.into())?;
    let table = ProductTable::build(&gs, args.half_depth, args.budget_bytes)?;
    let clock = std::time::Instant::now();
    let index = NnIndex::build(&table, IndexMode::Approximate, args.index.params(), args.budget_bytes)?;
    let seconds = clock.elapsed().as_secs_f64();
    let path = &args.output;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let file = File::create(path).map_err(CliError::io(path))?;
    snapshot::write(BufWriter::new(file), &gs, args.half_depth, &index)?;
    Ok(json!({
        "tool": tool(),
        "config_hash": config_hash(args),
        "points": index.len(),
        "build_seconds": seconds,
        "snapshot": path,
    }))
}
