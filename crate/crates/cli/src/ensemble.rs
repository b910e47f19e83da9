//! Ensemble orchestration: independent sample paths dispatched to a worker
//! pool, reduced by a deterministic fold ordered by path index.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use snt_core::mc::{mc_energy_run, mc_slab_run};
use snt_core::sheets::derive_stream_seed;
use snt_core::solver::energy::{run_energy, run_energy_deterministic};
use snt_core::solver::slab::{run_slab, run_slab_deterministic};
use snt_core::stats::EnsembleStats;
use snt_core::PathResult;

use crate::config::{Method, ProblemKind, RunConfig};
use crate::report::Summary;

/// What one ensemble run produced on disk and in memory.
#[derive(Debug)]
pub struct EnsembleOutcome {
    pub stats: EnsembleStats,
    pub summary: Summary,
    pub summary_file: PathBuf,
    pub manifest_file: PathBuf,
    pub path_files: Vec<PathBuf>,
    pub clamp_events: u64,
    pub wall_time_s: f64,
}

struct PathOutput {
    scalars: Vec<(String, f64)>,
    csv: String,
    clamp_events: u64,
}

/// Names of the per-path scalar observables for a problem kind; these are
/// what the summary reports and what `compare` matches on.
pub fn scalar_names(problem: ProblemKind) -> &'static [&'static str] {
    match problem {
        ProblemKind::Slab => &["left_leakage_window", "right_leakage_window"],
        ProblemKind::Energy => &["n_low_final", "n_high_final"],
        ProblemKind::General => &["population_final"],
    }
}

fn run_one(cfg: &RunConfig, method: Method, path_index: usize) -> Result<PathResult> {
    let seed = derive_stream_seed(cfg.seed, path_index as u64);
    let result = match (cfg.problem, method) {
        (ProblemKind::Slab, Method::Sde) => run_slab(&cfg.build_slab()?, seed)?,
        (ProblemKind::Slab, Method::Deterministic) => run_slab_deterministic(&cfg.build_slab()?)?,
        (ProblemKind::Slab, Method::Mc) => {
            let prob = cfg.build_slab()?;
            let mc_dt = cfg
                .slab
                .as_ref()
                .and_then(|c| c.mc_dt)
                .ok_or_else(|| anyhow!("mc method needs slab.mc_dt"))?;
            mc_slab_run(&prob, mc_dt, cfg.output.mc_tally_dt, seed)?
        }
        (ProblemKind::Energy, Method::Sde) => run_energy(&cfg.build_energy()?, seed)?,
        (ProblemKind::Energy, Method::Deterministic) => {
            run_energy_deterministic(&cfg.build_energy()?)?
        }
        (ProblemKind::Energy, Method::Mc) => {
            let prob = cfg.build_energy()?;
            let mc_dt = cfg
                .energy
                .as_ref()
                .and_then(|c| c.mc_dt)
                .ok_or_else(|| anyhow!("mc method needs energy.mc_dt"))?;
            mc_energy_run(&prob, mc_dt, seed)?
        }
        (ProblemKind::General, Method::Sde) => cfg.build_general()?.run(seed)?,
        (ProblemKind::General, Method::Deterministic) => {
            cfg.build_general()?.run_deterministic()?
        }
        (ProblemKind::General, Method::Mc) => {
            bail!("no Monte Carlo procedure for the general problem")
        }
    };
    result
        .check_finite()
        .with_context(|| format!("path {path_index} produced a non-finite observable"))?;
    Ok(result)
}

fn scalars_for(cfg: &RunConfig, r: &PathResult) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    match cfg.problem {
        ProblemKind::Slab => {
            let (w0, w1) = cfg.window();
            out.push((
                "left_leakage_window".to_string(),
                r.window_total("left_leakage", w0, w1)?,
            ));
            out.push((
                "right_leakage_window".to_string(),
                r.window_total("right_leakage", w0, w1)?,
            ));
        }
        ProblemKind::Energy => {
            out.push(("n_low_final".to_string(), r.final_value("n_low")?));
            out.push(("n_high_final".to_string(), r.final_value("n_high")?));
        }
        ProblemKind::General => {
            out.push(("population_final".to_string(), r.final_value("population")?));
        }
    }
    Ok(out)
}

/// Per-path CSV: `t,<observable>...` thinned to the output cadence (first
/// and last rows always written).
fn path_csv(r: &PathResult, cadence: usize) -> String {
    let mut s = String::new();
    s.push('t');
    for obs in &r.observables {
        let _ = write!(s, ",{}", obs.name);
    }
    s.push('\n');
    let last = r.times.len() - 1;
    for k in 0..r.times.len() {
        if k % cadence != 0 && k != last {
            continue;
        }
        let _ = write!(s, "{}", r.times[k]);
        for obs in &r.observables {
            let _ = write!(s, ",{}", obs.values[k]);
        }
        s.push('\n');
    }
    s
}

/// Run `cfg.paths` independent paths of `method`, write per-path CSVs, a
/// summary, and a run manifest into `out_dir`.
///
/// Path seeds derive from the base seed by a splittable scheme, the worker
/// pool order never affects the fold, and any non-finite observable aborts
/// the whole ensemble.
pub fn run_ensemble(cfg: &RunConfig, method: Method, out_dir: &Path) -> Result<EnsembleOutcome> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let t0 = Instant::now();

    let results: Vec<PathOutput> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| -> Result<PathOutput> {
            let r = run_one(cfg, method, i)?;
            Ok(PathOutput {
                scalars: scalars_for(cfg, &r)?,
                csv: path_csv(&r, cfg.output.cadence),
                clamp_events: r.clamp_events,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Deterministic fold in path order.
    let names = scalar_names(cfg.problem);
    let mut columns: Vec<(String, Vec<f64>)> = names
        .iter()
        .map(|n| (n.to_string(), Vec::with_capacity(cfg.paths)))
        .collect();
    let mut clamp_total = 0u64;
    let mut per_path_clamps = Vec::with_capacity(cfg.paths);
    let mut path_files = Vec::with_capacity(cfg.paths);
    for (i, out) in results.iter().enumerate() {
        for (col, (name, value)) in columns.iter_mut().zip(&out.scalars) {
            debug_assert_eq!(&col.0, name);
            col.1.push(*value);
        }
        clamp_total += out.clamp_events;
        per_path_clamps.push(out.clamp_events);
        let file = out_dir.join(format!("path_{i:04}.csv"));
        std::fs::write(&file, &out.csv).with_context(|| format!("writing {}", file.display()))?;
        path_files.push(file);
    }

    let stats = EnsembleStats::from_columns(&columns)?;
    if stats.degenerate {
        eprintln!("warning: single-path ensemble; standard deviations are 0 by convention");
    }
    let wall_time_s = t0.elapsed().as_secs_f64();

    let summary = Summary {
        method: method.as_str().to_string(),
        problem: cfg.problem.as_str().to_string(),
        paths: cfg.paths,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        observables: stats.observables.clone(),
    };
    let summary_file = out_dir.join("summary.txt");
    std::fs::write(&summary_file, summary.to_text())?;

    let manifest_file = out_dir.join("manifest.txt");
    let mut manifest = String::new();
    let _ = writeln!(manifest, "format = snt-manifest-v1");
    let _ = writeln!(manifest, "method = {}", method.as_str());
    let _ = writeln!(manifest, "paths = {}", cfg.paths);
    let _ = writeln!(manifest, "base_seed = {}", cfg.seed);
    let _ = writeln!(manifest, "config_hash = {}", cfg.hash());
    let _ = writeln!(manifest, "clamp_events_total = {clamp_total}");
    for (i, c) in per_path_clamps.iter().enumerate() {
        let _ = writeln!(manifest, "clamp_events.path_{i:04} = {c}");
    }
    let _ = writeln!(manifest, "wall_time_s = {wall_time_s:.3}");
    for line in cfg.to_config_string().lines() {
        let _ = writeln!(manifest, "config.{line}");
    }
    std::fs::write(&manifest_file, manifest)?;

    Ok(EnsembleOutcome {
        stats,
        summary,
        summary_file,
        manifest_file,
        path_files,
        clamp_events: clamp_total,
        wall_time_s,
    })
}
