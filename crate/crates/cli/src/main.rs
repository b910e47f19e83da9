//! `snt`: stochastic and Monte Carlo neutron transport at desk scale.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use snt_cli::config::{Method, PerturbConfig, ProblemKind, RunConfig};
use snt_cli::figures::{emit_figures, figure_columns};
use snt_cli::perturb_io::{DensityTable, PerturbJob, RateTable};
use snt_cli::report::{compare, Summary};
use snt_cli::sheet_io::{sheet_diagnostics, write_surface};
use snt_core::perturb::Quadrature;
use snt_core::sheets::derive_stream_seed;
use snt_core::SheetSampler;

#[derive(Parser)]
#[command(name = "snt", version, about = "Stochastic difference equations and Monte Carlo reference runs for time-dependent neutron transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Problem configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Number of sample paths (overrides the config).
    #[arg(long)]
    paths: Option<usize>,
    /// Base seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run with every noise term zero.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Stochastic slab scheme: upwind streaming, capture and transfer noise.
    RunSlab(RunArgs),
    /// Stochastic energy-group scheme for a homogeneous medium.
    RunEnergy(RunArgs),
    /// General phase-space stepper on a small grid.
    RunGeneral(RunArgs),
    /// Analog Monte Carlo particle tracking for the slab problem.
    McSlab(RunArgs),
    /// Monte Carlo population bookkeeping for the energy-group problem.
    McEnergy(RunArgs),
    /// Side-by-side comparison of two ensemble summaries.
    Compare {
        /// First summary file.
        a: PathBuf,
        /// Second summary file.
        b: PathBuf,
        /// Largest acceptable |z| for any mean difference.
        #[arg(long, default_value_t = 3.0)]
        threshold: f64,
    },
    /// Mean and variance shifts under a capture-rate perturbation.
    Perturb {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sample a sheet surface, export it as CSV, and print moment checks.
    SheetDemo {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lattice cells along each axis.
        #[arg(long, default_value_t = 100)]
        nx: usize,
        #[arg(long, default_value_t = 100)]
        nt: usize,
        /// Domain extents.
        #[arg(long, default_value_t = 5.0)]
        extent_x: f64,
        #[arg(long, default_value_t = 5.0)]
        extent_t: f64,
        /// Increment draws for the moment diagnostics.
        #[arg(long, default_value_t = 1_000_000)]
        draws: u64,
    },
    /// Single-path observable series per method, as plot-ready CSV.
    Figures(RunArgs),
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::RunSlab(args) => run_ensemble_cmd(args, ProblemKind::Slab, false),
        Command::RunEnergy(args) => run_ensemble_cmd(args, ProblemKind::Energy, false),
        Command::RunGeneral(args) => run_ensemble_cmd(args, ProblemKind::General, false),
        Command::McSlab(args) => run_ensemble_cmd(args, ProblemKind::Slab, true),
        Command::McEnergy(args) => run_ensemble_cmd(args, ProblemKind::Energy, true),
        Command::Compare { a, b, threshold } => {
            let sa = Summary::from_file(&a)?;
            let sb = Summary::from_file(&b)?;
            let comparison = compare(&sa, &sb, threshold)?;
            print!("{}", comparison.to_table());
            Ok(if comparison.within_threshold() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Perturb { config, out } => {
            let cfg = PerturbConfig::from_file(&config)?;
            let job = PerturbJob::from_tables(
                RateTable::from_csv(&cfg.base_rates)?,
                RateTable::from_csv(&cfg.perturbed_rates)?,
                DensityTable::from_csv(&cfg.initial_density)?,
                cfg.e_max,
                cfg.bins,
                cfg.t_end,
                cfg.t_outputs,
                Quadrature {
                    energy_intervals: cfg.energy_intervals,
                    time_intervals: cfg.time_intervals,
                },
            )?;
            std::fs::create_dir_all(&out)?;
            let file = out.join("perturbation.csv");
            std::fs::write(&file, job.to_csv()?)?;
            println!("wrote {}", file.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SheetDemo {
            out,
            seed,
            nx,
            nt,
            extent_x,
            extent_t,
            draws,
        } => {
            std::fs::create_dir_all(&out)?;
            let mut sampler = SheetSampler::new(seed);
            let surface = sampler.sample_surface(nx, nt, extent_x, extent_t)?;
            let file = out.join("sheet.csv");
            write_surface(&file, &surface)?;
            let diag = sheet_diagnostics(seed, 2.0, draws);
            println!("wrote {}", file.display());
            println!(
                "over {} draws: E[W^2]/|A| = {:.4}, E[W^4]/(3|A|^2) = {:.4}, product comparator E[(W1 W2)^4]/(9|A|^2) = {:.4}",
                diag.draws, diag.second_moment_ratio, diag.fourth_moment_ratio, diag.product_fourth_ratio
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Figures(args) => {
            let cfg = load_config(&args)?;
            let seed = derive_stream_seed(cfg.seed, 0);
            let mut results = Vec::new();
            match cfg.problem {
                ProblemKind::Slab => {
                    let prob = cfg.build_slab()?;
                    results.push(("sde", snt_core::solver::slab::run_slab(&prob, seed)?));
                    if let Some(mc_dt) = cfg.slab.as_ref().and_then(|c| c.mc_dt) {
                        results.push((
                            "mc",
                            snt_core::mc::mc_slab_run(&prob, mc_dt, cfg.output.mc_tally_dt, seed)?,
                        ));
                    }
                    if args.deterministic {
                        results.push((
                            "deterministic",
                            snt_core::solver::slab::run_slab_deterministic(&prob)?,
                        ));
                    }
                }
                ProblemKind::Energy => {
                    let prob = cfg.build_energy()?;
                    results.push(("sde", snt_core::solver::energy::run_energy(&prob, seed)?));
                    if let Some(mc_dt) = cfg.energy.as_ref().and_then(|c| c.mc_dt) {
                        results.push(("mc", snt_core::mc::mc_energy_run(&prob, mc_dt, seed)?));
                    }
                    if args.deterministic {
                        results.push((
                            "deterministic",
                            snt_core::solver::energy::run_energy_deterministic(&prob)?,
                        ));
                    }
                }
                ProblemKind::General => {
                    let prob = cfg.build_general()?;
                    results.push(("sde", prob.run(seed)?));
                    if args.deterministic {
                        results.push(("deterministic", prob.run_deterministic()?));
                    }
                }
            }
            let files = emit_figures(&results, cfg.problem, &args.out)?;
            for f in &files {
                println!("wrote {} ({} columns)", f.display(), figure_columns(cfg.problem).len() + 1);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if let Some(p) = args.paths {
        if p == 0 {
            bail!("--paths must be >= 1");
        }
        cfg.paths = p;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run_ensemble_cmd(args: RunArgs, expected: ProblemKind, mc: bool) -> Result<ExitCode> {
    let cfg = load_config(&args)?;
    if cfg.problem != expected {
        bail!(
            "config declares problem `{}` but the subcommand expects `{}`",
            cfg.problem.as_str(),
            expected.as_str()
        );
    }
    let method = if mc {
        if args.deterministic {
            bail!("--deterministic does not apply to the Monte Carlo methods");
        }
        Method::Mc
    } else if args.deterministic {
        Method::Deterministic
    } else {
        match cfg.method {
            Some(Method::Mc) => bail!("config requests method mc; use the mc-* subcommands"),
            Some(m) => m,
            None => Method::Sde,
        }
    };
    let outcome = snt_cli::run_ensemble(&cfg, method, &args.out)
        .with_context(|| format!("running {} ensemble", method.as_str()))?;
    println!(
        "{} {} ensemble: {} paths in {:.2} s ({} clamp events)",
        cfg.problem.as_str(),
        method.as_str(),
        cfg.paths,
        outcome.wall_time_s,
        outcome.clamp_events
    );
    for o in &outcome.stats.observables {
        println!(
            "  {:<24} mean {:>12.4}  std {:>10.4}  se {:>8.4}  n {}",
            o.name, o.mean, o.std, o.se, o.n
        );
    }
    println!("summary: {}", outcome.summary_file.display());
    Ok(ExitCode::SUCCESS)
}
