//! Run configuration: a flat `key = value` text format with dotted sections.
//!
//! Parsing is strict: unknown or duplicate keys are errors, and physics
//! parameters have no defaults. Only output options (cadence, tally window,
//! Monte Carlo tally width) default.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

use snt_core::solver::energy::EnergyProblem;
use snt_core::solver::slab::SlabProblem;
use snt_core::solver::GeneralProblem;
use snt_core::{MaterialModel, PhaseSpaceGrid, PopulationState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Slab,
    Energy,
    General,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Slab => "slab",
            ProblemKind::Energy => "energy",
            ProblemKind::General => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sde,
    Mc,
    Deterministic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Sde => "sde",
            Method::Mc => "mc",
            Method::Deterministic => "deterministic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sde" => Ok(Method::Sde),
            "mc" => Ok(Method::Mc),
            "deterministic" => Ok(Method::Deterministic),
            other => bail!("unknown method `{other}` (expected sde, mc, or deterministic)"),
        }
    }
}

/// Slab section: homogeneous cross sections, boundary influx window.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabConfig {
    pub cells: usize,
    pub mu_bins: usize,
    pub x_max: f64,
    pub speed: f64,
    pub sigma_s: f64,
    pub sigma_c: f64,
    pub influx: f64,
    pub influx_on: f64,
    pub influx_off: f64,
    pub dt: f64,
    pub t_end: f64,
    pub mc_dt: Option<f64>,
}

/// Energy section: two-band parametrization of the group constants.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyConfig {
    pub groups: usize,
    pub e_max: f64,
    pub band_edge: f64,
    pub v_sigma_low: f64,
    pub v_sigma_high: f64,
    pub v_sigma_c_low: f64,
    pub v_sigma_c_high: f64,
    pub kernel_low: f64,
    pub kernel_high: f64,
    pub q_low: f64,
    pub q_high: f64,
    pub n0_low: f64,
    pub n0_high: f64,
    pub dt: f64,
    pub t_end: f64,
    pub mc_dt: Option<f64>,
}

/// General section: homogeneous isotropic material on a small grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralConfig {
    pub cells_x: usize,
    pub cells_y: usize,
    pub cells_z: usize,
    pub mu_bins: usize,
    pub phi_bins: usize,
    pub groups: usize,
    pub x_max: f64,
    pub y_max: f64,
    pub z_max: f64,
    pub e_max: f64,
    pub speed: f64,
    pub sigma_total: f64,
    pub sigma_capture: f64,
    pub source: f64,
    pub n0: f64,
    pub dt: f64,
    pub t_end: f64,
}

/// Output options; the only section with defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Write every k-th recorded step to the per-path CSV.
    pub cadence: usize,
    /// Tally window for the scalar leakage observables; defaults to the last
    /// whole time unit of the run.
    pub window_start: Option<f64>,
    pub window_end: Option<f64>,
    /// Width of the Monte Carlo leakage tally bins.
    pub mc_tally_dt: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            cadence: 1,
            window_start: None,
            window_end: None,
            mc_tally_dt: 1.0,
        }
    }
}

/// A parsed run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub method: Option<Method>,
    pub paths: usize,
    pub seed: u64,
    pub slab: Option<SlabConfig>,
    pub energy: Option<EnergyConfig>,
    pub general: Option<GeneralConfig>,
    pub output: OutputConfig,
}

/// Strict key-value store: every key must be consumed exactly once.
struct KeyMap {
    entries: BTreeMap<String, String>,
    consumed: std::collections::BTreeSet<String>,
}

impl KeyMap {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{raw}`", lineno + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                bail!("line {}: empty key or value", lineno + 1);
            }
            if entries.insert(key.clone(), value).is_some() {
                bail!("duplicate key `{key}`");
            }
        }
        Ok(KeyMap {
            entries,
            consumed: Default::default(),
        })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.consumed.insert(key.to_string());
        self.entries.get(key).cloned()
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    fn req_f64(&mut self, key: &str) -> Result<f64> {
        self.required(key)?
            .parse()
            .with_context(|| format!("key `{key}` is not a number"))
    }

    fn req_usize(&mut self, key: &str) -> Result<usize> {
        self.required(key)?
            .parse()
            .with_context(|| format!("key `{key}` is not a count"))
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|v| v.parse().with_context(|| format!("key `{key}` is not a number")))
            .transpose()
    }

    fn opt_usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key)
            .map(|v| v.parse().with_context(|| format!("key `{key}` is not a count")))
            .transpose()
    }

    fn finish(self) -> Result<()> {
        let unknown: Vec<_> = self
            .entries
            .keys()
            .filter(|k| !self.consumed.contains(*k))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            bail!("unknown keys: {}", unknown.join(", "));
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_str(&text).with_context(|| format!("in config {}", path.display()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        let mut map = KeyMap::parse(text)?;
        let problem = match map.required("problem")?.as_str() {
            "slab" => ProblemKind::Slab,
            "energy" => ProblemKind::Energy,
            "general" => ProblemKind::General,
            other => bail!("unknown problem kind `{other}`"),
        };
        let method = map.take("method").map(|m| Method::parse(&m)).transpose()?;
        let paths = map.opt_usize("paths")?.unwrap_or(1);
        if paths == 0 {
            bail!("paths must be >= 1");
        }
        let seed = map
            .take("seed")
            .map(|v| v.parse::<u64>().context("key `seed` is not a 64-bit integer"))
            .transpose()?
            .unwrap_or(0);

        let slab = if problem == ProblemKind::Slab {
            Some(SlabConfig {
                cells: map.req_usize("slab.cells")?,
                mu_bins: map.req_usize("slab.mu_bins")?,
                x_max: map.req_f64("slab.x_max")?,
                speed: map.req_f64("slab.speed")?,
                sigma_s: map.req_f64("slab.sigma_s")?,
                sigma_c: map.req_f64("slab.sigma_c")?,
                influx: map.req_f64("slab.influx")?,
                influx_on: map.req_f64("slab.influx_on")?,
                influx_off: map.req_f64("slab.influx_off")?,
                dt: map.req_f64("slab.dt")?,
                t_end: map.req_f64("slab.t_end")?,
                mc_dt: map.opt_f64("slab.mc_dt")?,
            })
        } else {
            None
        };
        let energy = if problem == ProblemKind::Energy {
            Some(EnergyConfig {
                groups: map.req_usize("energy.groups")?,
                e_max: map.req_f64("energy.e_max")?,
                band_edge: map.req_f64("energy.band_edge")?,
                v_sigma_low: map.req_f64("energy.v_sigma_low")?,
                v_sigma_high: map.req_f64("energy.v_sigma_high")?,
                v_sigma_c_low: map.req_f64("energy.v_sigma_c_low")?,
                v_sigma_c_high: map.req_f64("energy.v_sigma_c_high")?,
                kernel_low: map.req_f64("energy.kernel_low")?,
                kernel_high: map.req_f64("energy.kernel_high")?,
                q_low: map.req_f64("energy.q_low")?,
                q_high: map.req_f64("energy.q_high")?,
                n0_low: map.req_f64("energy.n0_low")?,
                n0_high: map.req_f64("energy.n0_high")?,
                dt: map.req_f64("energy.dt")?,
                t_end: map.req_f64("energy.t_end")?,
                mc_dt: map.opt_f64("energy.mc_dt")?,
            })
        } else {
            None
        };
        let general = if problem == ProblemKind::General {
            Some(GeneralConfig {
                cells_x: map.req_usize("general.cells_x")?,
                cells_y: map.req_usize("general.cells_y")?,
                cells_z: map.req_usize("general.cells_z")?,
                mu_bins: map.req_usize("general.mu_bins")?,
                phi_bins: map.req_usize("general.phi_bins")?,
                groups: map.req_usize("general.groups")?,
                x_max: map.req_f64("general.x_max")?,
                y_max: map.req_f64("general.y_max")?,
                z_max: map.req_f64("general.z_max")?,
                e_max: map.req_f64("general.e_max")?,
                speed: map.req_f64("general.speed")?,
                sigma_total: map.req_f64("general.sigma_total")?,
                sigma_capture: map.req_f64("general.sigma_capture")?,
                source: map.req_f64("general.source")?,
                n0: map.req_f64("general.n0")?,
                dt: map.req_f64("general.dt")?,
                t_end: map.req_f64("general.t_end")?,
            })
        } else {
            None
        };

        let output = OutputConfig {
            cadence: map.opt_usize("output.cadence")?.unwrap_or(1).max(1),
            window_start: map.opt_f64("output.window_start")?,
            window_end: map.opt_f64("output.window_end")?,
            mc_tally_dt: map.opt_f64("output.mc_tally_dt")?.unwrap_or(1.0),
        };

        map.finish()?;
        Ok(RunConfig {
            problem,
            method,
            paths,
            seed,
            slab,
            energy,
            general,
            output,
        })
    }

    /// Canonical serialization; `from_str` of the result compares equal.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem = {}", self.problem.as_str());
        if let Some(m) = self.method {
            let _ = writeln!(s, "method = {}", m.as_str());
        }
        let _ = writeln!(s, "paths = {}", self.paths);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(c) = &self.slab {
            let _ = writeln!(s, "slab.cells = {}", c.cells);
            let _ = writeln!(s, "slab.mu_bins = {}", c.mu_bins);
            let _ = writeln!(s, "slab.x_max = {}", c.x_max);
            let _ = writeln!(s, "slab.speed = {}", c.speed);
            let _ = writeln!(s, "slab.sigma_s = {}", c.sigma_s);
            let _ = writeln!(s, "slab.sigma_c = {}", c.sigma_c);
            let _ = writeln!(s, "slab.influx = {}", c.influx);
            let _ = writeln!(s, "slab.influx_on = {}", c.influx_on);
            let _ = writeln!(s, "slab.influx_off = {}", c.influx_off);
            let _ = writeln!(s, "slab.dt = {}", c.dt);
            let _ = writeln!(s, "slab.t_end = {}", c.t_end);
            if let Some(dt) = c.mc_dt {
                let _ = writeln!(s, "slab.mc_dt = {dt}");
            }
        }
        if let Some(c) = &self.energy {
            let _ = writeln!(s, "energy.groups = {}", c.groups);
            let _ = writeln!(s, "energy.e_max = {}", c.e_max);
            let _ = writeln!(s, "energy.band_edge = {}", c.band_edge);
            let _ = writeln!(s, "energy.v_sigma_low = {}", c.v_sigma_low);
            let _ = writeln!(s, "energy.v_sigma_high = {}", c.v_sigma_high);
            let _ = writeln!(s, "energy.v_sigma_c_low = {}", c.v_sigma_c_low);
            let _ = writeln!(s, "energy.v_sigma_c_high = {}", c.v_sigma_c_high);
            let _ = writeln!(s, "energy.kernel_low = {}", c.kernel_low);
            let _ = writeln!(s, "energy.kernel_high = {}", c.kernel_high);
            let _ = writeln!(s, "energy.q_low = {}", c.q_low);
            let _ = writeln!(s, "energy.q_high = {}", c.q_high);
            let _ = writeln!(s, "energy.n0_low = {}", c.n0_low);
            let _ = writeln!(s, "energy.n0_high = {}", c.n0_high);
            let _ = writeln!(s, "energy.dt = {}", c.dt);
            let _ = writeln!(s, "energy.t_end = {}", c.t_end);
            if let Some(dt) = c.mc_dt {
                let _ = writeln!(s, "energy.mc_dt = {dt}");
            }
        }
        if let Some(c) = &self.general {
            let _ = writeln!(s, "general.cells_x = {}", c.cells_x);
            let _ = writeln!(s, "general.cells_y = {}", c.cells_y);
            let _ = writeln!(s, "general.cells_z = {}", c.cells_z);
            let _ = writeln!(s, "general.mu_bins = {}", c.mu_bins);
            let _ = writeln!(s, "general.phi_bins = {}", c.phi_bins);
            let _ = writeln!(s, "general.groups = {}", c.groups);
            let _ = writeln!(s, "general.x_max = {}", c.x_max);
            let _ = writeln!(s, "general.y_max = {}", c.y_max);
            let _ = writeln!(s, "general.z_max = {}", c.z_max);
            let _ = writeln!(s, "general.e_max = {}", c.e_max);
            let _ = writeln!(s, "general.speed = {}", c.speed);
            let _ = writeln!(s, "general.sigma_total = {}", c.sigma_total);
            let _ = writeln!(s, "general.sigma_capture = {}", c.sigma_capture);
            let _ = writeln!(s, "general.source = {}", c.source);
            let _ = writeln!(s, "general.n0 = {}", c.n0);
            let _ = writeln!(s, "general.dt = {}", c.dt);
            let _ = writeln!(s, "general.t_end = {}", c.t_end);
        }
        let _ = writeln!(s, "output.cadence = {}", self.output.cadence);
        if let Some(w) = self.output.window_start {
            let _ = writeln!(s, "output.window_start = {w}");
        }
        if let Some(w) = self.output.window_end {
            let _ = writeln!(s, "output.window_end = {w}");
        }
        let _ = writeln!(s, "output.mc_tally_dt = {}", self.output.mc_tally_dt);
        s
    }

    /// Hex digest of the canonical serialization.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_config_string().as_bytes());
        let digest = h.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn t_end(&self) -> f64 {
        match self.problem {
            ProblemKind::Slab => self.slab.as_ref().map(|c| c.t_end).unwrap_or(0.0),
            ProblemKind::Energy => self.energy.as_ref().map(|c| c.t_end).unwrap_or(0.0),
            ProblemKind::General => self.general.as_ref().map(|c| c.t_end).unwrap_or(0.0),
        }
    }

    /// Tally window for slab leakage scalars: configured, or the last whole
    /// time unit of the run.
    pub fn window(&self) -> (f64, f64) {
        let t_end = self.t_end();
        (
            self.output.window_start.unwrap_or((t_end - 1.0).max(0.0)),
            self.output.window_end.unwrap_or(t_end),
        )
    }

    pub fn build_slab(&self) -> Result<SlabProblem> {
        let c = self
            .slab
            .as_ref()
            .ok_or_else(|| anyhow!("config has no slab section"))?;
        Ok(SlabProblem::homogeneous(
            c.cells,
            c.mu_bins,
            c.x_max,
            c.speed,
            c.sigma_s,
            c.sigma_c,
            c.influx,
            (c.influx_on, c.influx_off),
            c.dt,
            c.t_end,
        )?)
    }

    pub fn build_energy(&self) -> Result<EnergyProblem> {
        let c = self
            .energy
            .as_ref()
            .ok_or_else(|| anyhow!("config has no energy section"))?;
        let g = c.groups;
        let de = c.e_max / g as f64;
        let mut v_sigma = vec![0.0; g];
        let mut v_sigma_c = vec![0.0; g];
        let mut kernel = vec![0.0; g * g];
        let mut q = vec![0.0; g];
        let mut n0 = vec![0.0; g];
        let mut high_count = 0;
        for gi in 0..g {
            if (gi as f64 + 0.5) * de >= c.band_edge {
                high_count += 1;
            }
        }
        let low_count = g - high_count;
        for gi in 0..g {
            let high = (gi as f64 + 0.5) * de >= c.band_edge;
            v_sigma[gi] = if high { c.v_sigma_high } else { c.v_sigma_low };
            v_sigma_c[gi] = if high { c.v_sigma_c_high } else { c.v_sigma_c_low };
            q[gi] = if high { c.q_high } else { c.q_low };
            n0[gi] = if high {
                if high_count > 0 { c.n0_high / high_count as f64 } else { 0.0 }
            } else if low_count > 0 {
                c.n0_low / low_count as f64
            } else {
                0.0
            };
            let row = if high { c.kernel_high } else { c.kernel_low };
            for gt in 0..g {
                kernel[gi * g + gt] = row;
            }
        }
        Ok(EnergyProblem::new(
            g, c.e_max, c.band_edge, v_sigma, v_sigma_c, kernel, q, n0, c.dt, c.t_end,
        )?)
    }

    pub fn build_general(&self) -> Result<GeneralProblem> {
        let c = self
            .general
            .as_ref()
            .ok_or_else(|| anyhow!("config has no general section"))?;
        let grid = PhaseSpaceGrid::new(
            c.cells_x, c.cells_y, c.cells_z, c.mu_bins, c.phi_bins, c.groups, c.x_max, c.y_max,
            c.z_max, c.e_max,
        )?;
        let g = c.groups;
        let cells = grid.n_cells();
        // Homogeneous material, isotropic kernel spread uniformly over
        // outgoing energy so the model is conservative.
        let sigma_hat = c.sigma_total - c.sigma_capture;
        if sigma_hat < 0.0 {
            bail!("general.sigma_capture exceeds general.sigma_total");
        }
        let f_energy = vec![sigma_hat / c.e_max; cells * g * g];
        let mat = MaterialModel::isotropic(
            &grid,
            vec![c.sigma_total; cells * g],
            vec![c.sigma_capture; cells * g],
            vec![c.speed; g],
            vec![c.source; cells * g],
            f_energy,
            true,
        )?;
        let initial = PopulationState::from_fn(&grid, 0.0, |_, _, _| c.n0);
        Ok(GeneralProblem {
            grid,
            material: mat,
            initial,
            dt: c.dt,
            t_end: c.t_end,
            snapshot_times: vec![],
            zero_negatives: false,
        })
    }
}

/// Configuration for the `perturb` subcommand: tabulated rate histories and
/// the evaluation mesh. Table paths resolve relative to the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbConfig {
    pub base_rates: std::path::PathBuf,
    pub perturbed_rates: std::path::PathBuf,
    pub initial_density: std::path::PathBuf,
    pub e_max: f64,
    pub bins: usize,
    pub t_end: f64,
    pub t_outputs: usize,
    pub energy_intervals: usize,
    pub time_intervals: usize,
}

impl PerturbConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let mut map = KeyMap::parse(&text)?;
        let resolve = |s: String| dir.join(s);
        let cfg = PerturbConfig {
            base_rates: resolve(map.required("perturb.base_rates")?),
            perturbed_rates: resolve(map.required("perturb.perturbed_rates")?),
            initial_density: resolve(map.required("perturb.initial_density")?),
            e_max: map.req_f64("perturb.e_max")?,
            bins: map.req_usize("perturb.bins")?,
            t_end: map.req_f64("perturb.t_end")?,
            t_outputs: map.req_usize("perturb.t_outputs")?,
            energy_intervals: map.opt_usize("perturb.energy_intervals")?.unwrap_or(256),
            time_intervals: map.opt_usize("perturb.time_intervals")?.unwrap_or(512),
        };
        map.finish()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SLAB_EXAMPLE: &str = "\
problem = slab
method = sde
paths = 4
seed = 7
slab.cells = 8
slab.mu_bins = 4
slab.x_max = 1.0
slab.speed = 0.1
slab.sigma_s = 5.0
slab.sigma_c = 0.1
slab.influx = 100.0
slab.influx_on = 0.0
slab.influx_off = 2.0
slab.dt = 0.125
slab.t_end = 4.0
slab.mc_dt = 0.1
output.window_start = 3.0
output.window_end = 4.0
";

    #[test]
    fn round_trips_through_serialization() {
        let cfg = RunConfig::from_str(SLAB_EXAMPLE).unwrap();
        let text = cfg.to_config_string();
        let cfg2 = RunConfig::from_str(&text).unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(cfg.hash(), cfg2.hash());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{SLAB_EXAMPLE}slab.typo = 3\n");
        let err = RunConfig::from_str(&text).unwrap_err();
        assert!(err.to_string().contains("unknown keys"), "{err}");
    }

    #[test]
    fn missing_physics_key_rejected() {
        let text = SLAB_EXAMPLE.replace("slab.sigma_c = 0.1\n", "");
        let err = RunConfig::from_str(&text).unwrap_err();
        assert!(err.to_string().contains("slab.sigma_c"), "{err}");
    }

    #[test]
    fn duplicate_keys_rejected() {
        let text = format!("{SLAB_EXAMPLE}seed = 9\n");
        assert!(RunConfig::from_str(&text).is_err());
    }

    #[test]
    fn energy_config_builds_benchmark_problem() {
        let text = "\
problem = energy
paths = 2
seed = 1
energy.groups = 20
energy.e_max = 20.0
energy.band_edge = 10.0
energy.v_sigma_low = 1.0
energy.v_sigma_high = 1.0
energy.v_sigma_c_low = 1.0
energy.v_sigma_c_high = 0.1
energy.kernel_low = 0.0
energy.kernel_high = 0.045
energy.q_low = 0.0
energy.q_high = 22.0
energy.n0_low = 0.0
energy.n0_high = 400.0
energy.dt = 0.02
energy.t_end = 2.0
";
        let cfg = RunConfig::from_str(text).unwrap();
        let prob = cfg.build_energy().unwrap();
        assert_eq!(prob.groups, 20);
        // 40 per high group, source 22 per unit energy up high.
        assert_eq!(prob.initial[15], 40.0);
        assert_eq!(prob.initial[3], 0.0);
        assert_eq!(prob.source_density(12), 22.0);
        assert_eq!(prob.kernel(12, 3), 0.045);
        assert_eq!(prob.kernel(3, 12), 0.0);
    }

    #[test]
    fn default_window_is_last_time_unit() {
        let text = SLAB_EXAMPLE
            .replace("output.window_start = 3.0\n", "")
            .replace("output.window_end = 4.0\n", "");
        let cfg = RunConfig::from_str(&text).unwrap();
        assert_eq!(cfg.window(), (3.0, 4.0));
    }
}
