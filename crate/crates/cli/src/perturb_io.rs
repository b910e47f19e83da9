//! Tabulated capture-rate histories and the perturbation-shift CSV output.
//!
//! Rate tables arrive as `E,t,rate` CSV over a complete rectangular grid;
//! lookups interpolate bilinearly and clamp at the table edges. Initial
//! densities arrive as `E,density` and interpolate linearly.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};

use snt_core::perturb::{delta_mean_with, delta_variance_with, CaptureHistory, Quadrature};

/// A rectangular table of rate(E, t) values.
#[derive(Debug, Clone)]
pub struct RateTable {
    es: Vec<f64>,
    ts: Vec<f64>,
    /// Row-major over (E, t).
    values: Vec<f64>,
}

impl RateTable {
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read rate table {}", path.display()))?;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || lineno == 0 && line.to_lowercase().starts_with("e,") {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |p: Option<&str>| -> Result<f64> {
                p.ok_or_else(|| anyhow!("line {}: expected E,t,rate", lineno + 1))?
                    .trim()
                    .parse()
                    .with_context(|| format!("line {}: bad number", lineno + 1))
            };
            let e = parse(parts.next())?;
            let t = parse(parts.next())?;
            let r = parse(parts.next())?;
            if parts.next().is_some() {
                bail!("line {}: expected exactly three columns", lineno + 1);
            }
            if r < 0.0 {
                bail!("line {}: negative rate {r}", lineno + 1);
            }
            rows.push((e, t, r));
        }
        if rows.is_empty() {
            bail!("rate table {} is empty", path.display());
        }
        let mut es: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ts: Vec<f64> = rows.iter().map(|r| r.1).collect();
        es.sort_by(f64::total_cmp);
        es.dedup();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if rows.len() != es.len() * ts.len() {
            bail!(
                "rate table {} is not a complete grid: {} rows for {} energies x {} times",
                path.display(),
                rows.len(),
                es.len(),
                ts.len()
            );
        }
        let mut values = vec![f64::NAN; es.len() * ts.len()];
        for (e, t, r) in rows {
            let i = es.iter().position(|&x| x == e).unwrap();
            let j = ts.iter().position(|&x| x == t).unwrap();
            values[i * ts.len() + j] = r;
        }
        if values.iter().any(|v| v.is_nan()) {
            bail!("rate table {} has duplicate grid points", path.display());
        }
        Ok(RateTable { es, ts, values })
    }

    /// Bilinear interpolation, clamped to the table's hull.
    pub fn rate(&self, e: f64, t: f64) -> f64 {
        let (i0, i1, we) = bracket(&self.es, e);
        let (j0, j1, wt) = bracket(&self.ts, t);
        let nt = self.ts.len();
        let v00 = self.values[i0 * nt + j0];
        let v01 = self.values[i0 * nt + j1];
        let v10 = self.values[i1 * nt + j0];
        let v11 = self.values[i1 * nt + j1];
        (1.0 - we) * ((1.0 - wt) * v00 + wt * v01) + we * ((1.0 - wt) * v10 + wt * v11)
    }
}

/// A piecewise-linear density over energy.
#[derive(Debug, Clone)]
pub struct DensityTable {
    es: Vec<f64>,
    values: Vec<f64>,
}

impl DensityTable {
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read density table {}", path.display()))?;
        let mut es = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || lineno == 0 && line.to_lowercase().starts_with("e,") {
                continue;
            }
            let (e, d) = line
                .split_once(',')
                .ok_or_else(|| anyhow!("line {}: expected E,density", lineno + 1))?;
            let e: f64 = e.trim().parse().context("bad energy")?;
            let d: f64 = d.trim().parse().context("bad density")?;
            if d < 0.0 {
                bail!("line {}: negative density {d}", lineno + 1);
            }
            if let Some(&last) = es.last() {
                if e <= last {
                    bail!("line {}: energies must increase", lineno + 1);
                }
            }
            es.push(e);
            values.push(d);
        }
        if es.is_empty() {
            bail!("density table {} is empty", path.display());
        }
        Ok(DensityTable { es, values })
    }

    pub fn density(&self, e: f64) -> f64 {
        let (i0, i1, w) = bracket(&self.es, e);
        (1.0 - w) * self.values[i0] + w * self.values[i1]
    }
}

/// Indices and weight bracketing `x` in a sorted axis, clamped at the ends.
fn bracket(axis: &[f64], x: f64) -> (usize, usize, f64) {
    if axis.len() == 1 || x <= axis[0] {
        return (0, 0, 0.0);
    }
    if x >= *axis.last().unwrap() {
        let last = axis.len() - 1;
        return (last, last, 0.0);
    }
    let i1 = axis.partition_point(|&a| a <= x);
    let i0 = i1 - 1;
    let w = (x - axis[i0]) / (axis[i1] - axis[i0]);
    (i0, i1, w)
}

/// Perturbation job: rate tables, density, evaluation mesh.
#[derive(Debug, Clone)]
pub struct PerturbJob {
    pub history: CaptureHistory,
    pub t_end: f64,
    pub t_outputs: usize,
    pub quadrature: Quadrature,
}

impl PerturbJob {
    pub fn from_tables(
        base: RateTable,
        perturbed: RateTable,
        initial: DensityTable,
        e_max: f64,
        bins: usize,
        t_end: f64,
        t_outputs: usize,
        quadrature: Quadrature,
    ) -> Result<Self> {
        if !(t_end > 0.0) || t_outputs == 0 {
            bail!("need positive t_end and at least one output time");
        }
        let base = Arc::new(base);
        let perturbed = Arc::new(perturbed);
        let initial = Arc::new(initial);
        let history = CaptureHistory::new(
            e_max,
            bins,
            {
                let base = base.clone();
                move |e, t| base.rate(e, t)
            },
            {
                let perturbed = perturbed.clone();
                move |e, t| perturbed.rate(e, t)
            },
            {
                let initial = initial.clone();
                move |e| initial.density(e)
            },
        )?;
        Ok(PerturbJob {
            history,
            t_end,
            t_outputs,
            quadrature,
        })
    }

    /// `t,delta_mean,delta_variance` at uniformly spaced output times.
    pub fn to_csv(&self) -> Result<String> {
        let mut s = String::from("t,delta_mean,delta_variance\n");
        for k in 0..=self.t_outputs {
            let t = self.t_end * k as f64 / self.t_outputs as f64;
            let dm = delta_mean_with(&self.history, t, self.quadrature)?;
            let dv = delta_variance_with(&self.history, t, self.quadrature)?;
            let _ = writeln!(s, "{t},{dm},{dv}");
        }
        Ok(s)
    }
}
