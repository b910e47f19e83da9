//! Summary files and side-by-side comparison of two ensembles.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use snt_core::stats::ObservableStats;

/// Per-ensemble summary: one set of observable statistics plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub method: String,
    pub problem: String,
    pub paths: usize,
    pub seed: u64,
    pub config_hash: String,
    pub observables: Vec<ObservableStats>,
}

impl Summary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "format = snt-summary-v1");
        let _ = writeln!(s, "method = {}", self.method);
        let _ = writeln!(s, "problem = {}", self.problem);
        let _ = writeln!(s, "paths = {}", self.paths);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "config_hash = {}", self.config_hash);
        for o in &self.observables {
            let _ = writeln!(s, "observable.{}.mean = {}", o.name, o.mean);
            let _ = writeln!(s, "observable.{}.std = {}", o.name, o.std);
            let _ = writeln!(s, "observable.{}.se = {}", o.name, o.se);
            let _ = writeln!(s, "observable.{}.n = {}", o.name, o.n);
        }
        s
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read summary {}", path.display()))?;
        Self::from_text(&text).with_context(|| format!("in summary {}", path.display()))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut method = None;
        let mut problem = None;
        let mut paths = None;
        let mut seed = None;
        let mut config_hash = None;
        let mut names: Vec<String> = Vec::new();
        let mut fields: std::collections::BTreeMap<String, (Option<f64>, Option<f64>, Option<f64>, Option<usize>)> =
            Default::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("expected `key = value`, got `{line}`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "format" => {
                    if value != "snt-summary-v1" {
                        bail!("unsupported summary format `{value}`");
                    }
                }
                "method" => method = Some(value.to_string()),
                "problem" => problem = Some(value.to_string()),
                "paths" => paths = Some(value.parse()?),
                "seed" => seed = Some(value.parse()?),
                "config_hash" => config_hash = Some(value.to_string()),
                _ => {
                    let rest = key
                        .strip_prefix("observable.")
                        .ok_or_else(|| anyhow!("unknown summary key `{key}`"))?;
                    let (name, field) = rest
                        .rsplit_once('.')
                        .ok_or_else(|| anyhow!("malformed observable key `{key}`"))?;
                    let entry = fields.entry(name.to_string()).or_insert_with(|| {
                        names.push(name.to_string());
                        (None, None, None, None)
                    });
                    match field {
                        "mean" => entry.0 = Some(value.parse()?),
                        "std" => entry.1 = Some(value.parse()?),
                        "se" => entry.2 = Some(value.parse()?),
                        "n" => entry.3 = Some(value.parse()?),
                        other => bail!("unknown observable field `{other}`"),
                    }
                }
            }
        }
        let mut observables = Vec::with_capacity(names.len());
        for name in names {
            let (mean, std, se, n) = fields.remove(&name).unwrap();
            observables.push(ObservableStats {
                mean: mean.ok_or_else(|| anyhow!("observable {name} missing mean"))?,
                std: std.ok_or_else(|| anyhow!("observable {name} missing std"))?,
                se: se.ok_or_else(|| anyhow!("observable {name} missing se"))?,
                n: n.ok_or_else(|| anyhow!("observable {name} missing n"))?,
                name,
            });
        }
        Ok(Summary {
            method: method.ok_or_else(|| anyhow!("summary missing method"))?,
            problem: problem.ok_or_else(|| anyhow!("summary missing problem"))?,
            paths: paths.ok_or_else(|| anyhow!("summary missing paths"))?,
            seed: seed.ok_or_else(|| anyhow!("summary missing seed"))?,
            config_hash: config_hash.ok_or_else(|| anyhow!("summary missing config_hash"))?,
            observables,
        })
    }
}

/// One observable side by side.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub name: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub std_a: f64,
    pub std_b: f64,
    /// Mean difference over the combined standard error.
    pub z: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub threshold: f64,
}

impl Comparison {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.z.abs()))
    }

    pub fn within_threshold(&self) -> bool {
        self.max_abs_z() <= self.threshold
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<24} {:>12} {:>12} {:>10} {:>10} {:>8}",
            "observable", "mean_a", "mean_b", "std_a", "std_b", "z"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<24} {:>12.4} {:>12.4} {:>10.4} {:>10.4} {:>8.3}",
                r.name, r.mean_a, r.mean_b, r.std_a, r.std_b, r.z
            );
        }
        let verdict = if self.within_threshold() { "AGREE" } else { "DISAGREE" };
        let _ = writeln!(
            s,
            "max |z| = {:.3} vs threshold {:.2}: {verdict}",
            self.max_abs_z(),
            self.threshold
        );
        s
    }
}

/// Compare two summaries observable by observable.
///
/// The observable name sets must match exactly; `z` is the difference of
/// means over the combined standard error (0 when both ensembles are
/// deterministic and equal, infinite when they differ with zero spread).
pub fn compare(a: &Summary, b: &Summary, threshold: f64) -> Result<Comparison> {
    let names_a: Vec<&str> = a.observables.iter().map(|o| o.name.as_str()).collect();
    let names_b: Vec<&str> = b.observables.iter().map(|o| o.name.as_str()).collect();
    if names_a != names_b {
        bail!("summaries disagree on observables: {names_a:?} vs {names_b:?}");
    }
    let mut rows = Vec::with_capacity(names_a.len());
    for (oa, ob) in a.observables.iter().zip(&b.observables) {
        let diff = oa.mean - ob.mean;
        let combined = (oa.se * oa.se + ob.se * ob.se).sqrt();
        let z = if combined > 0.0 {
            diff / combined
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY * diff.signum()
        };
        rows.push(CompareRow {
            name: oa.name.clone(),
            mean_a: oa.mean,
            mean_b: ob.mean,
            std_a: oa.std,
            std_b: ob.std,
            z,
        });
    }
    Ok(Comparison { rows, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(rows: &[(&str, f64, f64, usize)]) -> Summary {
        Summary {
            method: "sde".into(),
            problem: "slab".into(),
            paths: rows.first().map(|r| r.3).unwrap_or(0),
            seed: 1,
            config_hash: "deadbeef".into(),
            observables: rows
                .iter()
                .map(|(name, mean, std, n)| ObservableStats {
                    name: name.to_string(),
                    mean: *mean,
                    std: *std,
                    se: std / (*n as f64).sqrt(),
                    n: *n,
                })
                .collect(),
        }
    }

    #[test]
    fn summary_text_round_trips() {
        let s = summary(&[("left", 694.32, 21.05, 100), ("right", 106.75, 7.57, 100)]);
        let parsed = Summary::from_text(&s.to_text()).unwrap();
        assert_eq!(s, parsed);
    }

    #[test]
    fn identical_summaries_have_zero_z() {
        let s = summary(&[("x", 5.0, 1.0, 50)]);
        let c = compare(&s, &s, 3.0).unwrap();
        assert_eq!(c.rows[0].z, 0.0);
        assert!(c.within_threshold());
    }

    #[test]
    fn published_slab_columns_z_is_3_40() {
        // 100-path leakage columns: (704.93, 23.01) vs (694.32, 21.05) gives
        // z = 10.61 / sqrt(23.01^2/100 + 21.05^2/100) = 3.402.
        let a = summary(&[("left_leakage_window", 704.93, 23.01, 100)]);
        let b = summary(&[("left_leakage_window", 694.32, 21.05, 100)]);
        let c = compare(&a, &b, 3.0).unwrap();
        assert!((c.rows[0].z - 3.4022).abs() < 1e-3, "z = {}", c.rows[0].z);
        assert!(!c.within_threshold());
        assert!(compare(&a, &b, 4.0).unwrap().within_threshold());
    }

    #[test]
    fn published_band_columns_z_is_0_09() {
        let a = summary(&[("n_low_final", 156.83, 11.44, 100)]);
        let b = summary(&[("n_low_final", 156.97, 10.28, 100)]);
        let c = compare(&a, &b, 3.0).unwrap();
        assert!((c.rows[0].z + 0.0910).abs() < 1e-3, "z = {}", c.rows[0].z);
    }

    #[test]
    fn mismatched_observables_error() {
        let a = summary(&[("x", 1.0, 0.1, 10)]);
        let b = summary(&[("y", 1.0, 0.1, 10)]);
        assert!(compare(&a, &b, 3.0).is_err());
    }
}
