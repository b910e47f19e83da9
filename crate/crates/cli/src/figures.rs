//! Plot-ready CSV bundles: single-path observable series per method.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};

use snt_core::PathResult;

use crate::config::ProblemKind;

/// Observable columns a figure file carries for each problem kind.
pub fn figure_columns(problem: ProblemKind) -> &'static [&'static str] {
    match problem {
        ProblemKind::Slab => &["left_leakage", "right_leakage"],
        ProblemKind::Energy => &["n_low", "n_high"],
        ProblemKind::General => &["population"],
    }
}

/// Write `t,<columns>` for one path; a missing observable is a usage error.
pub fn write_series_csv(path: &Path, result: &PathResult, columns: &[&str]) -> Result<()> {
    let series: Vec<&[f64]> = columns
        .iter()
        .map(|name| {
            result
                .observable(name)
                .ok_or_else(|| anyhow!("path result has no observable `{name}`"))
        })
        .collect::<Result<_>>()?;
    let mut s = String::new();
    s.push('t');
    for c in columns {
        let _ = write!(s, ",{c}");
    }
    s.push('\n');
    for (k, t) in result.times.iter().enumerate() {
        let _ = write!(s, "{t}");
        for col in &series {
            let _ = write!(s, ",{}", col[k]);
        }
        s.push('\n');
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Emit one figure CSV per (method label, path result).
pub fn emit_figures(
    results: &[(&str, PathResult)],
    problem: ProblemKind,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let columns = figure_columns(problem);
    let mut files = Vec::with_capacity(results.len());
    for (label, result) in results {
        let file = out_dir.join(format!("fig_{}_{label}.csv", problem.as_str()));
        write_series_csv(&file, result, columns)?;
        files.push(file);
    }
    Ok(files)
}
