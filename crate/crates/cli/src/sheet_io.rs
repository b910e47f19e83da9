//! Sheet-surface CSV export and the sampling diagnostics the demo prints.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

use snt_core::{SheetSampler, SheetSurface};

/// `x,t,w` rows over the full lattice, row-major in x then t.
pub fn surface_to_csv(surface: &SheetSurface) -> String {
    let mut s = String::from("x,t,w\n");
    for ix in 0..=surface.nx() {
        for it in 0..=surface.nt() {
            let _ = writeln!(
                s,
                "{},{},{}",
                surface.x_coord(ix),
                surface.t_coord(it),
                surface.value(ix, it)
            );
        }
    }
    s
}

pub fn write_surface(path: &Path, surface: &SheetSurface) -> Result<()> {
    std::fs::write(path, surface_to_csv(surface))
        .with_context(|| format!("writing {}", path.display()))
}

/// Moment diagnostics over sheet increments: the second and fourth moment
/// ratios that separate a sheet from a product of two independent processes.
#[derive(Debug, Clone, Copy)]
pub struct SheetDiagnostics {
    pub draws: u64,
    pub second_moment_ratio: f64,
    pub fourth_moment_ratio: f64,
    pub product_fourth_ratio: f64,
}

pub fn sheet_diagnostics(seed: u64, area: f64, draws: u64) -> SheetDiagnostics {
    let sampler = SheetSampler::new(seed);
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    let mut p4 = 0.0;
    for i in 0..draws {
        let w = area.sqrt() * sampler.keyed_normal(10, i, 0, 0);
        m2 += w * w;
        m4 += w.powi(4);
        let w1 = sampler.keyed_normal(11, i, 0, 0);
        let w2 = sampler.keyed_normal(12, i, 0, 0);
        p4 += (area.sqrt() * w1 * w2).powi(4);
    }
    let n = draws as f64;
    SheetDiagnostics {
        draws,
        second_moment_ratio: (m2 / n) / area,
        fourth_moment_ratio: (m4 / n) / (3.0 * area * area),
        product_fourth_ratio: (p4 / n) / (9.0 * area * area),
    }
}
