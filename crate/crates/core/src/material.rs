//! Material data on the discretized phase space: cross sections, transfer
//! kernel, source density, and derived per-collision multiplicities.
//!
//! The transfer kernel stores `sigma(E') * f(mu',phi',E' -> mu,phi,E)`, a
//! density per unit path length per unit (mu, phi, E). The mean number of
//! neutrons emerging per non-capture collision, `c_hat`, is always recomputed
//! from the kernel at construction so the two can never disagree.

use crate::error::{Error, Result};
use crate::grid::PhaseSpaceGrid;

/// Tolerance for the cross-section consistency identity of a model that
/// declares itself conservative.
pub const CONSERVATION_TOL: f64 = 1e-9;

/// Transfer-kernel storage.
///
/// The dense form indexes `(cell, from-group, from-dir, to-group, to-dir)`.
/// The isotropic form keeps only the energy part `sigma(E') f_E(g' -> g)`
/// per unit energy; the angular density is the uniform `1/(4 pi)`.
#[derive(Debug, Clone)]
pub enum Kernel {
    Dense(Vec<f64>),
    Isotropic(Vec<f64>),
}

/// Cross sections, transfer kernel, speeds, and source on a grid.
#[derive(Debug, Clone)]
pub struct MaterialModel {
    n_cells: usize,
    n_dirs: usize,
    ngroups: usize,
    sigma_total: Vec<f64>,   // [cell][group], 1/length
    sigma_capture: Vec<f64>, // [cell][group], 1/length
    speed: Vec<f64>,         // [group], length/time
    source: Vec<f64>,        // [cell][group], per unit volume.solid-angle.energy.time
    source_window: Option<(f64, f64)>,
    kernel: Kernel,
    c_hat: Vec<f64>, // [cell][group], recomputed from the kernel
}

impl MaterialModel {
    /// Build a model with an isotropic kernel.
    ///
    /// `f_energy[cell][g'][g]` holds `sigma(E') f_E(g' -> g)` per unit energy;
    /// the full kernel value is `f_energy / (4 pi)`. With `conservative` set,
    /// the cross-section consistency identity is enforced at [`CONSERVATION_TOL`].
    pub fn isotropic(
        grid: &PhaseSpaceGrid,
        sigma_total: Vec<f64>,
        sigma_capture: Vec<f64>,
        speed: Vec<f64>,
        source: Vec<f64>,
        f_energy: Vec<f64>,
        conservative: bool,
    ) -> Result<Self> {
        let g = grid.ngroups();
        if f_energy.len() != grid.n_cells() * g * g {
            return Err(Error::invalid("isotropic kernel must have cells*G*G entries"));
        }
        Self::build(grid, sigma_total, sigma_capture, speed, source, Kernel::Isotropic(f_energy), conservative)
    }

    /// Build a model with a dense kernel over
    /// `(cell, from-group, from-dir, to-group, to-dir)`.
    pub fn dense(
        grid: &PhaseSpaceGrid,
        sigma_total: Vec<f64>,
        sigma_capture: Vec<f64>,
        speed: Vec<f64>,
        source: Vec<f64>,
        kernel: Vec<f64>,
        conservative: bool,
    ) -> Result<Self> {
        let bins = grid.ngroups() * grid.n_dirs();
        if kernel.len() != grid.n_cells() * bins * bins {
            return Err(Error::invalid("dense kernel must have cells*(G*D)^2 entries"));
        }
        Self::build(grid, sigma_total, sigma_capture, speed, source, Kernel::Dense(kernel), conservative)
    }

    fn build(
        grid: &PhaseSpaceGrid,
        sigma_total: Vec<f64>,
        sigma_capture: Vec<f64>,
        speed: Vec<f64>,
        source: Vec<f64>,
        kernel: Kernel,
        conservative: bool,
    ) -> Result<Self> {
        let n_cells = grid.n_cells();
        let ngroups = grid.ngroups();
        if sigma_total.len() != n_cells * ngroups || sigma_capture.len() != n_cells * ngroups {
            return Err(Error::invalid("cross sections must have cells*G entries"));
        }
        if speed.len() != ngroups {
            return Err(Error::invalid("speed must have one entry per group"));
        }
        if source.len() != n_cells * ngroups {
            return Err(Error::invalid("source must have cells*G entries"));
        }
        if speed.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::invalid("speeds must be positive"));
        }
        if source.iter().any(|&q| q < 0.0 || !q.is_finite()) {
            return Err(Error::invalid("source density must be finite and non-negative"));
        }
        for idx in 0..n_cells * ngroups {
            let (s, sc) = (sigma_total[idx], sigma_capture[idx]);
            if !(s.is_finite() && sc.is_finite()) || s < 0.0 || sc < 0.0 {
                return Err(Error::invalid("cross sections must be finite and non-negative"));
            }
            if sc > s {
                return Err(Error::invalid(format!(
                    "sigma_capture {sc} exceeds sigma_total {s} at flat index {idx}"
                )));
            }
        }
        match &kernel {
            Kernel::Dense(k) | Kernel::Isotropic(k) => {
                if k.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                    return Err(Error::invalid("kernel entries must be finite and non-negative"));
                }
            }
        }

        let mut mat = MaterialModel {
            n_cells,
            n_dirs: grid.n_dirs(),
            ngroups,
            sigma_total,
            sigma_capture,
            speed,
            source,
            source_window: None,
            kernel,
            c_hat: Vec::new(),
        };
        mat.c_hat = mat.compute_c_hat(grid)?;

        if conservative {
            let report = verify_conservation(&mat, grid);
            if !report.flagged.is_empty() {
                return Err(Error::invalid(format!(
                    "model declared conservative but max residual {:.3e} exceeds {:.0e}",
                    report.max_abs, CONSERVATION_TOL
                )));
            }
        }
        Ok(mat)
    }

    /// Restrict the source to be on only while `t` lies in `[on, off)`.
    pub fn with_source_window(mut self, on: f64, off: f64) -> Result<Self> {
        if !(on <= off) {
            return Err(Error::invalid("source window must satisfy on <= off"));
        }
        self.source_window = Some((on, off));
        Ok(self)
    }

    fn cg(&self, cell: usize, group: usize) -> usize {
        cell * self.ngroups + group
    }

    pub fn ngroups(&self) -> usize {
        self.ngroups
    }
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Total macroscopic cross section [1/length].
    pub fn sigma_total(&self, cell: usize, group: usize) -> f64 {
        self.sigma_total[self.cg(cell, group)]
    }

    /// Capture cross section [1/length].
    pub fn sigma_capture(&self, cell: usize, group: usize) -> f64 {
        self.sigma_capture[self.cg(cell, group)]
    }

    /// Non-capture cross section `sigma - sigma_c`.
    pub fn sigma_hat(&self, cell: usize, group: usize) -> f64 {
        self.sigma_total(cell, group) - self.sigma_capture(cell, group)
    }

    pub fn speed(&self, group: usize) -> f64 {
        self.speed[group]
    }

    /// Source density at time `t` (per unit volume, solid angle, energy, time).
    pub fn source(&self, cell: usize, group: usize, t: f64) -> f64 {
        if let Some((on, off)) = self.source_window {
            if t < on || t >= off {
                return 0.0;
            }
        }
        self.source[self.cg(cell, group)]
    }

    /// Kernel value `sigma(E') f(from -> to)` per unit (mu, phi, E).
    pub fn transfer(&self, cell: usize, from_group: usize, from_dir: usize, to_group: usize, to_dir: usize) -> f64 {
        match &self.kernel {
            Kernel::Isotropic(fe) => {
                let _ = (from_dir, to_dir);
                fe[(cell * self.ngroups + from_group) * self.ngroups + to_group]
                    / (4.0 * std::f64::consts::PI)
            }
            Kernel::Dense(k) => {
                let bins = self.ngroups * self.n_dirs;
                let from = from_group * self.n_dirs + from_dir;
                let to = to_group * self.n_dirs + to_dir;
                k[(cell * bins + from) * bins + to]
            }
        }
    }

    /// Mean neutrons emerging per non-capture collision, recomputed from the
    /// kernel at construction. Groups with no non-capture cross section
    /// report 1.
    pub fn c_hat(&self, cell: usize, group: usize) -> f64 {
        self.c_hat[self.cg(cell, group)]
    }

    /// Sum of `f_hat` over all outgoing bins times the bin measure.
    ///
    /// The multiplicity is a per-(cell, group) quantity, so a dense kernel
    /// must have the same row sum for every incident direction.
    fn compute_c_hat(&self, grid: &PhaseSpaceGrid) -> Result<Vec<f64>> {
        if let Kernel::Dense(_) = &self.kernel {
            let measure = grid.bin_measure();
            for cell in 0..self.n_cells {
                for gf in 0..self.ngroups {
                    let mut first = None;
                    for fd in 0..self.n_dirs {
                        let mut acc = 0.0;
                        for gt in 0..self.ngroups {
                            for dt in 0..self.n_dirs {
                                acc += self.transfer(cell, gf, fd, gt, dt) * measure;
                            }
                        }
                        let head = *first.get_or_insert(acc);
                        if (acc - head).abs() > 1e-9 * head.abs().max(1.0) {
                            return Err(Error::invalid(format!(
                                "kernel row sum at cell {cell} group {gf} varies with incident direction"
                            )));
                        }
                    }
                }
            }
        }
        let mut out = vec![1.0; self.n_cells * self.ngroups];
        for cell in 0..self.n_cells {
            for gf in 0..self.ngroups {
                let shat = self.sigma_hat(cell, gf);
                let outgoing = self.kernel_row_sum(grid, cell, gf);
                if shat <= 0.0 {
                    if outgoing > 0.0 {
                        return Err(Error::invalid(format!(
                            "cell {cell} group {gf} has zero non-capture cross section but a nonzero kernel row"
                        )));
                    }
                    out[self.cg(cell, gf)] = 1.0;
                } else {
                    out[self.cg(cell, gf)] = outgoing / shat;
                }
            }
        }
        Ok(out)
    }

    /// `sum over outgoing bins of sigma' f * dmu dphi dE` for one (cell, group).
    pub(crate) fn kernel_row_sum(&self, grid: &PhaseSpaceGrid, cell: usize, from_group: usize) -> f64 {
        match &self.kernel {
            Kernel::Isotropic(fe) => {
                // Angular part integrates to exactly 1: L*M*dmu*dphi = 4 pi.
                let base = (cell * self.ngroups + from_group) * self.ngroups;
                let de = grid.de();
                fe[base..base + self.ngroups].iter().map(|&v| v * de).sum()
            }
            Kernel::Dense(_) => {
                let measure = grid.bin_measure();
                let mut acc = 0.0;
                for gt in 0..self.ngroups {
                    for dt in 0..self.n_dirs {
                        acc += self.transfer(cell, from_group, 0, gt, dt) * measure;
                    }
                }
                acc
            }
        }
    }
}

/// Residuals of the cross-section consistency identity
/// `v sigma = v sigma_c + sum over outgoing bins of v sigma' f * dmu dphi dE`
/// per (cell, incident group).
#[derive(Debug, Clone)]
pub struct ConservationReport {
    /// Residual per flat (cell, group) index.
    pub residuals: Vec<f64>,
    /// Largest absolute residual.
    pub max_abs: f64,
    /// (cell, group) pairs whose residual magnitude exceeds the tolerance.
    pub flagged: Vec<(usize, usize)>,
    pub tolerance: f64,
}

/// Evaluate the consistency residual for every (cell, incident group).
pub fn verify_conservation(mat: &MaterialModel, grid: &PhaseSpaceGrid) -> ConservationReport {
    let mut residuals = vec![0.0; mat.n_cells * mat.ngroups];
    let mut flagged = Vec::new();
    let mut max_abs: f64 = 0.0;
    for cell in 0..mat.n_cells {
        for g in 0..mat.ngroups {
            let v = mat.speed(g);
            let r = v * mat.sigma_total(cell, g)
                - (v * mat.sigma_capture(cell, g) + v * mat.kernel_row_sum(grid, cell, g));
            residuals[cell * mat.ngroups + g] = r;
            max_abs = max_abs.max(r.abs());
            if r.abs() > CONSERVATION_TOL {
                flagged.push((cell, g));
            }
        }
    }
    ConservationReport {
        residuals,
        max_abs,
        flagged,
        tolerance: CONSERVATION_TOL,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn grid_1cell(groups: usize) -> PhaseSpaceGrid {
        PhaseSpaceGrid::new(1, 1, 1, 1, 1, groups, 1.0, 1.0, 1.0, 20.0).unwrap()
    }

    /// Two-band slowing-down material: v*sigma = 1 everywhere, capture 0.1 in
    /// the top half and 1.0 in the bottom half, downscatter 0.045 from the
    /// top half to every group.
    pub(crate) fn two_band_material(grid: &PhaseSpaceGrid) -> MaterialModel {
        let g = grid.ngroups();
        let v = 1.0;
        let mut sigma_c = vec![0.0; g];
        let mut f_energy = vec![0.0; g * g];
        for gf in 0..g {
            let high = grid.energy_mid(gf) >= 10.0;
            sigma_c[gf] = if high { 0.1 } else { 1.0 };
            if high {
                for gt in 0..g {
                    f_energy[gf * g + gt] = 0.045;
                }
            }
        }
        MaterialModel::isotropic(
            grid,
            vec![1.0 / v; g],
            sigma_c,
            vec![v; g],
            vec![0.0; g],
            f_energy,
            true,
        )
        .unwrap()
    }

    #[test]
    fn rejects_capture_above_total() {
        let grid = grid_1cell(1);
        let err = MaterialModel::isotropic(
            &grid,
            vec![1.0],
            vec![1.5],
            vec![1.0],
            vec![0.0],
            vec![0.0],
            false,
        );
        assert!(err.is_err());
    }

    #[test]
    fn two_band_model_is_conservative() {
        let grid = grid_1cell(20);
        let mat = two_band_material(&grid);
        let report = verify_conservation(&mat, &grid);
        assert!(report.flagged.is_empty());
        // v sigma - (v sigma_c + 0.045 * 20) = 1 - (0.1 + 0.9) = 0
        assert!(report.max_abs < 1e-12, "max residual {}", report.max_abs);
    }

    #[test]
    fn scaled_kernel_reports_residual() {
        let grid = grid_1cell(20);
        let g = grid.ngroups();
        let mut sigma_c = vec![0.0; g];
        let mut f_energy = vec![0.0; g * g];
        for gf in 0..g {
            let high = grid.energy_mid(gf) >= 10.0;
            sigma_c[gf] = if high { 0.1 } else { 1.0 };
            if high {
                for gt in 0..g {
                    f_energy[gf * g + gt] = 0.045 * 1.01;
                }
            }
        }
        let mat = MaterialModel::isotropic(
            &grid,
            vec![1.0; g],
            sigma_c,
            vec![1.0; g],
            vec![0.0; g],
            f_energy,
            false,
        )
        .unwrap();
        let report = verify_conservation(&mat, &grid);
        // residual = 1 - (0.1 + 0.045*1.01*20) = -0.009 for high groups
        let high_res = report.residuals[10];
        assert!((high_res + 0.009).abs() < 1e-12, "residual {high_res}");
        assert!(!report.flagged.is_empty());
    }

    #[test]
    fn pure_absorber_residual_zero() {
        let grid = grid_1cell(1);
        let mat = MaterialModel::isotropic(
            &grid,
            vec![2.0],
            vec![2.0],
            vec![1.0],
            vec![0.0],
            vec![0.0],
            true,
        )
        .unwrap();
        let report = verify_conservation(&mat, &grid);
        assert_eq!(report.max_abs, 0.0);
        assert_eq!(mat.c_hat(0, 0), 1.0, "pure absorber reports c_hat = 1");
    }

    #[test]
    fn c_hat_matches_direct_bin_sum() {
        let grid = PhaseSpaceGrid::new(1, 1, 1, 4, 2, 3, 1.0, 1.0, 1.0, 6.0).unwrap();
        let g = grid.ngroups();
        let d = grid.n_dirs();
        let bins = g * d;
        // Dense kernel whose rows vary by incident group but not incident
        // direction, with sigma_hat = 0.7.
        let mut kernel = vec![0.0; bins * bins];
        for gf in 0..g {
            for fd in 0..d {
                for to in 0..bins {
                    kernel[(gf * d + fd) * bins + to] = 0.001 * ((gf * 7 + to * 3) % 11) as f64;
                }
            }
        }
        let mat = MaterialModel::dense(
            &grid,
            vec![1.0; g],
            vec![0.3; g],
            vec![1.0; g],
            vec![0.0; g],
            kernel.clone(),
            false,
        )
        .unwrap();
        for gf in 0..g {
            let mut direct = 0.0;
            for gt in 0..g {
                for dt in 0..d {
                    direct += kernel[(gf * d) * bins + gt * d + dt] * grid.bin_measure();
                }
            }
            direct /= 0.7;
            assert!(
                (mat.c_hat(0, gf) - direct).abs() <= 1e-12 * direct.max(1.0),
                "c_hat mismatch: {} vs {}",
                mat.c_hat(0, gf),
                direct
            );
        }
    }

    #[test]
    fn zero_sigma_hat_with_kernel_rejected() {
        let grid = grid_1cell(1);
        let err = MaterialModel::isotropic(
            &grid,
            vec![1.0],
            vec![1.0],
            vec![1.0],
            vec![0.0],
            vec![0.5],
            false,
        );
        assert!(err.is_err());
    }

    #[test]
    fn source_window_gates_in_time() {
        let grid = grid_1cell(1);
        let mat = MaterialModel::isotropic(
            &grid,
            vec![0.0],
            vec![0.0],
            vec![1.0],
            vec![3.0],
            vec![0.0],
            false,
        )
        .unwrap()
        .with_source_window(0.0, 50.0)
        .unwrap();
        assert_eq!(mat.source(0, 0, 10.0), 3.0);
        assert_eq!(mat.source(0, 0, 50.0), 0.0);
    }
}
