//! Discretized phase space: position × direction × energy.
//!
//! Position is split into rectangular cells of size `dx × dy × dz`,
//! direction into `L` intervals in the cosine `mu` and `M` intervals in the
//! azimuth `phi`, and energy into `G` groups of width `E_max / G`. A *packet*
//! is one (cell, direction, group) bin; the packet count `n` is a number of
//! neutrons, not a density.

use crate::error::{Error, Result};

/// Boundary treatment for one face of the spatial box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Ghost cell holds zero neutrons; outflow is lost.
    Vacuum,
    /// Ghost cell holds the mirror packet (direction cosine flipped on the
    /// face's axis).
    Reflecting,
}

/// Spatial axes of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Uniform discretization of position, direction, and energy.
///
/// The y and z axes *collapse* when given a single interval: the medium is
/// treated as uniform along them and streaming in and out of a face cancels
/// exactly. The x axis never collapses; its face boundary conditions apply
/// even with one interval.
#[derive(Debug, Clone)]
pub struct PhaseSpaceGrid {
    nx: usize,
    ny: usize,
    nz: usize,
    nmu: usize,
    nphi: usize,
    ngroups: usize,
    x_max: f64,
    y_max: f64,
    z_max: f64,
    e_max: f64,
    bc_x: (Boundary, Boundary),
    bc_y: (Boundary, Boundary),
    bc_z: (Boundary, Boundary),
}

impl PhaseSpaceGrid {
    /// Build a grid with vacuum boundaries on every face.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nx: usize,
        ny: usize,
        nz: usize,
        nmu: usize,
        nphi: usize,
        ngroups: usize,
        x_max: f64,
        y_max: f64,
        z_max: f64,
        e_max: f64,
    ) -> Result<Self> {
        let counts = [nx, ny, nz, nmu, nphi, ngroups];
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::invalid("all interval counts must be >= 1"));
        }
        let extents = [x_max, y_max, z_max, e_max];
        if extents.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("all domain extents must be positive and finite"));
        }
        Ok(PhaseSpaceGrid {
            nx,
            ny,
            nz,
            nmu,
            nphi,
            ngroups,
            x_max,
            y_max,
            z_max,
            e_max,
            bc_x: (Boundary::Vacuum, Boundary::Vacuum),
            bc_y: (Boundary::Vacuum, Boundary::Vacuum),
            bc_z: (Boundary::Vacuum, Boundary::Vacuum),
        })
    }

    /// Set the boundary pair (low face, high face) for one axis.
    pub fn with_boundaries(mut self, axis: Axis, low: Boundary, high: Boundary) -> Self {
        match axis {
            Axis::X => self.bc_x = (low, high),
            Axis::Y => self.bc_y = (low, high),
            Axis::Z => self.bc_z = (low, high),
        }
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn nmu(&self) -> usize {
        self.nmu
    }
    pub fn nphi(&self) -> usize {
        self.nphi
    }
    pub fn ngroups(&self) -> usize {
        self.ngroups
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn e_max(&self) -> f64 {
        self.e_max
    }
    pub fn boundaries(&self, axis: Axis) -> (Boundary, Boundary) {
        match axis {
            Axis::X => self.bc_x,
            Axis::Y => self.bc_y,
            Axis::Z => self.bc_z,
        }
    }

    pub fn dx(&self) -> f64 {
        self.x_max / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.y_max / self.ny as f64
    }
    pub fn dz(&self) -> f64 {
        self.z_max / self.nz as f64
    }
    /// Width of one direction-cosine interval, `2 / L`.
    pub fn dmu(&self) -> f64 {
        2.0 / self.nmu as f64
    }
    /// Width of one azimuth interval, `2π / M`.
    pub fn dphi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.nphi as f64
    }
    /// Width of one energy group, `E_max / G`.
    pub fn de(&self) -> f64 {
        self.e_max / self.ngroups as f64
    }

    /// Lower edge of x-interval `i` (0-based), exactly `i * dx`.
    pub fn x_edge(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Lower edge of energy group `g` (0-based), exactly `g * dE`.
    pub fn energy_edge(&self, g: usize) -> f64 {
        g as f64 * self.de()
    }

    /// Midpoint of energy group `g`.
    pub fn energy_mid(&self, g: usize) -> f64 {
        (g as f64 + 0.5) * self.de()
    }

    /// Direction-cosine midpoint of bin `l`: `-1 + (l + 1/2) dmu`.
    ///
    /// Midpoints keep every bin moving: no bin sits at `mu = 0`.
    pub fn mu_mid(&self, l: usize) -> f64 {
        -1.0 + (l as f64 + 0.5) * self.dmu()
    }

    /// Azimuth midpoint of bin `m`.
    pub fn phi_mid(&self, m: usize) -> f64 {
        (m as f64 + 0.5) * self.dphi()
    }

    /// Direction cosines (mu_x, mu_y, mu_z) for direction bin (l, m).
    pub fn direction_cosines(&self, l: usize, m: usize) -> (f64, f64, f64) {
        let mu = self.mu_mid(l);
        let s = (1.0 - mu * mu).max(0.0).sqrt();
        let phi = self.phi_mid(m);
        (mu, s * phi.cos(), s * phi.sin())
    }

    /// Measure of one direction × energy bin, `dmu * dphi * dE`.
    pub fn bin_measure(&self) -> f64 {
        self.dmu() * self.dphi() * self.de()
    }

    /// Volume of one spatial cell.
    pub fn cell_volume(&self) -> f64 {
        self.dx() * self.dy() * self.dz()
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }
    pub fn n_dirs(&self) -> usize {
        self.nmu * self.nphi
    }
    pub fn n_packets(&self) -> usize {
        self.n_cells() * self.n_dirs() * self.ngroups
    }

    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny && k < self.nz);
        (i * self.ny + j) * self.nz + k
    }

    pub fn cell_coords(&self, cell: usize) -> (usize, usize, usize) {
        let k = cell % self.nz;
        let rest = cell / self.nz;
        (rest / self.ny, rest % self.ny, k)
    }

    pub fn dir_index(&self, l: usize, m: usize) -> usize {
        debug_assert!(l < self.nmu && m < self.nphi);
        l * self.nphi + m
    }

    pub fn dir_coords(&self, dir: usize) -> (usize, usize) {
        (dir / self.nphi, dir % self.nphi)
    }

    /// Flat packet index for (cell, direction, group).
    pub fn packet_index(&self, cell: usize, dir: usize, group: usize) -> usize {
        debug_assert!(cell < self.n_cells() && dir < self.n_dirs() && group < self.ngroups);
        (cell * self.n_dirs() + dir) * self.ngroups + group
    }

    pub fn packet_coords(&self, packet: usize) -> (usize, usize, usize) {
        let g = packet % self.ngroups;
        let rest = packet / self.ngroups;
        (rest / self.n_dirs(), rest % self.n_dirs(), g)
    }

    /// Check that (cell coords, dir coords, group) address a valid packet.
    pub fn check_indices(&self, cell: (usize, usize, usize), dir: (usize, usize), group: usize) -> Result<()> {
        let (i, j, k) = cell;
        let (l, m) = dir;
        if i >= self.nx || j >= self.ny || k >= self.nz {
            return Err(Error::IndexOutOfRange(format!(
                "cell ({i},{j},{k}) outside {}x{}x{}",
                self.nx, self.ny, self.nz
            )));
        }
        if l >= self.nmu || m >= self.nphi {
            return Err(Error::IndexOutOfRange(format!(
                "direction ({l},{m}) outside {}x{}",
                self.nmu, self.nphi
            )));
        }
        if group >= self.ngroups {
            return Err(Error::IndexOutOfRange(format!(
                "group {group} outside {}",
                self.ngroups
            )));
        }
        Ok(())
    }

    /// Upwind neighbor of `cell` along `axis` for a packet moving with
    /// direction cosine `cos_axis`, together with the direction bin the
    /// neighbor packet carries.
    ///
    /// Returns `None` for a vacuum ghost. Collapsed axes (single interval)
    /// return the cell itself so inflow and outflow cancel, matching a medium
    /// uniform along that axis.
    pub fn upwind_neighbor(
        &self,
        cell: (usize, usize, usize),
        dir: (usize, usize),
        axis: Axis,
        cos_axis: f64,
    ) -> Option<((usize, usize, usize), (usize, usize))> {
        let (count, pos, bc) = match axis {
            Axis::X => (self.nx, cell.0, self.bc_x),
            Axis::Y => (self.ny, cell.1, self.bc_y),
            Axis::Z => (self.nz, cell.2, self.bc_z),
        };
        // Only y and z collapse to a uniform medium; a single x-interval
        // still sees its face boundary conditions.
        if count == 1 && axis != Axis::X {
            return Some((cell, dir));
        }
        // Moving in +axis direction: upwind neighbor sits at pos-1;
        // moving in -axis: at pos+1.
        let inside = if cos_axis > 0.0 {
            pos.checked_sub(1)
        } else if pos + 1 < count {
            Some(pos + 1)
        } else {
            None
        };
        if let Some(p) = inside {
            let mut c = cell;
            match axis {
                Axis::X => c.0 = p,
                Axis::Y => c.1 = p,
                Axis::Z => c.2 = p,
            }
            return Some((c, dir));
        }
        // At a boundary face.
        let face = if cos_axis > 0.0 { bc.0 } else { bc.1 };
        match face {
            Boundary::Vacuum => None,
            Boundary::Reflecting => {
                let mirrored = self.mirror_dir(dir, axis)?;
                Some((cell, mirrored))
            }
        }
    }

    /// Direction bin after reflection off a face normal to `axis`.
    ///
    /// X flips `mu` (bin `l -> L-1-l`); Z flips `sin phi` (bin `m -> M-1-m`);
    /// Y flips `cos phi` (`m -> M/2-1-m mod M`, needs even `M`). Returns
    /// `None` when the azimuth count cannot represent the mirror.
    pub fn mirror_dir(&self, dir: (usize, usize), axis: Axis) -> Option<(usize, usize)> {
        let (l, m) = dir;
        match axis {
            Axis::X => Some((self.nmu - 1 - l, m)),
            Axis::Z => Some((l, self.nphi - 1 - m)),
            Axis::Y => {
                if self.nphi % 2 != 0 {
                    return None;
                }
                let half = self.nphi / 2;
                Some((l, (half + self.nphi - 1 - m) % self.nphi))
            }
        }
    }
}
