//! Packet counts over the phase-space grid at one instant.

use crate::error::{Error, Result};
use crate::grid::PhaseSpaceGrid;

/// Real-valued neutron counts per packet (cell, direction, group) plus the
/// current time. Counts are numbers of neutrons in the bin, not densities.
///
/// Raw arithmetic may drive entries negative; the solvers clamp stochastic
/// rates at zero for such entries and can optionally zero them outright, but
/// nothing here assumes non-negativity.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    n: Vec<f64>,
    t: f64,
}

impl PopulationState {
    pub fn zeros(grid: &PhaseSpaceGrid) -> Self {
        PopulationState {
            n: vec![0.0; grid.n_packets()],
            t: 0.0,
        }
    }

    pub fn from_vec(grid: &PhaseSpaceGrid, n: Vec<f64>, t: f64) -> Result<Self> {
        if n.len() != grid.n_packets() {
            return Err(Error::invalid(format!(
                "state has {} entries, grid has {} packets",
                n.len(),
                grid.n_packets()
            )));
        }
        Ok(PopulationState { n, t })
    }

    /// Fill from a function of (cell, dir, group).
    pub fn from_fn(grid: &PhaseSpaceGrid, t: f64, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut n = vec![0.0; grid.n_packets()];
        for (p, slot) in n.iter_mut().enumerate() {
            let (c, d, g) = grid.packet_coords(p);
            *slot = f(c, d, g);
        }
        PopulationState { n, t }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn set_t(&mut self, t: f64) {
        self.t = t;
    }

    pub fn get(&self, packet: usize) -> f64 {
        self.n[packet]
    }

    pub fn set(&mut self, packet: usize, value: f64) {
        self.n[packet] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.n
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.n
    }

    pub fn total(&self) -> f64 {
        self.n.iter().sum()
    }

    /// Error if any entry is NaN or infinite.
    pub fn check_finite(&self) -> Result<()> {
        if let Some(p) = self.n.iter().position(|v| !v.is_finite()) {
            return Err(Error::numerical(format!(
                "non-finite packet count {} at packet {p} (t = {})",
                self.n[p], self.t
            )));
        }
        Ok(())
    }
}
