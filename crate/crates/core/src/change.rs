//! Per-packet change accounting: every way a packet count can change in a
//! small time interval, with its probability rate.
//!
//! Each stochastic channel (capture, transfer, source) carries an increment
//! `delta` applied per event and a probability rate `rate` (events per unit
//! time). Streaming channels are deterministic: their `delta` is the flow per
//! unit time and `rate` is 1. The drift of a packet is the sum of
//! `rate * delta` over its entries; noise amplitudes are `delta * sqrt(rate)`
//! over the stochastic entries only, with a transfer event shared between its
//! source and destination packets.

use crate::error::Result;
use crate::grid::{Axis, PhaseSpaceGrid};
use crate::material::MaterialModel;
use crate::population::PopulationState;

/// What kind of change an entry describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeKind {
    Capture,
    TransferOut,
    TransferIn,
    Source,
    Stream,
}

/// One row of the change table for a packet.
///
/// For stochastic kinds, `delta` is the increment per event (e.g. -1 for a
/// capture, `-1/c_hat` for a transfer out) and `rate` the event probability
/// per unit time. For `Stream`, `delta` is the deterministic flow per unit
/// time and `rate` is 1.
#[derive(Debug, Clone, Copy)]
pub struct ChangeEntry {
    pub delta: f64,
    pub rate: f64,
    pub kind: ChangeKind,
}

/// All changes affecting one packet, plus a flag recording whether a negative
/// packet count was clamped to zero while computing rates.
#[derive(Debug, Clone)]
pub struct ChangeTable {
    pub entries: Vec<ChangeEntry>,
    pub clamped: bool,
}

impl ChangeTable {
    /// Sum of `rate * delta`: the packet's drift (rate of change).
    pub fn drift(&self) -> f64 {
        self.entries.iter().map(|e| e.rate * e.delta).sum()
    }

    pub fn stochastic(&self) -> impl Iterator<Item = &ChangeEntry> {
        self.entries.iter().filter(|e| e.kind != ChangeKind::Stream)
    }
}

fn clamped(n: f64, flag: &mut bool) -> f64 {
    if n < 0.0 {
        *flag = true;
        0.0
    } else {
        n
    }
}

/// Enumerate every change affecting the packet at (cell, dir, group).
///
/// Streaming entries cover the six faces with upwind neighbors resolved
/// through the grid's boundary rules; collapsed axes contribute canceling
/// in/out pairs. Channels whose rate is exactly zero are omitted.
pub fn change_table(
    state: &PopulationState,
    mat: &MaterialModel,
    grid: &PhaseSpaceGrid,
    cell: (usize, usize, usize),
    dir: (usize, usize),
    group: usize,
) -> Result<ChangeTable> {
    grid.check_indices(cell, dir, group)?;
    let (l, m) = dir;
    let cell_flat = grid.cell_index(cell.0, cell.1, cell.2);
    let dir_flat = grid.dir_index(l, m);
    let packet = grid.packet_index(cell_flat, dir_flat, group);

    let mut entries = Vec::new();
    let mut clamp_flag = false;
    let v = mat.speed(group);
    let n_self = state.get(packet);
    let cos = grid.direction_cosines(l, m);
    let widths = [grid.dx(), grid.dy(), grid.dz()];

    // Streaming: one inflow and one outflow entry per axis.
    for (axis_i, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
        let c = [cos.0, cos.1, cos.2][axis_i];
        let w = widths[axis_i];
        let inflow = match grid.upwind_neighbor(cell, dir, axis, c) {
            Some((nc, nd)) => {
                let np = grid.packet_index(
                    grid.cell_index(nc.0, nc.1, nc.2),
                    grid.dir_index(nd.0, nd.1),
                    group,
                );
                c.abs() * v * state.get(np) / w
            }
            None => 0.0,
        };
        entries.push(ChangeEntry {
            delta: inflow,
            rate: 1.0,
            kind: ChangeKind::Stream,
        });
        entries.push(ChangeEntry {
            delta: -(c.abs() * v * n_self / w),
            rate: 1.0,
            kind: ChangeKind::Stream,
        });
    }

    let n_pos = clamped(n_self, &mut clamp_flag);

    // Capture.
    let cap_rate = v * mat.sigma_capture(cell_flat, group) * n_pos;
    if cap_rate > 0.0 {
        entries.push(ChangeEntry {
            delta: -1.0,
            rate: cap_rate,
            kind: ChangeKind::Capture,
        });
    }

    // Source: births per unit time into this packet.
    let src_rate =
        mat.source(cell_flat, group, state.t()) * grid.cell_volume() * grid.bin_measure();
    if src_rate > 0.0 {
        entries.push(ChangeEntry {
            delta: 1.0,
            rate: src_rate,
            kind: ChangeKind::Source,
        });
    }

    // Transfers against every other bin of the same cell.
    let measure = grid.bin_measure();
    let c_hat = mat.c_hat(cell_flat, group);
    for g2 in 0..grid.ngroups() {
        for d2 in 0..grid.n_dirs() {
            let out_rate = v * mat.transfer(cell_flat, group, dir_flat, g2, d2) * n_pos * measure;
            if out_rate > 0.0 {
                entries.push(ChangeEntry {
                    delta: -1.0 / c_hat,
                    rate: out_rate,
                    kind: ChangeKind::TransferOut,
                });
            }
            let n_other = clamped(
                state.get(grid.packet_index(cell_flat, d2, g2)),
                &mut clamp_flag,
            );
            let in_rate =
                mat.speed(g2) * mat.transfer(cell_flat, g2, d2, group, dir_flat) * n_other * measure;
            if in_rate > 0.0 {
                entries.push(ChangeEntry {
                    delta: 1.0,
                    rate: in_rate,
                    kind: ChangeKind::TransferIn,
                });
            }
        }
    }

    Ok(ChangeTable {
        entries,
        clamped: clamp_flag,
    })
}

/// Per-packet drift assembled from the change tables.
#[derive(Debug, Clone)]
pub struct Drift {
    pub per_packet: Vec<f64>,
    /// Number of packets whose rate evaluation clamped a negative count.
    pub clamp_events: u64,
}

/// Rate of change of every packet: `mu_i = sum_j rate_j * delta_j`.
///
/// With the noise switched off this is exactly the one-step expected-value
/// update divided by the time step.
pub fn drift_vector(
    state: &PopulationState,
    mat: &MaterialModel,
    grid: &PhaseSpaceGrid,
) -> Result<Drift> {
    state.check_finite()?;
    let mut per_packet = vec![0.0; grid.n_packets()];
    let mut clamp_events = 0;
    for (p, slot) in per_packet.iter_mut().enumerate() {
        let (cell, dir, g) = grid.packet_coords(p);
        let (i, j, k) = grid.cell_coords(cell);
        let (l, m) = grid.dir_coords(dir);
        let table = change_table(state, mat, grid, (i, j, k), (l, m), g)?;
        if table.clamped {
            clamp_events += 1;
        }
        *slot = table.drift();
    }
    Ok(Drift {
        per_packet,
        clamp_events,
    })
}

/// The stochastic channel a noise column belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Capture,
    Source,
    /// One transfer event between an ordered (from, to) bin pair of a cell;
    /// the column touches both packets with the same underlying draw.
    Transfer,
}

/// One column of the noise-amplitude matrix: the per-packet coefficients
/// multiplying a single independent unit-variance draw.
#[derive(Debug, Clone)]
pub struct NoiseColumn {
    pub kind: ColumnKind,
    /// (packet, coefficient) pairs; at most two entries.
    pub entries: Vec<(usize, f64)>,
}

/// Sparse noise-amplitude matrix `C`: entry `c_{i,j} = delta_{j,i} sqrt(rate_j)`
/// for stochastic change `j` and packet `i`.
#[derive(Debug, Clone)]
pub struct NoiseMatrix {
    pub n_packets: usize,
    pub columns: Vec<NoiseColumn>,
}

impl NoiseMatrix {
    /// Dense `C * C^T`, the diffusion matrix implied by the columns.
    pub fn cct(&self) -> Vec<f64> {
        let n = self.n_packets;
        let mut v = vec![0.0; n * n];
        for col in &self.columns {
            for &(i, ci) in &col.entries {
                for &(j, cj) in &col.entries {
                    v[i * n + j] += ci * cj;
                }
            }
        }
        v
    }
}

/// Noise amplitudes for every stochastic change in the system.
///
/// A transfer between bins a and b of a cell is one change: its column holds
/// `-sqrt(rate)/c_hat` at the source packet and `+sqrt(rate)` at the
/// destination, so the two share one draw. Zero-rate columns are omitted.
pub fn noise_amplitudes(
    state: &PopulationState,
    mat: &MaterialModel,
    grid: &PhaseSpaceGrid,
) -> Result<NoiseMatrix> {
    state.check_finite()?;
    let mut columns = Vec::new();
    let measure = grid.bin_measure();
    let bin_count = grid.n_dirs() * grid.ngroups();

    for cell in 0..grid.n_cells() {
        for g in 0..grid.ngroups() {
            let v = mat.speed(g);
            for d in 0..grid.n_dirs() {
                let p = grid.packet_index(cell, d, g);
                let n_pos = state.get(p).max(0.0);

                let cap_rate = v * mat.sigma_capture(cell, g) * n_pos;
                if cap_rate > 0.0 {
                    columns.push(NoiseColumn {
                        kind: ColumnKind::Capture,
                        entries: vec![(p, -cap_rate.sqrt())],
                    });
                }
                let src_rate =
                    mat.source(cell, g, state.t()) * grid.cell_volume() * measure;
                if src_rate > 0.0 {
                    columns.push(NoiseColumn {
                        kind: ColumnKind::Source,
                        entries: vec![(p, src_rate.sqrt())],
                    });
                }
            }
        }
        // Ordered bin pairs: one column per transfer event.
        for from in 0..bin_count {
            let (fd, fg) = (from / grid.ngroups(), from % grid.ngroups());
            let p_from = grid.packet_index(cell, fd, fg);
            let n_from = state.get(p_from).max(0.0);
            if n_from == 0.0 {
                continue;
            }
            let v = mat.speed(fg);
            let c_hat = mat.c_hat(cell, fg);
            for to in 0..bin_count {
                let (td, tg) = (to / grid.ngroups(), to % grid.ngroups());
                let rate = v * mat.transfer(cell, fg, fd, tg, td) * n_from * measure;
                if rate <= 0.0 {
                    continue;
                }
                let s = rate.sqrt();
                let p_to = grid.packet_index(cell, td, tg);
                let entries = if p_from == p_to {
                    let coef = (1.0 - 1.0 / c_hat) * s;
                    if coef == 0.0 {
                        continue;
                    }
                    vec![(p_from, coef)]
                } else {
                    vec![(p_from, -s / c_hat), (p_to, s)]
                };
                columns.push(NoiseColumn {
                    kind: ColumnKind::Transfer,
                    entries,
                });
            }
        }
    }
    Ok(NoiseMatrix {
        n_packets: grid.n_packets(),
        columns,
    })
}
