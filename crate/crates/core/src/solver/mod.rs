//! Explicit Euler-Maruyama stepping of the stochastic difference systems.
//!
//! The general stepper advances a full phase-space state using the change
//! machinery of [`crate::change`]; the slab and energy-group steppers in
//! [`slab`] and [`energy`] are hand-written special cases. All of them share
//! the conventions: drift times `dt`, plus `delta * sqrt(rate * dt) * eta`
//! per stochastic channel, a transfer event's draw shared between its two
//! packets, square-root arguments clamped at zero, and negative counts zeroed
//! (and logged) after the full update. With the noise off, a step is exactly
//! the expected-value update.

pub mod energy;
pub mod slab;

use crate::change::drift_vector;
use crate::error::{Error, Result};
use crate::grid::{Axis, Boundary, PhaseSpaceGrid};
use crate::material::MaterialModel;
use crate::path::{Observable, PathResult, Snapshot};
use crate::population::PopulationState;
use crate::sheets::{channel, SheetSampler};

/// Noise plugged into one step: off (deterministic) or keyed draws for a
/// given step index.
#[derive(Clone, Copy)]
pub enum NoiseSource<'a> {
    Off,
    Keyed { sampler: &'a SheetSampler, step: u64 },
}

impl NoiseSource<'_> {
    fn eta(&self, chan: u64, a: u64, b: u64) -> f64 {
        match self {
            NoiseSource::Off => 0.0,
            NoiseSource::Keyed { sampler, step } => sampler.keyed_normal(chan, *step, a, b),
        }
    }

    fn is_off(&self) -> bool {
        matches!(self, NoiseSource::Off)
    }
}

/// Result of one accepted step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: PopulationState,
    pub clamp_events: u64,
    pub clamp_deficit: f64,
}

/// Advance the full phase-space state by one step of length `dt`. Negative
/// counts persist (stochastic rates still clamp at zero); see
/// [`step_general_with`] to zero them instead.
///
/// Preconditions: the explicit streaming step must satisfy
/// `v_g |cos| dt / width <= 1` on every axis for every (group, direction).
pub fn step_general(
    state: &PopulationState,
    mat: &MaterialModel,
    grid: &PhaseSpaceGrid,
    dt: f64,
    noise: &NoiseSource,
) -> Result<StepOutcome> {
    step_general_with(state, mat, grid, dt, noise, false)
}

/// [`step_general`] with an explicit negative-count policy. Zeroing keeps
/// counts non-negative but adds the logged deficit as mass; the default
/// (negatives persist) keeps the update linear so ensemble means track the
/// deterministic solution.
pub fn step_general_with(
    state: &PopulationState,
    mat: &MaterialModel,
    grid: &PhaseSpaceGrid,
    dt: f64,
    noise: &NoiseSource,
    zero_negatives: bool,
) -> Result<StepOutcome> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    check_cfl(mat, grid, dt)?;

    let drift = drift_vector(state, mat, grid)?;
    let mut delta: Vec<f64> = drift.per_packet.iter().map(|d| d * dt).collect();

    if !noise.is_off() {
        apply_noise(state, mat, grid, dt, noise, &mut delta);
    }

    let mut clamp_events = 0u64;
    let mut clamp_deficit = 0.0;
    let mut next = state.clone();
    for p in 0..grid.n_packets() {
        let mut v = state.get(p) + delta[p];
        if !v.is_finite() {
            return Err(Error::numerical(format!(
                "packet {p} became non-finite at t = {} (dt = {dt})",
                state.t()
            )));
        }
        if v < 0.0 {
            clamp_events += 1;
            if zero_negatives {
                clamp_deficit += -v;
                v = 0.0;
            }
        }
        next.set(p, v);
    }
    next.set_t(state.t() + dt);
    Ok(StepOutcome {
        state: next,
        clamp_events,
        clamp_deficit,
    })
}

fn check_cfl(mat: &MaterialModel, grid: &PhaseSpaceGrid, dt: f64) -> Result<()> {
    let widths = [grid.dx(), grid.dy(), grid.dz()];
    let active = [grid.nx() > 1, grid.ny() > 1, grid.nz() > 1];
    for g in 0..grid.ngroups() {
        let v = mat.speed(g);
        for l in 0..grid.nmu() {
            for m in 0..grid.nphi() {
                let cos = grid.direction_cosines(l, m);
                for (ai, &c) in [cos.0, cos.1, cos.2].iter().enumerate() {
                    if !active[ai] {
                        continue;
                    }
                    let courant = v * c.abs() * dt / widths[ai];
                    if courant > 1.0 + 1e-12 {
                        return Err(Error::invalid(format!(
                            "explicit step unstable: v |cos| dt / width = {courant:.6} > 1 \
                             (group {g}, direction ({l},{m}), axis {ai})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Stochastic increments: capture and source per packet, one shared draw per
/// ordered transfer pair of each cell.
fn apply_noise(
    state: &PopulationState,
    mat: &MaterialModel,
    grid: &PhaseSpaceGrid,
    dt: f64,
    noise: &NoiseSource,
    delta: &mut [f64],
) {
    let measure = grid.bin_measure();
    let volume = grid.cell_volume();
    let bins = grid.n_dirs() * grid.ngroups();

    for cell in 0..grid.n_cells() {
        for g in 0..grid.ngroups() {
            let v = mat.speed(g);
            let sc = mat.sigma_capture(cell, g);
            let q = mat.source(cell, g, state.t());
            for d in 0..grid.n_dirs() {
                let p = grid.packet_index(cell, d, g);
                let n_pos = state.get(p).max(0.0);
                let cap_rate = v * sc * n_pos;
                if cap_rate > 0.0 {
                    delta[p] -= (cap_rate * dt).sqrt() * noise.eta(channel::CAPTURE, p as u64, 0);
                }
                let src_rate = q * volume * measure;
                if src_rate > 0.0 {
                    delta[p] += (src_rate * dt).sqrt() * noise.eta(channel::SOURCE, p as u64, 0);
                }
            }
        }
        for from in 0..bins {
            let (fd, fg) = (from / grid.ngroups(), from % grid.ngroups());
            let p_from = grid.packet_index(cell, fd, fg);
            let n_from = state.get(p_from).max(0.0);
            if n_from == 0.0 {
                continue;
            }
            let v = mat.speed(fg);
            let c_hat = mat.c_hat(cell, fg);
            for to in 0..bins {
                let (td, tg) = (to / grid.ngroups(), to % grid.ngroups());
                let rate = v * mat.transfer(cell, fg, fd, tg, td) * n_from * measure;
                if rate <= 0.0 {
                    continue;
                }
                let s = (rate * dt).sqrt()
                    * noise.eta(channel::TRANSFER, cell as u64, (from * bins + to) as u64);
                let p_to = grid.packet_index(cell, td, tg);
                if p_from == p_to {
                    delta[p_from] += (1.0 - 1.0 / c_hat) * s;
                } else {
                    delta[p_from] -= s / c_hat;
                    delta[p_to] += s;
                }
            }
        }
    }
}

/// A complete general-geometry problem: grid, material, initial state, step.
#[derive(Debug, Clone)]
pub struct GeneralProblem {
    pub grid: PhaseSpaceGrid,
    pub material: MaterialModel,
    pub initial: PopulationState,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    /// Zero negative counts after each step; off by default.
    pub zero_negatives: bool,
}

impl GeneralProblem {
    pub fn validate(&self) -> Result<()> {
        self.initial.check_finite()?;
        if self.initial.as_slice().iter().any(|&n| n < 0.0) {
            return Err(Error::invalid("initial counts must be non-negative"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::invalid("dt must be positive"));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::invalid("t_end must be non-negative"));
        }
        check_cfl(&self.material, &self.grid, self.dt)?;
        steps_for(self.t_end, self.dt)?;
        Ok(())
    }

    /// Run one sample path (noise on).
    pub fn run(&self, seed: u64) -> Result<PathResult> {
        self.run_mode(seed, true)
    }

    /// Run with all noise terms zero; output is independent of the seed.
    pub fn run_deterministic(&self) -> Result<PathResult> {
        self.run_mode(0, false)
    }

    fn run_mode(&self, seed: u64, stochastic: bool) -> Result<PathResult> {
        self.validate()?;
        let grid = &self.grid;
        let steps = steps_for(self.t_end, self.dt)?;
        let sampler = SheetSampler::new(seed);

        let mut state = self.initial.clone();
        state.set_t(0.0);
        let mut times = Vec::with_capacity(steps + 1);
        let mut population = Vec::with_capacity(steps + 1);
        let mut left = Vec::with_capacity(steps + 1);
        let mut right = Vec::with_capacity(steps + 1);
        let mut snapshots = Vec::new();
        let mut clamp_events = 0u64;
        let mut clamp_deficit = 0.0;

        for k in 0..=steps {
            let t = k as f64 * self.dt;
            times.push(t);
            population.push(state.total());
            let (l, r) = x_leakage_rates(&state, &self.material, grid);
            left.push(l);
            right.push(r);
            record_snapshots(&mut snapshots, &self.snapshot_times, t, self.dt, &state);
            if k == steps {
                break;
            }
            let noise = if stochastic {
                NoiseSource::Keyed {
                    sampler: &sampler,
                    step: k as u64,
                }
            } else {
                NoiseSource::Off
            };
            let out = step_general_with(&state, &self.material, grid, self.dt, &noise, self.zero_negatives)?;
            state = out.state;
            clamp_events += out.clamp_events;
            clamp_deficit += out.clamp_deficit;
        }

        Ok(PathResult {
            times,
            observables: vec![
                Observable {
                    name: "population".into(),
                    values: population,
                },
                Observable {
                    name: "left_leakage".into(),
                    values: left,
                },
                Observable {
                    name: "right_leakage".into(),
                    values: right,
                },
            ],
            snapshots,
            clamp_events,
            clamp_deficit,
            seed,
        })
    }
}

/// Outflow rates through vacuum x-faces (zero for reflecting faces).
fn x_leakage_rates(state: &PopulationState, mat: &MaterialModel, grid: &PhaseSpaceGrid) -> (f64, f64) {
    let (bc_low, bc_high) = grid.boundaries(Axis::X);
    let dx = grid.dx();
    let mut left = 0.0;
    let mut right = 0.0;
    for g in 0..grid.ngroups() {
        let v = mat.speed(g);
        for l in 0..grid.nmu() {
            for m in 0..grid.nphi() {
                let mu = grid.direction_cosines(l, m).0;
                let d = grid.dir_index(l, m);
                for j in 0..grid.ny() {
                    for k in 0..grid.nz() {
                        if mu < 0.0 && bc_low == Boundary::Vacuum {
                            let p = grid.packet_index(grid.cell_index(0, j, k), d, g);
                            left += mu.abs() * v * state.get(p) / dx;
                        }
                        if mu > 0.0 && bc_high == Boundary::Vacuum {
                            let p = grid.packet_index(grid.cell_index(grid.nx() - 1, j, k), d, g);
                            right += mu * v * state.get(p) / dx;
                        }
                    }
                }
            }
        }
    }
    (left, right)
}

pub(crate) fn record_snapshots(
    snapshots: &mut Vec<Snapshot>,
    wanted: &[f64],
    t: f64,
    dt: f64,
    state: &PopulationState,
) {
    for &ts in wanted {
        if (t - ts).abs() < 0.5 * dt {
            snapshots.push(Snapshot {
                t,
                data: state.as_slice().to_vec(),
            });
        }
    }
}

/// Number of steps covering `[0, t_end]`; `t_end` must be a step multiple.
pub(crate) fn steps_for(t_end: f64, dt: f64) -> Result<usize> {
    let steps = (t_end / dt).round();
    if (steps * dt - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::invalid(format!(
            "t_end {t_end} is not a whole number of steps of dt {dt}"
        )));
    }
    Ok(steps as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture_only_problem(n0: f64, v_sigma_c: f64, dt: f64, t_end: f64) -> GeneralProblem {
        let grid = PhaseSpaceGrid::new(1, 1, 1, 1, 1, 1, 1.0, 1.0, 1.0, 1.0).unwrap();
        let material = MaterialModel::isotropic(
            &grid,
            vec![v_sigma_c],
            vec![v_sigma_c],
            vec![1.0],
            vec![0.0],
            vec![0.0],
            false,
        )
        .unwrap();
        let initial = PopulationState::from_vec(&grid, vec![n0], 0.0).unwrap();
        GeneralProblem {
            grid,
            material,
            initial,
            dt,
            t_end,
            snapshot_times: vec![],
            zero_negatives: false,
        }
    }

    #[test]
    fn noise_off_capture_decay_tracks_exponential() {
        // n' = -0.1 n from 100: the explicit scheme lands within O(dt) of
        // 100 e^{-0.1} = 90.484 after t = 1 and 36.79 after t = 10.
        let prob = capture_only_problem(100.0, 0.1, 0.01, 1.0);
        let r = prob.run_deterministic().unwrap();
        let end = r.final_value("population").unwrap();
        assert!((end - 90.4837).abs() < 0.01, "end {end}");

        let prob10 = capture_only_problem(100.0, 0.1, 0.01, 10.0);
        let r10 = prob10.run_deterministic().unwrap();
        let end10 = r10.final_value("population").unwrap();
        assert!((end10 - 36.788).abs() < 0.03, "end {end10}");
    }

    #[test]
    fn zero_state_zero_source_stays_zero() {
        let prob = capture_only_problem(0.0, 0.5, 0.05, 2.0);
        let r = prob.run(12345).unwrap();
        for v in r.observable("population").unwrap() {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn pure_transfer_conserves_drift_total() {
        // Two groups exchanging neutrons, no capture, c_hat = 1: the drift
        // conserves the total exactly.
        let grid = PhaseSpaceGrid::new(1, 1, 1, 1, 1, 2, 1.0, 1.0, 1.0, 2.0).unwrap();
        let de = grid.de();
        let mut f_energy = vec![0.0; 4];
        f_energy[1] = 1.0 / de; // 0 -> 1
        f_energy[2] = 1.0 / de; // 1 -> 0
        let material = MaterialModel::isotropic(
            &grid,
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            f_energy,
            true,
        )
        .unwrap();
        let initial = PopulationState::from_vec(&grid, vec![30.0, 10.0], 0.0).unwrap();
        let prob = GeneralProblem {
            grid,
            material,
            initial,
            dt: 0.01,
            t_end: 1.0,
            snapshot_times: vec![],
            zero_negatives: false,
        };
        let r = prob.run_deterministic().unwrap();
        for v in r.observable("population").unwrap() {
            assert!((v - 40.0).abs() < 1e-10, "total {v} drifted");
        }
    }

    #[test]
    fn cfl_violation_is_usage_error() {
        let grid = PhaseSpaceGrid::new(4, 1, 1, 2, 1, 1, 1.0, 1.0, 1.0, 1.0).unwrap();
        let material = MaterialModel::isotropic(
            &grid,
            vec![0.0; 4],
            vec![0.0; 4],
            vec![10.0],
            vec![0.0; 4],
            vec![0.0; 4],
            false,
        )
        .unwrap();
        let state = PopulationState::zeros(&grid);
        // v dt / dx = 10 * 0.2 / 0.25 = 8 > 1
        let err = step_general(&state, &material, &grid, 0.2, &NoiseSource::Off);
        assert!(err.is_err());
    }

    #[test]
    fn deterministic_run_ignores_seed() {
        let prob = capture_only_problem(50.0, 0.3, 0.02, 1.0);
        let a = prob.run_deterministic().unwrap();
        let b = prob.run_deterministic().unwrap();
        assert_eq!(
            a.observable("population").unwrap(),
            b.observable("population").unwrap()
        );
    }
}
