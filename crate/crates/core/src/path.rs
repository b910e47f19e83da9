//! Time series produced by one sample path of a solver or Monte Carlo run.

use crate::error::{Error, Result};

/// One named observable series; `values.len() == times.len()` always.
#[derive(Debug, Clone)]
pub struct Observable {
    pub name: String,
    pub values: Vec<f64>,
}

/// Full state recorded at one configured time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub data: Vec<f64>,
}

/// Result of one sample path: observable time series on a uniform time mesh,
/// optional state snapshots, and clamp diagnostics.
#[derive(Debug, Clone)]
pub struct PathResult {
    pub times: Vec<f64>,
    pub observables: Vec<Observable>,
    pub snapshots: Vec<Snapshot>,
    /// Number of packet-steps whose post-update count was negative.
    pub clamp_events: u64,
    /// Population added by zeroing negative counts (zero unless the problem
    /// opted into zeroing); bounds the bias that policy introduces.
    pub clamp_deficit: f64,
    pub seed: u64,
}

impl PathResult {
    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.values.as_slice())
    }

    /// Spacing of the (uniform) time mesh.
    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Integrate a rate observable over `[t0, t1)`:
    /// `sum of value(t_k) * dt` for mesh points in the window.
    pub fn window_total(&self, name: &str, t0: f64, t1: f64) -> Result<f64> {
        let values = self
            .observable(name)
            .ok_or_else(|| Error::invalid(format!("no observable named {name}")))?;
        let dt = self.dt();
        let mut total = 0.0;
        for (t, v) in self.times.iter().zip(values) {
            if *t >= t0 - 1e-12 && *t < t1 - 1e-12 {
                total += v * dt;
            }
        }
        Ok(total)
    }

    /// Last value of an observable.
    pub fn final_value(&self, name: &str) -> Result<f64> {
        let values = self
            .observable(name)
            .ok_or_else(|| Error::invalid(format!("no observable named {name}")))?;
        values
            .last()
            .copied()
            .ok_or_else(|| Error::invalid("empty series"))
    }

    /// Error if any recorded value is NaN or infinite.
    pub fn check_finite(&self) -> Result<()> {
        for obs in &self.observables {
            if let Some(i) = obs.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::numerical(format!(
                    "observable {} is non-finite at t = {} (seed {})",
                    obs.name, self.times[i], self.seed
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_total_integrates_rates() {
        let r = PathResult {
            times: vec![0.0, 0.5, 1.0, 1.5],
            observables: vec![Observable {
                name: "rate".into(),
                values: vec![2.0, 4.0, 6.0, 8.0],
            }],
            snapshots: vec![],
            clamp_events: 0,
            clamp_deficit: 0.0,
            seed: 0,
        };
        // window [0.5, 1.5) picks values 4 and 6, each weighted by dt = 0.5
        assert!((r.window_total("rate", 0.5, 1.5).unwrap() - 5.0).abs() < 1e-12);
        assert!(r.window_total("missing", 0.0, 1.0).is_err());
    }
}
