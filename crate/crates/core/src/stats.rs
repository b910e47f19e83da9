//! Sample statistics over an ensemble of paths.

use crate::error::{Error, Result};

/// Mean, sample standard deviation (n-1 denominator), standard error, and
/// path count for one observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableStats {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub se: f64,
    pub n: usize,
}

impl ObservableStats {
    pub fn from_samples(name: impl Into<String>, samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("cannot summarize an empty sample set"));
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n == 1 {
            0.0
        } else {
            let ss: f64 = samples.iter().map(|&x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Ok(ObservableStats {
            name: name.into(),
            mean,
            std,
            se: std / (n as f64).sqrt(),
            n,
        })
    }
}

/// Per-observable statistics for one ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub observables: Vec<ObservableStats>,
    /// Set when the ensemble has a single path: the reported standard
    /// deviations are zero by convention, not information.
    pub degenerate: bool,
}

impl EnsembleStats {
    pub fn from_columns(columns: &[(String, Vec<f64>)]) -> Result<Self> {
        let mut observables = Vec::with_capacity(columns.len());
        let mut n = None;
        for (name, samples) in columns {
            let stats = ObservableStats::from_samples(name.clone(), samples)?;
            if let Some(expected) = n {
                if stats.n != expected {
                    return Err(Error::invalid("observables have inconsistent path counts"));
                }
            }
            n = Some(stats.n);
            observables.push(stats);
        }
        Ok(EnsembleStats {
            degenerate: n == Some(1),
            observables,
        })
    }

    pub fn get(&self, name: &str) -> Option<&ObservableStats> {
        self.observables.iter().find(|o| o.name == name)
    }
}

/// Per-time-point mean and standard deviation across paths, for comparing an
/// ensemble trajectory against a deterministic one.
#[derive(Debug, Clone)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub n: usize,
}

impl SeriesStats {
    pub fn from_series(series: &[Vec<f64>]) -> Result<Self> {
        let n = series.len();
        if n == 0 {
            return Err(Error::invalid("no series to summarize"));
        }
        let len = series[0].len();
        if series.iter().any(|s| s.len() != len) {
            return Err(Error::invalid("series lengths differ"));
        }
        let mut mean = vec![0.0; len];
        for s in series {
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut std = vec![0.0; len];
        if n > 1 {
            for s in series {
                for ((sd, v), m) in std.iter_mut().zip(s).zip(&mean) {
                    *sd += (v - m) * (v - m);
                }
            }
            std.iter_mut().for_each(|s| *s = (*s / (n - 1) as f64).sqrt());
        }
        Ok(SeriesStats { mean, std, n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std_uses_n_minus_one() {
        let s = ObservableStats::from_samples("x", &[1.0, 2.0, 3.0]).unwrap();
        assert!((s.mean - 2.0).abs() < 1e-15);
        assert!((s.std - 1.0).abs() < 1e-15, "sample std of 1,2,3 is 1");
        assert!((s.se - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_path_is_degenerate_with_zero_std() {
        let e = EnsembleStats::from_columns(&[("x".into(), vec![4.0])]).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.get("x").unwrap().std, 0.0);
    }

    #[test]
    fn series_stats_shapes() {
        let s = SeriesStats::from_series(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(s.mean, vec![2.0, 3.0]);
        assert!(SeriesStats::from_series(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
