//! One-shot solves and parallel parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::OpoConfig;
use crate::covariance::{
    detected_covariance, physicality_report, to_sa_blocks, CovarianceMatrix, PhysicalityReport, SABlocks,
};
use crate::error::{Error, Result};
use crate::sideband::MeanFields;
use crate::steady_state::mean_fields_with;

#[derive(Clone, Debug)]
pub struct Solution {
    pub sigma: f64,
    pub omega_hz: f64,
    pub phonons: bool,
    pub detection: bool,
    pub mean_fields: MeanFields,
    /// Frequency-basis covariance, detection applied when enabled.
    pub covariance: CovarianceMatrix,
    pub blocks: SABlocks,
    pub report: PhysicalityReport,
}

pub fn solve(cfg: &OpoConfig) -> Result<Solution> {
    let covariance = detected_covariance(cfg)?;
    let mean_fields = mean_fields_with(cfg.operating_point.sigma, &cfg.losses()?, cfg.model.threshold)?;
    let blocks = to_sa_blocks(&covariance)?;
    let report = physicality_report(&covariance)?;
    Ok(Solution {
        sigma: cfg.operating_point.sigma,
        omega_hz: cfg.operating_point.omega_analysis_hz,
        phonons: cfg.phonons.enabled,
        detection: cfg.detection.enabled,
        mean_fields,
        covariance,
        blocks,
        report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Sigma,
    Omega,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Sigma => "sigma",
            SweepAxis::Omega => "omega_hz",
        }
    }

    pub fn apply(self, cfg: &OpoConfig, value: f64) -> OpoConfig {
        match self {
            SweepAxis::Sigma => cfg.clone().with_sigma(value),
            SweepAxis::Omega => cfg.clone().with_omega_hz(value),
        }
    }
}

/// Inclusive linear grid written `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 }).collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = |msg: &str| Error::config("grid", format!("`{s}`: {msg}"));
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("start is not a number"))?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad("stop is not a number"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("count is not a positive integer"))?;
        if count == 0 {
            return Err(bad("count must be at least 1"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad("bounds must be finite"));
        }
        Ok(Grid { start, stop, count })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Clone, Debug)]
pub struct SweepFailure {
    pub exit_code: i32,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: std::result::Result<Solution, SweepFailure>,
}

/// Solves every grid point independently; failures are kept, not propagated.
pub fn sweep(cfg: &OpoConfig, axis: SweepAxis, grid: &Grid) -> Vec<SweepPoint> {
    grid.values()
        .into_par_iter()
        .map(|value| {
            let outcome = solve(&axis.apply(cfg, value)).map_err(|e| {
                log::warn!("{} = {value}: {e}", axis.name());
                SweepFailure { exit_code: e.exit_code(), message: e.to_string() }
            });
            SweepPoint { value, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "1.05:1.75:8".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 1.05);
        assert_eq!(v[7], 1.75);
        assert_eq!("2:2:1".parse::<Grid>().unwrap().values(), vec![2.0]);
        for bad in ["1:2", "a:2:3", "1:2:0", "1:inf:3", "1:2:-1"] {
            assert!(matches!(bad.parse::<Grid>(), Err(Error::Config { .. })), "{bad}");
        }
    }

    #[test]
    fn sweep_records_failures_and_continues() {
        // at zero analysis frequency the loop is singular from threshold upward
        let cfg = OpoConfig::reference().with_omega_hz(0.0);
        let points = sweep(&cfg, SweepAxis::Sigma, &"1.0:0.5:3".parse().unwrap());
        assert_eq!(points.iter().map(|p| p.value).collect::<Vec<_>>(), vec![1.0, 0.75, 0.5]);
        assert_eq!(points[0].outcome.as_ref().unwrap_err().exit_code, 3);
        assert!(points[1].outcome.is_ok());
        assert!(points[2].outcome.is_ok());
    }

    #[test]
    fn single_point_sweep_matches_solve() {
        let cfg = OpoConfig::reference();
        let points = sweep(&cfg, SweepAxis::Sigma, &"1.5:1.5:1".parse().unwrap());
        let direct = solve(&cfg).unwrap();
        assert_eq!(points[0].outcome.as_ref().unwrap().covariance, direct.covariance);
    }
}
