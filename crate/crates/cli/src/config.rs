use std::path::PathBuf;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig1Real,
    Fig1Complex,
    Fig2Partial,
    DensityDemo,
    Custom,
}

impl Experiment {
    /// Default `(h_max, h_min, points)`.
    pub fn default_grid(self) -> HGrid {
        match self {
            Experiment::Fig1Real | Experiment::Fig1Complex => HGrid { h_max: 1e-1, h_min: 1e-13, points: 25 },
            Experiment::Fig2Partial => HGrid { h_max: 1e-1, h_min: 1e-8, points: 15 },
            Experiment::DensityDemo => HGrid { h_max: 1e-5, h_min: 1e-5, points: 1 },
            Experiment::Custom => HGrid { h_max: 1e-5, h_min: 1e-5, points: 1 },
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            Experiment::Fig1Real | Experiment::Fig1Complex => 1,
            Experiment::Fig2Partial => 3,
            Experiment::DensityDemo => 6,
            Experiment::Custom => 0,
        }
    }
}

/// Geometric step sequence from `h_max` down to `h_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HGrid {
    pub h_max: f64,
    pub h_min: f64,
    pub points: usize,
}

impl HGrid {
    pub fn validate(&self) -> CliResult<()> {
        let ok = self.h_min > 0.0 && self.h_max.is_finite() && self.h_min.is_finite();
        if !ok {
            return Err(CliError::Config(format!(
                "step bounds must be positive and finite ({:e}, {:e})",
                self.h_max, self.h_min
            )));
        }
        if self.points < 2 {
            return Err(CliError::Config(format!("a step grid needs at least 2 points, got {}", self.points)));
        }
        if self.h_max <= self.h_min {
            return Err(CliError::Config(format!("h_max {:e} must exceed h_min {:e}", self.h_max, self.h_min)));
        }
        Ok(())
    }

    /// Strictly decreasing, log-spaced, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.h_max.log10(), self.h_min.log10());
        let last = self.points - 1;
        (0..self.points)
            .map(|k| match k {
                0 => self.h_max,
                k if k == last => self.h_min,
                k => 10f64.powf(a + (b - a) * k as f64 / last as f64),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: HGrid,
    pub seed: u64,
    pub n: usize,
    pub output: Option<PathBuf>,
    /// Zeroes the runtime column so output depends only on the inputs.
    pub deterministic: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            grid: experiment.default_grid(),
            seed: 1,
            n: experiment.default_n(),
            output: None,
            deterministic: false,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        match self.experiment {
            Experiment::Fig1Real | Experiment::Fig1Complex | Experiment::Fig2Partial => self.grid.validate()?,
            Experiment::DensityDemo | Experiment::Custom => {}
        }
        if self.experiment == Experiment::DensityDemo && self.n < 2 {
            return Err(CliError::Config("density demo needs n ≥ 2".into()));
        }
        if self.experiment == Experiment::Fig2Partial && self.n == 0 {
            return Err(CliError::Config("matrix dimension must be positive".into()));
        }
        Ok(())
    }
}
