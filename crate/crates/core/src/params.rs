use crate::error::{Result, SvddError};

/// Outlier fraction used when the caller does not supply one. An in-control
/// window is expected to contain essentially no outliers.
pub const DEFAULT_OUTLIER_FRACTION: f64 = 1e-6;

/// Gaussian bandwidth `s` and expected outlier fraction `f`.
///
/// The dual box bound is derived per window as `C = 1 / (n f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    bandwidth: f64,
    outlier_fraction: f64,
}

impl HyperParams {
    pub fn new(bandwidth: f64, outlier_fraction: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(SvddError::InvalidParameter(format!(
                "bandwidth s must satisfy s > 0 (got {bandwidth})"
            )));
        }
        if !(outlier_fraction > 0.0 && outlier_fraction <= 1.0) {
            return Err(SvddError::InvalidParameter(format!(
                "outlier fraction f must satisfy 0 < f <= 1 (got {outlier_fraction})"
            )));
        }
        Ok(Self {
            bandwidth,
            outlier_fraction,
        })
    }

    pub fn with_bandwidth(bandwidth: f64) -> Result<Self> {
        Self::new(bandwidth, DEFAULT_OUTLIER_FRACTION)
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn outlier_fraction(&self) -> f64 {
        self.outlier_fraction
    }

    /// `C = 1 / (n f)`; at least `1/n` because `f <= 1`.
    pub fn penalty(&self, n: usize) -> f64 {
        1.0 / (n as f64 * self.outlier_fraction)
    }
}

/// Classification tolerance for Lagrange multipliers: `1e-8 · min(C, 1)`.
///
/// Multipliers never exceed 1 on the simplex, so `min(C, 1)` is the
/// effective width of the box.
pub fn bound_tolerance(penalty: f64) -> f64 {
    1e-8 * penalty.min(1.0)
}

/// Monte Carlo simulation size, master seed and work partitioning.
///
/// The partition count only controls how work is split; results do not
/// depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    n_es: usize,
    seed: u64,
    partitions: usize,
}

impl MonteCarloConfig {
    pub fn new(n_es: usize, seed: u64) -> Result<Self> {
        Self::with_partitions(n_es, seed, 1)
    }

    pub fn with_partitions(n_es: usize, seed: u64, partitions: usize) -> Result<Self> {
        if n_es == 0 {
            return Err(SvddError::InvalidParameter(
                "simulation size n_es must be at least 1".into(),
            ));
        }
        if partitions == 0 {
            return Err(SvddError::InvalidParameter(
                "partitions must be at least 1".into(),
            ));
        }
        Ok(Self {
            n_es,
            seed,
            partitions,
        })
    }

    pub fn n_es(&self) -> usize {
        self.n_es
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }
}
