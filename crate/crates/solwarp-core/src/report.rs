//! Residual reports: aggregated max/RMS statistics of a tensor or scalar
//! identity over a sample sweep.

use serde::{Deserialize, Serialize};

/// Aggregated residuals of one identity over a sample set.
///
/// Tensor identities pass when `max_abs <= tolerance`; scalar constancy
/// checks pass when `constancy_spread <= tolerance`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: String,
    pub samples: usize,
    pub max_abs: f64,
    pub rms: f64,
    pub worst_point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constancy_spread: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn spread(&self) -> f64 {
        self.constancy_spread.unwrap_or(0.0)
    }
}

/// Streaming accumulator behind [`ResidualReport`]. Merging is associative,
/// so sweeps can be split across workers and combined in any grouping.
#[derive(Clone, Debug)]
pub struct ResidualAccum {
    identity: String,
    scalar: bool,
    samples: usize,
    sum_sq: f64,
    max_abs: f64,
    worst_point: Vec<f64>,
    min_val: f64,
    min_point: Vec<f64>,
    max_val: f64,
    max_point: Vec<f64>,
    sum_val: f64,
}

impl ResidualAccum {
    /// Accumulator for a tensor identity (per-point max-norm residuals).
    pub fn tensor(identity: impl Into<String>) -> Self {
        Self::new(identity.into(), false)
    }

    /// Accumulator for a scalar quantity that should be constant.
    pub fn scalar(identity: impl Into<String>) -> Self {
        Self::new(identity.into(), true)
    }

    fn new(identity: String, scalar: bool) -> Self {
        ResidualAccum {
            identity,
            scalar,
            samples: 0,
            sum_sq: 0.0,
            max_abs: 0.0,
            worst_point: Vec::new(),
            min_val: f64::INFINITY,
            min_point: Vec::new(),
            max_val: f64::NEG_INFINITY,
            max_point: Vec::new(),
            sum_val: 0.0,
        }
    }

    /// Record the max-norm residual of a tensor identity at `point`.
    pub fn add_residual(&mut self, residual: f64, point: &[f64]) {
        debug_assert!(!self.scalar);
        self.samples += 1;
        self.sum_sq += residual * residual;
        if residual.abs() >= self.max_abs {
            self.max_abs = residual.abs();
            self.worst_point = point.to_vec();
        }
    }

    /// Record a scalar value for a constancy check at `point`.
    pub fn add_value(&mut self, value: f64, point: &[f64]) {
        debug_assert!(self.scalar);
        self.samples += 1;
        self.sum_val += value;
        self.sum_sq += value * value;
        if value < self.min_val {
            self.min_val = value;
            self.min_point = point.to_vec();
        }
        if value > self.max_val {
            self.max_val = value;
            self.max_point = point.to_vec();
        }
    }

    pub fn merge(mut self, other: ResidualAccum) -> ResidualAccum {
        debug_assert_eq!(self.scalar, other.scalar);
        self.samples += other.samples;
        self.sum_sq += other.sum_sq;
        self.sum_val += other.sum_val;
        if other.max_abs >= self.max_abs {
            self.max_abs = other.max_abs;
            self.worst_point = other.worst_point;
        }
        if other.min_val < self.min_val {
            self.min_val = other.min_val;
            self.min_point = other.min_point;
        }
        if other.max_val > self.max_val {
            self.max_val = other.max_val;
            self.max_point = other.max_point;
        }
        self
    }

    pub fn finish(self, tolerance: f64) -> ResidualReport {
        let n = self.samples.max(1) as f64;
        if self.scalar {
            let mean = self.sum_val / n;
            let spread = if self.samples == 0 {
                0.0
            } else {
                self.max_val - self.min_val
            };
            let dev_max = self.max_val - mean;
            let dev_min = mean - self.min_val;
            let (max_abs, worst_point) = if dev_max >= dev_min {
                (dev_max, self.max_point)
            } else {
                (dev_min, self.min_point)
            };
            let var = (self.sum_sq / n - mean * mean).max(0.0);
            ResidualReport {
                identity: self.identity,
                samples: self.samples,
                max_abs,
                rms: var.sqrt(),
                worst_point,
                mean: Some(mean),
                constancy_spread: Some(spread),
                tolerance,
                pass: spread <= tolerance,
            }
        } else {
            ResidualReport {
                identity: self.identity,
                samples: self.samples,
                max_abs: self.max_abs,
                rms: (self.sum_sq / n).sqrt(),
                worst_point: self.worst_point,
                mean: None,
                constancy_spread: None,
                tolerance,
                pass: self.max_abs <= tolerance,
            }
        }
    }
}
