//! Numerical thresholds shared by the algebraic routines.

use serde::{Deserialize, Serialize};

/// Thresholds for snapping, definiteness and rank decisions.
///
/// All values are relative: eigenvalue comparisons are scaled by the
/// operator norm, definiteness is tested on Euclidean-normalized vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Imaginary parts below this (relative) are snapped to zero.
    pub real_threshold: f64,
    /// Minimum |<u|u>| for a unit vector to count as definite.
    pub definiteness_margin: f64,
    /// Singular values below this (relative) count as zero.
    pub rank_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            real_threshold: 1e-9,
            definiteness_margin: 1e-9,
            rank_threshold: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn with_real(mut self, t: f64) -> Self {
        self.real_threshold = t;
        self
    }

    pub fn with_rank(mut self, t: f64) -> Self {
        self.rank_threshold = t;
        self
    }
}
