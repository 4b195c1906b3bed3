//! Randomized output-error estimator.
//!
//! The randomized estimate sketches the dual system with `K` right-hand sides
//! `ξ_i Cᵀ`, `ξ_i ~ N(0,1)`. For a single output the sketched dual solutions are
//! `ξ_i x̂_du`, so `δ̃_i = ξ_i · x̂_duᵀ r_pr` and the estimate is
//! `(1/K)·sqrt(Σ δ̃_i²)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{sample_state, EstimatorKind, EstimatorWorkspace};
use crate::error::{Error, Result};
use crate::linalg::dotu;
use crate::system::{ParametricSystem, SamplePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaRConfig {
    /// Number of random dual right-hand sides `K`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for DeltaRConfig {
    fn default() -> Self {
        DeltaRConfig {
            samples: 20,
            seed: 0,
        }
    }
}

impl DeltaRConfig {
    pub fn weights(&self) -> Vec<f64> {
        standard_normal_weights(self.samples, self.seed)
    }

    /// `(1/K)·‖ξ‖₂`, the factor relating the randomized estimate to `Δ1`.
    pub fn factor(&self) -> f64 {
        let xi = self.weights();
        if xi.is_empty() {
            return 0.0;
        }
        xi.iter().map(|x| x * x).sum::<f64>().sqrt() / xi.len() as f64
    }
}

/// `K` standard-normal draws from a ChaCha8 stream seeded with `seed`.
pub fn standard_normal_weights(k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Randomized estimate with `k` seeded standard-normal weights; for several
/// channels the largest value is returned.
pub fn delta_r(
    ws: &EstimatorWorkspace,
    sys: &ParametricSystem,
    p: &SamplePoint,
    k: usize,
    seed: u64,
) -> Result<f64> {
    delta_r_with_weights(ws, sys, p, &standard_normal_weights(k, seed))
}

/// Randomized estimate with explicit weights `ξ`.
pub fn delta_r_with_weights(
    ws: &EstimatorWorkspace,
    sys: &ParametricSystem,
    p: &SamplePoint,
    xi: &[f64],
) -> Result<f64> {
    ws.check(EstimatorKind::DeltaR)?;
    if xi.is_empty() {
        return Err(Error::InvalidConfig(
            "randomized estimate needs K >= 1".into(),
        ));
    }
    let state = sample_state(ws, sys, p)?;
    let x_du = state.x_du.as_ref().expect("checked above");
    let mut best: f64 = 0.0;
    for j in 0..x_du.cols() {
        for i in 0..state.r_pr.cols() {
            let base = dotu(x_du.col(j), state.r_pr.col(i));
            let sum_sq: f64 = xi.iter().map(|&x| (base * x).norm_sqr()).sum();
            best = best.max(sum_sq.sqrt() / xi.len() as f64);
        }
    }
    Ok(best)
}
