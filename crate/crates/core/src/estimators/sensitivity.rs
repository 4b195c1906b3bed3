//! Full-order diagnostics: how far each estimator can be from the true error.
//!
//! Each estimator replaces an exact full-order quantity by a reduced one; the
//! `epsilon*` fields measure that replacement error and the `delta*_term` fields
//! are the second parts of the two-part estimators. Together they bracket the
//! true output error:
//!
//! * `Δ1 − ε1 ≤ e ≤ Δ1 + ε1`
//! * `Δ2 − δ2 − ε1 ≤ e ≤ Δ2 + ε2`
//! * `Δ2pr − δ2pr − ε1 ≤ e ≤ Δ2pr + ε2pr`
//! * `Δ1pr − ε1pr ≤ e ≤ Δ1pr + ε1pr`
//! * `Δ3 − δ3 − ε1pr ≤ e ≤ Δ3 + ε3_residual`
//! * `Δ3pr − δ3pr − ε1pr ≤ e ≤ Δ3pr + ε3pr`

use serde::{Deserialize, Serialize};

use super::{sample_state, EstimatorKind, EstimatorWorkspace};
use crate::error::{Error, Result};
use crate::linalg::{dotu, CMatrix, ONE};
use crate::system::{ParametricSystem, SamplePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// `|(x_du − x̂_du)ᵀ r_pr|`
    pub epsilon1: f64,
    /// `|C (x_rpr − x̂_rpr)|`
    pub epsilon1_pr: f64,
    /// `|(x_rdu − x̂_rdu)ᵀ r_pr|`
    pub epsilon2: f64,
    /// `|r_duᵀ (x_rpr − x̂_rpr)|`
    pub epsilon2_pr: f64,
    /// `|(x_du − x̂_du)ᵀ r_pr|`, the third-estimator sensitivity as usually
    /// stated; numerically equal to `epsilon1`.
    pub epsilon3: f64,
    /// `|(x_du − x̂_du)ᵀ r_rpr|`, the quantity that actually bounds `Δ3` from above.
    pub epsilon3_residual: f64,
    /// `|C (x_rrpr − x̂_rrpr)|`
    pub epsilon3_pr: f64,
    /// `|x̂_rduᵀ r_pr|`
    pub delta2_term: f64,
    /// `|r_duᵀ x̂_rpr|`
    pub delta2_pr_term: f64,
    /// `|x̂_duᵀ r_rpr|`
    pub delta3_term: f64,
    /// `|C x̂_rrpr|`
    pub delta3_pr_term: f64,
    /// `|x̂_duᵀ r_pr|`
    pub delta1: f64,
    /// `|C x̂_rpr|`
    pub delta1_pr: f64,
    /// `|H − Ĥ|`
    pub true_error: f64,
}

impl SensitivityReport {
    /// Estimator value as assembled from the report's parts.
    pub fn estimate(&self, kind: EstimatorKind) -> f64 {
        match kind {
            EstimatorKind::Delta1 | EstimatorKind::DeltaR => self.delta1,
            EstimatorKind::Delta2 => self.delta1 + self.delta2_term,
            EstimatorKind::Delta2Pr => self.delta1 + self.delta2_pr_term,
            EstimatorKind::Delta1Pr => self.delta1_pr,
            EstimatorKind::Delta3 => self.delta1_pr + self.delta3_term,
            EstimatorKind::Delta3Pr => self.delta1_pr + self.delta3_pr_term,
        }
    }

    /// `[lower, upper]` bracket for the true error. `DeltaR` is reported with
    /// the `Δ1` bracket.
    pub fn envelope(&self, kind: EstimatorKind) -> (f64, f64) {
        let d = self.estimate(kind);
        match kind {
            EstimatorKind::Delta1 | EstimatorKind::DeltaR => (d - self.epsilon1, d + self.epsilon1),
            EstimatorKind::Delta2 => (d - self.delta2_term - self.epsilon1, d + self.epsilon2),
            EstimatorKind::Delta2Pr => (
                d - self.delta2_pr_term - self.epsilon1,
                d + self.epsilon2_pr,
            ),
            EstimatorKind::Delta1Pr => (d - self.epsilon1_pr, d + self.epsilon1_pr),
            EstimatorKind::Delta3 => (
                d - self.delta3_term - self.epsilon1_pr,
                d + self.epsilon3_residual,
            ),
            EstimatorKind::Delta3Pr => (
                d - self.delta3_pr_term - self.epsilon1_pr,
                d + self.epsilon3_pr,
            ),
        }
    }
}

fn first_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    dotu(a.col(0), b.col(0)).norm()
}

/// Computes every sensitivity quantity with full-order solves at `p`.
///
/// ROMs absent from the workspace count as the zero approximation. SISO only;
/// restrict MIMO systems with [`ParametricSystem::channel`] first.
pub fn sensitivity_report(
    sys: &ParametricSystem,
    ws: &EstimatorWorkspace,
    p: &SamplePoint,
    kind: EstimatorKind,
) -> Result<SensitivityReport> {
    ws.check(kind)?;
    if !sys.is_siso() {
        return Err(Error::dims(
            "sensitivity report is defined for SISO systems",
        ));
    }
    let st = sample_state(ws, sys, p)?;
    let n = sys.n();
    let zero = CMatrix::zeros(n, 1);
    let lu = sys.factor_at(p)?;

    let ct = st.c.transpose();
    let x_du_hat = st.x_du.clone().unwrap_or_else(|| zero.clone());
    let r_du = st.r_du.clone().unwrap_or_else(|| ct.clone());
    let x_rdu_hat = st.x_rdu.clone().unwrap_or_else(|| zero.clone());
    let x_rpr_hat = st.x_rpr.clone().unwrap_or_else(|| zero.clone());
    let r_rpr = st.r_rpr.clone().unwrap_or_else(|| st.r_pr.clone());
    let x_rrpr_hat = st.x_rrpr.clone().unwrap_or_else(|| zero.clone());

    let x_du = lu.solve_transpose(&ct)?;
    let x_rdu = lu.solve_transpose(&r_du)?;
    let x_rpr = lu.solve(&st.r_pr)?;
    let x_rrpr = lu.solve(&r_rpr)?;

    let out = |x: &CMatrix| st.c.matmul(x)[(0, 0)].norm();
    let diff = |a: &CMatrix, b: &CMatrix| {
        let mut d = a.clone();
        d.axpy(-ONE, b);
        d
    };
    let du_err = diff(&x_du, &x_du_hat);
    let rpr_err = diff(&x_rpr, &x_rpr_hat);

    let h = st.c.matmul(&lu.solve(&sys.b().assemble(p)?)?);
    let true_error = h.sub(&st.rom_transfer()).max_abs();

    Ok(SensitivityReport {
        epsilon1: first_inner(&du_err, &st.r_pr),
        epsilon1_pr: out(&rpr_err),
        epsilon2: first_inner(&diff(&x_rdu, &x_rdu_hat), &st.r_pr),
        epsilon2_pr: first_inner(&r_du, &rpr_err),
        epsilon3: first_inner(&du_err, &st.r_pr),
        epsilon3_residual: first_inner(&du_err, &r_rpr),
        epsilon3_pr: out(&diff(&x_rrpr, &x_rrpr_hat)),
        delta2_term: first_inner(&x_rdu_hat, &st.r_pr),
        delta2_pr_term: first_inner(&r_du, &x_rpr_hat),
        delta3_term: first_inner(&x_du_hat, &r_rpr),
        delta3_pr_term: out(&x_rrpr_hat),
        delta1: first_inner(&x_du_hat, &st.r_pr),
        delta1_pr: out(&x_rpr_hat),
        true_error,
    })
}
