//! Output-error estimators for reduced transfer functions.
//!
//! All estimators start from the primal residual `r_pr = B − Q x̂_pr` and the
//! identity `H − Ĥ = x_duᵀ r_pr`, then replace the unknown full-order quantity
//! with a reduced approximation:
//!
//! | kind       | value                                        |
//! |------------|----------------------------------------------|
//! | `Delta1`   | `|x̂_duᵀ r_pr|`                               |
//! | `Delta2`   | `Δ1 + |x̂_rduᵀ r_pr|`                         |
//! | `Delta2Pr` | `Δ1 + |r_duᵀ x̂_rpr|`                         |
//! | `Delta1Pr` | `|C x̂_rpr|`                                  |
//! | `Delta3`   | `Δ1pr + |x̂_duᵀ r_rpr|`, `r_rpr = r_pr − Q x̂_rpr` |
//! | `Delta3Pr` | `Δ1pr + |C x̂_rrpr|`                          |
//! | `DeltaR`   | `(1/K)·sqrt(Σ (ξ_i x̂_duᵀ r_pr)²)`            |
//!
//! `x̂_rdu`, `x̂_rpr`, `x̂_rrpr` come from reduced models of the residual systems
//! `Qᵀ x = r_du`, `Q x = r_pr` and `Q x = r_rpr`.

mod randomized;
mod sensitivity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dotu, norm2, Basis, CMatrix};
use crate::projection::{
    dual_residual, primal_residual, reduce, reduced_primal_solve, ReducedModel,
};
use crate::system::{ParametricSystem, SamplePoint};

pub use randomized::{delta_r, delta_r_with_weights, standard_normal_weights, DeltaRConfig};
pub use sensitivity::{sensitivity_report, SensitivityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorKind {
    DeltaR,
    Delta1,
    Delta1Pr,
    Delta2,
    Delta2Pr,
    Delta3,
    Delta3Pr,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::DeltaR,
        EstimatorKind::Delta1,
        EstimatorKind::Delta1Pr,
        EstimatorKind::Delta2,
        EstimatorKind::Delta2Pr,
        EstimatorKind::Delta3,
        EstimatorKind::Delta3Pr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::DeltaR => "delta_r",
            EstimatorKind::Delta1 => "delta1",
            EstimatorKind::Delta1Pr => "delta1pr",
            EstimatorKind::Delta2 => "delta2",
            EstimatorKind::Delta2Pr => "delta2pr",
            EstimatorKind::Delta3 => "delta3",
            EstimatorKind::Delta3Pr => "delta3pr",
        }
    }

    pub fn needs_dual(self) -> bool {
        matches!(
            self,
            EstimatorKind::Delta1
                | EstimatorKind::Delta2
                | EstimatorKind::Delta2Pr
                | EstimatorKind::Delta3
                | EstimatorKind::DeltaR
        )
    }

    pub fn needs_dual_residual(self) -> bool {
        self == EstimatorKind::Delta2
    }

    pub fn needs_primal_residual(self) -> bool {
        matches!(
            self,
            EstimatorKind::Delta1Pr
                | EstimatorKind::Delta2Pr
                | EstimatorKind::Delta3
                | EstimatorKind::Delta3Pr
        )
    }

    pub fn needs_primal_residual_residual(self) -> bool {
        self == EstimatorKind::Delta3Pr
    }

    /// Kinds whose value is a sum of two nonnegative parts.
    pub fn is_two_part(self) -> bool {
        matches!(
            self,
            EstimatorKind::Delta2
                | EstimatorKind::Delta2Pr
                | EstimatorKind::Delta3
                | EstimatorKind::Delta3Pr
        )
    }

    /// Kinds that admit separate dual expansion points.
    pub fn supports_symmetric_variant(self) -> bool {
        matches!(
            self,
            EstimatorKind::Delta1 | EstimatorKind::Delta2 | EstimatorKind::Delta2Pr
        )
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "deltar" | "r" => EstimatorKind::DeltaR,
            "delta1" | "1" => EstimatorKind::Delta1,
            "delta1pr" | "1pr" => EstimatorKind::Delta1Pr,
            "delta2" | "2" => EstimatorKind::Delta2,
            "delta2pr" | "2pr" => EstimatorKind::Delta2Pr,
            "delta3" | "3" => EstimatorKind::Delta3,
            "delta3pr" | "3pr" => EstimatorKind::Delta3Pr,
            _ => return Err(Error::InvalidConfig(format!("unknown estimator '{s}'"))),
        })
    }
}

/// Orthonormal bases from which the workspace ROMs are built.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub v: Basis,
    pub v_du: Option<Basis>,
    pub v_rdu: Option<Basis>,
    pub v_rpr: Option<Basis>,
    pub v_rrpr: Option<Basis>,
}

impl BasisSet {
    pub fn bases(&self) -> Vec<&Basis> {
        std::iter::once(&self.v)
            .chain(self.v_du.iter())
            .chain(self.v_rdu.iter())
            .chain(self.v_rpr.iter())
            .chain(self.v_rrpr.iter())
            .collect()
    }
}

/// The reduced models an estimator evaluation needs.
///
/// `rom_dual` and `rom_dual_residual` reduce the dual system (operator `Qᵀ`);
/// the others reduce the primal operator. The residual ROMs only use their
/// operator and bases: right-hand sides are projected residuals.
#[derive(Debug, Clone)]
pub struct EstimatorWorkspace {
    pub kind: EstimatorKind,
    pub rom_primal: ReducedModel,
    pub rom_dual: Option<ReducedModel>,
    pub rom_dual_residual: Option<ReducedModel>,
    pub rom_primal_residual: Option<ReducedModel>,
    pub rom_primal_residual_residual: Option<ReducedModel>,
    pub delta_r: DeltaRConfig,
}

impl EstimatorWorkspace {
    pub fn new(kind: EstimatorKind, rom_primal: ReducedModel) -> Self {
        EstimatorWorkspace {
            kind,
            rom_primal,
            rom_dual: None,
            rom_dual_residual: None,
            rom_primal_residual: None,
            rom_primal_residual_residual: None,
            delta_r: DeltaRConfig::default(),
        }
    }

    /// Galerkin ROMs for every basis present in `bases`.
    pub fn galerkin(sys: &ParametricSystem, kind: EstimatorKind, bases: &BasisSet) -> Result<Self> {
        let dual = sys.dual();
        let g = |s: &ParametricSystem, b: &Option<Basis>| -> Result<Option<ReducedModel>> {
            b.as_ref().map(|b| reduce(s, b, b)).transpose()
        };
        let ws = EstimatorWorkspace {
            kind,
            rom_primal: reduce(sys, &bases.v, &bases.v)?,
            rom_dual: g(&dual, &bases.v_du)?,
            rom_dual_residual: g(&dual, &bases.v_rdu)?,
            rom_primal_residual: g(sys, &bases.v_rpr)?,
            rom_primal_residual_residual: g(sys, &bases.v_rrpr)?,
            delta_r: DeltaRConfig::default(),
        };
        ws.check(kind)?;
        Ok(ws)
    }

    /// Fails with [`Error::MissingWorkspaceRom`] if `kind` needs an absent ROM.
    pub fn check(&self, kind: EstimatorKind) -> Result<()> {
        let missing = |rom: &'static str| Error::MissingWorkspaceRom {
            kind: kind.name().to_string(),
            rom,
        };
        if kind.needs_dual() && self.rom_dual.is_none() {
            return Err(missing("dual"));
        }
        if kind.needs_dual_residual() && self.rom_dual_residual.is_none() {
            return Err(missing("dual_residual"));
        }
        if kind.needs_primal_residual() && self.rom_primal_residual.is_none() {
            return Err(missing("primal_residual"));
        }
        if kind.needs_primal_residual_residual() && self.rom_primal_residual_residual.is_none() {
            return Err(missing("primal_residual_residual"));
        }
        Ok(())
    }

    pub fn rom_dimension(&self) -> usize {
        self.rom_primal.dim()
    }
}

/// Residual norms that drive auxiliary point selection.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuxNorms {
    /// `‖r_pr‖₂`
    pub primal_residual: f64,
    /// `‖r_du‖₂`
    pub dual_residual: Option<f64>,
    /// `‖r_rpr‖₂`
    pub primal_residual_residual: Option<f64>,
}

/// One estimator value split into its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateBreakdown {
    pub total: f64,
    pub part1: f64,
    pub part2: f64,
    pub aux: AuxNorms,
}

/// Per-channel reduced quantities at one sample, shared by all estimators.
pub(crate) struct SampleState {
    pub x_pr: CMatrix,
    pub r_pr: CMatrix,
    pub c: CMatrix,
    pub x_du: Option<CMatrix>,
    pub r_du: Option<CMatrix>,
    pub x_rdu: Option<CMatrix>,
    pub x_rpr: Option<CMatrix>,
    pub r_rpr: Option<CMatrix>,
    pub x_rrpr: Option<CMatrix>,
}

/// Runs the reduced solve chain for every ROM present in `ws`.
pub(crate) fn sample_state(
    ws: &EstimatorWorkspace,
    sys: &ParametricSystem,
    p: &SamplePoint,
) -> Result<SampleState> {
    sys.check_point(p)?;
    let (_, x_pr) = reduced_primal_solve(&ws.rom_primal, p)?;
    let r_pr = primal_residual(sys, p, &x_pr)?;
    let c = sys.c().assemble(p)?;

    let (x_du, r_du) = match &ws.rom_dual {
        Some(rom) => {
            let (_, x) = reduced_primal_solve(rom, p)?;
            let r = dual_residual(sys, p, &x)?;
            (Some(x), Some(r))
        }
        None => (None, None),
    };
    let x_rdu = match (&ws.rom_dual_residual, &r_du) {
        (Some(rom), Some(r)) => Some(rom.solve_projected(p, r)?.1),
        _ => None,
    };
    let x_rpr = match &ws.rom_primal_residual {
        Some(rom) => Some(rom.solve_projected(p, &r_pr)?.1),
        None => None,
    };
    let r_rpr = match &x_rpr {
        Some(x) => {
            let mut r = r_pr.clone();
            r.axpy(-crate::linalg::ONE, &sys.q().apply(p, x)?);
            Some(r)
        }
        None => None,
    };
    let x_rrpr = match (&ws.rom_primal_residual_residual, &r_rpr) {
        (Some(rom), Some(r)) => Some(rom.solve_projected(p, r)?.1),
        _ => None,
    };
    Ok(SampleState {
        x_pr,
        r_pr,
        c,
        x_du,
        r_du,
        x_rdu,
        x_rpr,
        r_rpr,
        x_rrpr,
    })
}

/// `|a[:,j]ᵀ b[:,i]|`
fn inner(a: &CMatrix, j: usize, b: &CMatrix, i: usize) -> f64 {
    dotu(a.col(j), b.col(i)).norm()
}

/// `|c[j,:] x[:,i]|`
fn output(c: &CMatrix, j: usize, x: &CMatrix, i: usize) -> f64 {
    let xi = x.col(i);
    let mut acc = crate::linalg::ZERO;
    for (k, &xk) in xi.iter().enumerate() {
        acc += c[(j, k)] * xk;
    }
    acc.norm()
}

impl SampleState {
    /// Breakdown for input `i`, output `j`.
    pub(crate) fn breakdown(
        &self,
        kind: EstimatorKind,
        i: usize,
        j: usize,
        delta_r_factor: f64,
    ) -> EstimateBreakdown {
        fn need(o: &Option<CMatrix>) -> &CMatrix {
            o.as_ref().expect("workspace checked before evaluation")
        }
        let delta1 = || inner(need(&self.x_du), j, &self.r_pr, i);
        let delta1_pr = || output(&self.c, j, need(&self.x_rpr), i);
        let (part1, part2) = match kind {
            EstimatorKind::Delta1 => (delta1(), 0.0),
            EstimatorKind::DeltaR => (delta_r_factor * delta1(), 0.0),
            EstimatorKind::Delta2 => (delta1(), inner(need(&self.x_rdu), j, &self.r_pr, i)),
            EstimatorKind::Delta2Pr => (delta1(), inner(need(&self.r_du), j, need(&self.x_rpr), i)),
            EstimatorKind::Delta1Pr => (delta1_pr(), 0.0),
            EstimatorKind::Delta3 => (
                delta1_pr(),
                inner(need(&self.x_du), j, need(&self.r_rpr), i),
            ),
            EstimatorKind::Delta3Pr => (delta1_pr(), output(&self.c, j, need(&self.x_rrpr), i)),
        };
        EstimateBreakdown {
            total: part1 + part2,
            part1,
            part2,
            aux: AuxNorms {
                primal_residual: norm2(self.r_pr.col(i)),
                dual_residual: self.r_du.as_ref().map(|r| norm2(r.col(j))),
                primal_residual_residual: self.r_rpr.as_ref().map(|r| norm2(r.col(i))),
            },
        }
    }

    /// `Ĥ = C x̂_pr`, with `H − Ĥ = C Q⁻¹ r_pr`.
    pub(crate) fn rom_transfer(&self) -> CMatrix {
        self.c.matmul(&self.x_pr)
    }
}

/// Breakdown for every channel, indexed `[output][input]`.
pub fn evaluate_channels(
    kind: EstimatorKind,
    ws: &EstimatorWorkspace,
    sys: &ParametricSystem,
    p: &SamplePoint,
) -> Result<Vec<Vec<EstimateBreakdown>>> {
    ws.check(kind)?;
    let state = sample_state(ws, sys, p)?;
    let factor = if kind == EstimatorKind::DeltaR {
        ws.delta_r.factor()
    } else {
        1.0
    };
    Ok((0..sys.n_outputs())
        .map(|j| {
            (0..sys.n_inputs())
                .map(|i| state.breakdown(kind, i, j, factor))
                .collect()
        })
        .collect())
}

/// Estimator breakdown at `p`. For MIMO systems this is the breakdown of the
/// channel with the largest total.
pub fn evaluate(
    kind: EstimatorKind,
    ws: &EstimatorWorkspace,
    sys: &ParametricSystem,
    p: &SamplePoint,
) -> Result<EstimateBreakdown> {
    let channels = evaluate_channels(kind, ws, sys, p)?;
    Ok(max_channel(channels.into_iter().flatten()))
}

pub(crate) fn max_channel(it: impl IntoIterator<Item = EstimateBreakdown>) -> EstimateBreakdown {
    it.into_iter()
        .reduce(|best, b| if b.total > best.total { b } else { best })
        .expect("systems have at least one channel")
}

/// `max_ij Δ_ij(p)` over all input/output channels.
pub fn evaluate_mimo(
    kind: EstimatorKind,
    ws: &EstimatorWorkspace,
    sys: &ParametricSystem,
    p: &SamplePoint,
) -> Result<f64> {
    Ok(evaluate(kind, ws, sys, p)?.total)
}

/// `max_ij |H_ij(p) − Ĥ_ij(p)|`, computed directly from two transfer-function
/// evaluations. In debug builds the value is cross-checked against
/// `|x_duᵀ r_pr|` with the full-order dual solution.
pub fn true_error(ws: &EstimatorWorkspace, sys: &ParametricSystem, p: &SamplePoint) -> Result<f64> {
    let h = sys.transfer_function(p)?;
    let (_, x_pr) = reduced_primal_solve(&ws.rom_primal, p)?;
    let h_rom = sys.c().assemble(p)?.matmul(&x_pr);
    let err = h.sub(&h_rom);
    if cfg!(debug_assertions) {
        let r_pr = primal_residual(sys, p, &x_pr)?;
        let via_dual = sys.dual_solve_full(p)?.transpose_mul(&r_pr);
        let scale = h.max_abs().max(h_rom.max_abs()).max(f64::MIN_POSITIVE);
        debug_assert!(
            err.max_abs_diff(&via_dual) <= 1e-10 * scale,
            "output error identity violated at {p}"
        );
    }
    Ok(err.max_abs())
}

/// `max_ij |H_ij − Ĥ_ij|` with a precomputed full-order `H(p)`.
pub fn true_error_with(
    ws: &EstimatorWorkspace,
    sys: &ParametricSystem,
    p: &SamplePoint,
    h_full: &CMatrix,
) -> Result<f64> {
    let (_, x_pr) = reduced_primal_solve(&ws.rom_primal, p)?;
    let h_rom = sys.c().assemble(p)?.matmul(&x_pr);
    Ok(h_full.sub(&h_rom).max_abs())
}

#[cfg(test)]
mod tests;
