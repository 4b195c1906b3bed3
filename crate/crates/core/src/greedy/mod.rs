//! Greedy basis construction.
//!
//! Each iteration builds moment-matching blocks at the current expansion points,
//! appends them to the bases the chosen estimator needs, sweeps the training set
//! with the estimator and moves the expansion points to the maximizers.

mod select;
mod validate;

use std::collections::HashSet;
use std::sync::OnceLock;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    evaluate, BasisSet, DeltaRConfig, EstimateBreakdown, EstimatorKind, EstimatorWorkspace,
};
use crate::linalg::{orthonormalize_append, Basis, BasisRole, CMatrix, DEFAULT_DEFLATION_TOL};
use crate::moments::{expansion_block, Direction, DEFAULT_MAX_BLOCK_COLUMNS};
use crate::projection::reduced_primal_solve;
use crate::system::{ParametricSystem, SamplePoint};

pub use select::{argmax, select_points, SelectedPoints};
pub use validate::{
    validate, EffectivityReport, EffectivityRow, EffectivitySummary, FILTER_THRESHOLD,
};

/// Starting indices into the training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialPoints {
    pub main: usize,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl InitialPoints {
    /// main = first sample, alpha = last, beta = gamma = middle.
    pub fn default_for(len: usize) -> Self {
        InitialPoints {
            main: 0,
            alpha: len.saturating_sub(1),
            beta: len / 2,
            gamma: len / 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GreedyConfig {
    pub kind: EstimatorKind,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Moment order; `None` picks 3 Krylov blocks for `sE − A` systems and
    /// levels `R_0, R_1` otherwise.
    pub q: Option<usize>,
    pub training_set: Vec<SamplePoint>,
    /// Build the dual basis at separate points instead of the main points.
    pub symmetric_variant: bool,
    pub initial_points: Option<InitialPoints>,
    /// `None`: record when `n ≤ 1000`.
    pub record_true_errors: Option<bool>,
    /// Split moment blocks into real and imaginary parts. `None`: split when
    /// all system matrices are real.
    pub real_basis: Option<bool>,
    pub deflation_tol: f64,
    pub max_block_columns: usize,
    pub delta_r: DeltaRConfig,
}

impl GreedyConfig {
    pub fn new(kind: EstimatorKind, tolerance: f64, training_set: Vec<SamplePoint>) -> Self {
        GreedyConfig {
            kind,
            tolerance,
            max_iterations: 30,
            q: None,
            training_set,
            symmetric_variant: false,
            initial_points: None,
            record_true_errors: None,
            real_basis: None,
            deflation_tol: DEFAULT_DEFLATION_TOL,
            max_block_columns: DEFAULT_MAX_BLOCK_COLUMNS,
            delta_r: DeltaRConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        if self.training_set.is_empty() {
            return bad("training set is empty".into());
        }
        if self.symmetric_variant && !self.kind.supports_symmetric_variant() {
            return bad(format!(
                "separate dual expansion points are only defined for delta1, delta2, delta2pr (got {})",
                self.kind
            ));
        }
        if let Some(p) = self.initial_points {
            let len = self.training_set.len();
            if [p.main, p.alpha, p.beta, p.gamma].iter().any(|&i| i >= len) {
                return bad(format!(
                    "initial point index out of range for {len} samples"
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ToleranceMet,
    MaxIterations,
    StagnationAllPointsUsed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub main_index: usize,
    pub selected_main: SamplePoint,
    pub alpha_index: Option<usize>,
    pub selected_alpha: Option<SamplePoint>,
    pub beta_index: Option<usize>,
    pub selected_beta: Option<SamplePoint>,
    pub gamma_index: Option<usize>,
    pub selected_gamma: Option<SamplePoint>,
    pub max_estimate: f64,
    pub max_true_error: Option<f64>,
    pub rom_dimension: usize,
    /// `max |H − Ĥ| / max(1, max |H|)` at the main point right after its block
    /// was appended.
    pub expansion_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GreedyResult {
    pub workspace: EstimatorWorkspace,
    pub bases: BasisSet,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Training indices skipped because `Q` was singular there.
    pub skipped_samples: Vec<usize>,
}

/// Thread pool for sweeps, sized by `ROMGRID_THREADS` when set.
fn sweep_pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("ROMGRID_THREADS")
            .ok()?
            .trim()
            .parse::<usize>()
            .ok()?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .ok()
    })
    .as_ref()
}

/// Runs `f` over `0..len` in parallel, preserving order.
pub(crate) fn par_map<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    let run = || (0..len).into_par_iter().map(&f).collect();
    match sweep_pool() {
        Some(pool) => pool.install(run),
        None => run(),
    }
}

struct Builder<'a> {
    sys: &'a ParametricSystem,
    q: usize,
    real: bool,
    max_cols: usize,
    tol: f64,
}

impl Builder<'_> {
    fn block(&self, p: &SamplePoint, dir: Direction) -> Result<CMatrix> {
        let b = expansion_block(self.sys, p, self.q, dir, self.max_cols)?;
        Ok(if self.real { b.split_real_imag() } else { b })
    }

    fn append(&self, basis: &mut Basis, m: &CMatrix) -> usize {
        orthonormalize_append(basis, m, self.tol)
    }
}

/// Runs the greedy construction.
pub fn run_greedy(sys: &ParametricSystem, cfg: &GreedyConfig) -> Result<GreedyResult> {
    cfg.validate()?;
    let kind = cfg.kind;
    let ns = cfg.training_set.len();
    let n = sys.n();
    let record = cfg.record_true_errors.unwrap_or(n <= 1000);
    let builder = Builder {
        sys,
        q: cfg
            .q
            .unwrap_or(if sys.is_first_order_in_s() { 3 } else { 1 }),
        real: cfg.real_basis.unwrap_or_else(|| sys.is_real()),
        max_cols: cfg.max_block_columns,
        tol: cfg.deflation_tol,
    };
    for p in &cfg.training_set {
        sys.check_point(p)?;
    }

    let mut excluded = vec![false; ns];
    let h_cache: Vec<Option<CMatrix>> = if record {
        let hs = par_map(ns, |i| sys.transfer_function(&cfg.training_set[i]));
        let mut out = Vec::with_capacity(ns);
        for (i, h) in hs.into_iter().enumerate() {
            match h {
                Ok(h) => out.push(Some(h)),
                Err(e) if e.is_singular() => {
                    warn!("skipping training sample {i}: {e}");
                    excluded[i] = true;
                    out.push(None);
                }
                Err(e) => return Err(e),
            }
        }
        out
    } else {
        vec![None; ns]
    };
    if excluded.iter().all(|&x| x) {
        return Err(Error::AllSamplesSingular);
    }

    let init = cfg
        .initial_points
        .unwrap_or_else(|| InitialPoints::default_for(ns));
    let first_ok = |i: usize, excluded: &[bool]| -> usize {
        (0..ns)
            .map(|k| (i + k) % ns)
            .find(|&k| !excluded[k])
            .unwrap_or(i)
    };
    let mut main = first_ok(init.main, &excluded);
    let mut alpha = first_ok(init.alpha, &excluded);
    let mut beta = first_ok(init.beta, &excluded);
    let mut gamma = first_ok(init.gamma, &excluded);

    let mut set = BasisSet {
        v: Basis::empty(n, BasisRole::V),
        v_du: kind.needs_dual().then(|| Basis::empty(n, BasisRole::VDu)),
        v_rdu: kind
            .needs_dual_residual()
            .then(|| Basis::empty(n, BasisRole::VRdu)),
        v_rpr: kind
            .needs_primal_residual()
            .then(|| Basis::empty(n, BasisRole::VRpr)),
        v_rrpr: kind
            .needs_primal_residual_residual()
            .then(|| Basis::empty(n, BasisRole::VRrpr)),
    };
    let make_ws = |set: &BasisSet| -> Result<EstimatorWorkspace> {
        let mut ws = EstimatorWorkspace::galerkin(sys, kind, set)?;
        ws.delta_r = cfg.delta_r;
        Ok(ws)
    };
    let mut ws = make_ws(&set)?;
    let mut trace = Vec::new();
    let mut used_main: HashSet<usize> = HashSet::new();
    let mut stop = StopReason::MaxIterations;

    // Builds a block at sample `i`; a singular operator there excludes the sample.
    let try_block = |i: usize, dir: Direction, excluded: &mut [bool]| -> Result<Option<CMatrix>> {
        match builder.block(&cfg.training_set[i], dir) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.is_singular() => {
                warn!("cannot expand at training sample {i}: {e}");
                excluded[i] = true;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };

    for iteration in 1..=cfg.max_iterations {
        let added = match try_block(main, Direction::Primal, &mut excluded)? {
            Some(b) => builder.append(&mut set.v, &b),
            None => 0,
        };
        if added == 0 && used_main.contains(&main) {
            info!("iteration {iteration}: point {main} repeats without new columns, stopping");
            stop = StopReason::StagnationAllPointsUsed;
            break;
        }
        used_main.insert(main);

        let dual_at = if cfg.symmetric_variant { gamma } else { main };
        if let Some(v_du) = set.v_du.as_mut() {
            if let Some(b) = try_block(dual_at, Direction::Dual, &mut excluded)? {
                builder.append(v_du, &b);
            }
        }
        if let Some(v_rdu) = set.v_rdu.as_mut() {
            builder.append(
                v_rdu,
                set.v_du.as_ref().expect("dual basis present").matrix(),
            );
            if let Some(b) = try_block(alpha, Direction::Dual, &mut excluded)? {
                builder.append(v_rdu, &b);
            }
        }
        if let Some(v_rpr) = set.v_rpr.as_mut() {
            builder.append(v_rpr, set.v.matrix());
            if let Some(b) = try_block(alpha, Direction::Primal, &mut excluded)? {
                builder.append(v_rpr, &b);
            }
        }
        if let Some(v_rrpr) = set.v_rrpr.as_mut() {
            builder.append(v_rrpr, set.v.matrix());
            builder.append(
                v_rrpr,
                set.v_rpr.as_ref().expect("primal residual basis").matrix(),
            );
            if let Some(b) = try_block(beta, Direction::Primal, &mut excluded)? {
                builder.append(v_rrpr, &b);
            }
        }
        ws = make_ws(&set)?;

        let expansion_error = if excluded[main] {
            None
        } else {
            expansion_error(sys, &ws, &cfg.training_set[main], h_cache[main].as_ref())
        };

        let sweep: Vec<Option<(EstimateBreakdown, Option<f64>)>> = {
            let results = par_map(ns, |i| {
                if excluded[i] {
                    return Ok(None);
                }
                let p = &cfg.training_set[i];
                let b = match evaluate(kind, &ws, sys, p) {
                    Ok(b) => b,
                    Err(e) if e.is_singular() => {
                        warn!("reduced system singular at training sample {i}: {e}");
                        EstimateBreakdown {
                            total: f64::INFINITY,
                            part1: f64::INFINITY,
                            part2: f64::INFINITY,
                            aux: Default::default(),
                        }
                    }
                    Err(e) => return Err(e),
                };
                let err = match &h_cache[i] {
                    Some(h) => crate::estimators::true_error_with(&ws, sys, p, h).ok(),
                    None => None,
                };
                Ok(Some((b, err)))
            });
            results.into_iter().collect::<Result<_>>()?
        };
        let breakdowns: Vec<Option<EstimateBreakdown>> =
            sweep.iter().map(|s| s.map(|(b, _)| b)).collect();
        let max_estimate = breakdowns
            .iter()
            .flatten()
            .map(|b| b.total)
            .fold(0.0_f64, f64::max);
        let max_true_error = record.then(|| {
            sweep
                .iter()
                .flatten()
                .filter_map(|(_, e)| *e)
                .fold(0.0_f64, f64::max)
        });

        let point = |i: usize| cfg.training_set[i].clone();
        let alpha_used = kind_uses_alpha(kind).then_some(alpha);
        let beta_used = (kind == EstimatorKind::Delta3Pr).then_some(beta);
        let gamma_used = cfg.symmetric_variant.then_some(gamma);
        trace.push(IterationRecord {
            iteration,
            main_index: main,
            selected_main: point(main),
            alpha_index: alpha_used,
            selected_alpha: alpha_used.map(point),
            beta_index: beta_used,
            selected_beta: beta_used.map(point),
            gamma_index: gamma_used,
            selected_gamma: gamma_used.map(point),
            max_estimate,
            max_true_error,
            rom_dimension: set.v.dim(),
            expansion_error,
        });
        debug!(
            "iteration {iteration}: r = {}, max estimate {max_estimate:e}, max true error {:?}",
            set.v.dim(),
            max_true_error
        );

        if max_estimate <= cfg.tolerance {
            stop = StopReason::ToleranceMet;
            break;
        }
        let Some(sel) = select_points(kind, cfg.symmetric_variant, &breakdowns) else {
            return Err(Error::AllSamplesSingular);
        };
        main = sel.main;
        alpha = sel.alpha.unwrap_or(alpha);
        beta = sel.beta.unwrap_or(beta);
        gamma = sel.gamma.unwrap_or(gamma);
    }

    Ok(GreedyResult {
        workspace: ws,
        bases: set,
        trace,
        converged: stop == StopReason::ToleranceMet,
        stop_reason: stop,
        skipped_samples: (0..ns).filter(|&i| excluded[i]).collect(),
    })
}

fn kind_uses_alpha(kind: EstimatorKind) -> bool {
    kind.needs_dual_residual() || kind.needs_primal_residual()
}

/// Interpolation error of the primal ROM at `p`, relative to `max(1, |H|)`.
fn expansion_error(
    sys: &ParametricSystem,
    ws: &EstimatorWorkspace,
    p: &SamplePoint,
    cached: Option<&CMatrix>,
) -> Option<f64> {
    let h = match cached {
        Some(h) => h.clone(),
        None => sys.transfer_function(p).ok()?,
    };
    let (_, x) = reduced_primal_solve(&ws.rom_primal, p).ok()?;
    let h_rom = sys.c().assemble(p).ok()?.matmul(&x);
    Some(h.sub(&h_rom).max_abs() / h.max_abs().max(1.0))
}

#[cfg(test)]
mod tests;
