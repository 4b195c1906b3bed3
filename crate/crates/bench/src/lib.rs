//! Fixtures shared by the benchmarks in `benches/`.

use romgrid::io::log_frequency_grid;
use romgrid::linalg::{Basis, BasisRole, CMatrix, C64};
use romgrid::{EstimatorKind, EstimatorWorkspace, GreedyConfig, ParametricSystem, SamplePoint};

/// Deterministic dense test matrix, diagonally dominant so LU never pivots badly.
pub fn dense(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let x = ((i * 31 + j * 17) % 101) as f64 / 101.0 - 0.5;
        if i == j {
            C64::new(n as f64, 1.0)
        } else {
            C64::new(x, 0.3 * x)
        }
    })
}

pub fn block(n: usize, r: usize, salt: usize) -> CMatrix {
    CMatrix::from_fn(n, r, |i, j| {
        C64::new((((i + salt) * 7 + j * 13) % 29) as f64 - 14.0, 0.0)
    })
}

pub fn training_grid(count: usize) -> Vec<SamplePoint> {
    log_frequency_grid(1e-3, 1e3, count)
}

/// Workspace for `kind` built from one greedy run on `sys`.
pub fn trained_workspace(sys: &ParametricSystem, kind: EstimatorKind) -> EstimatorWorkspace {
    let mut cfg = GreedyConfig::new(kind, 1e-6, training_grid(30));
    cfg.q = Some(2);
    cfg.max_iterations = 3;
    cfg.record_true_errors = Some(false);
    romgrid::run_greedy(sys, &cfg)
        .expect("greedy runs")
        .workspace
}

pub fn basis(n: usize, r: usize) -> Basis {
    Basis::from_block(&block(n, r, 0), BasisRole::V)
}
