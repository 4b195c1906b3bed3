use super::*;
use crate::estimators::sensitivity_report;
use crate::io::grid::log_frequency_grid;
use crate::linalg::C64;
use crate::synthetic::{mimo_block, rc_ladder, symmetric_second_order};

fn grid(count: usize) -> Vec<SamplePoint> {
    log_frequency_grid(1e-2, 1e2, count)
}

#[test]
fn huge_tolerance_stops_after_one_iteration() {
    let sys = rc_ladder(30);
    let cfg = GreedyConfig::new(EstimatorKind::Delta2, 1e30, grid(10));
    let res = run_greedy(&sys, &cfg).unwrap();
    assert!(res.converged);
    assert_eq!(res.trace.len(), 1);
    assert_eq!(res.stop_reason, StopReason::ToleranceMet);
    assert_eq!(res.trace[0].main_index, 0);
}

#[test]
fn config_validation() {
    let sys = rc_ladder(10);
    let mut cfg = GreedyConfig::new(EstimatorKind::Delta3, 1e-3, grid(5));
    cfg.symmetric_variant = true;
    assert!(matches!(
        run_greedy(&sys, &cfg),
        Err(Error::InvalidConfig(_))
    ));
    let cfg = GreedyConfig::new(EstimatorKind::Delta1, 0.0, grid(5));
    assert!(run_greedy(&sys, &cfg).is_err());
    let cfg = GreedyConfig::new(EstimatorKind::Delta1, 1e-3, vec![]);
    assert!(run_greedy(&sys, &cfg).is_err());
}

#[test]
fn bases_grow_monotonically_with_containment() {
    let sys = rc_ladder(60);
    for kind in EstimatorKind::ALL {
        let mut cfg = GreedyConfig::new(kind, 1e-14, grid(20));
        cfg.max_iterations = 4;
        let res = run_greedy(&sys, &cfg).unwrap();
        assert!(res.trace.len() <= 4);
        for w in res.trace.windows(2) {
            assert!(w[1].rom_dimension >= w[0].rom_dimension);
        }
        let b = &res.bases;
        assert!(b.v.orthonormality_error() <= 1e-10);
        if let (Some(rdu), Some(du)) = (&b.v_rdu, &b.v_du) {
            assert!(rdu.contains_span_of(du, 1e-10), "{kind}");
        }
        if let Some(rpr) = &b.v_rpr {
            assert!(rpr.contains_span_of(&b.v, 1e-10), "{kind}");
        }
        if let Some(rrpr) = &b.v_rrpr {
            assert!(rrpr.contains_span_of(&b.v, 1e-10));
            assert!(rrpr.contains_span_of(b.v_rpr.as_ref().unwrap(), 1e-10));
        }
    }
}

#[test]
fn selected_points_are_interpolated() {
    let sys = rc_ladder(80);
    let mut cfg = GreedyConfig::new(EstimatorKind::Delta2, 1e-12, grid(30));
    cfg.max_iterations = 5;
    let res = run_greedy(&sys, &cfg).unwrap();
    for rec in &res.trace {
        assert!(rec.expansion_error.unwrap() <= 1e-8, "{rec:?}");
    }
}

#[test]
fn stagnation_on_single_sample() {
    let sys = rc_ladder(20);
    let mut cfg = GreedyConfig::new(
        EstimatorKind::Delta1Pr,
        1e-300,
        vec![SamplePoint::frequency(1.0)],
    );
    cfg.max_iterations = 5;
    let res = run_greedy(&sys, &cfg).unwrap();
    assert!(res.converged || res.stop_reason == StopReason::StagnationAllPointsUsed);
    assert!(res.trace.len() <= 2);
}

#[test]
fn symmetric_system_delta1_collapses_without_separate_points() {
    let sys = rc_ladder(50);
    let mut cfg = GreedyConfig::new(EstimatorKind::Delta1, 1e-6, grid(20));
    cfg.max_iterations = 3;
    let mut res = run_greedy(&sys, &cfg).unwrap();
    res.bases.v_du = Some(res.bases.v.clone().with_role(BasisRole::VDu));
    let ws = &EstimatorWorkspace::galerkin(&sys, EstimatorKind::Delta1, &res.bases).unwrap();
    let mut max_d1: f64 = 0.0;
    let mut max_err: f64 = 0.0;
    for p in &cfg.training_set {
        max_d1 = max_d1.max(
            crate::estimators::evaluate(EstimatorKind::Delta1, ws, &sys, p)
                .unwrap()
                .total,
        );
        max_err = max_err.max(
            sensitivity_report(&sys, ws, p, EstimatorKind::Delta1)
                .unwrap()
                .true_error,
        );
    }
    assert!(max_d1 <= 1e-12, "Δ1 = {max_d1}");
    assert!(max_err > cfg.tolerance, "true error {max_err}");
}

#[test]
fn validation_of_exact_rom_flags_empty_filtered_set() {
    let sys = rc_ladder(12);
    let mut cfg = GreedyConfig::new(EstimatorKind::Delta2, 1e-3, grid(5));
    cfg.max_iterations = 1;
    let mut res = run_greedy(&sys, &cfg).unwrap();
    let id = Basis::identity(12, BasisRole::V);
    res.bases.v = id.clone();
    res.bases.v_du = Some(id.clone().with_role(BasisRole::VDu));
    res.bases.v_rdu = Some(id.with_role(BasisRole::VRdu));
    let ws = EstimatorWorkspace::galerkin(&sys, EstimatorKind::Delta2, &res.bases).unwrap();
    let report = validate(&sys, &ws, &grid(7), EstimatorKind::Delta2).unwrap();
    assert!(report.filtered_set_empty());
    assert!(report.summary.max_true_error <= 1e-10);
    assert_eq!(report.rows.len(), 7);
}

#[test]
fn exact_dual_rom_has_unit_effectivity() {
    let sys = crate::synthetic::random_stable(30, 3);
    let block = crate::linalg::CMatrix::from_fn(30, 3, |i, j| {
        C64::new(((i * 7 + j * 3) % 11) as f64 - 5.0, 0.0)
    });
    let set = BasisSet {
        v: Basis::from_block(&block, BasisRole::V),
        v_du: Some(Basis::identity(30, BasisRole::VDu)),
        v_rdu: None,
        v_rpr: None,
        v_rrpr: None,
    };
    let ws = EstimatorWorkspace::galerkin(&sys, EstimatorKind::Delta1, &set).unwrap();
    let report = validate(&sys, &ws, &grid(15), EstimatorKind::Delta1).unwrap();
    assert_eq!(report.summary.filtered_count, 15);
    for row in &report.rows {
        assert!((row.effectivity.unwrap() - 1.0).abs() <= 1e-9, "{row:?}");
    }
}

#[test]
fn parametric_and_mimo_runs() {
    let sys = symmetric_second_order(30, 2);
    let mut train = Vec::new();
    for p in log_frequency_grid(0.05, 5.0, 8) {
        for d in [0.5, 1.0, 2.0] {
            train.push(
                p.clone()
                    .with_real("d", d)
                    .with_real("alpha", 0.1)
                    .with_real("beta", 1e-3),
            );
        }
    }
    let mut cfg = GreedyConfig::new(EstimatorKind::Delta2Pr, 1e-6, train);
    cfg.max_iterations = 4;
    let res = run_greedy(&sys, &cfg).unwrap();
    for rec in &res.trace {
        assert!(rec.expansion_error.unwrap() <= 1e-8);
    }

    let sys = mimo_block(60, 3, 1);
    let mut cfg = GreedyConfig::new(EstimatorKind::Delta3Pr, 1e-6, grid(12));
    cfg.max_iterations = 3;
    let res = run_greedy(&sys, &cfg).unwrap();
    assert!(res.trace[0].rom_dimension >= 3);
}

#[test]
fn all_singular_training_set_is_an_error() {
    let q = crate::system::AffineMatrix::zeros(2, 2)
        .with_term(
            crate::system::Monomial::var("s"),
            crate::linalg::CMatrix::identity(2),
        )
        .unwrap();
    let sing = ParametricSystem::from_affine(
        q,
        crate::system::AffineMatrix::constant(crate::linalg::CMatrix::unit(2, 0)),
        crate::system::AffineMatrix::constant(crate::linalg::CMatrix::unit(2, 0).transpose()),
    )
    .unwrap();
    let train = vec![SamplePoint::laplace(C64::new(0.0, 0.0)); 3];
    let cfg = GreedyConfig::new(EstimatorKind::Delta1, 1e-3, train);
    assert!(matches!(
        run_greedy(&sing, &cfg),
        Err(Error::AllSamplesSingular)
    ));
}
