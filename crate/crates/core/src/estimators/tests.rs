use super::*;
use crate::linalg::{BasisRole, C64};
use crate::synthetic::{mimo_block, random_stable, rc_ladder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_basis(n: usize, r: usize, rng: &mut ChaCha8Rng, role: BasisRole) -> Basis {
    let block = CMatrix::from_fn(n, r, |_, _| C64::new(rng.random::<f64>() - 0.5, 0.0));
    Basis::from_block(&block, role)
}

fn full_set(n: usize, rng: &mut ChaCha8Rng) -> BasisSet {
    BasisSet {
        v: random_basis(n, 4, rng, BasisRole::V),
        v_du: Some(random_basis(n, 4, rng, BasisRole::VDu)),
        v_rdu: Some(random_basis(n, 5, rng, BasisRole::VRdu)),
        v_rpr: Some(random_basis(n, 5, rng, BasisRole::VRpr)),
        v_rrpr: Some(random_basis(n, 6, rng, BasisRole::VRrpr)),
    }
}

fn point() -> SamplePoint {
    SamplePoint::laplace(C64::new(0.0, 1.7))
}

#[test]
fn kind_names_round_trip() {
    for k in EstimatorKind::ALL {
        assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
    }
    assert_eq!(
        "Delta2Pr".parse::<EstimatorKind>().unwrap(),
        EstimatorKind::Delta2Pr
    );
    assert!("delta9".parse::<EstimatorKind>().is_err());
}

#[test]
fn missing_roms_are_reported() {
    let sys = rc_ladder(10);
    let v = Basis::from_block(&CMatrix::unit(10, 0), BasisRole::V);
    let ws = EstimatorWorkspace::new(EstimatorKind::Delta1, reduce(&sys, &v, &v).unwrap());
    let err = evaluate(EstimatorKind::Delta1, &ws, &sys, &point()).unwrap_err();
    assert!(matches!(
        err,
        Error::MissingWorkspaceRom { rom: "dual", .. }
    ));
    let err = evaluate(EstimatorKind::Delta3Pr, &ws, &sys, &point()).unwrap_err();
    assert!(matches!(err, Error::MissingWorkspaceRom { .. }));
}

#[test]
fn two_part_totals_and_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sys = random_stable(40, 4);
    let ws = EstimatorWorkspace::galerkin(&sys, EstimatorKind::Delta3Pr, &full_set(40, &mut rng))
        .unwrap();
    let p = point();
    let get = |k| evaluate(k, &ws, &sys, &p).unwrap();
    for k in EstimatorKind::ALL {
        let b = get(k);
        assert_eq!(b.total, b.part1 + b.part2);
        if !k.is_two_part() {
            assert_eq!(b.part2, 0.0);
        }
    }
    let d1 = get(EstimatorKind::Delta1).total;
    let d1pr = get(EstimatorKind::Delta1Pr).total;
    assert!(get(EstimatorKind::Delta2).total >= d1);
    assert!(get(EstimatorKind::Delta2Pr).total >= d1);
    assert!(get(EstimatorKind::Delta3).total >= d1pr);
    assert!(get(EstimatorKind::Delta3Pr).total >= d1pr);
    assert_eq!(get(EstimatorKind::Delta2).part1, d1);
    assert_eq!(get(EstimatorKind::Delta3).part1, d1pr);
}

#[test]
fn exact_dual_rom_gives_true_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sys = random_stable(30, 5);
    let mut set = full_set(30, &mut rng);
    set.v_du = Some(Basis::identity(30, BasisRole::VDu));
    let ws = EstimatorWorkspace::galerkin(&sys, EstimatorKind::Delta1, &set).unwrap();
    let p = point();
    let d1 = evaluate(EstimatorKind::Delta1, &ws, &sys, &p)
        .unwrap()
        .total;
    let e = true_error(&ws, &sys, &p).unwrap();
    assert!((d1 - e).abs() <= 1e-10 * e);
    let rep = sensitivity_report(&sys, &ws, &p, EstimatorKind::Delta1).unwrap();
    assert!(rep.epsilon1 <= 1e-10 * e);
}

#[test]
fn full_basis_has_zero_error() {
    let sys = random_stable(20, 1);
    let id = Basis::identity(20, BasisRole::V);
    let ws = EstimatorWorkspace::new(EstimatorKind::Delta1, reduce(&sys, &id, &id).unwrap());
    let p = point();
    let h = sys.transfer_function(&p).unwrap().max_abs();
    assert!(true_error(&ws, &sys, &p).unwrap() <= 1e-10 * h);
}

#[test]
fn mimo_matches_channel_loop_and_siso_matches_evaluate() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sys = mimo_block(40, 4, 6);
    let set = full_set(40, &mut rng);
    let ws = EstimatorWorkspace::galerkin(&sys, EstimatorKind::Delta3Pr, &set).unwrap();
    let p = point();
    for kind in [
        EstimatorKind::Delta1,
        EstimatorKind::Delta2Pr,
        EstimatorKind::Delta3Pr,
    ] {
        let mimo = evaluate_mimo(kind, &ws, &sys, &p).unwrap();
        let mut brute: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let ch = sys.channel(i, j);
                let ch_ws = EstimatorWorkspace::galerkin(&ch, kind, &set).unwrap();
                brute = brute.max(evaluate(kind, &ch_ws, &ch, &p).unwrap().total);
            }
        }
        assert!(
            (mimo - brute).abs() <= 1e-13 * brute.max(1e-300),
            "{kind}: {mimo} vs {brute}"
        );
    }

    let siso = rc_ladder(40);
    let ws = EstimatorWorkspace::galerkin(&siso, EstimatorKind::Delta2, &set).unwrap();
    assert_eq!(
        evaluate_mimo(EstimatorKind::Delta2, &ws, &siso, &p).unwrap(),
        evaluate(EstimatorKind::Delta2, &ws, &siso, &p)
            .unwrap()
            .total
    );
}

#[test]
fn randomized_estimate_with_unit_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sys = random_stable(25, 2);
    let ws =
        EstimatorWorkspace::galerkin(&sys, EstimatorKind::DeltaR, &full_set(25, &mut rng)).unwrap();
    let p = point();
    let d1 = evaluate(EstimatorKind::Delta1, &ws, &sys, &p)
        .unwrap()
        .total;
    let k = 20;
    let dr = delta_r_with_weights(&ws, &sys, &p, &vec![1.0; k]).unwrap();
    let expect = (k as f64).sqrt() / k as f64 * d1;
    assert!((dr - expect).abs() <= 1e-13 * expect);

    let via_kind = evaluate(EstimatorKind::DeltaR, &ws, &sys, &p)
        .unwrap()
        .total;
    let direct = delta_r(&ws, &sys, &p, 20, 0).unwrap();
    assert!((via_kind - direct).abs() <= 1e-13 * direct);
    assert_eq!(standard_normal_weights(5, 9), standard_normal_weights(5, 9));
}
