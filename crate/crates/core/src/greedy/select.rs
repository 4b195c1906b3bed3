use serde::{Deserialize, Serialize};

use crate::estimators::{EstimateBreakdown, EstimatorKind};

/// Training-set indices chosen for the next iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedPoints {
    pub main: usize,
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
    pub gamma: Option<usize>,
}

/// Index maximizing `key` over the present entries. NaN ranks below every
/// number; ties go to the lowest index.
pub fn argmax<T>(items: &[Option<T>], key: impl Fn(&T) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, item) in items.iter().enumerate() {
        let Some(item) = item else { continue };
        let v = key(item);
        let v = if v.is_nan() { f64::NEG_INFINITY } else { v };
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Next expansion points from one sweep of per-sample breakdowns (`None` marks
/// samples excluded from the sweep).
///
/// * main: largest total.
/// * alpha: `Delta2`/`Delta2Pr` largest second part; `Delta1Pr` largest
///   `‖r_rpr‖₂`; `Delta3`/`Delta3Pr` largest first part.
/// * beta (`Delta3Pr`): largest second part.
/// * gamma (symmetric variant): `Delta1` largest `‖r_du‖₂`; `Delta2`/`Delta2Pr`
///   largest first part.
pub fn select_points(
    kind: EstimatorKind,
    symmetric_variant: bool,
    breakdowns: &[Option<EstimateBreakdown>],
) -> Option<SelectedPoints> {
    use EstimatorKind::*;
    let main = argmax(breakdowns, |b| b.total)?;
    let part1 = || argmax(breakdowns, |b| b.part1);
    let part2 = || argmax(breakdowns, |b| b.part2);
    let alpha = match kind {
        Delta2 | Delta2Pr => part2(),
        Delta1Pr => argmax(breakdowns, |b| {
            b.aux.primal_residual_residual.unwrap_or(f64::NAN)
        }),
        Delta3 | Delta3Pr => part1(),
        Delta1 | DeltaR => None,
    };
    let beta = (kind == Delta3Pr).then(part2).flatten();
    let gamma = if symmetric_variant {
        match kind {
            Delta1 => argmax(breakdowns, |b| b.aux.dual_residual.unwrap_or(f64::NAN)),
            Delta2 | Delta2Pr => part1(),
            _ => None,
        }
    } else {
        None
    };
    Some(SelectedPoints {
        main,
        alpha,
        beta,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::AuxNorms;

    fn b(total_parts: (f64, f64), rpr: f64, rdu: f64, rrpr: f64) -> Option<EstimateBreakdown> {
        Some(EstimateBreakdown {
            total: total_parts.0 + total_parts.1,
            part1: total_parts.0,
            part2: total_parts.1,
            aux: AuxNorms {
                primal_residual: rpr,
                dual_residual: Some(rdu),
                primal_residual_residual: Some(rrpr),
            },
        })
    }

    #[test]
    fn single_sample_selects_zero() {
        let one = [b((1.0, 1.0), 1.0, 1.0, 1.0)];
        for kind in EstimatorKind::ALL {
            let s = select_points(kind, kind.supports_symmetric_variant(), &one).unwrap();
            assert_eq!(s.main, 0);
            for extra in [s.alpha, s.beta, s.gamma].into_iter().flatten() {
                assert_eq!(extra, 0);
            }
        }
    }

    #[test]
    fn rules_follow_brute_force() {
        let list = vec![
            b((1.0, 5.0), 0.1, 9.0, 0.3),
            b((4.0, 3.0), 0.2, 1.0, 7.0),
            None,
            b((6.0, 0.5), 0.3, 2.0, 0.1),
        ];
        let s = select_points(EstimatorKind::Delta2, false, &list).unwrap();
        assert_eq!((s.main, s.alpha, s.gamma), (1, Some(0), None));
        let s = select_points(EstimatorKind::Delta1, true, &list).unwrap();
        assert_eq!(s.gamma, Some(0));
        let s = select_points(EstimatorKind::Delta1Pr, false, &list).unwrap();
        assert_eq!(s.alpha, Some(1));
        let s = select_points(EstimatorKind::Delta3Pr, false, &list).unwrap();
        assert_eq!((s.alpha, s.beta), (Some(3), Some(0)));
        let s = select_points(EstimatorKind::Delta2Pr, true, &list).unwrap();
        assert_eq!(s.gamma, Some(3));
    }

    #[test]
    fn ties_and_nan() {
        let list = vec![Some(f64::NAN), Some(2.0), Some(2.0), None];
        assert_eq!(argmax(&list, |v| *v), Some(1));
        let none: Vec<Option<f64>> = vec![None, None];
        assert_eq!(argmax(&none, |v| *v), None);
        assert_eq!(argmax(&[Some(f64::NAN)], |v: &f64| *v), Some(0));
    }
}
