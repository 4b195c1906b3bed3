//! Moment-matching basis blocks.
//!
//! Two constructions are offered. [`krylov_block`] is the rational Krylov block
//! `[B̃, ÃB̃, …, Ã^{q−1}B̃]` with `Ã = (sE − A)⁻¹E`, `B̃ = (sE − A)⁻¹B` for systems
//! whose only parameter is `s`. [`multimoment_block`] expands
//! `x(μ̃) = (I − Σ σ_j M_j)⁻¹ B_M` around an expansion point, where
//! `σ_j = h_j(μ̃) − h_j(μ̃ⁱ)` and `M_j = −Q(μ̃ⁱ)⁻¹Q_j`, and returns the level
//! blocks `[R_0, …, R_q]` with `R_k = [M_1 R_{k−1}, …, M_p R_{k−1}]`.
//!
//! Blocks are returned unorthogonalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, LuFactorization, C64, ZERO};
use crate::system::{ParametricSystem, SamplePoint, LAPLACE};

/// Default width limit for a multi-moment block.
pub const DEFAULT_MAX_BLOCK_COLUMNS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Primal,
    Dual,
}

/// Where and how deep to expand.
///
/// For [`multimoment_block`], `order` is the index of the highest level kept, so
/// `order = 0` yields `R_0` alone. `max_columns` truncates the highest level
/// once the block would exceed that width.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionRequest {
    pub point: SamplePoint,
    pub order: usize,
    pub direction: Direction,
    pub max_columns: usize,
}

impl ExpansionRequest {
    pub fn new(point: SamplePoint, order: usize, direction: Direction) -> Self {
        ExpansionRequest {
            point,
            order,
            direction,
            max_columns: DEFAULT_MAX_BLOCK_COLUMNS,
        }
    }

    pub fn with_max_columns(mut self, max_columns: usize) -> Self {
        self.max_columns = max_columns;
        self
    }
}

/// `E` in `Q(s) = sE − A`, or [`Error::NotFirstOrder`].
pub fn first_order_e(sys: &ParametricSystem) -> Result<CMatrix> {
    if !sys.is_first_order_in_s() {
        return Err(Error::NotFirstOrder(
            "rational Krylov blocks need Q(s) = sE - A with constant B and C".into(),
        ));
    }
    let mut e = CMatrix::zeros(sys.n(), sys.n());
    for t in sys.q().terms() {
        e.axpy(t.monomial.coefficient, &t.matrix);
    }
    Ok(e)
}

/// `[B̃, ÃB̃, …, Ã^{q−1}B̃]` at `s`, one LU of `sE − A` for all `q` blocks.
pub fn krylov_block(sys: &ParametricSystem, s: C64, q: usize) -> Result<CMatrix> {
    krylov(sys, s, q, Direction::Primal)
}

/// `[C̃, Ã_c C̃, …]` with `Ã_c = (sE − A)⁻ᵀEᵀ`, `C̃ = (sE − A)⁻ᵀCᵀ`.
pub fn dual_krylov_block(sys: &ParametricSystem, s: C64, q: usize) -> Result<CMatrix> {
    krylov(sys, s, q, Direction::Dual)
}

fn krylov(sys: &ParametricSystem, s: C64, q: usize, dir: Direction) -> Result<CMatrix> {
    if q == 0 {
        return Err(Error::InvalidConfig(
            "Krylov order must be at least 1".into(),
        ));
    }
    let e = first_order_e(sys)?;
    let p = SamplePoint::laplace(s);
    let lu = sys.factor_at(&p)?;
    let (rhs, e) = match dir {
        Direction::Primal => (sys.b().base().clone(), e),
        Direction::Dual => (sys.c().base().transpose(), e.transpose()),
    };
    let apply = |lu: &LuFactorization, x: &CMatrix| match dir {
        Direction::Primal => lu.solve(x),
        Direction::Dual => lu.solve_transpose(x),
    };
    let mut blocks = vec![apply(&lu, &rhs)?];
    for k in 1..q {
        let next = apply(&lu, &e.matmul(&blocks[k - 1]))?;
        blocks.push(next);
    }
    Ok(CMatrix::hstack(&blocks.iter().collect::<Vec<_>>()))
}

/// Multi-moment block `[R_0, R_1, …, R_q]` around `req.point`.
///
/// `R_0` stacks `Q(μ̃ⁱ)⁻¹B_j` over the constant part and every affine term of `B`
/// (for the dual direction: of `Cᵀ`, with `Qᵀ` in place of `Q`).
pub fn multimoment_block(sys: &ParametricSystem, req: &ExpansionRequest) -> Result<CMatrix> {
    let dual;
    let target = match req.direction {
        Direction::Primal => sys,
        Direction::Dual => {
            dual = sys.dual();
            &dual
        }
    };
    let lu = target.factor_at(&req.point)?;
    let cap = req.max_columns.max(1);

    let rhs = target.b();
    let mut r0_parts: Vec<CMatrix> = Vec::new();
    if rhs.is_constant() || rhs.base().max_abs() > 0.0 {
        r0_parts.push(rhs.base().clone());
    }
    r0_parts.extend(rhs.terms().iter().map(|t| t.matrix.clone()));
    let r0 = lu.solve(&CMatrix::hstack(&r0_parts.iter().collect::<Vec<_>>()))?;
    let mut width = r0.cols();
    let mut levels = vec![truncate(r0, cap)];

    let ops: Vec<&CMatrix> = target.q().terms().iter().map(|t| &t.matrix).collect();
    for _ in 1..=req.order {
        if width >= cap || ops.is_empty() {
            break;
        }
        let prev = levels.last().expect("R_0 exists");
        let mut parts = Vec::with_capacity(ops.len());
        for qj in &ops {
            if width >= cap {
                break;
            }
            let mut mj = lu.solve(&qj.matmul(prev))?;
            mj = mj.scale(-crate::linalg::ONE);
            let mj = truncate(mj, cap - width);
            width += mj.cols();
            parts.push(mj);
        }
        levels.push(CMatrix::hstack(&parts.iter().collect::<Vec<_>>()));
    }
    Ok(CMatrix::hstack(&levels.iter().collect::<Vec<_>>()))
}

fn truncate(m: CMatrix, cols: usize) -> CMatrix {
    if m.cols() <= cols {
        m
    } else {
        log::warn!("moment block truncated from {} to {cols} columns", m.cols());
        m.select_columns(0..cols)
    }
}

/// Primal or dual block at `point`: Krylov for `sE − A` systems, multi-moment
/// otherwise. `q` follows the respective convention of each construction.
pub fn expansion_block(
    sys: &ParametricSystem,
    point: &SamplePoint,
    q: usize,
    direction: Direction,
    max_columns: usize,
) -> Result<CMatrix> {
    if sys.is_first_order_in_s() {
        let s = point
            .get(LAPLACE)
            .ok_or_else(|| Error::MissingParameter(LAPLACE.into()))?;
        let block = krylov(sys, s, q, direction)?;
        Ok(truncate(
            block,
            max_columns.max(sys.n_inputs().max(sys.n_outputs())),
        ))
    } else {
        let req = ExpansionRequest::new(point.clone(), q, direction).with_max_columns(max_columns);
        multimoment_block(sys, &req)
    }
}

/// `true` when the block has no nonzero column.
pub fn is_zero_block(m: &CMatrix) -> bool {
    m.as_slice().iter().all(|&z| z == ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Basis, BasisRole, ONE};
    use crate::projection::reduce_galerkin;
    use crate::system::{AffineMatrix, Monomial};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(n, m, |_, _| C64::new(rng.random::<f64>() - 0.5, 0.0))
    }

    fn first_order(e: CMatrix, a: CMatrix, b: CMatrix, c: CMatrix) -> ParametricSystem {
        ParametricSystem::from_first_order(
            &AffineMatrix::constant(e),
            &AffineMatrix::constant(a),
            AffineMatrix::constant(b),
            AffineMatrix::constant(c),
        )
        .unwrap()
    }

    fn stable(n: usize, rng: &mut ChaCha8Rng) -> ParametricSystem {
        let mut a = random(n, n, rng);
        for i in 0..n {
            a[(i, i)] -= C64::new(n as f64 / 2.0, 0.0);
        }
        first_order(
            CMatrix::identity(n),
            a,
            random(n, 1, rng),
            random(1, n, rng),
        )
    }

    #[test]
    fn order_one_is_single_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sys = stable(10, &mut rng);
        let s = C64::new(0.0, 2.0);
        let k = krylov_block(&sys, s, 1).unwrap();
        let x = sys.primal_solve_full(&SamplePoint::laplace(s)).unwrap();
        assert!(k.max_abs_diff(&x) <= 1e-14 * x.max_abs());
        let kd = dual_krylov_block(&sys, s, 1).unwrap();
        let xd = sys.dual_solve_full(&SamplePoint::laplace(s)).unwrap();
        assert!(kd.max_abs_diff(&xd) <= 1e-14 * xd.max_abs());
    }

    #[test]
    fn identity_pencil_repeats_b() {
        let b = CMatrix::from_real_rows(&[&[1.0], &[2.0], &[3.0]]);
        let sys = first_order(
            CMatrix::identity(3),
            CMatrix::zeros(3, 3),
            b.clone(),
            b.transpose(),
        );
        let k = krylov_block(&sys, ONE, 3).unwrap();
        for j in 0..3 {
            assert_eq!(k.column(j), b);
        }
        assert_eq!(Basis::from_block(&k, BasisRole::V).dim(), 1);
    }

    #[test]
    fn symmetric_dual_equals_primal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 12;
        let a = random(n, n, &mut rng);
        let a = a.add(&a.transpose());
        let b = random(n, 1, &mut rng);
        let sys = first_order(CMatrix::identity(n), a, b.clone(), b.transpose());
        let s = C64::new(0.5, 1.0);
        let kp = krylov_block(&sys, s, 3).unwrap();
        let kd = dual_krylov_block(&sys, s, 3).unwrap();
        assert!(kp.max_abs_diff(&kd) <= 1e-12 * kp.max_abs());
    }

    #[test]
    fn krylov_rom_interpolates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sys = stable(50, &mut rng);
        let s = C64::new(0.0, 1.3);
        let v = Basis::from_block(
            &krylov_block(&sys, s, 3).unwrap().split_real_imag(),
            BasisRole::V,
        );
        let rom = reduce_galerkin(&sys, &v).unwrap();
        let p = SamplePoint::laplace(s);
        let h = sys.transfer_function(&p).unwrap()[(0, 0)];
        let hr = rom.transfer_function(&p).unwrap()[(0, 0)];
        assert!((h - hr).norm() <= 1e-8 * h.norm());

        let rom_du = reduce_galerkin(
            &sys.dual(),
            &Basis::from_block(&dual_krylov_block(&sys, s, 3).unwrap(), BasisRole::VDu),
        )
        .unwrap();
        let hd = rom_du.transfer_function(&p).unwrap()[(0, 0)];
        assert!((h - hd).norm() <= 1e-8 * h.norm());
    }

    #[test]
    fn krylov_rejects_parametric_systems() {
        let q = AffineMatrix::constant(CMatrix::identity(2))
            .with_term(Monomial::one().pow("s", 2), CMatrix::identity(2))
            .unwrap();
        let sys = ParametricSystem::from_affine(
            q,
            AffineMatrix::constant(CMatrix::unit(2, 0)),
            AffineMatrix::constant(CMatrix::unit(2, 0).transpose()),
        )
        .unwrap();
        assert!(matches!(
            krylov_block(&sys, ONE, 2),
            Err(Error::NotFirstOrder(_))
        ));
    }

    #[test]
    fn single_term_collapses_to_krylov() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sys = stable(15, &mut rng);
        let s = C64::new(0.0, 0.7);
        let req = ExpansionRequest::new(SamplePoint::laplace(s), 2, Direction::Primal);
        let mm = multimoment_block(&sys, &req).unwrap();
        let kr = krylov_block(&sys, s, 3).unwrap();
        assert_eq!(mm.shape(), kr.shape());
        // M_1 = −Q⁻¹E, so levels agree up to sign (−1)^k.
        for k in 0..3 {
            let sign = if k % 2 == 0 { ONE } else { -ONE };
            let d = mm.column(k).sub(&kr.column(k).scale(sign));
            assert!(d.max_abs() <= 1e-12 * kr.column(k).max_abs());
        }
    }

    #[test]
    fn order_zero_is_r0_and_reuse_matches_fresh_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sys = two_parameter(30, &mut rng);
        let p = SamplePoint::laplace(C64::new(0.0, 1.0)).with_real("d", 0.4);
        let r0 = multimoment_block(
            &sys,
            &ExpansionRequest::new(p.clone(), 0, Direction::Primal),
        )
        .unwrap();
        let x = sys.primal_solve_full(&p).unwrap();
        assert!(r0.max_abs_diff(&x) <= 1e-13 * x.max_abs());

        let blk = multimoment_block(
            &sys,
            &ExpansionRequest::new(p.clone(), 1, Direction::Primal),
        )
        .unwrap();
        assert_eq!(blk.cols(), 1 + sys.q().terms().len());
        let qf = sys.q().assemble(&p).unwrap();
        for (j, t) in sys.q().terms().iter().enumerate() {
            let fresh = crate::linalg::solve(&qf, &t.matrix.matmul(&x))
                .unwrap()
                .scale(-ONE);
            let got = blk.column(1 + j);
            assert!(got.max_abs_diff(&fresh) <= 1e-13 * fresh.max_abs().max(1e-300));
        }
    }

    fn two_parameter(n: usize, rng: &mut ChaCha8Rng) -> ParametricSystem {
        let mut t = random(n, n, rng);
        for i in 0..n {
            t[(i, i)] += C64::new(n as f64, 0.0);
        }
        let q = AffineMatrix::constant(t)
            .with_term(Monomial::var("s"), CMatrix::identity(n))
            .unwrap()
            .with_term(Monomial::var("d"), random(n, n, rng))
            .unwrap();
        ParametricSystem::from_affine(
            q,
            AffineMatrix::constant(random(n, 1, rng)),
            AffineMatrix::constant(random(1, n, rng)),
        )
        .unwrap()
    }

    #[test]
    fn multimoment_rom_interpolates_and_matches_sensitivities() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sys = two_parameter(30, &mut rng);
        let p0 = SamplePoint::laplace(C64::new(0.0, 2.0)).with_real("d", 0.3);
        let blk = multimoment_block(
            &sys,
            &ExpansionRequest::new(p0.clone(), 1, Direction::Primal),
        )
        .unwrap();
        let v = Basis::from_block(&blk.split_real_imag(), BasisRole::V);
        let rom = reduce_galerkin(&sys, &v).unwrap();
        let h = sys.transfer_function(&p0).unwrap()[(0, 0)];
        let hr = rom.transfer_function(&p0).unwrap()[(0, 0)];
        assert!((h - hr).norm() <= 1e-8 * h.norm().max(1.0));

        // dH/dd by central differences, full vs reduced
        let step = 1e-5;
        let at = |d: f64| p0.clone().with_real("d", d);
        let dh = (sys.transfer_function(&at(0.3 + step)).unwrap()[(0, 0)]
            - sys.transfer_function(&at(0.3 - step)).unwrap()[(0, 0)])
            / (2.0 * step);
        let dhr = (rom.transfer_function(&at(0.3 + step)).unwrap()[(0, 0)]
            - rom.transfer_function(&at(0.3 - step)).unwrap()[(0, 0)])
            / (2.0 * step);
        assert!((dh - dhr).norm() <= 1e-4 * dh.norm().max(1.0));
    }

    #[test]
    fn column_cap_truncates_highest_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sys = two_parameter(20, &mut rng);
        let p = SamplePoint::laplace(ONE).with_real("d", 1.0);
        let full = multimoment_block(
            &sys,
            &ExpansionRequest::new(p.clone(), 2, Direction::Primal),
        )
        .unwrap();
        assert_eq!(full.cols(), 1 + 2 + 4);
        let capped = multimoment_block(
            &sys,
            &ExpansionRequest::new(p, 2, Direction::Primal).with_max_columns(5),
        )
        .unwrap();
        assert_eq!(capped.cols(), 5);
        assert_eq!(capped, full.select_columns(0..5));
    }

    #[test]
    fn affine_input_stacks_r0() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 10;
        let mut t = random(n, n, &mut rng);
        for i in 0..n {
            t[(i, i)] += C64::new(10.0, 0.0);
        }
        let q = AffineMatrix::constant(t)
            .with_term(Monomial::var("s"), CMatrix::identity(n))
            .unwrap();
        let b = AffineMatrix::constant(random(n, 1, &mut rng))
            .with_term(Monomial::var("d"), random(n, 1, &mut rng))
            .unwrap();
        let sys =
            ParametricSystem::from_affine(q, b, AffineMatrix::constant(random(1, n, &mut rng)))
                .unwrap();
        let p = SamplePoint::laplace(ONE).with_real("d", 2.0);
        let blk = multimoment_block(
            &sys,
            &ExpansionRequest::new(p.clone(), 0, Direction::Primal),
        )
        .unwrap();
        assert_eq!(blk.cols(), 2);
        let x = sys.primal_solve_full(&p).unwrap();
        let v = Basis::from_block(&blk, BasisRole::V);
        assert!(v.relative_distance(x.col(0)) <= 1e-12);
    }
}
