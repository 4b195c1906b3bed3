//! Petrov-Galerkin reduced models.
//!
//! A reduced model keeps the affine structure of its parent: every term matrix is
//! projected as `Wᴴ Q_j V`, the input as `Wᴴ B_j`, the output as `C_j V`. For the
//! real bases produced by the greedy driver `Wᴴ = Wᵀ`.

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, Basis, CMatrix};
use crate::system::{singular_as, AffineMatrix, ParametricSystem, SamplePoint};

#[derive(Debug, Clone)]
pub struct ReducedModel {
    q: AffineMatrix,
    b: AffineMatrix,
    c: AffineMatrix,
    v: Basis,
    w: Basis,
}

/// Projects `sys` onto trial basis `v` with test basis `w`.
pub fn reduce(sys: &ParametricSystem, w: &Basis, v: &Basis) -> Result<ReducedModel> {
    if v.rows() != sys.n() || w.rows() != sys.n() {
        return Err(Error::dims(format!(
            "bases have {} and {} rows, system order is {}",
            w.rows(),
            v.rows(),
            sys.n()
        )));
    }
    if v.dim() != w.dim() {
        return Err(Error::dims(format!(
            "trial basis has {} columns, test basis {}",
            v.dim(),
            w.dim()
        )));
    }
    let (vm, wm) = (v.matrix(), w.matrix());
    Ok(ReducedModel {
        q: sys.q().map(|m| wm.adjoint_mul(&m.matmul(vm))),
        b: sys.b().map(|m| wm.adjoint_mul(m)),
        c: sys.c().map(|m| m.matmul(vm)),
        v: v.clone(),
        w: w.clone(),
    })
}

/// Galerkin projection (`W = V`).
pub fn reduce_galerkin(sys: &ParametricSystem, v: &Basis) -> Result<ReducedModel> {
    reduce(sys, v, v)
}

impl ReducedModel {
    pub fn q(&self) -> &AffineMatrix {
        &self.q
    }

    pub fn b(&self) -> &AffineMatrix {
        &self.b
    }

    pub fn c(&self) -> &AffineMatrix {
        &self.c
    }

    pub fn v(&self) -> &Basis {
        &self.v
    }

    pub fn w(&self) -> &Basis {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn n(&self) -> usize {
        self.v.rows()
    }

    /// Solves `Q̂(p) z = rhs` for a reduced right-hand side and lifts `x̂ = V z`.
    pub fn solve_reduced(&self, p: &SamplePoint, rhs: &CMatrix) -> Result<(CMatrix, CMatrix)> {
        if self.dim() == 0 {
            let z = CMatrix::zeros(0, rhs.cols());
            return Ok((z, CMatrix::zeros(self.n(), rhs.cols())));
        }
        let lu = lu_factor(&self.q.assemble(p)?).map_err(|e| singular_as(e, p, true))?;
        let z = lu.solve(rhs)?;
        let x = self.v.matrix().matmul(&z);
        Ok((z, x))
    }

    /// Galerkin-type solve for a full-order right-hand side: `Q̂ z = Wᴴ rhs`.
    pub fn solve_projected(&self, p: &SamplePoint, rhs: &CMatrix) -> Result<(CMatrix, CMatrix)> {
        if rhs.rows() != self.n() {
            return Err(Error::dims("full-order rhs length differs from basis rows"));
        }
        self.solve_reduced(p, &self.w.matrix().adjoint_mul(rhs))
    }

    /// `Ĥ(p) = Ĉ(p) Q̂(p)⁻¹ B̂(p)`
    pub fn transfer_function(&self, p: &SamplePoint) -> Result<CMatrix> {
        let (z, _) = reduced_primal_solve(self, p)?;
        Ok(self.c.assemble(p)?.matmul(&z))
    }
}

/// `Q̂(p) z_pr = B̂(p)`, returning `(z_pr, V z_pr)`.
pub fn reduced_primal_solve(rom: &ReducedModel, p: &SamplePoint) -> Result<(CMatrix, CMatrix)> {
    let rhs = rom.b.assemble(p)?;
    rom.solve_reduced(p, &rhs)
}

/// Solve with a reduced model of the dual system (operator `Qᵀ`, input `Cᵀ`).
pub fn reduced_dual_solve(rom_du: &ReducedModel, p: &SamplePoint) -> Result<(CMatrix, CMatrix)> {
    reduced_primal_solve(rom_du, p)
}

/// `r_pr = B(p) − Q(p) x̂_pr`
pub fn primal_residual(sys: &ParametricSystem, p: &SamplePoint, x_pr: &CMatrix) -> Result<CMatrix> {
    let mut r = sys.b().assemble(p)?;
    r.axpy(-crate::linalg::ONE, &sys.q().apply(p, x_pr)?);
    Ok(r)
}

/// `r_du = C(p)ᵀ − Q(p)ᵀ x̂_du`
pub fn dual_residual(sys: &ParametricSystem, p: &SamplePoint, x_du: &CMatrix) -> Result<CMatrix> {
    let mut r = sys.c().assemble(p)?.transpose();
    r.axpy(-crate::linalg::ONE, &sys.q().apply_transpose(p, x_du)?);
    Ok(r)
}
