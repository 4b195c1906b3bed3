use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{dotc, norm2, CMatrix, C64};

pub const DEFAULT_DEFLATION_TOL: f64 = 1e-10;

/// Which projection matrix a [`Basis`] plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisRole {
    V,
    W,
    VDu,
    WDu,
    VRdu,
    VRpr,
    VRrpr,
}

impl BasisRole {
    pub fn file_stem(self) -> &'static str {
        match self {
            BasisRole::V => "V",
            BasisRole::W => "W",
            BasisRole::VDu => "V_du",
            BasisRole::WDu => "W_du",
            BasisRole::VRdu => "V_rdu",
            BasisRole::VRpr => "V_rpr",
            BasisRole::VRrpr => "V_rrpr",
        }
    }
}

impl fmt::Display for BasisRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_stem())
    }
}

/// Block of orthonormal columns (`BᴴB = I`).
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    columns: CMatrix,
    role: BasisRole,
}

impl Basis {
    pub fn empty(n: usize, role: BasisRole) -> Self {
        Basis {
            columns: CMatrix::zeros(n, 0),
            role,
        }
    }

    /// Orthonormalizes `block` from scratch.
    pub fn from_block(block: &CMatrix, role: BasisRole) -> Self {
        let mut b = Basis::empty(block.rows(), role);
        orthonormalize_append(&mut b, block, DEFAULT_DEFLATION_TOL);
        b
    }

    /// Wraps columns that are already orthonormal. Returns `None` when the Gram
    /// matrix deviates from the identity by more than `1e-10`.
    pub fn from_orthonormal(columns: CMatrix, role: BasisRole) -> Option<Self> {
        let b = Basis { columns, role };
        (b.orthonormality_error() <= 1e-10).then_some(b)
    }

    pub fn identity(n: usize, role: BasisRole) -> Self {
        Basis {
            columns: CMatrix::identity(n),
            role,
        }
    }

    pub fn with_role(mut self, role: BasisRole) -> Self {
        self.role = role;
        self
    }

    pub fn role(&self) -> BasisRole {
        self.role
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.columns
    }

    pub fn rows(&self) -> usize {
        self.columns.rows()
    }

    pub fn dim(&self) -> usize {
        self.columns.cols()
    }

    /// `‖BᴴB − I‖_max`
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.columns.adjoint_mul(&self.columns);
        g.sub(&CMatrix::identity(self.dim())).max_abs()
    }

    /// Norm of the component of `x` outside the span, relative to `‖x‖`.
    pub fn relative_distance(&self, x: &[C64]) -> f64 {
        let nx = norm2(x);
        if nx == 0.0 {
            return 0.0;
        }
        let mut r = x.to_vec();
        for j in 0..self.dim() {
            let q = self.columns.col(j);
            let h = dotc(q, &r);
            for (ri, &qi) in r.iter_mut().zip(q) {
                *ri -= h * qi;
            }
        }
        norm2(&r) / nx
    }

    /// Largest relative distance of any column of `other` from this span.
    pub fn contains_span_of(&self, other: &Basis, tol: f64) -> bool {
        (0..other.dim()).all(|j| self.relative_distance(other.columns.col(j)) <= tol)
    }
}

/// Appends the columns of `block` to `basis` by modified Gram-Schmidt with one
/// re-orthogonalization pass. A column is dropped when its component orthogonal
/// to the current span has norm `<= deflation_tol * ‖original column‖`.
/// Returns the number of columns actually added.
pub fn orthonormalize_append(basis: &mut Basis, block: &CMatrix, deflation_tol: f64) -> usize {
    if block.cols() == 0 {
        return 0;
    }
    if basis.dim() == 0 && basis.rows() != block.rows() {
        basis.columns = CMatrix::zeros(block.rows(), 0);
    }
    assert_eq!(
        basis.rows(),
        block.rows(),
        "block rows must match basis rows"
    );
    let mut added = 0;
    for j in 0..block.cols() {
        let mut v = block.col(j).to_vec();
        let original = norm2(&v);
        if original == 0.0 {
            continue;
        }
        for _pass in 0..2 {
            for k in 0..basis.dim() {
                let q = basis.columns.col(k);
                let h = dotc(q, &v);
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi -= h * qi;
                }
            }
        }
        let remaining = norm2(&v);
        if remaining <= deflation_tol * original {
            continue;
        }
        let inv = 1.0 / remaining;
        v.iter_mut().for_each(|z| *z *= inv);
        basis.columns.push_column(&v);
        added += 1;
    }
    added
}
