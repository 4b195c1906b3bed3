//! LU factorization with partial pivoting.
//!
//! The elimination skips zero multipliers and zero pivot-row entries, so banded
//! operators (ladder circuits, finite-difference stencils) factor in roughly
//! `O(n * bandwidth^2)` plus an `O(n^2)` scan even though storage stays dense.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LuFactorization {
    factors: CMatrix,
    /// Row swapped with row `k` at elimination step `k`.
    pivots: Vec<usize>,
    dim: usize,
}

/// Factors `P A = L U`. Fails with [`Error::SingularMatrix`] when a pivot magnitude
/// drops below `dim * eps * max|A|`.
pub fn lu_factor(a: &CMatrix) -> Result<LuFactorization> {
    if !a.is_square() {
        return Err(Error::dims(format!(
            "LU needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let threshold = n as f64 * f64::EPSILON * a.max_abs();
    let mut lu = a.clone();
    let mut pivots = Vec::with_capacity(n);
    let mut nz: Vec<usize> = Vec::with_capacity(n);

    for k in 0..n {
        let (p, pivot) = {
            let col = lu.col(k);
            (k..n)
                .map(|i| (i, col[i].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                )
        };
        if pivot == 0.0 || pivot < threshold {
            return Err(Error::SingularMatrix {
                step: k,
                pivot,
                threshold,
            });
        }
        pivots.push(p);
        if p != k {
            let data = lu.as_mut_slice();
            for j in 0..n {
                data.swap(j * n + k, j * n + p);
            }
        }

        let inv = 1.0 / lu[(k, k)];
        nz.clear();
        {
            let col = lu.col_mut(k);
            for (i, v) in col.iter_mut().enumerate().skip(k + 1) {
                if *v != ZERO {
                    *v *= inv;
                    nz.push(i);
                }
            }
        }
        if nz.is_empty() {
            continue;
        }
        let dense = 2 * nz.len() > n - k - 1;
        let data = lu.as_mut_slice();
        let (head, tail) = data.split_at_mut((k + 1) * n);
        let lcol = &head[k * n..(k + 1) * n];
        for colj in tail.chunks_exact_mut(n) {
            let akj = colj[k];
            if akj == ZERO {
                continue;
            }
            if dense {
                for (dst, &l) in colj[k + 1..].iter_mut().zip(&lcol[k + 1..]) {
                    *dst -= l * akj;
                }
            } else {
                for &i in &nz {
                    colj[i] -= lcol[i] * akj;
                }
            }
        }
    }

    Ok(LuFactorization {
        factors: lu,
        pivots,
        dim: n,
    })
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &CMatrix {
        &self.factors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Solves `A X = B` for a block right-hand side.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        self.check_rhs(b)?;
        let n = self.dim;
        let mut x = b.clone();
        for j in 0..b.cols() {
            let xj = x.col_mut(j);
            for (k, &p) in self.pivots.iter().enumerate() {
                xj.swap(k, p);
            }
            // L y = P b, unit diagonal
            for k in 0..n {
                let xk = xj[k];
                if xk == ZERO {
                    continue;
                }
                let l = self.factors.col(k);
                for i in k + 1..n {
                    xj[i] -= l[i] * xk;
                }
            }
            // U x = y
            for k in (0..n).rev() {
                let u = self.factors.col(k);
                xj[k] /= u[k];
                let xk = xj[k];
                if xk == ZERO {
                    continue;
                }
                for i in 0..k {
                    xj[i] -= u[i] * xk;
                }
            }
        }
        Ok(x)
    }

    /// Solves `Aᵀ X = B` (plain transpose) with the same factors.
    pub fn solve_transpose(&self, b: &CMatrix) -> Result<CMatrix> {
        self.check_rhs(b)?;
        let n = self.dim;
        let mut x = b.clone();
        for j in 0..b.cols() {
            let xj = x.col_mut(j);
            // Uᵀ y = b
            for k in 0..n {
                let u = self.factors.col(k);
                let mut acc = xj[k];
                for i in 0..k {
                    acc -= u[i] * xj[i];
                }
                xj[k] = acc / u[k];
            }
            // Lᵀ w = y
            for k in (0..n).rev() {
                let l = self.factors.col(k);
                let mut acc: C64 = xj[k];
                for i in k + 1..n {
                    acc -= l[i] * xj[i];
                }
                xj[k] = acc;
            }
            for (k, &p) in self.pivots.iter().enumerate().rev() {
                xj.swap(k, p);
            }
        }
        Ok(x)
    }

    fn check_rhs(&self, b: &CMatrix) -> Result<()> {
        if b.rows() != self.dim {
            return Err(Error::dims(format!(
                "factorization of order {} applied to a block with {} rows",
                self.dim,
                b.rows()
            )));
        }
        Ok(())
    }
}

/// Factor-and-solve convenience.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    lu_factor(a)?.solve(b)
}
