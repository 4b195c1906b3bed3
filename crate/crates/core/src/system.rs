//! Full-order parametric systems in affine form.
//!
//! Frequency-domain model `Q(μ̃) x = B(μ̃)`, `y = C(μ̃) x`, where each of `Q`, `B`,
//! `C` is an [`AffineMatrix`]: a constant part plus matrices weighted by
//! integer-exponent monomials of named parameters. The Laplace variable is the
//! parameter named `"s"`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, CMatrix, LuFactorization, C64, ONE};

/// Name of the Laplace variable.
pub const LAPLACE: &str = "s";

/// Values for every named parameter at one point of the (parameter, frequency) domain.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SamplePoint {
    pub values: BTreeMap<String, C64>,
}

impl SamplePoint {
    pub fn new() -> Self {
        Self::default()
    }

    /// `s = 2πf·i`
    pub fn frequency(f_hz: f64) -> Self {
        Self::new().with(LAPLACE, C64::new(0.0, 2.0 * PI * f_hz))
    }

    pub fn laplace(s: C64) -> Self {
        Self::new().with(LAPLACE, s)
    }

    pub fn with(mut self, name: &str, value: C64) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn with_real(self, name: &str, value: f64) -> Self {
        self.with(name, C64::new(value, 0.0))
    }

    pub fn get(&self, name: &str) -> Option<C64> {
        self.values.get(name).copied()
    }

    /// Checks that every name in `names` has a value.
    pub fn covers<'a>(&self, names: impl IntoIterator<Item = &'a String>) -> Result<()> {
        for name in names {
            if !self.values.contains_key(name) {
                return Err(Error::MissingParameter(name.clone()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SamplePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.values {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k}={:e}{:+e}i", v.re, v.im)?;
        }
        Ok(())
    }
}

/// `coefficient · Π name^exponent`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: C64,
    pub exponents: BTreeMap<String, i32>,
}

impl Monomial {
    pub fn constant(coefficient: C64) -> Self {
        Monomial {
            coefficient,
            exponents: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// The bare parameter `name`.
    pub fn var(name: &str) -> Self {
        Self::one().pow(name, 1)
    }

    /// Multiplies in `name^exponent`.
    pub fn pow(mut self, name: &str, exponent: i32) -> Self {
        let e = self.exponents.entry(name.to_string()).or_insert(0);
        *e += exponent;
        if *e == 0 {
            self.exponents.remove(name);
        }
        self
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.coefficient *= c;
        self
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone().scaled(other.coefficient);
        for (name, &e) in &other.exponents {
            out = out.pow(name, e);
        }
        out
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn eval(&self, p: &SamplePoint) -> Result<C64> {
        let mut acc = self.coefficient;
        for (name, &e) in &self.exponents {
            let v = p
                .get(name)
                .ok_or_else(|| Error::MissingParameter(name.clone()))?;
            if e < 0 && v == C64::new(0.0, 0.0) {
                return Err(Error::ZeroToNegativePower(name.clone()));
            }
            acc *= v.powi(e);
        }
        Ok(acc)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}i)", self.coefficient.re, self.coefficient.im)?;
        for (k, e) in &self.exponents {
            write!(f, "·{k}^{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineTerm {
    pub monomial: Monomial,
    pub matrix: CMatrix,
}

/// `base + Σ h_j(μ̃) · matrix_j`
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMatrix {
    base: CMatrix,
    terms: Vec<AffineTerm>,
}

impl AffineMatrix {
    pub fn constant(base: CMatrix) -> Self {
        AffineMatrix {
            base,
            terms: Vec::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(CMatrix::zeros(rows, cols))
    }

    /// Adds `monomial · matrix`. Constant monomials are folded into the base.
    pub fn push_term(&mut self, monomial: Monomial, matrix: CMatrix) -> Result<()> {
        if matrix.shape() != self.base.shape() {
            return Err(Error::dims(format!(
                "affine term is {}x{} but base is {}x{}",
                matrix.rows(),
                matrix.cols(),
                self.base.rows(),
                self.base.cols()
            )));
        }
        if monomial.is_constant() {
            self.base.axpy(monomial.coefficient, &matrix);
        } else {
            self.terms.push(AffineTerm { monomial, matrix });
        }
        Ok(())
    }

    pub fn with_term(mut self, monomial: Monomial, matrix: CMatrix) -> Result<Self> {
        self.push_term(monomial, matrix)?;
        Ok(self)
    }

    pub fn base(&self) -> &CMatrix {
        &self.base
    }

    pub fn terms(&self) -> &[AffineTerm] {
        &self.terms
    }

    pub fn rows(&self) -> usize {
        self.base.rows()
    }

    pub fn cols(&self) -> usize {
        self.base.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.base.shape()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.base.is_real() && self.terms.iter().all(|t| t.matrix.is_real())
    }

    pub fn parameter_names(&self) -> BTreeSet<String> {
        self.terms
            .iter()
            .flat_map(|t| t.monomial.exponents.keys().cloned())
            .collect()
    }

    /// Scalar weights `h_j(p)` in term order.
    pub fn coefficients(&self, p: &SamplePoint) -> Result<Vec<C64>> {
        self.terms.iter().map(|t| t.monomial.eval(p)).collect()
    }

    /// `base + Σ h_j(p) Q_j`
    pub fn assemble(&self, p: &SamplePoint) -> Result<CMatrix> {
        let mut out = self.base.clone();
        for (t, h) in self.terms.iter().zip(self.coefficients(p)?) {
            if h != C64::new(0.0, 0.0) {
                out.axpy(h, &t.matrix);
            }
        }
        Ok(out)
    }

    /// `M(p) · x` evaluated termwise.
    pub fn apply(&self, p: &SamplePoint, x: &CMatrix) -> Result<CMatrix> {
        if x.rows() != self.cols() {
            return Err(Error::dims(
                "affine apply: operand rows differ from matrix cols",
            ));
        }
        let mut out = self.base.matmul(x);
        for (t, h) in self.terms.iter().zip(self.coefficients(p)?) {
            if h != C64::new(0.0, 0.0) {
                out.axpy(h, &t.matrix.matmul(x));
            }
        }
        Ok(out)
    }

    /// `M(p)ᵀ · x` (plain transpose) evaluated termwise.
    pub fn apply_transpose(&self, p: &SamplePoint, x: &CMatrix) -> Result<CMatrix> {
        if x.rows() != self.rows() {
            return Err(Error::dims(
                "affine apply_transpose: operand rows differ from matrix rows",
            ));
        }
        let mut out = self.base.transpose_mul(x);
        for (t, h) in self.terms.iter().zip(self.coefficients(p)?) {
            if h != C64::new(0.0, 0.0) {
                out.axpy(h, &t.matrix.transpose_mul(x));
            }
        }
        Ok(out)
    }

    /// Applies `f` to the base and to every term matrix, keeping the monomials.
    pub fn map(&self, mut f: impl FnMut(&CMatrix) -> CMatrix) -> AffineMatrix {
        AffineMatrix {
            base: f(&self.base),
            terms: self
                .terms
                .iter()
                .map(|t| AffineTerm {
                    monomial: t.monomial.clone(),
                    matrix: f(&t.matrix),
                })
                .collect(),
        }
    }

    pub fn transpose(&self) -> AffineMatrix {
        self.map(CMatrix::transpose)
    }

    /// Multiplies every term (including the base) by `m`.
    pub fn times_monomial(&self, m: &Monomial) -> AffineMatrix {
        let mut out = AffineMatrix::zeros(self.rows(), self.cols());
        let all = std::iter::once((Monomial::one(), &self.base))
            .chain(self.terms.iter().map(|t| (t.monomial.clone(), &t.matrix)));
        for (mono, mat) in all {
            if mat.max_abs() == 0.0 {
                continue;
            }
            out.push_term(mono.times(m), mat.clone())
                .expect("shapes are preserved");
        }
        out
    }

    /// Sum of two affine matrices; terms are concatenated, bases added.
    pub fn plus(&self, other: &AffineMatrix) -> Result<AffineMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::dims("affine sum of differently shaped matrices"));
        }
        let mut out = self.clone();
        out.base.axpy(ONE, &other.base);
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn negated(&self) -> AffineMatrix {
        self.map(|m| m.scale(-ONE))
    }

    pub fn select_columns(&self, j: usize) -> AffineMatrix {
        self.map(|m| m.column(j))
    }

    pub fn select_row(&self, i: usize) -> AffineMatrix {
        self.map(|m| m.row(i))
    }
}

/// Full-order model `Q(μ̃) x = B(μ̃) u`, `y = C(μ̃) x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSystem {
    q: AffineMatrix,
    b: AffineMatrix,
    c: AffineMatrix,
    parameter_names: Vec<String>,
}

impl ParametricSystem {
    /// Builds a system from its affine parts. `parameter_names` must include every
    /// name used by a monomial; extra names are allowed.
    pub fn new(
        q: AffineMatrix,
        b: AffineMatrix,
        c: AffineMatrix,
        parameter_names: Vec<String>,
    ) -> Result<Self> {
        let n = q.rows();
        if !q.base.is_square() {
            return Err(Error::dims(format!(
                "Q is {}x{}, not square",
                q.rows(),
                q.cols()
            )));
        }
        if b.rows() != n {
            return Err(Error::dims(format!("B has {} rows, Q has {n}", b.rows())));
        }
        if c.cols() != n {
            return Err(Error::dims(format!("C has {} cols, Q has {n}", c.cols())));
        }
        let declared: BTreeSet<&String> = parameter_names.iter().collect();
        for part in [&q, &b, &c] {
            for name in part.parameter_names() {
                if !declared.contains(&name) {
                    return Err(Error::UnknownParameterName(name));
                }
            }
        }
        Ok(ParametricSystem {
            q,
            b,
            c,
            parameter_names,
        })
    }

    /// Like [`ParametricSystem::new`] with the parameter list inferred from the
    /// monomials (`s` first when present, the rest sorted).
    pub fn from_affine(q: AffineMatrix, b: AffineMatrix, c: AffineMatrix) -> Result<Self> {
        let mut names: BTreeSet<String> = q.parameter_names();
        names.extend(b.parameter_names());
        names.extend(c.parameter_names());
        let names = order_names(names.into_iter().collect(), true);
        Self::new(q, b, c, names)
    }

    /// `Q(μ̃) = s·E(μ̃) − A(μ̃)`
    pub fn from_first_order(
        e: &AffineMatrix,
        a: &AffineMatrix,
        b: AffineMatrix,
        c: AffineMatrix,
    ) -> Result<Self> {
        if !e.base.is_square() || e.shape() != a.shape() {
            return Err(Error::dims("E and A must be square and equally sized"));
        }
        let q = e
            .times_monomial(&Monomial::var(LAPLACE))
            .plus(&a.negated())?;
        Self::with_laplace(q, b, c)
    }

    /// `Q(μ̃) = s²·M(μ̃) + s·D(μ̃) + T(μ̃)`, reduced directly without linearization.
    pub fn from_second_order(
        m: &AffineMatrix,
        d: &AffineMatrix,
        t: &AffineMatrix,
        b: AffineMatrix,
        c: AffineMatrix,
    ) -> Result<Self> {
        if !m.base.is_square() || m.shape() != d.shape() || m.shape() != t.shape() {
            return Err(Error::dims("M, D and T must be square and equally sized"));
        }
        let s = Monomial::var(LAPLACE);
        let s2 = Monomial::one().pow(LAPLACE, 2);
        let q = t
            .plus(&d.times_monomial(&s))?
            .plus(&m.times_monomial(&s2))?;
        Self::with_laplace(q, b, c)
    }

    fn with_laplace(q: AffineMatrix, b: AffineMatrix, c: AffineMatrix) -> Result<Self> {
        let mut names: BTreeSet<String> = q.parameter_names();
        names.extend(b.parameter_names());
        names.extend(c.parameter_names());
        names.insert(LAPLACE.to_string());
        Self::new(q, b, c, order_names(names.into_iter().collect(), true))
    }

    pub fn q(&self) -> &AffineMatrix {
        &self.q
    }

    pub fn b(&self) -> &AffineMatrix {
        &self.b
    }

    pub fn c(&self) -> &AffineMatrix {
        &self.c
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn n(&self) -> usize {
        self.q.rows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn n_outputs(&self) -> usize {
        self.c.rows()
    }

    pub fn is_siso(&self) -> bool {
        self.n_inputs() == 1 && self.n_outputs() == 1
    }

    pub fn is_real(&self) -> bool {
        self.q.is_real() && self.b.is_real() && self.c.is_real()
    }

    /// True when `s` is the only parameter, `B` and `C` are constant, and every
    /// non-constant term of `Q` is linear in `s`, i.e. `Q(s) = sE − A`.
    pub fn is_first_order_in_s(&self) -> bool {
        self.parameter_names.iter().all(|n| n == LAPLACE)
            && self.b.is_constant()
            && self.c.is_constant()
            && self.q.terms.iter().all(|t| {
                t.monomial.exponents.len() == 1 && t.monomial.exponents.get(LAPLACE) == Some(&1)
            })
    }

    /// The dual system: operator `Qᵀ`, input `Cᵀ`, output `Bᵀ`.
    pub fn dual(&self) -> ParametricSystem {
        ParametricSystem {
            q: self.q.transpose(),
            b: self.c.transpose(),
            c: self.b.transpose(),
            parameter_names: self.parameter_names.clone(),
        }
    }

    /// The SISO system from input `input` to output `output`.
    pub fn channel(&self, input: usize, output: usize) -> ParametricSystem {
        ParametricSystem {
            q: self.q.clone(),
            b: self.b.select_columns(input),
            c: self.c.select_row(output),
            parameter_names: self.parameter_names.clone(),
        }
    }

    pub fn check_point(&self, p: &SamplePoint) -> Result<()> {
        p.covers(&self.parameter_names)
    }

    /// LU of `Q(p)`, reporting singularity as [`Error::SingularAtSample`].
    pub fn factor_at(&self, p: &SamplePoint) -> Result<LuFactorization> {
        self.check_point(p)?;
        lu_factor(&self.q.assemble(p)?).map_err(|e| singular_as(e, p, false))
    }

    /// `x_pr = Q(p)⁻¹ B(p)`
    pub fn primal_solve_full(&self, p: &SamplePoint) -> Result<CMatrix> {
        let lu = self.factor_at(p)?;
        lu.solve(&self.b.assemble(p)?)
    }

    /// `x_du = Q(p)⁻ᵀ C(p)ᵀ`
    pub fn dual_solve_full(&self, p: &SamplePoint) -> Result<CMatrix> {
        let lu = self.factor_at(p)?;
        lu.solve_transpose(&self.c.assemble(p)?.transpose())
    }

    /// `H(p) = C(p) Q(p)⁻¹ B(p)`, an `n_O x n_I` matrix.
    pub fn transfer_function(&self, p: &SamplePoint) -> Result<CMatrix> {
        let x = self.primal_solve_full(p)?;
        Ok(self.c.assemble(p)?.matmul(&x))
    }
}

/// Maps a factorization failure to the sample-level singularity error.
pub(crate) fn singular_as(e: Error, p: &SamplePoint, reduced: bool) -> Error {
    match e {
        Error::SingularMatrix { .. } if reduced => Error::SingularReducedSystem {
            sample: p.to_string(),
        },
        Error::SingularMatrix { .. } => Error::SingularAtSample {
            sample: p.to_string(),
        },
        other => other,
    }
}

fn order_names(mut names: Vec<String>, laplace_first: bool) -> Vec<String> {
    names.sort();
    if laplace_first {
        if let Some(i) = names.iter().position(|n| n == LAPLACE) {
            let s = names.remove(i);
            names.insert(0, s);
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(n, m, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn constant_only_assembles_to_base() {
        let base = CMatrix::identity(3).scale(c(2.0, 0.0));
        let m = AffineMatrix::constant(base.clone())
            .with_term(Monomial::var("s").scaled(ZERO), CMatrix::identity(3))
            .unwrap();
        assert_eq!(
            m.assemble(&SamplePoint::laplace(c(1.0, 1.0))).unwrap(),
            base
        );
    }

    #[test]
    fn single_laplace_term() {
        let m = AffineMatrix::zeros(2, 2)
            .with_term(Monomial::var("s"), CMatrix::identity(2))
            .unwrap();
        let q = m.assemble(&SamplePoint::laplace(c(0.0, 3.0))).unwrap();
        assert_eq!(q, CMatrix::identity(2).scale(c(0.0, 3.0)));
    }

    #[test]
    fn missing_parameter_and_zero_to_negative_power() {
        let m = AffineMatrix::zeros(1, 1)
            .with_term(Monomial::var("d").pow("d", -2), CMatrix::identity(1))
            .unwrap();
        assert!(matches!(
            m.assemble(&SamplePoint::new()),
            Err(Error::MissingParameter(_))
        ));
        assert!(matches!(
            m.assemble(&SamplePoint::new().with_real("d", 0.0)),
            Err(Error::ZeroToNegativePower(_))
        ));
        let v = m.assemble(&SamplePoint::new().with_real("d", 4.0)).unwrap();
        assert_eq!(v[(0, 0)], c(0.25, 0.0));
    }

    /// Eleven-term gyroscope-style affine operator against a hand-expanded sum.
    #[test]
    fn gyroscope_monomials_match_hand_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 4;
        let t1 = random(n, n, &mut rng);
        let mats: Vec<CMatrix> = (0..11).map(|_| random(n, n, &mut rng)).collect();
        let monos = [
            Monomial::one().pow("s", 2),
            Monomial::one().pow("s", 2).pow("d", 1),
            Monomial::var("s").pow("theta", 1),
            Monomial::var("s").pow("theta", 1).pow("d", 1),
            Monomial::var("s").pow("alpha", 1),
            Monomial::var("s").pow("alpha", 1).pow("d", 1),
            Monomial::var("s").pow("beta", 1),
            Monomial::var("s").pow("beta", 1).pow("d", -1),
            Monomial::var("s").pow("beta", 1).pow("d", 1),
            Monomial::var("d").pow("d", -2),
            Monomial::var("d"),
        ];
        let mut q = AffineMatrix::constant(t1.clone());
        for (m, a) in monos.iter().zip(&mats) {
            q.push_term(m.clone(), a.clone()).unwrap();
        }
        let s = c(0.0, 2.0 * PI * 100.0);
        let (d, th, al, be) = (1.5, 1e-6, 0.1, 1e-9);
        let p = SamplePoint::laplace(s)
            .with_real("d", d)
            .with_real("theta", th)
            .with_real("alpha", al)
            .with_real("beta", be);
        let h = [
            s * s,
            s * s * d,
            s * th,
            s * th * d,
            s * al,
            s * al * d,
            s * be,
            s * be / d,
            s * be * d,
            c(1.0 / d, 0.0),
            c(d, 0.0),
        ];
        let mut expect = t1;
        for (hj, a) in h.iter().zip(&mats) {
            expect.axpy(*hj, a);
        }
        let got = q.assemble(&p).unwrap();
        assert!(got.max_abs_diff(&expect) <= 1e-12 * expect.max_abs());
    }

    #[test]
    fn assemble_is_linear_in_term_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q1 = random(3, 3, &mut rng);
        let p = SamplePoint::laplace(c(0.3, 2.0));
        let one = AffineMatrix::zeros(3, 3)
            .with_term(Monomial::var("s"), q1.clone())
            .unwrap();
        let three = AffineMatrix::zeros(3, 3)
            .with_term(Monomial::var("s"), q1.scale(c(3.0, 0.0)))
            .unwrap();
        let a = one.assemble(&p).unwrap().scale(c(3.0, 0.0));
        assert!(three.assemble(&p).unwrap().max_abs_diff(&a) <= 1e-15 * a.max_abs());
    }

    #[test]
    fn first_order_construction() {
        let e = AffineMatrix::constant(CMatrix::identity(2));
        let a = AffineMatrix::constant(CMatrix::identity(2).scale(-ONE));
        let b = AffineMatrix::constant(CMatrix::unit(2, 0));
        let cm = AffineMatrix::constant(CMatrix::unit(2, 0).transpose());
        let sys = ParametricSystem::from_first_order(&e, &a, b.clone(), cm.clone()).unwrap();
        let q = sys.q().assemble(&SamplePoint::laplace(ONE)).unwrap();
        assert_eq!(q, CMatrix::identity(2).scale(c(2.0, 0.0)));
        assert!(sys.is_first_order_in_s());

        let e0 = AffineMatrix::zeros(2, 2);
        let sys = ParametricSystem::from_first_order(&e0, &a, b, cm).unwrap();
        for s in [c(0.0, 1.0), c(5.0, -2.0)] {
            assert_eq!(
                sys.q().assemble(&SamplePoint::laplace(s)).unwrap(),
                CMatrix::identity(2)
            );
        }
    }

    #[test]
    fn first_order_matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = random(6, 6, &mut rng);
        let a = random(6, 6, &mut rng);
        let sys = ParametricSystem::from_first_order(
            &AffineMatrix::constant(e.clone()),
            &AffineMatrix::constant(a.clone()),
            AffineMatrix::constant(random(6, 1, &mut rng)),
            AffineMatrix::constant(random(1, 6, &mut rng)),
        )
        .unwrap();
        let s0 = c(0.2, 7.0);
        let direct = e.scale(s0).sub(&a);
        let got = sys.q().assemble(&SamplePoint::laplace(s0)).unwrap();
        assert!(got.max_abs_diff(&direct) <= 1e-15 * direct.max_abs());
    }

    #[test]
    fn second_order_construction() {
        let i = AffineMatrix::constant(CMatrix::identity(3));
        let z = AffineMatrix::zeros(3, 3);
        let b = AffineMatrix::constant(CMatrix::unit(3, 0));
        let cm = AffineMatrix::constant(CMatrix::unit(3, 0).transpose());
        let sys = ParametricSystem::from_second_order(&i, &z, &i, b.clone(), cm.clone()).unwrap();
        let q = sys
            .q()
            .assemble(&SamplePoint::laplace(c(0.0, 1.0)))
            .unwrap();
        assert_eq!(q.max_abs(), 0.0);
        assert!(matches!(
            sys.transfer_function(&SamplePoint::laplace(c(0.0, 1.0))),
            Err(Error::SingularAtSample { .. })
        ));
        let sys = ParametricSystem::from_second_order(&i, &i, &i, b, cm).unwrap();
        let q = sys.q().assemble(&SamplePoint::laplace(ONE)).unwrap();
        assert_eq!(q, CMatrix::identity(3).scale(c(3.0, 0.0)));
    }

    #[test]
    fn second_order_with_parameter_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 20;
        let (m1, m2, d1, t1, t2) = (
            random(n, n, &mut rng),
            random(n, n, &mut rng),
            random(n, n, &mut rng),
            random(n, n, &mut rng),
            random(n, n, &mut rng),
        );
        let dvar = Monomial::var("d");
        let m = AffineMatrix::constant(m1.clone())
            .with_term(dvar.clone(), m2.clone())
            .unwrap();
        let d = AffineMatrix::zeros(n, n)
            .with_term(dvar.clone(), d1.clone())
            .unwrap();
        let t = AffineMatrix::constant(t1.clone())
            .with_term(Monomial::one().pow("d", -1), t2.clone())
            .unwrap();
        let sys = ParametricSystem::from_second_order(
            &m,
            &d,
            &t,
            AffineMatrix::constant(random(n, 1, &mut rng)),
            AffineMatrix::constant(random(1, n, &mut rng)),
        )
        .unwrap();
        assert_eq!(sys.parameter_names(), &["s".to_string(), "d".to_string()]);
        let (s, dv) = (c(0.1, 3.0), 1.7);
        let p = SamplePoint::laplace(s).with_real("d", dv);
        let mm = m1.add(&m2.scale(c(dv, 0.0)));
        let dd = d1.scale(c(dv, 0.0));
        let tt = t1.add(&t2.scale(c(1.0 / dv, 0.0)));
        let direct = mm.scale(s * s).add(&dd.scale(s)).add(&tt);
        let got = sys.q().assemble(&p).unwrap();
        assert!(got.max_abs_diff(&direct) <= 1e-14 * direct.max_abs());
        assert!(!sys.is_first_order_in_s());
    }

    fn siso(q: CMatrix, b: CMatrix, cm: CMatrix) -> ParametricSystem {
        ParametricSystem::from_affine(
            AffineMatrix::constant(q),
            AffineMatrix::constant(b),
            AffineMatrix::constant(cm),
        )
        .unwrap()
    }

    #[test]
    fn transfer_function_small_cases() {
        let p = SamplePoint::new();
        let sys = siso(
            CMatrix::identity(2),
            CMatrix::unit(2, 0),
            CMatrix::unit(2, 0).transpose(),
        );
        assert_eq!(sys.transfer_function(&p).unwrap()[(0, 0)], ONE);
        let sys = siso(
            CMatrix::diag(&[c(2.0, 0.0), c(4.0, 0.0)]),
            CMatrix::from_real_rows(&[&[1.0], &[1.0]]),
            CMatrix::from_real_rows(&[&[1.0, 0.0]]),
        );
        assert_eq!(sys.transfer_function(&p).unwrap()[(0, 0)], c(0.5, 0.0));
    }

    #[test]
    fn primal_and_dual_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 10;
        let mut q = random(n, n, &mut rng);
        for i in 0..n {
            q[(i, i)] += c(3.0, 0.0);
        }
        let b = random(n, 1, &mut rng);
        let cm = random(1, n, &mut rng);
        let sys = siso(q, b.clone(), cm.clone());
        let p = SamplePoint::new();
        let h = sys.transfer_function(&p).unwrap()[(0, 0)];
        let via_primal = cm.matmul(&sys.primal_solve_full(&p).unwrap())[(0, 0)];
        let via_dual = sys.dual_solve_full(&p).unwrap().transpose_mul(&b)[(0, 0)];
        assert!((h - via_primal).norm() <= 1e-12 * h.norm());
        assert!((h - via_dual).norm() <= 1e-12 * h.norm());
    }

    #[test]
    fn identity_and_symmetric_solves() {
        let p = SamplePoint::new();
        let b = CMatrix::from_real_rows(&[&[1.0], &[2.0]]);
        let sys = siso(
            CMatrix::identity(2),
            b.clone(),
            CMatrix::unit(2, 0).transpose(),
        );
        assert_eq!(sys.primal_solve_full(&p).unwrap(), b);
        assert_eq!(sys.dual_solve_full(&p).unwrap(), CMatrix::unit(2, 0));

        let q = CMatrix::from_real_rows(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let sys = siso(q, b.clone(), b.transpose());
        assert_eq!(
            sys.primal_solve_full(&p).unwrap(),
            sys.dual_solve_full(&p).unwrap()
        );
    }

    #[test]
    fn unknown_parameter_rejected() {
        let q = AffineMatrix::zeros(2, 2)
            .with_term(Monomial::var("z"), CMatrix::identity(2))
            .unwrap();
        let r = ParametricSystem::new(
            q,
            AffineMatrix::zeros(2, 1),
            AffineMatrix::zeros(1, 2),
            vec!["s".into()],
        );
        assert!(matches!(r, Err(Error::UnknownParameterName(n)) if n == "z"));
    }

    #[test]
    fn dimension_checks() {
        let r = ParametricSystem::from_affine(
            AffineMatrix::zeros(3, 3),
            AffineMatrix::zeros(2, 1),
            AffineMatrix::zeros(1, 3),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
        let mut a = AffineMatrix::zeros(2, 2);
        assert!(a
            .push_term(Monomial::var("s"), CMatrix::zeros(3, 3))
            .is_err());
    }
}
