//! Synthetic test systems.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::system::{AffineMatrix, Monomial, ParametricSystem, LAPLACE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyntheticSpec {
    RcLadder { n: usize },
    RandomStable { n: usize, seed: u64 },
    SymmetricSecondOrder { n: usize, seed: u64 },
    MimoBlock { n: usize, ports: usize, seed: u64 },
}

impl SyntheticSpec {
    pub fn generate(&self) -> Result<ParametricSystem> {
        generate_synthetic(self)
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SyntheticSpec::RcLadder { n } => write!(f, "rc_ladder:{n}"),
            SyntheticSpec::RandomStable { n, seed } => write!(f, "random_stable:{n}:{seed}"),
            SyntheticSpec::SymmetricSecondOrder { n, seed } => {
                write!(f, "symmetric_second_order:{n}:{seed}")
            }
            SyntheticSpec::MimoBlock { n, ports, seed } => {
                write!(f, "mimo_block:{n}:{ports}:{seed}")
            }
        }
    }
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    /// `rc_ladder:N`, `random_stable:N[:SEED]`, `symmetric_second_order:N[:SEED]`,
    /// `mimo_block:N:PORTS[:SEED]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("bad synthetic spec '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<u64> {
            parts
                .get(i)
                .ok_or_else(bad)?
                .trim()
                .parse::<u64>()
                .map_err(|_| bad())
        };
        let seed = |i: usize| -> Result<u64> {
            if parts.len() > i {
                num(i)
            } else {
                Ok(0)
            }
        };
        let spec = match parts[0].trim() {
            "rc_ladder" if parts.len() == 2 => SyntheticSpec::RcLadder {
                n: num(1)? as usize,
            },
            "random_stable" if parts.len() <= 3 => SyntheticSpec::RandomStable {
                n: num(1)? as usize,
                seed: seed(2)?,
            },
            "symmetric_second_order" if parts.len() <= 3 => SyntheticSpec::SymmetricSecondOrder {
                n: num(1)? as usize,
                seed: seed(2)?,
            },
            "mimo_block" if (3..=4).contains(&parts.len()) => SyntheticSpec::MimoBlock {
                n: num(1)? as usize,
                ports: num(2)? as usize,
                seed: seed(3)?,
            },
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<ParametricSystem> {
    let n = match *spec {
        SyntheticSpec::RcLadder { n }
        | SyntheticSpec::RandomStable { n, .. }
        | SyntheticSpec::SymmetricSecondOrder { n, .. }
        | SyntheticSpec::MimoBlock { n, .. } => n,
    };
    if n < 2 {
        return Err(Error::InvalidConfig("synthetic systems need n >= 2".into()));
    }
    match *spec {
        SyntheticSpec::RcLadder { n } => Ok(rc_ladder(n)),
        SyntheticSpec::RandomStable { n, seed } => Ok(random_stable(n, seed)),
        SyntheticSpec::SymmetricSecondOrder { n, seed } => Ok(symmetric_second_order(n, seed)),
        SyntheticSpec::MimoBlock { n, ports, seed } => {
            if ports == 0 || ports > n {
                return Err(Error::InvalidConfig(format!(
                    "mimo_block needs 1 <= ports <= {n}"
                )));
            }
            Ok(mimo_block(n, ports, seed))
        }
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Conductance matrix of a chain with series conductance `g` and a unit load at
/// the last node.
fn ladder_conductance(n: usize, g: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i)] += re(g);
        m[(i + 1, i + 1)] += re(g);
        m[(i, i + 1)] -= re(g);
        m[(i + 1, i)] -= re(g);
    }
    m[(n - 1, n - 1)] += re(1.0);
    m
}

fn first_order_rc(cap: CMatrix, g: CMatrix, b: CMatrix) -> ParametricSystem {
    let q = AffineMatrix::constant(g)
        .with_term(Monomial::var(LAPLACE), cap)
        .expect("square blocks of equal size");
    ParametricSystem::from_affine(
        q,
        AffineMatrix::constant(b.clone()),
        AffineMatrix::constant(b.transpose()),
    )
    .expect("consistent dimensions")
}

/// RC chain of `n` nodes: node capacitance `1/n`, series conductance `n`, unit
/// load at the far end, current injected and voltage read at node 1.
/// `Q(s) = sC + G` with both matrices symmetric; `H(0) = 2 − 1/n`.
pub fn rc_ladder(n: usize) -> ParametricSystem {
    let nf = n as f64;
    let cap = CMatrix::identity(n).scale(re(1.0 / nf));
    first_order_rc(cap, ladder_conductance(n, nf), CMatrix::unit(n, 0))
}

fn random_real(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, m, |_, _| re(rng.random::<f64>() * 2.0 - 1.0))
}

/// `PᵀP/n + shift·I`, symmetric positive definite.
fn random_spd(n: usize, shift: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let p = random_real(n, n, rng);
    let mut s = p.transpose_mul(&p).scale(re(1.0 / n as f64));
    for i in 0..n {
        s[(i, i)] += re(shift);
    }
    s
}

/// Dense nonsymmetric first-order system `sI − A` with
/// `A = −(PᵀP/n + I) + (K − Kᵀ)`, so every eigenvalue of `A` has real part ≤ −1.
pub fn random_stable(n: usize, seed: u64) -> ParametricSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_real(n, n, &mut rng);
    let skew = k.sub(&k.transpose());
    let a = skew.sub(&random_spd(n, 1.0, &mut rng));
    let b = random_real(n, 1, &mut rng);
    let c = random_real(1, n, &mut rng);
    ParametricSystem::from_first_order(
        &AffineMatrix::constant(CMatrix::identity(n)),
        &AffineMatrix::constant(a),
        AffineMatrix::constant(b),
        AffineMatrix::constant(c),
    )
    .expect("consistent dimensions")
}

/// Symmetric second-order system with parameters `(s, d, alpha, beta)`:
///
/// `M = M1 + d·M2`, `T = T1 + T2/d + d·T3`, `D = alpha·M + beta·T`,
/// `Q = s²M + sD + T`, `C = Bᵀ`.
///
/// All matrices are symmetric positive definite, so `Q(μ̃)ᵀ = Q(μ̃)`.
pub fn symmetric_second_order(n: usize, seed: u64) -> ParametricSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m1 = random_spd(n, 1.0, &mut rng);
    let m2 = random_spd(n, 0.1, &mut rng).scale(re(0.1));
    let t1 = random_spd(n, 1.0, &mut rng).scale(re(100.0));
    let t2 = random_spd(n, 0.1, &mut rng).scale(re(10.0));
    let t3 = random_spd(n, 0.1, &mut rng).scale(re(10.0));
    let b = random_real(n, 1, &mut rng);

    let one = Monomial::one;
    let s = |e: i32| one().pow(LAPLACE, e);
    let terms: Vec<(Monomial, &CMatrix)> = vec![
        (s(2), &m1),
        (s(2).pow("d", 1), &m2),
        (s(1).pow("alpha", 1), &m1),
        (s(1).pow("alpha", 1).pow("d", 1), &m2),
        (s(1).pow("beta", 1), &t1),
        (s(1).pow("beta", 1).pow("d", -1), &t2),
        (s(1).pow("beta", 1).pow("d", 1), &t3),
        (one().pow("d", -1), &t2),
        (one().pow("d", 1), &t3),
    ];
    let mut q = AffineMatrix::constant(t1.clone());
    for (mono, mat) in terms {
        q.push_term(mono, mat.clone()).expect("equal shapes");
    }
    ParametricSystem::new(
        q,
        AffineMatrix::constant(b.clone()),
        AffineMatrix::constant(b.transpose()),
        vec![LAPLACE.into(), "d".into(), "alpha".into(), "beta".into()],
    )
    .expect("consistent dimensions")
}

/// RC chain with random node capacitances and `ports` inputs/outputs spread
/// along the chain, `C = Bᵀ`.
pub fn mimo_block(n: usize, ports: usize, seed: u64) -> ParametricSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = n as f64;
    let caps: Vec<C64> = (0..n)
        .map(|_| re((0.5 + rng.random::<f64>()) / nf))
        .collect();
    let mut b = CMatrix::zeros(n, ports);
    for k in 0..ports {
        b[(k * n / ports, k)] = re(1.0);
    }
    first_order_rc(CMatrix::diag(&caps), ladder_conductance(n, nf), b)
}
