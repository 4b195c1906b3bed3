//! JSON system manifests.
//!
//! ```json
//! {
//!   "name": "cd_player",
//!   "form": "first-order",
//!   "n": 120, "n_inputs": 1, "n_outputs": 1,
//!   "parameters": [{"name": "s"}],
//!   "matrices": [
//!     {"role": "E", "file": "E.mtx"},
//!     {"role": "A", "file": "A.mtx"},
//!     {"role": "B", "file": "B.mtx"},
//!     {"role": "C", "file": "C.mtx"}
//!   ]
//! }
//! ```
//!
//! Each matrix entry contributes `coefficient · Π name^exponent · matrix` to its
//! role; entries without exponents add to the constant part. File paths are
//! relative to the manifest's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::mtx::{read_matrix_market, write_matrix_market};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::system::{AffineMatrix, Monomial, ParametricSystem, LAPLACE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemForm {
    /// `Q(μ̃)` given directly.
    #[serde(rename = "affine-q")]
    AffineQ,
    /// `Q = sE − A`.
    #[serde(rename = "first-order")]
    FirstOrder,
    /// `Q = s²M + sD + T`.
    #[serde(rename = "second-order")]
    SecondOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatrixRole {
    Q,
    B,
    C,
    E,
    A,
    M,
    D,
    T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl Default for Coefficient {
    fn default() -> Self {
        Coefficient::Real(1.0)
    }
}

impl From<C64> for Coefficient {
    fn from(c: C64) -> Self {
        if c.im == 0.0 {
            Coefficient::Real(c.re)
        } else {
            Coefficient::Complex([c.re, c.im])
        }
    }
}

impl Coefficient {
    pub fn value(self) -> C64 {
        match self {
            Coefficient::Real(r) => C64::new(r, 0.0),
            Coefficient::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub role: MatrixRole,
    pub file: PathBuf,
    #[serde(default)]
    pub coefficient: Coefficient,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exponents: BTreeMap<String, i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemManifest {
    pub name: String,
    pub form: SystemForm,
    pub n: usize,
    pub n_inputs: usize,
    pub n_outputs: usize,
    #[serde(default)]
    pub parameters: Vec<ParameterDecl>,
    pub matrices: Vec<MatrixEntry>,
}

impl SystemManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }
}

/// Loads a manifest and every matrix it references.
pub fn load_system(manifest_path: &Path) -> Result<ParametricSystem> {
    let manifest = SystemManifest::read(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    build_system(&manifest, dir)
}

/// Builds the system described by `manifest`, resolving files against `dir`.
pub fn build_system(manifest: &SystemManifest, dir: &Path) -> Result<ParametricSystem> {
    use MatrixRole::*;
    let (n, ni, no) = (manifest.n, manifest.n_inputs, manifest.n_outputs);
    let allowed: &[MatrixRole] = match manifest.form {
        SystemForm::AffineQ => &[Q, B, C],
        SystemForm::FirstOrder => &[E, A, B, C],
        SystemForm::SecondOrder => &[M, D, T, B, C],
    };
    let mut declared: Vec<String> = manifest.parameters.iter().map(|p| p.name.clone()).collect();
    if manifest.form != SystemForm::AffineQ && !declared.iter().any(|d| d == LAPLACE) {
        declared.insert(0, LAPLACE.to_string());
    }

    let mut parts: BTreeMap<MatrixRole, AffineMatrix> = BTreeMap::new();
    for entry in &manifest.matrices {
        if !allowed.contains(&entry.role) {
            return Err(Error::InvalidConfig(format!(
                "role {:?} is not valid for form {:?}",
                entry.role, manifest.form
            )));
        }
        for name in entry.exponents.keys() {
            if !declared.contains(name) {
                return Err(Error::UnknownParameterName(name.clone()));
            }
        }
        let path = dir.join(&entry.file);
        let m = read_matrix_market(&path)?;
        let shape = match entry.role {
            B => (n, ni),
            C => (no, n),
            _ => (n, n),
        };
        if m.shape() != shape {
            return Err(Error::dims(format!(
                "{}: {:?} is {}x{}, expected {}x{}",
                path.display(),
                entry.role,
                m.rows(),
                m.cols(),
                shape.0,
                shape.1
            )));
        }
        let mut mono = Monomial::constant(entry.coefficient.value());
        for (name, &e) in &entry.exponents {
            mono = mono.pow(name, e);
        }
        parts
            .entry(entry.role)
            .or_insert_with(|| AffineMatrix::zeros(shape.0, shape.1))
            .push_term(mono, m)?;
    }

    let mut take = |role: MatrixRole, required: bool| -> Result<AffineMatrix> {
        match parts.remove(&role) {
            Some(m) => Ok(m),
            None if required => Err(Error::InvalidConfig(format!(
                "manifest '{}' has no {:?} matrix",
                manifest.name, role
            ))),
            None => Ok(AffineMatrix::zeros(n, n)),
        }
    };
    let b = take(B, true)?;
    let c = take(C, true)?;
    let sys = match manifest.form {
        SystemForm::AffineQ => {
            let q = take(Q, true)?;
            ParametricSystem::new(q, b, c, declared)?
        }
        SystemForm::FirstOrder => {
            let e = take(E, true)?;
            let a = take(A, true)?;
            let s = ParametricSystem::from_first_order(&e, &a, b, c)?;
            ParametricSystem::new(s.q().clone(), s.b().clone(), s.c().clone(), declared)?
        }
        SystemForm::SecondOrder => {
            let m = take(M, true)?;
            let d = take(D, true)?;
            let t = take(T, true)?;
            let s = ParametricSystem::from_second_order(&m, &d, &t, b, c)?;
            ParametricSystem::new(s.q().clone(), s.b().clone(), s.c().clone(), declared)?
        }
    };
    Ok(sys)
}

/// Writes `Q`, `B`, `C` of any affine system as an `affine-q` manifest plus one
/// Matrix Market file per term. Returns the manifest path.
pub fn write_system(dir: &Path, name: &str, sys: &ParametricSystem) -> Result<PathBuf> {
    write_affine(
        dir,
        name,
        [sys.q(), sys.b(), sys.c()],
        sys.parameter_names(),
    )
}

/// Same as [`write_system`] for raw affine parts (used for reduced models).
pub fn write_affine(
    dir: &Path,
    name: &str,
    qbc: [&AffineMatrix; 3],
    parameter_names: &[String],
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut matrices = Vec::new();
    for (role, part) in [MatrixRole::Q, MatrixRole::B, MatrixRole::C]
        .into_iter()
        .zip(qbc)
    {
        let stem = format!("{role:?}");
        let file = PathBuf::from(format!("{stem}_0.mtx"));
        write_matrix_market(&dir.join(&file), part.base())?;
        matrices.push(MatrixEntry {
            role,
            file,
            coefficient: Coefficient::default(),
            exponents: BTreeMap::new(),
        });
        for (k, t) in part.terms().iter().enumerate() {
            let file = PathBuf::from(format!("{stem}_{}.mtx", k + 1));
            write_matrix_market(&dir.join(&file), &t.matrix)?;
            matrices.push(MatrixEntry {
                role,
                file,
                coefficient: t.monomial.coefficient.into(),
                exponents: t.monomial.exponents.clone(),
            });
        }
    }
    let manifest = SystemManifest {
        name: name.to_string(),
        form: SystemForm::AffineQ,
        n: qbc[0].rows(),
        n_inputs: qbc[1].cols(),
        n_outputs: qbc[2].rows(),
        parameters: parameter_names
            .iter()
            .map(|n| ParameterDecl {
                name: n.clone(),
                range: None,
            })
            .collect(),
        matrices,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}
