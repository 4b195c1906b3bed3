//! Run directories: what `reduce` writes and `validate` reads back.
//!
//! ```text
//! run.json          settings, system source, outcome
//! trace.csv         one row per iteration
//! trace.json        same at full precision plus expansion errors
//! bases/V.mtx ...   orthonormal bases, one file per role
//! rom/manifest.json primal reduced model as an affine system
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use romgrid::io::{
    load_system, parse_grid, read_matrix_market, write_affine, write_json, write_matrix_market,
    write_trace, TraceDocument,
};
use romgrid::synthetic::SyntheticSpec;
use romgrid::{
    run_greedy, Basis, BasisRole, BasisSet, DeltaRConfig, EstimatorKind, EstimatorWorkspace,
    GreedyConfig, IterationRecord, ParametricSystem, StopReason,
};
use serde::{Deserialize, Serialize};

use crate::CliResult;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSource {
    Manifest(PathBuf),
    Synthetic(SyntheticSpec),
}

impl SystemSource {
    pub fn load(&self) -> CliResult<ParametricSystem> {
        Ok(match self {
            SystemSource::Manifest(p) => load_system(p)?,
            SystemSource::Synthetic(s) => s.generate()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSettings {
    pub estimator: EstimatorKind,
    pub tolerance: f64,
    pub q: Option<usize>,
    pub max_iterations: usize,
    pub train: String,
    pub symmetric_variant: bool,
    pub delta_r_seed: u64,
    pub delta_r_samples: usize,
}

impl RunSettings {
    pub fn config(&self) -> CliResult<GreedyConfig> {
        let mut cfg = GreedyConfig::new(self.estimator, self.tolerance, parse_grid(&self.train)?);
        cfg.q = self.q;
        cfg.max_iterations = self.max_iterations;
        cfg.symmetric_variant = self.symmetric_variant;
        cfg.delta_r = self.delta_r();
        Ok(cfg)
    }

    fn delta_r(&self) -> DeltaRConfig {
        DeltaRConfig {
            samples: self.delta_r_samples,
            seed: self.delta_r_seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub system: SystemSource,
    pub settings: RunSettings,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub rom_dimension: usize,
    pub bases: Vec<BasisRole>,
    #[serde(skip)]
    pub trace: Vec<IterationRecord>,
}

pub struct LoadedRun {
    pub record: RunRecord,
    pub system: ParametricSystem,
    pub workspace: EstimatorWorkspace,
}

pub fn reduce_and_save(
    source: &SystemSource,
    settings: &RunSettings,
    out: &Path,
) -> CliResult<RunRecord> {
    let sys = source.load()?;
    let cfg = settings.config()?;
    log::info!(
        "system n={}, {} training samples",
        sys.n(),
        cfg.training_set.len()
    );
    let res = run_greedy(&sys, &cfg)?;

    fs::create_dir_all(out.join("bases"))?;
    let names = sys.parameter_names();
    write_trace(&out.join("trace.csv"), &res.trace, names)?;
    write_json(&out.join("trace.json"), &TraceDocument::new(&res, names))?;
    let mut roles = Vec::new();
    for b in res.bases.bases() {
        write_matrix_market(
            &out.join("bases").join(format!("{}.mtx", b.role())),
            b.matrix(),
        )?;
        roles.push(b.role());
    }
    let rom = &res.workspace.rom_primal;
    write_affine(&out.join("rom"), "rom", [rom.q(), rom.b(), rom.c()], names)?;

    let record = RunRecord {
        system: source.clone(),
        settings: settings.clone(),
        converged: res.converged,
        stop_reason: res.stop_reason,
        iterations: res.trace.len(),
        rom_dimension: res.workspace.rom_dimension(),
        bases: roles,
        trace: res.trace,
    };
    write_json(&out.join("run.json"), &record)?;
    Ok(record)
}

pub fn load_run(dir: &Path) -> CliResult<LoadedRun> {
    let text = fs::read_to_string(dir.join("run.json"))?;
    let record: RunRecord = serde_json::from_str(&text)?;
    let system = record.system.load()?;
    let read = |role: BasisRole| -> CliResult<Option<Basis>> {
        if !record.bases.contains(&role) {
            return Ok(None);
        }
        let path = dir.join("bases").join(format!("{role}.mtx"));
        let m = read_matrix_market(&path)?;
        Basis::from_orthonormal(m, role)
            .map(Some)
            .ok_or_else(|| format!("{}: columns are not orthonormal", path.display()).into())
    };
    let set = BasisSet {
        v: read(BasisRole::V)?.ok_or("run has no V basis")?,
        v_du: read(BasisRole::VDu)?,
        v_rdu: read(BasisRole::VRdu)?,
        v_rpr: read(BasisRole::VRpr)?,
        v_rrpr: read(BasisRole::VRrpr)?,
    };
    let kind = record.settings.estimator;
    let mut workspace = EstimatorWorkspace::galerkin(&system, kind, &set)?;
    workspace.delta_r = record.settings.delta_r();
    Ok(LoadedRun {
        record,
        system,
        workspace,
    })
}
