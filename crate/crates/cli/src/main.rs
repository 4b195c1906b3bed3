//! `romgrid`: build and check reduced-order models from the command line.

mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use romgrid::io::{parse_grid, write_effectivity, write_json};
use romgrid::{validate, EstimatorKind};

use crate::run::{load_run, reduce_and_save, RunSettings, SystemSource};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

const DEFAULT_TRAIN: &str = "f:1e-3:1e3:60:log";

#[derive(Parser)]
#[command(
    name = "romgrid",
    version,
    about = "Greedy moment-matching model order reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the greedy algorithm and save the reduced model, bases and trace.
    Reduce {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        greedy: GreedyArgs,
        /// Estimator driving the greedy selection.
        #[arg(long, default_value = "delta2")]
        estimator: EstimatorKind,
        /// Output directory.
        #[arg(long, default_value = "romgrid-run")]
        out: PathBuf,
    },
    /// Compare estimate and true error of a saved run on a validation grid.
    Validate {
        /// Directory written by `reduce`.
        run_dir: PathBuf,
        /// Validation grid; defaults to the training grid.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Run several estimators on one system and print a summary table.
    Compare {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        greedy: GreedyArgs,
        /// Comma-separated estimator names.
        #[arg(long, default_value = "delta2,delta2pr,delta1pr,delta3,delta3pr")]
        estimators: String,
        /// Validation grid; defaults to the training grid.
        #[arg(long)]
        grid: Option<String>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reduce a 200-node RC ladder with Delta2 (separate dual points) and print the trace.
    Demo {
        #[arg(long, default_value = "romgrid-demo")]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct SystemArgs {
    /// Path to a system manifest (manifest.json).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Synthetic system, e.g. `rc_ladder:500` or `random_stable:100:7`.
    #[arg(long)]
    synthetic: Option<String>,
}

impl SystemArgs {
    fn source(&self) -> CliResult<SystemSource> {
        match (&self.manifest, &self.synthetic) {
            (Some(m), _) => Ok(SystemSource::Manifest(std::fs::canonicalize(m)?)),
            (_, Some(s)) => Ok(SystemSource::Synthetic(s.parse()?)),
            _ => Err("either --manifest or --synthetic is required".into()),
        }
    }
}

#[derive(Args, Clone)]
struct GreedyArgs {
    /// Stop when the largest estimate falls below this.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Moment order (Krylov blocks per point, or highest multi-moment level).
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 30)]
    max_iter: usize,
    /// Training grid, e.g. `f:1e-3:1e3:60:log,d=0.5;1;2`.
    #[arg(long, default_value = DEFAULT_TRAIN)]
    train: String,
    /// Expand the dual basis at its own points (delta1, delta2, delta2pr only).
    #[arg(long)]
    symmetric_variant: bool,
    /// Seed of the randomized estimator's weights.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random dual right-hand sides for delta_r.
    #[arg(long, default_value_t = 20)]
    samples: usize,
}

impl GreedyArgs {
    fn settings(&self, kind: EstimatorKind) -> RunSettings {
        RunSettings {
            estimator: kind,
            tolerance: self.tol,
            q: self.q,
            max_iterations: self.max_iter,
            train: self.train.clone(),
            symmetric_variant: self.symmetric_variant,
            delta_r_seed: self.seed,
            delta_r_samples: self.samples,
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into())
}

fn cmd_reduce(
    system: &SystemArgs,
    greedy: &GreedyArgs,
    kind: EstimatorKind,
    out: &Path,
) -> CliResult<()> {
    let source = system.source()?;
    let record = reduce_and_save(&source, &greedy.settings(kind), out)?;
    println!(
        "{}: {} after {} iterations ({:?}), ROM dimension {}, written to {}",
        record.settings.estimator,
        if record.converged {
            "converged"
        } else {
            "not converged"
        },
        record.iterations,
        record.stop_reason,
        record.rom_dimension,
        out.display()
    );
    Ok(())
}

fn cmd_validate(run_dir: &Path, grid: Option<&str>) -> CliResult<()> {
    let run = load_run(run_dir)?;
    let grid = grid.unwrap_or(&run.record.settings.train);
    let set = parse_grid(grid)?;
    let kind = run.record.settings.estimator;
    let report = validate(&run.system, &run.workspace, &set, kind)?;
    write_effectivity(
        &run_dir.join("effectivity.csv"),
        &report,
        run.system.parameter_names(),
    )?;
    write_json(&run_dir.join("effectivity.json"), &report)?;
    let s = &report.summary;
    println!("estimator        {kind}");
    println!(
        "samples          {} ({} singular skipped)",
        report.rows.len(),
        s.skipped_singular
    );
    println!("max true error   {:.3e}", s.max_true_error);
    println!("max estimate     {:.3e}", s.max_estimate);
    println!(
        "effectivity      [{}, {}]",
        fmt_opt(s.min_eff_all),
        fmt_opt(s.max_eff_all)
    );
    if report.filtered_set_empty() {
        println!(
            "filtered         no sample with true error >= {:e}",
            s.filter_threshold
        );
    } else {
        println!(
            "filtered         [{}, {}] over {} samples with true error >= {:e}",
            fmt_opt(s.min_eff_filtered),
            fmt_opt(s.max_eff_filtered),
            s.filtered_count,
            s.filter_threshold
        );
    }
    Ok(())
}

fn cmd_compare(
    system: &SystemArgs,
    greedy: &GreedyArgs,
    estimators: &str,
    grid: Option<&str>,
    csv: Option<&PathBuf>,
) -> CliResult<()> {
    let source = system.source()?;
    let sys = source.load()?;
    let kinds = estimators
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<EstimatorKind>, _>>()?;
    let check = parse_grid(grid.unwrap_or(&greedy.train))?;
    let header = [
        "estimator",
        "iterations",
        "converged",
        "rom_dim",
        "max_true_error",
        "min_eff",
        "max_eff",
        "seconds",
    ];
    let mut rows = Vec::new();
    for kind in kinds {
        let start = Instant::now();
        let settings = greedy.settings(kind);
        let res = romgrid::run_greedy(&sys, &settings.config()?)?;
        let rep = validate(&sys, &res.workspace, &check, kind)?;
        rows.push([
            kind.to_string(),
            res.trace.len().to_string(),
            res.converged.to_string(),
            res.workspace.rom_dimension().to_string(),
            format!("{:.3e}", rep.summary.max_true_error),
            fmt_opt(rep.summary.min_eff_filtered),
            fmt_opt(rep.summary.max_eff_filtered),
            format!("{:.2}", start.elapsed().as_secs_f64()),
        ]);
    }
    println!(
        "{}",
        header
            .iter()
            .map(|h| format!("{h:>16}"))
            .collect::<String>()
    );
    for r in &rows {
        println!(
            "{}",
            r.iter().map(|c| format!("{c:>16}")).collect::<String>()
        );
    }
    if let Some(path) = csv {
        let mut text = header.join(",") + "\n";
        for r in &rows {
            text += &r.join(",");
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn cmd_demo(out: &Path) -> CliResult<()> {
    let source = SystemSource::Synthetic("rc_ladder:200".parse()?);
    let settings = RunSettings {
        estimator: EstimatorKind::Delta2,
        tolerance: 1e-6,
        q: Some(2),
        max_iterations: 30,
        train: DEFAULT_TRAIN.into(),
        // the ladder is symmetric: with shared points the dual basis tracks the
        // primal one and the estimate collapses long before the true error does
        symmetric_variant: true,
        delta_r_seed: 0,
        delta_r_samples: 20,
    };
    let record = reduce_and_save(&source, &settings, out)?;
    println!("rc_ladder:200, delta2 with separate dual points, tol 1e-6");
    println!(
        "{:>4} {:>14} {:>14} {:>6}",
        "it", "max_estimate", "max_true_err", "dim"
    );
    for r in &record.trace {
        println!(
            "{:>4} {:>14.3e} {:>14} {:>6}",
            r.iteration,
            r.max_estimate,
            fmt_opt(r.max_true_error),
            r.rom_dimension
        );
    }
    println!("written to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Reduce {
            system,
            greedy,
            estimator,
            out,
        } => cmd_reduce(system, greedy, *estimator, out),
        Command::Validate { run_dir, grid } => cmd_validate(run_dir, grid.as_deref()),
        Command::Compare {
            system,
            greedy,
            estimators,
            grid,
            csv,
        } => cmd_compare(system, greedy, estimators, grid.as_deref(), csv.as_ref()),
        Command::Demo { out } => cmd_demo(out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
