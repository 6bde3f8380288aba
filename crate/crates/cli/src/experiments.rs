use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use spinmz_core::dynamics::{
    recombine, split, InterferometerConfig, Observable, StepControl, TrajectoryRecord,
    NORM_DRIFT_LIMIT,
};
use spinmz_core::geometry::chi;
use spinmz_core::hamiltonian::ModelParams;
use spinmz_core::observables::max_phase_fidelity;
use spinmz_core::spectra::level_scan;
use spinmz_core::spin_fock::{build_basis, build_collective_ops, ghz_state, CollectiveOperators, QuantumState};
use spinmz_core::table;

use crate::config::{ExperimentConfig, ExperimentId, Format};
use crate::CliError;

/// Drift above which a finished run still counts as a numeric failure.
pub const ACCEPTED_DRIFT: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub norm_drift: f64,
    pub min_gap: Option<f64>,
    pub min_gap_h_x: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub files: Vec<String>,
    pub wall_clock_seconds: f64,
    pub diagnostics: Diagnostics,
    pub version: String,
}

/// A header plus rows of numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn from_record(rec: &TrajectoryRecord) -> Self {
        let mut header = vec!["t".to_string(), "h_x".into(), "h_z".into()];
        header.extend(rec.columns.iter().cloned());
        let rows = rec
            .samples
            .iter()
            .map(|s| {
                let mut r = vec![s.t, s.h_x, s.h_z];
                r.extend_from_slice(&s.values);
                r
            })
            .collect();
        Self { header, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => table::to_csv(&self.header, &self.rows),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json!({
                    "columns": self.header,
                    "rows": self.rows,
                }))
                .expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

struct Outcome {
    artifacts: Vec<(String, String)>,
    diagnostics: Diagnostics,
}

impl Outcome {
    fn tables(cfg: &ExperimentConfig, tables: Vec<(&str, Table)>, diagnostics: Diagnostics) -> Self {
        let ext = match cfg.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let artifacts = tables
            .into_iter()
            .map(|(stem, t)| (format!("{stem}.{ext}"), t.render(cfg.format)))
            .collect();
        Self { artifacts, diagnostics }
    }
}

fn operators(n_atoms: usize) -> Result<CollectiveOperators, CliError> {
    Ok(build_collective_ops(Arc::new(build_basis(n_atoms)?)))
}

fn interferometer_config(cfg: &ExperimentConfig, h_z: f64) -> InterferometerConfig {
    InterferometerConfig {
        rate: cfg.rate,
        h_x_init: cfg.h_x_init,
        control: StepControl::default().with_dh_x(cfg.step).sampling(cfg.sample_every),
        ..InterferometerConfig::new(cfg.n_atoms, cfg.c, h_z)
    }
}

fn grid(cfg: &ExperimentConfig) -> Vec<f64> {
    cfg.grid.as_ref().map(|g| g.points()).unwrap_or_default()
}

/// Makes consecutive differences lie in (−π, π], with the first value taken
/// into (−π, π].
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    let wrap = |x: f64| {
        let y = x.rem_euclid(2.0 * PI);
        if y > PI {
            y - 2.0 * PI
        } else {
            y
        }
    };
    let mut out: Vec<f64> = Vec::with_capacity(phases.len());
    for &p in phases {
        let next = match out.last() {
            None => wrap(p),
            Some(&prev) => prev + wrap(p - prev),
        };
        out.push(next);
    }
    out
}

fn spectra(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ops = operators(cfg.n_atoms)?;
    let params = ModelParams::new(cfg.n_atoms, cfg.c, 0.0, cfg.h_z);
    let scan = level_scan(&ops, params, &grid(cfg), cfg.levels.min(ops.dim()))?;
    let mut header = vec!["h_x".to_string()];
    header.extend((0..scan.n_levels()).map(|k| format!("E{k}")));
    let rows = scan
        .grid
        .iter()
        .zip(&scan.levels)
        .map(|(h, lv)| std::iter::once(*h).chain(lv.iter().copied()).collect())
        .collect();
    let t = Table { header, rows };
    Ok(Outcome::tables(cfg, vec![("spectra", t)], Diagnostics::default()))
}

fn trajectory(cfg: &ExperimentConfig, observables: &[Observable], stem: &str) -> Result<Outcome, CliError> {
    let ops = operators(cfg.n_atoms)?;
    let icfg = interferometer_config(cfg, cfg.h_z);
    let rec = split(&ops, &icfg, observables)?;
    let diag = Diagnostics {
        norm_drift: rec.norm_drift,
        min_gap: rec.min_gap.map(|g| g.gap),
        min_gap_h_x: rec.min_gap.map(|g| g.h_x),
        warnings: Vec::new(),
    };
    Ok(Outcome::tables(cfg, vec![(stem, Table::from_record(&rec))], diag))
}

/// Final split states for each h_z, with the run diagnostics folded together.
fn split_states(cfg: &ExperimentConfig, ops: &CollectiveOperators, fields: &[f64]) -> Result<(Vec<QuantumState>, Diagnostics), CliError> {
    let mut diag = Diagnostics::default();
    let mut states = Vec::with_capacity(fields.len());
    for &h_z in fields {
        let rec = split(ops, &interferometer_config(cfg, h_z), &[])?;
        diag.norm_drift = diag.norm_drift.max(rec.norm_drift);
        if let Some(g) = rec.min_gap {
            if diag.min_gap.is_none_or(|m| g.gap < m) {
                diag.min_gap = Some(g.gap);
                diag.min_gap_h_x = Some(g.h_x);
            }
        }
        states.push(rec.final_state);
    }
    Ok((states, diag))
}

fn phase_scan(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ops = operators(cfg.n_atoms)?;
    let fields = grid(cfg);
    let (states, diag) = split_states(cfg, &ops, &fields)?;
    let (fmax, phis): (Vec<f64>, Vec<f64>) = states.iter().map(max_phase_fidelity).unzip();
    let phis = unwrap_phases(&phis);
    let mut t = Table::new(&["h_z", "f_phi_max", "phi"]);
    for i in 0..fields.len() {
        t.rows.push(vec![fields[i], fmax[i], phis[i]]);
    }
    Ok(Outcome::tables(cfg, vec![("phase_scan", t)], diag))
}

fn fringes(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ops = operators(cfg.n_atoms)?;
    let basis = ops.basis().clone();
    let phis = grid(cfg);
    let fields = cfg.h_z_grid.as_ref().map(|g| g.points()).unwrap_or_default();
    let (split_out, mut diag) = split_states(cfg, &ops, &fields)?;
    let stars: Vec<f64> = split_out.iter().map(|s| max_phase_fidelity(s).1).collect();

    let mut seeds: Vec<QuantumState> = phis.iter().map(|&p| ghz_state(&basis, p)).collect();
    seeds.extend(split_out);
    seeds.extend(stars.iter().map(|&p| ghz_state(&basis, p)));
    let (pops, drift) = recombine(&ops, &interferometer_config(cfg, 0.0), &seeds)?;
    diag.norm_drift = diag.norm_drift.max(drift);

    let mut ideal = Table::new(&["phi", "f0", "f1"]);
    for (p, (f0, f1)) in phis.iter().zip(&pops) {
        ideal.rows.push(vec![*p, *f0, *f1]);
    }
    let mut tables = vec![("fringes", ideal)];
    if !fields.is_empty() {
        let e2e = &pops[phis.len()..phis.len() + fields.len()];
        let seeded = &pops[phis.len() + fields.len()..];
        let mut t = Table::new(&["h_z", "phi", "f0", "f1", "f0_ideal", "f1_ideal"]);
        for i in 0..fields.len() {
            t.rows.push(vec![fields[i], stars[i], e2e[i].0, e2e[i].1, seeded[i].0, seeded[i].1]);
        }
        tables.push(("fringes_end_to_end", t));
    }
    Ok(Outcome::tables(cfg, tables, diag))
}

fn geometry(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut t = Table::new(&["kappa", "chi"]);
    for k in grid(cfg) {
        t.rows.push(vec![k, chi(k)?]);
    }
    Ok(Outcome::tables(cfg, vec![("geometry", t)], Diagnostics::default()))
}

fn interferometer(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ops = operators(cfg.n_atoms)?;
    let icfg = interferometer_config(cfg, cfg.h_z);
    let r = spinmz_core::dynamics::run_interferometer(&ops, &icfg)?;
    let diag = Diagnostics {
        norm_drift: r.norm_drift,
        min_gap: r.min_gap,
        min_gap_h_x: r.min_gap_h_x,
        warnings: r.warnings.clone(),
    };
    let text = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&r).expect("result serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let header: Vec<String> = ["f0", "f1", "phase_estimate", "split_ghz_fidelity", "split_max_phase_fidelity", "split_phase"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let row = [r.f0, r.f1, r.phase_estimate, r.split_ghz_fidelity, r.split_max_phase_fidelity, r.split_phase];
            table::to_csv(&header, [row])
        }
    };
    let ext = if cfg.format == Format::Json { "json" } else { "csv" };
    Ok(Outcome {
        artifacts: vec![(format!("interferometer.{ext}"), text)],
        diagnostics: diag,
    })
}

/// Runs one experiment, writes its data files and `manifest.json` into the
/// output directory and returns the manifest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let outcome = match cfg.experiment {
        ExperimentId::Spectra => spectra(cfg)?,
        ExperimentId::Split => trajectory(
            cfg,
            &[
                Observable::GroundFidelity,
                Observable::GhzFidelity,
                Observable::MaxPhaseFidelity,
                Observable::GhzPhase,
            ],
            "split",
        )?,
        ExperimentId::Squeezing => trajectory(cfg, &[Observable::Squeezing, Observable::MeanSpin], "squeezing")?,
        ExperimentId::PhaseScan => phase_scan(cfg)?,
        ExperimentId::Fringes => fringes(cfg)?,
        ExperimentId::Geometry => geometry(cfg)?,
        ExperimentId::Interferometer => interferometer(cfg)?,
    };
    if outcome.diagnostics.norm_drift > ACCEPTED_DRIFT {
        return Err(CliError::Numeric(
            spinmz_core::Error::Integration {
                drift: outcome.diagnostics.norm_drift,
                limit: ACCEPTED_DRIFT.min(NORM_DRIFT_LIMIT),
            }
            .to_string(),
        ));
    }

    fs::create_dir_all(&cfg.output).map_err(|e| io_error(&cfg.output, e))?;
    let mut files = Vec::new();
    for (name, text) in &outcome.artifacts {
        let path = cfg.output.join(name);
        fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        files.push(path.display().to_string());
    }
    let manifest = RunManifest {
        config: cfg.clone(),
        files,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        diagnostics: outcome.diagnostics,
        version: format!("spinmz {}", env!("CARGO_PKG_VERSION")),
    };
    let path = cfg.output.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(manifest)
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
