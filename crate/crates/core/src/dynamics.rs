//! Schrödinger evolution through piecewise-linear field schedules and the
//! three-stage interferometer (split with phase imprint, then recombine).
//!
//! Each step freezes the fields at the step midpoint and applies the exact
//! exponential exp(−iHΔt) through an eigendecomposition of the real symmetric
//! Hamiltonian. Consecutive steps warm-start the Jacobi solver from the
//! previous eigenbasis.

use std::sync::Arc;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{FieldTerms, HamiltonianMatrix};
use crate::linalg::adjoint;
use crate::observables::{ghz_fidelity, max_phase_fidelity, spin_moments, squeezing_from_moments};
use crate::spectra::{eigh, eigh_real, RealEigen};
use crate::spin_fock::{CollectiveOperators, FockBasis, QuantumState};
use crate::table;

/// Default transverse-field increment per step.
pub const DEFAULT_DH_X: f64 = 1e-3;
/// Default time step for hold stages.
pub const DEFAULT_HOLD_DT: f64 = 1e-2;
/// Norm drift beyond which a propagation is rejected.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stage {
    /// h_x(t) = h_x_start ∓ rate·t until h_x_end, constant h_z.
    Sweep {
        h_x_start: f64,
        h_x_end: f64,
        rate: f64,
        h_z: f64,
    },
    /// Constant fields for a fixed duration.
    Hold { h_x: f64, h_z: f64, duration: f64 },
}

impl Stage {
    pub fn duration(&self) -> f64 {
        match *self {
            Stage::Sweep {
                h_x_start,
                h_x_end,
                rate,
                ..
            } => (h_x_end - h_x_start).abs() / rate,
            Stage::Hold { duration, .. } => duration,
        }
    }

    /// (h_x, h_z) at time `t` measured from the start of the stage.
    pub fn field_at(&self, t: f64) -> (f64, f64) {
        match *self {
            Stage::Sweep {
                h_x_start,
                h_x_end,
                rate,
                h_z,
            } => {
                let dir = (h_x_end - h_x_start).signum();
                (h_x_start + dir * rate * t, h_z)
            }
            Stage::Hold { h_x, h_z, .. } => (h_x, h_z),
        }
    }

    pub fn start_field(&self) -> (f64, f64) {
        self.field_at(0.0)
    }

    pub fn end_field(&self) -> (f64, f64) {
        match *self {
            Stage::Sweep { h_x_end, h_z, .. } => (h_x_end, h_z),
            Stage::Hold { h_x, h_z, .. } => (h_x, h_z),
        }
    }

    fn n_steps(&self, control: &StepControl) -> usize {
        let raw = match *self {
            Stage::Sweep {
                h_x_start, h_x_end, ..
            } => (h_x_end - h_x_start).abs() / control.dh_x,
            Stage::Hold { duration, .. } => duration / control.hold_dt,
        };
        (raw.round() as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Stage::Sweep {
                h_x_start,
                h_x_end,
                rate,
                h_z,
            } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::domain(format!("sweep rate must be positive, got {rate}")));
                }
                if !(h_x_start.is_finite() && h_x_end.is_finite() && h_z.is_finite()) {
                    return Err(Error::domain("sweep fields must be finite"));
                }
                if h_x_start == h_x_end {
                    return Err(Error::domain("sweep has zero length; use a hold stage"));
                }
            }
            Stage::Hold { h_x, h_z, duration } => {
                if !(duration > 0.0 && duration.is_finite()) {
                    return Err(Error::domain(format!("hold duration must be positive, got {duration}")));
                }
                if !(h_x.is_finite() && h_z.is_finite()) {
                    return Err(Error::domain("hold fields must be finite"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepProtocol {
    pub stages: Vec<Stage>,
}

impl SweepProtocol {
    pub fn duration(&self) -> f64 {
        self.stages.iter().map(Stage::duration).sum()
    }

    pub fn then(mut self, next: SweepProtocol) -> Self {
        self.stages.extend(next.stages);
        self
    }
}

pub fn make_linear_sweep(h_x_start: f64, h_x_end: f64, rate: f64, h_z: f64) -> Result<SweepProtocol> {
    let stage = Stage::Sweep {
        h_x_start,
        h_x_end,
        rate,
        h_z,
    };
    stage.validate()?;
    Ok(SweepProtocol { stages: vec![stage] })
}

pub fn make_hold(h_x: f64, h_z: f64, duration: f64) -> Result<SweepProtocol> {
    let stage = Stage::Hold { h_x, h_z, duration };
    stage.validate()?;
    Ok(SweepProtocol { stages: vec![stage] })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub dh_x: f64,
    pub hold_dt: f64,
    /// Record observables every this many steps (plus the start and the end
    /// of every stage). `0` records stage ends only.
    pub sample_every: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            dh_x: DEFAULT_DH_X,
            hold_dt: DEFAULT_HOLD_DT,
            sample_every: 0,
        }
    }
}

impl StepControl {
    pub fn with_dh_x(self, dh_x: f64) -> Self {
        Self { dh_x, ..self }
    }

    pub fn sampling(self, sample_every: usize) -> Self {
        Self { sample_every, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dh_x > 0.0 && self.dh_x.is_finite() && self.hold_dt > 0.0 && self.hold_dt.is_finite()) {
            return Err(Error::domain("step sizes must be positive and finite"));
        }
        Ok(())
    }
}

/// U = exp(−iHΔt) through the eigendecomposition of H.
pub fn step_propagator(h: &HamiltonianMatrix, dt: f64) -> Result<Array2<C64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("time step must be positive, got {dt}")));
    }
    let e = eigh(h)?;
    let phases = e.eigenvalues.mapv(|l| C64::from_polar(1.0, -l * dt));
    let scaled = &e.eigenvectors * &phases;
    Ok(scaled.dot(&adjoint(&e.eigenvectors)))
}

/// Quantities that can be recorded along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// ⟨H⟩ at the sampled fields.
    Energy,
    /// Fidelity to the instantaneous ground state.
    GroundFidelity,
    /// Fidelity to the instantaneous first excited state.
    ExcitedFidelity,
    /// F_G, overlap with the φ = 0 GHZ state.
    GhzFidelity,
    /// Maximum overlap over the phase-shifted GHZ family.
    MaxPhaseFidelity,
    /// Maximizing GHZ phase in [0, 2π).
    GhzPhase,
    /// ⟨Lx⟩, ⟨Ly⟩, ⟨Lz⟩
    MeanSpin,
    /// ξ²; NaN where the mean spin vanishes.
    Squeezing,
    /// Fidelity to the initial state.
    InitialFidelity,
}

impl Observable {
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Observable::Energy => &["energy"],
            Observable::GroundFidelity => &["f_ground"],
            Observable::ExcitedFidelity => &["f_excited"],
            Observable::GhzFidelity => &["f_ghz"],
            Observable::MaxPhaseFidelity => &["f_phi_max"],
            Observable::GhzPhase => &["phi"],
            Observable::MeanSpin => &["lx", "ly", "lz"],
            Observable::Squeezing => &["xi2"],
            Observable::InitialFidelity => &["f_initial"],
        }
    }

    fn needs_spectrum(&self) -> bool {
        matches!(self, Observable::GroundFidelity | Observable::ExcitedFidelity)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapSample {
    pub gap: f64,
    pub h_x: f64,
    pub h_z: f64,
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub columns: Vec<String>,
    pub samples: Vec<Sample>,
    pub final_state: QuantumState,
    pub norm_drift: f64,
    /// Smallest E1 − E0 among the step Hamiltonians.
    pub min_gap: Option<GapSample>,
    pub steps: usize,
}

impl TrajectoryRecord {
    /// Values of one named column, in sample order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.samples.iter().map(|s| s.values[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = ["t", "h_x", "h_z"].iter().map(|s| s.to_string()).collect();
        header.extend(self.columns.iter().cloned());
        let rows = self.samples.iter().map(|s| {
            let mut row = vec![s.t, s.h_x, s.h_z];
            row.extend_from_slice(&s.values);
            row
        });
        table::to_csv(&header, rows)
    }
}

struct BatchOutcome {
    states: Array2<C64>,
    norm_drift: f64,
    min_gap: Option<GapSample>,
    steps: usize,
}

/// Evolves the columns of `states` through `protocol`. `on_sample` receives
/// (t, h_x, h_z, states, warm eigenbasis) at t = 0, every
/// `control.sample_every` steps and at the end of each stage.
fn evolve<F>(
    terms: &FieldTerms,
    mut states: Array2<C64>,
    protocol: &SweepProtocol,
    control: &StepControl,
    mut on_sample: F,
) -> Result<BatchOutcome>
where
    F: FnMut(f64, f64, f64, &Array2<C64>, Option<&Array2<f64>>) -> Result<()>,
{
    control.validate()?;
    if protocol.stages.is_empty() {
        return Err(Error::domain("protocol has no stages"));
    }
    for stage in &protocol.stages {
        stage.validate()?;
    }
    let dim = terms.fixed.nrows();
    if states.nrows() != dim {
        return Err(Error::domain(format!(
            "state dimension {} does not match Hamiltonian dimension {dim}",
            states.nrows()
        )));
    }

    let initial_norms: Vec<f64> = states
        .axis_iter(Axis(1))
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut drift = initial_norms.iter().fold(0.0f64, |a, n| a.max((n - 1.0).abs()));
    let mut basis: Option<Array2<f64>> = None;
    let mut min_gap: Option<GapSample> = None;
    let mut t0 = 0.0;
    let mut global = 0usize;

    let (hx0, hz0) = protocol.stages[0].start_field();
    on_sample(0.0, hx0, hz0, &states, None)?;

    for stage in &protocol.stages {
        let n = stage.n_steps(control);
        let dt = stage.duration() / n as f64;
        for k in 0..n {
            let (hx, hz) = stage.field_at((k as f64 + 0.5) * dt);
            let eig = eigh_real(&terms.at(hx, hz), basis.as_ref())?;
            if let Some(gap) = eig.gap() {
                if min_gap.is_none_or(|g| gap < g.gap) {
                    min_gap = Some(GapSample { gap, h_x: hx, h_z: hz });
                }
            }
            apply_exponential(&eig, dt, &mut states);
            basis = Some(eig.vectors);
            global += 1;

            for (col, n0) in states.axis_iter(Axis(1)).zip(&initial_norms) {
                let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                drift = drift.max((norm - n0).abs());
            }
            if drift > NORM_DRIFT_LIMIT {
                return Err(Error::Integration {
                    drift,
                    limit: NORM_DRIFT_LIMIT,
                });
            }

            let last = k + 1 == n;
            if last || (control.sample_every > 0 && global.is_multiple_of(control.sample_every)) {
                let t_local = if last { stage.duration() } else { (k + 1) as f64 * dt };
                let (sx, sz) = if last { stage.end_field() } else { stage.field_at(t_local) };
                on_sample(t0 + t_local, sx, sz, &states, basis.as_ref())?;
            }
        }
        t0 += stage.duration();
    }

    Ok(BatchOutcome {
        states,
        norm_drift: drift,
        min_gap,
        steps: global,
    })
}

/// states ← V exp(−iΛΔt) Vᵀ states
fn apply_exponential(eig: &RealEigen, dt: f64, states: &mut Array2<C64>) {
    let v = &eig.vectors;
    let re = states.mapv(|z| z.re);
    let im = states.mapv(|z| z.im);
    let pr = v.t().dot(&re);
    let pi = v.t().dot(&im);
    let mut rot_re = pr.clone();
    let mut rot_im = pi.clone();
    for (k, &lambda) in eig.values.iter().enumerate() {
        let (s, c) = (-lambda * dt).sin_cos();
        for j in 0..pr.ncols() {
            let (a, b) = (pr[[k, j]], pi[[k, j]]);
            rot_re[[k, j]] = c * a - s * b;
            rot_im[[k, j]] = s * a + c * b;
        }
    }
    let nr = v.dot(&rot_re);
    let ni = v.dot(&rot_im);
    ndarray::Zip::from(states)
        .and(&nr)
        .and(&ni)
        .for_each(|z, &a, &b| *z = C64::new(a, b));
}

fn state_matrix(psi: &QuantumState) -> Array2<C64> {
    psi.amplitudes().clone().insert_axis(Axis(1))
}

/// Instantaneous eigenstates of H(h_x, h_z), lowest first.
pub fn instantaneous_states(
    ops: &CollectiveOperators,
    c: f64,
    h_x: f64,
    h_z: f64,
    count: usize,
) -> Result<Vec<QuantumState>> {
    let terms = FieldTerms::new(ops, c);
    let eig = eigh_real(&terms.at(h_x, h_z), None)?;
    Ok(eigen_states(ops.basis(), &eig, count))
}

fn eigen_states(basis: &Arc<FockBasis>, eig: &RealEigen, count: usize) -> Vec<QuantumState> {
    (0..count.min(eig.values.len()))
        .map(|k| {
            let amps = eig.vectors.column(k).mapv(C64::from);
            QuantumState::from_parts_unchecked(basis.clone(), amps)
        })
        .collect()
}

fn overlap_sq(eigvec: ndarray::ArrayView1<f64>, psi: ndarray::ArrayView1<C64>) -> f64 {
    let z: C64 = eigvec.iter().zip(psi.iter()).map(|(a, b)| b * *a).sum();
    z.norm_sqr().min(1.0)
}

/// Evolves `initial` through `protocol`, recording the requested observables.
pub fn propagate(
    ops: &CollectiveOperators,
    c: f64,
    initial: &QuantumState,
    protocol: &SweepProtocol,
    control: &StepControl,
    observables: &[Observable],
) -> Result<TrajectoryRecord> {
    if initial.dim() != ops.dim() {
        return Err(Error::domain(format!(
            "initial state dimension {} does not match operators {}",
            initial.dim(),
            ops.dim()
        )));
    }
    let norm = initial.norm();
    if (norm - 1.0).abs() > crate::spin_fock::NORM_TOL {
        return Err(Error::domain(format!("initial state norm {norm} is not 1")));
    }
    let terms = FieldTerms::new(ops, c);
    let basis = ops.basis().clone();
    let n_atoms = basis.n_atoms();
    let columns: Vec<String> = observables
        .iter()
        .flat_map(|o| o.columns().iter().map(|s| s.to_string()))
        .collect();
    let needs_spectrum = observables.iter().any(Observable::needs_spectrum);
    let mut samples = Vec::new();

    let outcome = evolve(&terms, state_matrix(initial), protocol, control, |t, hx, hz, states, warm| {
        let amps = states.column(0);
        let psi = QuantumState::from_parts_unchecked(basis.clone(), amps.to_owned());
        let spectrum = if needs_spectrum {
            Some(eigh_real(&terms.at(hx, hz), warm)?)
        } else {
            None
        };
        let mut values = Vec::with_capacity(columns.len());
        for obs in observables {
            match obs {
                Observable::Energy => {
                    let h = terms.at(hx, hz);
                    let hpsi = crate::linalg::real_matvec(&h, psi.amplitudes());
                    let e: f64 = amps.iter().zip(hpsi.iter()).map(|(a, b)| (a.conj() * b).re).sum();
                    values.push(e);
                }
                Observable::GroundFidelity => {
                    let s = spectrum.as_ref().expect("spectrum computed");
                    values.push(overlap_sq(s.vectors.column(0), amps));
                }
                Observable::ExcitedFidelity => {
                    let s = spectrum.as_ref().expect("spectrum computed");
                    values.push(overlap_sq(s.vectors.column(1), amps));
                }
                Observable::GhzFidelity => values.push(ghz_fidelity(&psi)),
                Observable::MaxPhaseFidelity => values.push(max_phase_fidelity(&psi).0),
                Observable::GhzPhase => values.push(max_phase_fidelity(&psi).1),
                Observable::MeanSpin => {
                    let m = crate::observables::mean_spin(&psi, ops)?;
                    values.extend_from_slice(&m);
                }
                Observable::Squeezing => {
                    let m = spin_moments(&psi, ops)?;
                    values.push(squeezing_from_moments(&m, n_atoms).map_or(f64::NAN, |r| r.xi2));
                }
                Observable::InitialFidelity => values.push(overlap_c(initial.amplitudes(), amps)),
            }
        }
        samples.push(Sample {
            t,
            h_x: hx,
            h_z: hz,
            values,
        });
        Ok(())
    })?;

    let final_state = QuantumState::from_parts_unchecked(basis.clone(), outcome.states.column(0).to_owned());
    Ok(TrajectoryRecord {
        columns,
        samples,
        final_state,
        norm_drift: outcome.norm_drift,
        min_gap: outcome.min_gap,
        steps: outcome.steps,
    })
}

fn overlap_c(a: &Array1<C64>, b: ndarray::ArrayView1<C64>) -> f64 {
    let z: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    z.norm_sqr().min(1.0)
}

/// Evolves several states through the same protocol at once.
pub fn propagate_many(
    ops: &CollectiveOperators,
    c: f64,
    initial: &[QuantumState],
    protocol: &SweepProtocol,
    control: &StepControl,
) -> Result<(Vec<QuantumState>, f64)> {
    if initial.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    let dim = ops.dim();
    let mut m = Array2::zeros((dim, initial.len()));
    for (j, s) in initial.iter().enumerate() {
        if s.dim() != dim {
            return Err(Error::domain("state dimension does not match operators"));
        }
        m.column_mut(j).assign(s.amplitudes());
    }
    let terms = FieldTerms::new(ops, c);
    let control = StepControl {
        sample_every: 0,
        ..*control
    };
    let out = evolve(&terms, m, protocol, &control, |_, _, _, _, _| Ok(()))?;
    let states = out
        .states
        .axis_iter(Axis(1))
        .map(|col| QuantumState::from_parts_unchecked(ops.basis().clone(), col.to_owned()))
        .collect();
    Ok((states, out.norm_drift))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub n_atoms: usize,
    pub c: f64,
    /// Longitudinal field during the split; removed for recombination.
    pub h_z: f64,
    pub rate: f64,
    /// Strong transverse field at the start of the split and the end of
    /// recombination.
    pub h_x_init: f64,
    /// Transverse field where the split stops and recombination starts.
    pub h_x_split_end: f64,
    /// Rate for the recombination sweep; defaults to `rate`.
    pub recombine_rate: Option<f64>,
    pub control: StepControl,
}

impl InterferometerConfig {
    pub fn new(n_atoms: usize, c: f64, h_z: f64) -> Self {
        Self {
            n_atoms,
            c,
            h_z,
            rate: 0.08,
            h_x_init: 10.0,
            h_x_split_end: 0.0,
            recombine_rate: None,
            control: StepControl::default(),
        }
    }

    fn validate(&self, ops: &CollectiveOperators) -> Result<()> {
        if self.n_atoms != ops.basis().n_atoms() {
            return Err(Error::domain("configuration and operators disagree on N"));
        }
        if !(self.c.is_finite() && self.h_z.is_finite()) {
            return Err(Error::domain("c and h_z must be finite"));
        }
        if self.c >= 0.0 {
            return Err(Error::UnsupportedRegime(format!(
                "the interferometer needs c < 0, got c = {}",
                self.c
            )));
        }
        if !(self.rate > 0.0) {
            return Err(Error::domain(format!("sweep rate must be positive, got {}", self.rate)));
        }
        Ok(())
    }

    pub fn split_protocol(&self) -> Result<SweepProtocol> {
        make_linear_sweep(self.h_x_init, self.h_x_split_end, self.rate, self.h_z)
    }

    pub fn recombine_protocol(&self) -> Result<SweepProtocol> {
        make_linear_sweep(
            self.h_x_split_end,
            self.h_x_init,
            self.recombine_rate.unwrap_or(self.rate),
            0.0,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MZResult {
    /// Population of the ground state at the end of recombination.
    pub f0: f64,
    /// Population of the first excited state at the end of recombination.
    pub f1: f64,
    /// 2 atan2(√F₁, √F₀) ∈ [0, π].
    pub phase_estimate: f64,
    /// F_G at the end of the split.
    pub split_ghz_fidelity: f64,
    /// F_Φ^max at the end of the split.
    pub split_max_phase_fidelity: f64,
    /// GHZ phase maximizing the overlap at the end of the split, in [0, 2π).
    pub split_phase: f64,
    pub norm_drift: f64,
    pub min_gap: Option<f64>,
    pub min_gap_h_x: Option<f64>,
    pub warnings: Vec<String>,
}

/// Output populations after recombining each seed: (F₀, F₁) relative to the
/// ground and first excited states at the recombination endpoint.
pub fn recombine(
    ops: &CollectiveOperators,
    config: &InterferometerConfig,
    seeds: &[QuantumState],
) -> Result<(Vec<(f64, f64)>, f64)> {
    config.validate(ops)?;
    let protocol = config.recombine_protocol()?;
    let (out, drift) = propagate_many(ops, config.c, seeds, &protocol, &config.control)?;
    let targets = instantaneous_states(ops, config.c, config.h_x_init, 0.0, 2)?;
    let pops = out
        .iter()
        .map(|s| {
            let f0 = s.inner(&targets[0]).map(|z| z.norm_sqr().min(1.0));
            let f1 = s.inner(&targets[1]).map(|z| z.norm_sqr().min(1.0));
            Ok((f0?, f1?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((pops, drift))
}

/// Ground state at the start of the split.
pub fn initial_ground_state(ops: &CollectiveOperators, config: &InterferometerConfig) -> Result<QuantumState> {
    let mut states = instantaneous_states(ops, config.c, config.h_x_init, config.h_z, 1)?;
    Ok(states.remove(0))
}

/// Split stage alone, recording `observables` every `control.sample_every` steps.
pub fn split(
    ops: &CollectiveOperators,
    config: &InterferometerConfig,
    observables: &[Observable],
) -> Result<TrajectoryRecord> {
    config.validate(ops)?;
    let psi0 = initial_ground_state(ops, config)?;
    propagate(ops, config.c, &psi0, &config.split_protocol()?, &config.control, observables)
}

pub fn run_interferometer(ops: &CollectiveOperators, config: &InterferometerConfig) -> Result<MZResult> {
    let record = split(ops, config, &[])?;
    let mid = &record.final_state;
    let (f_max, phi) = max_phase_fidelity(mid);
    let (pops, drift2) = recombine(ops, config, std::slice::from_ref(mid))?;
    let (f0, f1) = pops[0];
    let phase_estimate = crate::observables::extract_phase(f0, f1)?;

    let mut warnings = Vec::new();
    if let Some(g) = record.min_gap {
        let duration = config.split_protocol()?.duration();
        if g.gap * duration < 10.0 {
            warnings.push(format!(
                "adiabaticity: minimum gap {:.3e} at h_x = {:.4} times split duration {:.1} is below 10",
                g.gap, g.h_x, duration
            ));
        }
    }
    Ok(MZResult {
        f0,
        f1,
        phase_estimate,
        split_ghz_fidelity: ghz_fidelity(mid),
        split_max_phase_fidelity: f_max,
        split_phase: phi,
        norm_drift: record.norm_drift.max(drift2),
        min_gap: record.min_gap.map(|g| g.gap),
        min_gap_h_x: record.min_gap.map(|g| g.h_x),
        warnings,
    })
}
