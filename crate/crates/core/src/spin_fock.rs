//! Symmetric N-boson spin-1 Fock space and collective spin operators.
//!
//! A basis ket is an occupation triple `(n_minus, n_zero, n_plus)` of the
//! Zeeman modes m = -1, 0, +1. Triples are ordered lexicographically
//! ascending in `(n_minus, n_zero)`, so the stretched state `(0, 0, N)` comes
//! first and `(N, 0, 0)` last.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ATOMS: usize = 60;

/// Occupation numbers of the m = -1, 0, +1 modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occupation {
    pub minus: usize,
    pub zero: usize,
    pub plus: usize,
}

impl Occupation {
    pub const fn new(minus: usize, zero: usize, plus: usize) -> Self {
        Self { minus, zero, plus }
    }

    pub fn total(&self) -> usize {
        self.minus + self.zero + self.plus
    }

    /// Magnetization n₊ − n₋.
    pub fn m(&self) -> i64 {
        self.plus as i64 - self.minus as i64
    }
}

impl From<(usize, usize, usize)> for Occupation {
    fn from((minus, zero, plus): (usize, usize, usize)) -> Self {
        Self::new(minus, zero, plus)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockBasis {
    n_atoms: usize,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl FockBasis {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, i: usize) -> Occupation {
        self.states[i]
    }

    pub fn index_of(&self, occ: Occupation) -> Option<usize> {
        self.index.get(&occ).copied()
    }

    /// Index of |N, N⟩ = (0, 0, N).
    pub fn stretched_up(&self) -> usize {
        0
    }

    /// Index of |N, −N⟩ = (N, 0, 0).
    pub fn stretched_down(&self) -> usize {
        self.states.len() - 1
    }
}

pub fn build_basis(n_atoms: usize) -> Result<FockBasis> {
    build_basis_with_cap(n_atoms, DEFAULT_MAX_ATOMS)
}

pub fn build_basis_with_cap(n_atoms: usize, max_atoms: usize) -> Result<FockBasis> {
    if n_atoms == 0 {
        return Err(Error::Size("atom number must be at least 1".into()));
    }
    if n_atoms > max_atoms {
        return Err(Error::Size(format!(
            "atom number {n_atoms} exceeds the cap of {max_atoms}"
        )));
    }
    let mut states = Vec::with_capacity((n_atoms + 1) * (n_atoms + 2) / 2);
    for minus in 0..=n_atoms {
        for zero in 0..=(n_atoms - minus) {
            states.push(Occupation::new(minus, zero, n_atoms - minus - zero));
        }
    }
    let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    Ok(FockBasis {
        n_atoms,
        states,
        index,
    })
}

#[derive(Clone, Debug)]
pub struct CollectiveOperators {
    pub lx: Array2<C64>,
    pub ly: Array2<C64>,
    pub lz: Array2<C64>,
    pub l2: Array2<C64>,
    pub n0: Array2<C64>,
    basis: Arc<FockBasis>,
}

impl CollectiveOperators {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `[Lx, Ly, Lz]`.
    pub fn components(&self) -> [&Array2<C64>; 3] {
        [&self.lx, &self.ly, &self.lz]
    }

    /// Spin component along a unit axis.
    pub fn along(&self, axis: [f64; 3]) -> Array2<C64> {
        &self.lx * C64::from(axis[0]) + &self.ly * C64::from(axis[1]) + &self.lz * C64::from(axis[2])
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Build Lx, Ly, Lz, L² and n̂₀ from the spin-1 ladder operator
/// L₊ = √2 (a₊†a₀ + a₀†a₋).
pub fn build_collective_ops(basis: Arc<FockBasis>) -> CollectiveOperators {
    let d = basis.dim();
    let mut lplus = Array2::<f64>::zeros((d, d));
    let mut l2 = Array2::<C64>::zeros((d, d));
    let mut lz = Array2::<C64>::zeros((d, d));
    let mut n0 = Array2::<C64>::zeros((d, d));
    let sqrt2 = std::f64::consts::SQRT_2;

    for (j, s) in basis.states().iter().enumerate() {
        let (nm, nz, np) = (s.minus as f64, s.zero as f64, s.plus as f64);
        let m = s.m() as f64;
        lz[[j, j]] = re(m);
        n0[[j, j]] = re(nz);

        // a₊†a₀
        if s.zero > 0 {
            let i = basis.index_of(Occupation::new(s.minus, s.zero - 1, s.plus + 1)).unwrap();
            lplus[[i, j]] += sqrt2 * (nz * (np + 1.0)).sqrt();
        }
        // a₀†a₋
        if s.minus > 0 {
            let i = basis.index_of(Occupation::new(s.minus - 1, s.zero + 1, s.plus)).unwrap();
            lplus[[i, j]] += sqrt2 * (nm * (nz + 1.0)).sqrt();
        }

        // L² = L₋L₊ + Lz² + Lz
        l2[[j, j]] = re(2.0 * (nz * (np + 1.0) + nm * (nz + 1.0)) + m * m + m);
        // (a₀†)² a₊ a₋
        if s.minus > 0 && s.plus > 0 {
            let i = basis.index_of(Occupation::new(s.minus - 1, s.zero + 2, s.plus - 1)).unwrap();
            l2[[i, j]] = re(2.0 * (nm * np * (nz + 1.0) * (nz + 2.0)).sqrt());
        }
        // a₋† a₊† a₀²
        if s.zero > 1 {
            let i = basis.index_of(Occupation::new(s.minus + 1, s.zero - 2, s.plus + 1)).unwrap();
            l2[[i, j]] = re(2.0 * ((nm + 1.0) * (np + 1.0) * nz * (nz - 1.0)).sqrt());
        }
    }

    let mut lx = Array2::<C64>::zeros((d, d));
    let mut ly = Array2::<C64>::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            let up = lplus[[i, j]];
            let down = lplus[[j, i]];
            lx[[i, j]] = re(0.5 * (up + down));
            ly[[i, j]] = C64::new(0.0, -0.5 * (up - down));
        }
    }

    CollectiveOperators {
        lx,
        ly,
        lz,
        l2,
        n0,
        basis,
    }
}

/// Normalized pure state over a Fock basis.
#[derive(Clone, Debug)]
pub struct QuantumState {
    basis: Arc<FockBasis>,
    amplitudes: Array1<C64>,
}

pub const NORM_TOL: f64 = 1e-10;

impl QuantumState {
    /// Wraps amplitudes that are already unit-norm.
    pub fn new(basis: Arc<FockBasis>, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::domain(format!(
                "state has {} amplitudes, basis has dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("state norm {norm} is not 1")));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales nonzero amplitudes to unit norm.
    pub fn normalized(basis: Arc<FockBasis>, amplitudes: Array1<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        Self::new(basis, amplitudes.mapv(|z| z / norm))
    }

    pub(crate) fn from_parts_unchecked(basis: Arc<FockBasis>, amplitudes: Array1<C64>) -> Self {
        Self { basis, amplitudes }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    pub fn amplitude(&self, occ: Occupation) -> Option<C64> {
        self.basis.index_of(occ).map(|i| self.amplitudes[i])
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::domain(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// ⟨ψ|A|ψ⟩ for a square operator of matching dimension.
    pub fn expectation(&self, op: &Array2<C64>) -> Result<C64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::domain(format!(
                "operator is {}x{}, state has dimension {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        let a = op.dot(&self.amplitudes);
        Ok(self
            .amplitudes
            .iter()
            .zip(a.iter())
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Multiplies every amplitude by e^{iθ}.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let ph = C64::from_polar(1.0, theta);
        Self {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.mapv(|z| z * ph),
        }
    }

    /// Amplitudes as `[re, im]` pairs in basis order.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.amplitudes.iter().map(|z| [z.re, z.im]).collect()
    }

    pub fn from_pairs(basis: Arc<FockBasis>, pairs: &[[f64; 2]]) -> Result<Self> {
        let amps = pairs.iter().map(|p| C64::new(p[0], p[1])).collect::<Array1<_>>();
        Self::new(basis, amps)
    }
}

pub(crate) fn l2_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fock_state(basis: &Arc<FockBasis>, occ: impl Into<Occupation>) -> Result<QuantumState> {
    let occ = occ.into();
    let i = basis.index_of(occ).ok_or_else(|| {
        Error::domain(format!(
            "occupation ({}, {}, {}) does not sum to N = {}",
            occ.minus,
            occ.zero,
            occ.plus,
            basis.n_atoms()
        ))
    })?;
    let mut amps = Array1::zeros(basis.dim());
    amps[i] = re(1.0);
    Ok(QuantumState::from_parts_unchecked(basis.clone(), amps))
}

/// All atoms in the single-particle state exp(−iφF_z) exp(−iθF_y)|m = +1⟩.
pub fn spin_coherent(basis: &Arc<FockBasis>, theta: f64, phi: f64) -> QuantumState {
    let (s, c) = theta.sin_cos();
    // single-atom amplitudes d¹_{m,1}(θ) e^{−imφ}
    let single = [
        C64::from_polar(1.0, phi) * ((1.0 - c) / 2.0),
        re(s * FRAC_1_SQRT_2),
        C64::from_polar(1.0, -phi) * ((1.0 + c) / 2.0),
    ];
    let n = basis.n_atoms();
    let ln_fact = ln_factorials(n);
    let amps = basis
        .states()
        .iter()
        .map(|occ| {
            let counts = [occ.minus, occ.zero, occ.plus];
            let mut log_mag = 0.5 * ln_fact[n];
            let mut phase = re(1.0);
            for (k, &cnt) in counts.iter().enumerate() {
                log_mag -= 0.5 * ln_fact[cnt];
                if cnt == 0 {
                    continue;
                }
                let a = single[k];
                let mag = a.norm();
                if mag == 0.0 {
                    return re(0.0);
                }
                log_mag += cnt as f64 * mag.ln();
                phase *= (a / mag).powu(cnt as u32);
            }
            phase * log_mag.exp()
        })
        .collect::<Array1<_>>();
    let norm = l2_norm(&amps);
    QuantumState::from_parts_unchecked(basis.clone(), amps.mapv(|z| z / norm))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// (|N,N⟩ + e^{iφ}|N,−N⟩)/√2
pub fn ghz_state(basis: &Arc<FockBasis>, phi: f64) -> QuantumState {
    let mut amps = Array1::zeros(basis.dim());
    amps[basis.stretched_up()] = re(FRAC_1_SQRT_2);
    amps[basis.stretched_down()] = C64::from_polar(FRAC_1_SQRT_2, phi);
    QuantumState::from_parts_unchecked(basis.clone(), amps)
}
