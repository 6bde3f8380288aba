//! Dimensionless single-mode Hamiltonian
//!
//! ```text
//! H = (−1 − c) L² + 3c (Lz² + n̂₀) − h_x Lx − h_z Lz
//! ```
//!
//! with energies in units of |c′₂| (ħ = 1), plus the large-N mean-field
//! energy E(ϑ) = 3cN² cos²ϑ − h_x N sinϑ of a classical spin at polar angle ϑ.

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_fock::CollectiveOperators;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Dipolar ratio c′_d/|c′₂|.
    pub c: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub n_atoms: usize,
}

impl ModelParams {
    pub fn new(n_atoms: usize, c: f64, h_x: f64, h_z: f64) -> Self {
        Self { c, h_x, h_z, n_atoms }
    }

    pub fn with_fields(self, h_x: f64, h_z: f64) -> Self {
        Self { h_x, h_z, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::domain("n_atoms must be at least 1"));
        }
        if !(self.c.is_finite() && self.h_x.is_finite() && self.h_z.is_finite()) {
            return Err(Error::domain("model parameters must be finite"));
        }
        Ok(())
    }

    fn require_attractive(&self) -> Result<()> {
        self.validate()?;
        if self.c >= 0.0 {
            return Err(Error::UnsupportedRegime(format!(
                "requires c < 0, got c = {}",
                self.c
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub matrix: Array2<C64>,
    pub params: ModelParams,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Real-valued pieces of the Hamiltonian, split by field dependence, so a
/// sweep can assemble H(h_x, h_z) without touching the complex operators.
#[derive(Clone, Debug)]
pub struct FieldTerms {
    /// (−1 − c) L² + 3c (Lz² + n̂₀)
    pub fixed: Array2<f64>,
    pub lx: Array2<f64>,
    pub lz: Array2<f64>,
    pub n_atoms: usize,
    pub c: f64,
}

impl FieldTerms {
    pub fn new(ops: &CollectiveOperators, c: f64) -> Self {
        let real = |m: &Array2<C64>| m.mapv(|z| z.re);
        let l2 = real(&ops.l2);
        let lz = real(&ops.lz);
        let n0 = real(&ops.n0);
        let lz2 = lz.dot(&lz);
        let fixed = l2 * (-1.0 - c) + (lz2 + n0) * (3.0 * c);
        Self {
            fixed,
            lx: real(&ops.lx),
            lz,
            n_atoms: ops.basis().n_atoms(),
            c,
        }
    }

    pub fn at(&self, h_x: f64, h_z: f64) -> Array2<f64> {
        let mut h = self.fixed.clone();
        h.scaled_add(-h_x, &self.lx);
        h.scaled_add(-h_z, &self.lz);
        h
    }
}

pub fn build_hamiltonian(ops: &CollectiveOperators, params: ModelParams) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let n = ops.basis().n_atoms();
    if params.n_atoms != n {
        return Err(Error::domain(format!(
            "parameters are for N = {}, operators for N = {n}",
            params.n_atoms
        )));
    }
    let lz2 = ops.lz.dot(&ops.lz);
    let mut h = &ops.l2 * C64::from(-1.0 - params.c) + (lz2 + &ops.n0) * C64::from(3.0 * params.c);
    h.scaled_add(C64::from(-params.h_x), &ops.lx);
    h.scaled_add(C64::from(-params.h_z), &ops.lz);
    Ok(HamiltonianMatrix { matrix: h, params })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConfig {
    /// Polar angle of the classical spin in [0, π/2].
    pub vartheta: f64,
    pub energy: f64,
    /// The mirror minimum π − ϑ when the ground state is doubly degenerate.
    pub mirror: Option<f64>,
}

pub fn classical_energy(params: &ModelParams, vartheta: f64) -> f64 {
    let n = params.n_atoms as f64;
    let cos = vartheta.cos();
    3.0 * params.c * n * n * cos * cos - params.h_x * n * vartheta.sin()
}

pub fn critical_field(params: &ModelParams) -> Result<f64> {
    params.require_attractive()?;
    Ok(-6.0 * params.n_atoms as f64 * params.c)
}

pub fn classical_minimizer(params: &ModelParams) -> Result<ClassicalConfig> {
    let hc = critical_field(params)?;
    if params.h_x < 0.0 {
        return Err(Error::domain("transverse field magnitude must be non-negative"));
    }
    let (vartheta, mirror) = if params.h_x >= hc {
        (FRAC_PI_2, None)
    } else {
        let t = (params.h_x / hc).asin();
        (t, Some(PI - t))
    };
    Ok(ClassicalConfig {
        vartheta,
        energy: classical_energy(params, vartheta),
        mirror,
    })
}
