//! Overlaps, phase readout, spin moments, squeezing and quantum Fisher
//! information for pure states.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_defect;
use crate::spin_fock::{CollectiveOperators, QuantumState};

/// Mean spin below this fraction of N leaves the squeezing parameter undefined.
pub const MEAN_SPIN_THRESHOLD: f64 = 1e-6;

/// |⟨a|b⟩|²
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Overlap with (|N,N⟩ + |N,−N⟩)/√2.
pub fn ghz_fidelity(psi: &QuantumState) -> f64 {
    let (alpha, beta) = stretched_amplitudes(psi);
    ((alpha + beta) * FRAC_1_SQRT_2).norm_sqr().min(1.0)
}

fn stretched_amplitudes(psi: &QuantumState) -> (C64, C64) {
    let b = psi.basis();
    let a = psi.amplitudes();
    (a[b.stretched_up()], a[b.stretched_down()])
}

/// Maximum over φ of the overlap with (|N,N⟩ + e^{iφ}|N,−N⟩)/√2, and the
/// maximizing φ in [0, 2π). φ is 0 when either stretched amplitude vanishes.
pub fn max_phase_fidelity(psi: &QuantumState) -> (f64, f64) {
    let (alpha, beta) = stretched_amplitudes(psi);
    let f = 0.5 * (alpha.norm() + beta.norm()).powi(2);
    let phi = if alpha == C64::new(0.0, 0.0) || beta == C64::new(0.0, 0.0) {
        0.0
    } else {
        let p = (beta.arg() - alpha.arg()).rem_euclid(TAU);
        if p >= TAU {
            0.0
        } else {
            p
        }
    };
    (f.min(1.0), phi)
}

/// Inverts F₀ = cos²(φ/2), F₁ = sin²(φ/2) to φ ∈ [0, π].
pub fn extract_phase(f0: f64, f1: f64) -> Result<f64> {
    if !(f0.is_finite() && f1.is_finite()) || f0 < 0.0 || f1 < 0.0 {
        return Err(Error::domain(format!(
            "populations must be finite and non-negative, got ({f0}, {f1})"
        )));
    }
    if f0 + f1 > 1.0 + 1e-6 {
        return Err(Error::domain(format!("populations sum to {} > 1", f0 + f1)));
    }
    Ok(2.0 * f1.sqrt().atan2(f0.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub mean: [f64; 3],
    /// ½⟨LᵢLⱼ + LⱼLᵢ⟩ − ⟨Lᵢ⟩⟨Lⱼ⟩
    pub covariance: [[f64; 3]; 3],
}

impl SpinMoments {
    pub fn mean_magnitude(&self) -> f64 {
        norm3(self.mean)
    }

    /// Variance of the spin along unit vector `n`.
    pub fn variance_along(&self, n: [f64; 3]) -> f64 {
        let mut v = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                v += n[i] * self.covariance[i][j] * n[j];
            }
        }
        v
    }
}

fn check_dims(psi: &QuantumState, ops: &CollectiveOperators) -> Result<()> {
    if psi.dim() != ops.dim() {
        return Err(Error::domain(format!(
            "state dimension {} does not match operators {}",
            psi.dim(),
            ops.dim()
        )));
    }
    Ok(())
}

pub fn mean_spin(psi: &QuantumState, ops: &CollectiveOperators) -> Result<[f64; 3]> {
    check_dims(psi, ops)?;
    let mut out = [0.0; 3];
    for (o, op) in out.iter_mut().zip(ops.components()) {
        *o = psi.expectation(op)?.re;
    }
    Ok(out)
}

pub fn spin_moments(psi: &QuantumState, ops: &CollectiveOperators) -> Result<SpinMoments> {
    check_dims(psi, ops)?;
    let amps = psi.amplitudes();
    let applied: Vec<_> = ops.components().iter().map(|op| op.dot(amps)).collect();
    let braket = |a: &ndarray::Array1<C64>, b: &ndarray::Array1<C64>| -> C64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
    };
    let mut mean = [0.0; 3];
    for i in 0..3 {
        mean[i] = braket(amps, &applied[i]).re;
    }
    let mut covariance = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            // Re⟨Lᵢψ|Lⱼψ⟩ = ½⟨{Lᵢ, Lⱼ}⟩
            let v = braket(&applied[i], &applied[j]).re - mean[i] * mean[j];
            covariance[i][j] = v;
            covariance[j][i] = v;
        }
    }
    Ok(SpinMoments { mean, covariance })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub xi2: f64,
    /// Unit axis perpendicular to the mean spin with the smallest variance.
    pub optimal_axis: [f64; 3],
    pub mean_spin_magnitude: f64,
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal pair spanning the plane perpendicular to unit vector `u`,
/// seeded from the coordinate axis least aligned with `u`.
pub fn perpendicular_axes(u: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let mut k = 0;
    for i in 1..3 {
        if u[i].abs() < u[k].abs() {
            k = i;
        }
    }
    let mut e1 = [0.0; 3];
    e1[k] = 1.0;
    let proj = dot3(e1, u);
    for i in 0..3 {
        e1[i] -= proj * u[i];
    }
    let n1 = norm3(e1);
    for x in e1.iter_mut() {
        *x /= n1;
    }
    (e1, cross3(u, e1))
}

/// ξ² = 4 min(ΔL_⊥)² / N over axes perpendicular to the mean spin.
pub fn squeezing_parameter(psi: &QuantumState, ops: &CollectiveOperators) -> Result<SqueezingReport> {
    let m = spin_moments(psi, ops)?;
    squeezing_from_moments(&m, ops.basis().n_atoms())
}

pub fn squeezing_from_moments(m: &SpinMoments, n_atoms: usize) -> Result<SqueezingReport> {
    let n = n_atoms as f64;
    let mag = m.mean_magnitude();
    let threshold = MEAN_SPIN_THRESHOLD * n;
    if !(mag >= threshold) {
        return Err(Error::UndefinedSqueezing {
            mean_spin: mag,
            threshold,
        });
    }
    let u = [m.mean[0] / mag, m.mean[1] / mag, m.mean[2] / mag];
    let (e1, e2) = perpendicular_axes(u);
    let c11 = m.variance_along(e1);
    let c22 = m.variance_along(e2);
    let mut c12 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            c12 += e1[i] * m.covariance[i][j] * e2[j];
        }
    }
    let min_var = 0.5 * (c11 + c22 - ((c11 - c22).powi(2) + 4.0 * c12 * c12).sqrt());
    let beta = 0.5 * (2.0 * c12).atan2(c11 - c22) + std::f64::consts::FRAC_PI_2;
    let (sb, cb) = beta.sin_cos();
    let axis = [
        cb * e1[0] + sb * e2[0],
        cb * e1[1] + sb * e2[1],
        cb * e1[2] + sb * e2[2],
    ];
    Ok(SqueezingReport {
        xi2: (4.0 * min_var / n).max(0.0),
        optimal_axis: axis,
        mean_spin_magnitude: mag,
    })
}

/// Pure-state quantum Fisher information 4 Var(G).
pub fn qfi(psi: &QuantumState, generator: &Array2<C64>) -> Result<f64> {
    if generator.nrows() != psi.dim() || generator.ncols() != psi.dim() {
        return Err(Error::domain("generator dimension does not match the state"));
    }
    let defect = hermitian_defect(generator);
    if defect > crate::spectra::HERMITIAN_TOL {
        return Err(Error::domain(format!("generator is not Hermitian (defect {defect:e})")));
    }
    let g_psi = generator.dot(psi.amplitudes());
    let mean: f64 = psi
        .amplitudes()
        .iter()
        .zip(g_psi.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let second: f64 = g_psi.iter().map(|z| z.norm_sqr()).sum();
    Ok(4.0 * (second - mean * mean))
}
