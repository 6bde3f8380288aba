//! Gaussian-ansatz interaction parameters as a function of trap geometry.
//!
//! With aspect ratio κ = q_r/q_z the dipolar coupling carries the factor
//!
//! ```text
//! χ(κ) = [2κ² + 1 − 3κ² H(κ)] / (κ² − 1),   H(κ) = artanh√(1−κ²) / √(1−κ²)
//! ```
//!
//! which runs from −1 (κ → 0, cigar) through 0 (κ = 1) to 2 (κ → ∞, pancake).
//! For κ > 1 the real continuation H = arctan√(κ²−1) / √(κ²−1) is used, and
//! within `SERIES_WINDOW` of κ = 1 both H and χ come from their power series
//! in s = 1 − κ², where the closed forms cancel catastrophically.
//!
//! Sign conventions: the dimensionless model uses c = c′_d/|c′₂|, while the
//! geometry relation c′_d/c′₂ = 2π c_d χ(κ)/(3 c₂) divides by the signed c′₂.
//! For ⁸⁷Rb (c₂ < 0) the two differ by a sign, so a cigar trap (χ < 0) gives
//! c′_d/|c′₂| < 0 but c′_d/c′₂ > 0. [`CouplingSet`] reports both.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SERIES_WINDOW: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapGeometry {
    pub q_r: f64,
    pub q_z: f64,
    pub kappa: f64,
}

impl TrapGeometry {
    pub fn new(q_r: f64, q_z: f64) -> Result<Self> {
        if !(q_r > 0.0 && q_z > 0.0 && q_r.is_finite() && q_z.is_finite()) {
            return Err(Error::domain(format!(
                "trap widths must be positive and finite, got q_r = {q_r}, q_z = {q_z}"
            )));
        }
        Ok(Self {
            q_r,
            q_z,
            kappa: q_r / q_z,
        })
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("kappa must be positive and finite, got {kappa}")));
    }
    Ok(())
}

/// Σ sᵏ/(2k+1) with s = 1 − κ²; converges for 0 < κ < √2.
pub fn shape_series(kappa: f64) -> f64 {
    let s = 1.0 - kappa * kappa;
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..200 {
        let add = term / (2 * k + 1) as f64;
        sum += add;
        if add.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
        term *= s;
    }
    sum
}

pub fn shape_function(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if (kappa - 1.0).abs() < SERIES_WINDOW {
        return Ok(shape_series(kappa));
    }
    if kappa < 1.0 {
        let x = (1.0 - kappa * kappa).sqrt();
        // artanh x = ln((1 + x)/κ)
        Ok(((1.0 + x) / kappa).ln() / x)
    } else {
        let y = (kappa * kappa - 1.0).sqrt();
        Ok(y.atan() / y)
    }
}

/// 6 Σ_{k≥2} (−u)ᵏ / (u (4k² − 1)) with u = κ² − 1.
fn chi_series(kappa: f64) -> f64 {
    let u = kappa * kappa - 1.0;
    let mut sum = 0.0;
    let mut term = 1.0; // (−1)^k u^{k−1} / u^1 with k = 2 → u
    for k in 2..200 {
        term *= if k == 2 { u } else { -u };
        let add = term / (4 * k * k - 1) as f64;
        sum += add;
        if add.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    6.0 * sum
}

pub fn chi(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if (kappa - 1.0).abs() < SERIES_WINDOW {
        return Ok(chi_series(kappa));
    }
    let k2 = kappa * kappa;
    let h = shape_function(kappa)?;
    Ok((2.0 * k2 + 1.0 - 3.0 * k2 * h) / (k2 - 1.0))
}

/// c′_d/c′₂ = 2π c_d χ(κ) / (3 c₂)
pub fn dipolar_ratio(c_d: f64, c_2: f64, kappa: f64) -> Result<f64> {
    if c_2 == 0.0 {
        return Err(Error::domain("spin-exchange coupling c₂ must be nonzero"));
    }
    Ok(2.0 * PI * c_d * chi(kappa)? / (3.0 * c_2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub c0p: f64,
    pub c2p: f64,
    pub cdp: f64,
    /// c′_d/|c′₂|, the c of the dimensionless Hamiltonian.
    pub c_ratio: f64,
    /// c′_d/c′₂
    pub c_ratio_signed: f64,
}

pub fn rescaled_couplings(c0: f64, c2: f64, c_d: f64, geometry: &TrapGeometry) -> Result<CouplingSet> {
    let g = TrapGeometry::new(geometry.q_r, geometry.q_z)?;
    if c2 == 0.0 {
        return Err(Error::domain("c₂ = 0 leaves the dipolar ratio undefined"));
    }
    let volume = g.q_r * g.q_r * g.q_z;
    let contact = 2.0 * (2.0 * PI).powf(1.5) * volume;
    let c0p = c0 / contact;
    let c2p = c2 / contact;
    let cdp = c_d / (6.0 * (2.0 * PI).sqrt() * volume) * chi(g.kappa)?;
    Ok(CouplingSet {
        c0p,
        c2p,
        cdp,
        c_ratio: cdp / c2p.abs(),
        c_ratio_signed: cdp / c2p,
    })
}

/// c₀ = 4πħ²(a₀ + 2a₂)/(3M), c₂ = 4πħ²(a₂ − a₀)/(3M) in the caller's units.
pub fn collision_params(a0: f64, a2: f64, mass: f64, hbar: f64) -> Result<(f64, f64)> {
    if !(mass > 0.0) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    let pref = 4.0 * PI * hbar * hbar / (3.0 * mass);
    Ok((pref * (a0 + 2.0 * a2), pref * (a2 - a0)))
}
