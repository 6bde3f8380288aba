#![allow(dead_code)]

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spinmz_core::linalg::adjoint;
use spinmz_core::spectra::eigh_hermitian;
use spinmz_core::spin_fock::{build_basis, build_collective_ops, CollectiveOperators, QuantumState};

pub fn ops(n: usize) -> CollectiveOperators {
    build_collective_ops(Arc::new(build_basis(n).unwrap()))
}

/// exp(−iθG) for Hermitian G through its eigendecomposition.
pub fn expm_i(g: &Array2<C64>, theta: f64) -> Array2<C64> {
    let e = eigh_hermitian(g).unwrap();
    let phases = e.eigenvalues.mapv(|l| C64::from_polar(1.0, -theta * l));
    (&e.eigenvectors * &phases).dot(&adjoint(&e.eigenvectors))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Array2<C64> {
    let a = Array2::from_shape_fn((n, n), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + &adjoint(&a)).mapv(|z| z * 0.5)
}

pub fn random_state(rng: &mut ChaCha8Rng, ops: &CollectiveOperators) -> QuantumState {
    let v = Array1::from_shape_fn(ops.dim(), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    QuantumState::normalized(ops.basis().clone(), v).unwrap()
}

pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}
