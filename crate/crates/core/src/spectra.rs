//! Dense Hermitian eigendecomposition and adiabatic level scans.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{FieldTerms, HamiltonianMatrix, ModelParams};
use crate::jacobi;
use crate::linalg::{frobenius, hermitian_defect, is_real};
use crate::spin_fock::CollectiveOperators;
use crate::table;

/// Relative Hermiticity tolerance accepted by [`eigh_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues ascending; column `k` of `eigenvectors` pairs with
/// `eigenvalues[k]`. Each column has its largest-magnitude component real
/// and positive.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<C64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Array1<C64> {
        self.eigenvectors.column(k).to_owned()
    }

    /// Largest |λ|, i.e. the spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// V diag(λ) V†
    pub fn reconstruct(&self) -> Array2<C64> {
        let scaled = &self.eigenvectors * &self.eigenvalues.mapv(C64::from);
        scaled.dot(&crate::linalg::adjoint(&self.eigenvectors))
    }

    /// Rotates each cluster of eigenvalues closer than `rel_tol · ‖H‖` onto
    /// eigenvectors of `op` restricted to the cluster, ordered by the
    /// eigenvalue of `op`.
    pub fn resolve_degenerate(&self, op: &Array2<C64>, rel_tol: f64) -> Result<Self> {
        let n = self.dim();
        let tol = rel_tol * self.spectral_norm();
        let mut vectors = self.eigenvectors.clone();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && self.eigenvalues[end] - self.eigenvalues[end - 1] < tol {
                end += 1;
            }
            if end - start > 1 {
                let block = self.eigenvectors.slice(s![.., start..end]).to_owned();
                let projected = crate::linalg::adjoint(&block).dot(&op.dot(&block));
                let (mu, w, _) = jacobi::hermitian_matrix(&projected).map_err(not_converged)?;
                let order = argsort(mu.as_slice().unwrap());
                let rotated = block.dot(&w);
                for (dst, &src) in order.iter().enumerate() {
                    vectors.column_mut(start + dst).assign(&rotated.column(src));
                }
            }
            start = end;
        }
        fix_phases(&mut vectors);
        Ok(Self {
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: vectors,
        })
    }
}

fn not_converged(e: jacobi::NotConverged) -> Error {
    Error::NotConverged {
        sweeps: e.sweeps,
        off_diagonal: e.off_norm,
    }
}

fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

fn largest_component(col: ndarray::ArrayView1<C64>) -> usize {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    best
}

fn fix_phases(vectors: &mut Array2<C64>) {
    for mut col in vectors.columns_mut() {
        let i = largest_component(col.view());
        let z = col[i];
        let mag = z.norm();
        if mag > 0.0 {
            let ph = z.conj() / mag;
            col.mapv_inplace(|x| x * ph);
            col[i] = C64::new(mag, 0.0);
        }
    }
}

pub fn eigh(h: &HamiltonianMatrix) -> Result<EigenDecomposition> {
    eigh_hermitian(&h.matrix)
}

pub fn eigh_hermitian(m: &Array2<C64>) -> Result<EigenDecomposition> {
    if m.nrows() != m.ncols() {
        return Err(Error::domain(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::domain(format!("matrix is not Hermitian (relative defect {defect:e})")));
    }
    let (values, vectors) = if is_real(m) {
        let (w, v, _) = jacobi::symmetric_matrix(&m.mapv(|z| z.re), None).map_err(not_converged)?;
        (w, v.mapv(C64::from))
    } else {
        let (w, v, _) = jacobi::hermitian_matrix(m).map_err(not_converged)?;
        (w, v)
    };
    let order = argsort(values.as_slice().unwrap());
    let eigenvalues = order.iter().map(|&k| values[k]).collect::<Array1<_>>();
    let mut eigenvectors = Array2::zeros(vectors.raw_dim());
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).assign(&vectors.column(src));
    }
    fix_phases(&mut eigenvectors);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Sorted eigenpairs of a real symmetric matrix, optionally warm-started from
/// a previous orthonormal eigenbasis. Used on the hot path of field sweeps.
#[derive(Clone, Debug)]
pub struct RealEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

impl RealEigen {
    pub fn gap(&self) -> Option<f64> {
        (self.values.len() >= 2).then(|| self.values[1] - self.values[0])
    }
}

pub fn eigh_real(m: &Array2<f64>, guess: Option<&Array2<f64>>) -> Result<RealEigen> {
    let (w, v, _) = jacobi::symmetric_matrix(m, guess).map_err(not_converged)?;
    let order = argsort(w.as_slice().unwrap());
    let values = order.iter().map(|&k| w[k]).collect::<Array1<_>>();
    let mut vectors = Array2::zeros(v.raw_dim());
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column_mut(dst);
        col.assign(&v.column(src));
        let i = col.iter().enumerate().fold((0, -1.0), |best, (i, x)| {
            if x.abs() > best.1 {
                (i, x.abs())
            } else {
                best
            }
        });
        if col[i.0] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
    Ok(RealEigen { values, vectors })
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelScan {
    pub grid: Vec<f64>,
    /// `levels[i]` holds the k lowest eigenvalues at `grid[i]`, ascending.
    pub levels: Vec<Vec<f64>>,
    pub params: ModelParams,
}

impl LevelScan {
    pub fn n_levels(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    pub fn to_csv(&self) -> String {
        let mut header = vec!["h_x".to_string()];
        header.extend((0..self.n_levels()).map(|k| format!("E{k}")));
        let rows = self.grid.iter().zip(&self.levels).map(|(h, lv)| {
            let mut row = Vec::with_capacity(lv.len() + 1);
            row.push(*h);
            row.extend_from_slice(lv);
            row
        });
        table::to_csv(&header, rows)
    }
}

/// The k lowest levels of H(h_x) over `grid` with c, h_z and N taken from
/// `params` (its h_x is ignored).
pub fn level_scan(
    ops: &CollectiveOperators,
    params: ModelParams,
    grid: &[f64],
    k: usize,
) -> Result<LevelScan> {
    params.validate()?;
    if params.n_atoms != ops.basis().n_atoms() {
        return Err(Error::domain("parameters and operators disagree on N"));
    }
    if grid.is_empty() {
        return Err(Error::domain("empty h_x grid"));
    }
    if k == 0 || k > ops.dim() {
        return Err(Error::domain(format!("level count {k} outside 1..={}", ops.dim())));
    }
    let terms = FieldTerms::new(ops, params.c);
    let mut levels = Vec::with_capacity(grid.len());
    for &hx in grid {
        if !hx.is_finite() {
            return Err(Error::domain("non-finite grid point"));
        }
        let eig = eigh_real(&terms.at(hx, params.h_z), None)?;
        levels.push(eig.values.iter().take(k).copied().collect());
    }
    Ok(LevelScan {
        grid: grid.to_vec(),
        levels,
        params,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapProfile {
    pub min_gap: f64,
    pub h_x: f64,
}

/// Smallest E1 − E0 over the scan and where it occurs (first on ties).
pub fn gap_profile(scan: &LevelScan) -> Result<GapProfile> {
    if scan.n_levels() < 2 {
        return Err(Error::domain("gap profile needs at least two levels"));
    }
    let mut best = GapProfile {
        min_gap: f64::INFINITY,
        h_x: f64::NAN,
    };
    for (h, lv) in scan.grid.iter().zip(&scan.levels) {
        let gap = lv[1] - lv[0];
        if gap < best.min_gap {
            best = GapProfile { min_gap: gap, h_x: *h };
        }
    }
    Ok(best)
}

/// Frobenius norm, exposed for tolerance scaling.
pub fn matrix_norm(m: &Array2<C64>) -> f64 {
    frobenius(m)
}
