//! Cyclic Jacobi eigensolvers for dense real-symmetric and complex-Hermitian
//! matrices stored row-major in flat buffers.
//!
//! Both solvers accept an optional orthonormal starting basis. When the input
//! is a small perturbation of a matrix whose eigenvectors are already known
//! (consecutive steps of a slow field sweep) the rotated matrix is nearly
//! diagonal and a couple of sweeps are enough.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

/// Iteration cap in full sweeps over the strict upper triangle.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal convergence threshold relative to the Frobenius norm.
pub const REL_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct JacobiOutput<T> {
    /// Unsorted eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors stored as rows (row `k` pairs with `values[k]`).
    pub vectors_t: Vec<T>,
    pub sweeps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NotConverged {
    pub sweeps: usize,
    pub off_norm: f64,
}

fn rotation(app: f64, aqq: f64, r: f64) -> (f64, f64) {
    // smaller root of t^2 - 2 theta t - 1 = 0
    let theta = (app - aqq) / (2.0 * r);
    let t = if theta.is_finite() {
        let big = theta + theta.signum() * (theta * theta + 1.0).sqrt();
        if big.is_finite() {
            -1.0 / big
        } else {
            -0.5 / theta
        }
    } else {
        0.0
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

fn frob(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_off_real(a: &[f64], n: usize) -> f64 {
    let mut m = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            m = m.max(a[p * n + q].abs());
        }
    }
    m
}

/// Real symmetric Jacobi. `a` is overwritten with the (nearly) diagonal
/// result. `start_t` holds starting basis vectors as rows; when given, `a`
/// must already be expressed in that basis.
pub fn symmetric(
    a: &mut [f64],
    n: usize,
    scale: f64,
    start_t: Option<Vec<f64>>,
) -> Result<JacobiOutput<f64>, NotConverged> {
    debug_assert_eq!(a.len(), n * n);
    let mut vt = start_t.unwrap_or_else(|| {
        let mut id = vec![0.0; n * n];
        for k in 0..n {
            id[k * n + k] = 1.0;
        }
        id
    });
    let tol = REL_TOL * scale.max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    loop {
        if max_off_real(a, n) <= tol {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(NotConverged {
                sweeps,
                off_norm: max_off_real(a, n),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let r = a[p * n + q];
                if r.abs() <= tol {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let (c, s) = rotation(app, aqq, r);
                // A <- U^T A U with U = [[c, s], [-s, c]] on the (p, q) plane;
                // rows are updated and mirrored into the columns
                let (lo, hi) = a.split_at_mut(q * n);
                let row_p = &mut lo[p * n..p * n + n];
                let row_q = &mut hi[..n];
                for (xp, xq) in row_p.iter_mut().zip(row_q.iter_mut()) {
                    let (u, w) = (*xp, *xq);
                    *xp = c * u - s * w;
                    *xq = s * u + c * w;
                }
                for k in 0..n {
                    a[k * n + p] = a[p * n + k];
                    a[k * n + q] = a[q * n + k];
                }
                let cs2r = 2.0 * c * s * r;
                a[p * n + p] = c * c * app - cs2r + s * s * aqq;
                a[q * n + q] = s * s * app + cs2r + c * c * aqq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                let (lo, hi) = vt.split_at_mut(q * n);
                let vp = &mut lo[p * n..p * n + n];
                let vq = &mut hi[..n];
                for (xp, xq) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (u, w) = (*xp, *xq);
                    *xp = c * u - s * w;
                    *xq = s * u + c * w;
                }
            }
        }
    }
    Ok(JacobiOutput {
        values: (0..n).map(|k| a[k * n + k]).collect(),
        vectors_t: vt,
        sweeps,
    })
}

fn max_off_complex(a: &[C64], n: usize) -> f64 {
    let mut m = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            m = m.max(a[p * n + q].norm());
        }
    }
    m
}

/// Complex Hermitian Jacobi. Each rotation first removes the phase of the
/// pivot and then applies a real plane rotation. Eigenvector rows are stored
/// conjugated: row `k` of `vectors_t` is the conjugate of eigenvector `k`.
pub fn hermitian(
    a: &mut [C64],
    n: usize,
    scale: f64,
) -> Result<JacobiOutput<C64>, NotConverged> {
    debug_assert_eq!(a.len(), n * n);
    let mut vh = vec![C64::new(0.0, 0.0); n * n];
    for k in 0..n {
        vh[k * n + k] = C64::new(1.0, 0.0);
    }
    let tol = REL_TOL * scale.max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    loop {
        if max_off_complex(a, n) <= tol {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(NotConverged {
                sweeps,
                off_norm: max_off_complex(a, n),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= tol {
                    continue;
                }
                let ph = apq / r;
                let (c, s) = rotation(a[p * n + p].re, a[q * n + q].re, r);
                // U on the (p,q) plane: [[c, s], [-s e^{-ia}, c e^{-ia}]]
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = -ph.conj() * s;
                let uqq = ph.conj() * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * upp + akq * uqp;
                    a[k * n + q] = akp * upq + akq * uqq;
                }
                let (cpp, cqp, cpq, cqq) = (upp.conj(), uqp.conj(), upq.conj(), uqq.conj());
                let (lo, hi) = a.split_at_mut(q * n);
                let row_p = &mut lo[p * n..p * n + n];
                let row_q = &mut hi[..n];
                for (xp, xq) in row_p.iter_mut().zip(row_q.iter_mut()) {
                    let (u, w) = (*xp, *xq);
                    *xp = cpp * u + cqp * w;
                    *xq = cpq * u + cqq * w;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                // V <- V U, kept as V^H rows: V^H <- U^H V^H
                let (lo, hi) = vh.split_at_mut(q * n);
                let vp = &mut lo[p * n..p * n + n];
                let vq = &mut hi[..n];
                for (xp, xq) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (u, w) = (*xp, *xq);
                    *xp = cpp * u + cqp * w;
                    *xq = cpq * u + cqq * w;
                }
            }
        }
    }
    Ok(JacobiOutput {
        values: (0..n).map(|k| a[k * n + k].re).collect(),
        vectors_t: vh,
        sweeps,
    })
}

/// Modified Gram-Schmidt on the rows.
fn orthonormalize_rows(v: &mut Array2<f64>) {
    let n = v.nrows();
    for i in 0..n {
        for j in 0..i {
            let (done, mut rest) = v.view_mut().split_at(ndarray::Axis(0), i);
            let mut row = rest.row_mut(0);
            let prev = done.row(j);
            let d = row.dot(&prev);
            row.scaled_add(-d, &prev);
        }
        let mut row = v.row_mut(i);
        let norm = row.dot(&row).sqrt();
        row.mapv_inplace(|x| x / norm);
    }
}

/// Diagonalize a real symmetric matrix, optionally warm-started from an
/// orthonormal basis held in the columns of `guess`. Returns unsorted
/// eigenvalues and eigenvectors as columns.
pub fn symmetric_matrix(
    m: &Array2<f64>,
    guess: Option<&Array2<f64>>,
) -> Result<(Array1<f64>, Array2<f64>, usize), NotConverged> {
    let n = m.nrows();
    let scale = frob(m.as_slice().unwrap_or(&m.iter().copied().collect::<Vec<_>>()));
    let (mut a, start) = match guess {
        Some(v) => {
            let mut vt = v.t().as_standard_layout().into_owned();
            orthonormalize_rows(&mut vt);
            let rotated = vt.dot(m).dot(&vt.t());
            (rotated.into_raw_vec(), Some(vt.into_raw_vec()))
        }
        None => (m.as_standard_layout().into_owned().into_raw_vec(), None),
    };
    // symmetrize the rotated copy
    for p in 0..n {
        for q in (p + 1)..n {
            let avg = 0.5 * (a[p * n + q] + a[q * n + p]);
            a[p * n + q] = avg;
            a[q * n + p] = avg;
        }
    }
    let out = symmetric(&mut a, n, scale, start)?;
    let vt = Array2::from_shape_vec((n, n), out.vectors_t).expect("square");
    Ok((Array1::from(out.values), vt.reversed_axes(), out.sweeps))
}

/// Diagonalize a complex Hermitian matrix. Returns unsorted eigenvalues and
/// eigenvectors as columns.
pub fn hermitian_matrix(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>, usize), NotConverged> {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut a = m.as_standard_layout().into_owned().into_raw_vec();
    let out = hermitian(&mut a, n, scale)?;
    let vh = Array2::from_shape_vec((n, n), out.vectors_t).expect("square");
    let v = vh.t().mapv(|z| z.conj());
    Ok((Array1::from(out.values), v, out.sweeps))
}
