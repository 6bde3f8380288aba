use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

pub fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// max |m_ij − conj(m_ji)| relative to the Frobenius norm.
pub fn hermitian_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    let scale = frobenius(m);
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

pub fn is_real(m: &Array2<C64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Real matrix applied to a complex vector.
pub fn real_matvec(m: &Array2<f64>, v: &Array1<C64>) -> Array1<C64> {
    let re = v.mapv(|z| z.re);
    let im = v.mapv(|z| z.im);
    let a = m.dot(&re);
    let b = m.dot(&im);
    a.iter().zip(b.iter()).map(|(&x, &y)| C64::new(x, y)).collect()
}

/// Real matrix applied to the columns of a complex matrix.
pub fn real_matmul(m: &Array2<f64>, v: &Array2<C64>) -> Array2<C64> {
    let re = v.mapv(|z| z.re);
    let im = v.mapv(|z| z.im);
    let a = m.dot(&re);
    let b = m.dot(&im);
    let mut out = Array2::zeros(a.raw_dim());
    ndarray::Zip::from(&mut out)
        .and(&a)
        .and(&b)
        .for_each(|o, &x, &y| *o = C64::new(x, y));
    out
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}
