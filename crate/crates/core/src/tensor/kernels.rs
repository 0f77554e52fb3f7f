//! Raw dense and sparse kernels. Row-parallel when the `parallel` feature is
//! on; every output row is computed by one thread in a fixed order, so
//! results are bit-identical across thread counts.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::{SparseMatrix, Tensor};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Work (multiply-adds) below which kernels stay on the calling thread.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 1 << 16;

pub(crate) fn for_each_row<T: Real>(out: &mut [T], cols: usize, work: usize, f: impl Fn(usize, &mut [T]) + Sync + Send) {
    if cols == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        if work >= PAR_THRESHOLD {
            out.par_chunks_mut(cols).enumerate().for_each(|(r, row)| f(r, row));
            return;
        }
    }
    let _ = work;
    out.chunks_mut(cols).enumerate().for_each(|(r, row)| f(r, row));
}

/// `a · b`. Zero entries of `a` are skipped, which makes sparse bag-of-words
/// feature matrices cheap.
pub fn matmul<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.cols() != b.rows() {
        return Err(Error::shape(
            "matmul",
            format!("{:?} x {:?}", a.shape(), b.shape()),
        ));
    }
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let mut out = Tensor::zeros(m, n);
    let (ad, bd) = (a.data(), b.data());
    for_each_row(out.data_mut(), n, m * k * n, |i, row| {
        let arow = &ad[i * k..(i + 1) * k];
        for (p, &av) in arow.iter().enumerate() {
            if av == T::zero() {
                continue;
            }
            let brow = &bd[p * n..(p + 1) * n];
            for (o, &bv) in row.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    });
    Ok(out)
}

/// `aᵀ · b` without materializing the transpose.
pub fn matmul_tn<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.rows() != b.rows() {
        return Err(Error::shape(
            "matmul_tn",
            format!("{:?}ᵀ x {:?}", a.shape(), b.shape()),
        ));
    }
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let mut out = Tensor::zeros(k, n);
    let (ad, bd) = (a.data(), b.data());
    let od = out.data_mut();
    for i in 0..m {
        let arow = &ad[i * k..(i + 1) * k];
        let brow = &bd[i * n..(i + 1) * n];
        for (p, &av) in arow.iter().enumerate() {
            if av == T::zero() {
                continue;
            }
            for (o, &bv) in od[p * n..(p + 1) * n].iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    }
    Ok(out)
}

/// `a · bᵀ`.
pub fn matmul_nt<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.cols() != b.cols() {
        return Err(Error::shape(
            "matmul_nt",
            format!("{:?} x {:?}ᵀ", a.shape(), b.shape()),
        ));
    }
    let (m, n, k) = (a.rows(), a.cols(), b.rows());
    let mut out = Tensor::zeros(m, k);
    let (ad, bd) = (a.data(), b.data());
    for_each_row(out.data_mut(), k, m * k * n, |i, row| {
        let arow = &ad[i * n..(i + 1) * n];
        for (p, o) in row.iter_mut().enumerate() {
            let brow = &bd[p * n..(p + 1) * n];
            *o = arow.iter().zip(brow).map(|(&x, &y)| x * y).sum();
        }
    });
    Ok(out)
}

/// `s · d` for CSR `s`.
pub fn spmm<T: Real>(s: &SparseMatrix<T>, d: &Tensor<T>) -> Result<Tensor<T>> {
    if s.n_cols() != d.rows() {
        return Err(Error::shape(
            "spmm",
            format!("sparse {}x{} x {:?}", s.n_rows(), s.n_cols(), d.shape()),
        ));
    }
    let n = d.cols();
    let mut out = Tensor::zeros(s.n_rows(), n);
    let dd = d.data();
    for_each_row(out.data_mut(), n, s.nnz() * n, |r, row| {
        let (cols, vals) = s.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            for (o, &x) in row.iter_mut().zip(&dd[c * n..(c + 1) * n]) {
                *o += v * x;
            }
        }
    });
    Ok(out)
}

/// `sᵀ · g` by scattering.
pub fn spmm_t<T: Real>(s: &SparseMatrix<T>, g: &Tensor<T>) -> Result<Tensor<T>> {
    if s.n_rows() != g.rows() {
        return Err(Error::shape(
            "spmm_t",
            format!("sparse {}x{}ᵀ x {:?}", s.n_rows(), s.n_cols(), g.shape()),
        ));
    }
    let n = g.cols();
    let mut out = Tensor::zeros(s.n_cols(), n);
    let od = out.data_mut();
    for r in 0..s.n_rows() {
        let (cols, vals) = s.row(r);
        let grow = g.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            for (o, &x) in od[c * n..(c + 1) * n].iter_mut().zip(grow) {
                *o += v * x;
            }
        }
    }
    Ok(out)
}
