//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! spectral functions built on it.

use super::matrix::{c, CMat, C64};
use super::tol;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix. `values` ascend; column `k` of `vectors`
/// belongs to `values[k]`. Inside a degenerate cluster the basis is arbitrary.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    /// `V f(Lambda) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.values.len();
        let mut out = CMat::zeros(n, n);
        for k in 0..n {
            let w = f(self.values[k]);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

pub fn herm_eig(a: &CMat) -> Result<HermEig> {
    if !a.is_square() {
        return Err(Error::DimMismatch(format!("eigensolver needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let scale = a.frobenius_norm();
    let dev = a.hermitian_deviation();
    if dev > tol::HERM_TOL * scale.max(1e-300) && dev > 1e-300 {
        return Err(Error::NotHermitian(dev / scale));
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = CMat::identity(n);
    if n == 1 {
        return Ok(HermEig { values: vec![m[(0, 0)].re], vectors: v });
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(1e-300) || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_col(dst, &v.col(src));
    }
    Ok(HermEig { values, vectors })
}

/// Zeroes `m[p][q]` with the rotation `J = diag(1, e^{-i phi}) R(theta)`
/// acting on rows and columns `p, q`; accumulates `v <- v J`.
fn rotate(m: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let b = m[(p, q)];
    let babs = b.norm();
    if babs < 1e-300 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = b / babs; // e^{i phi}
    let theta = (aqq - app) / (2.0 * babs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    let jpp = c(cs, 0.0);
    let jpq = c(sn, 0.0);
    let jqp = phase.conj() * (-sn);
    let jqq = phase.conj() * cs;

    let n = m.rows();
    // m <- m J
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * jpp + mkq * jqp;
        m[(k, q)] = mkp * jpq + mkq * jqq;
    }
    // m <- J^dagger m
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = jpp.conj() * mpk + jqp.conj() * mqk;
        m[(q, k)] = jpq.conj() * mpk + jqq.conj() * mqk;
    }
    m[(p, q)] = c(0.0, 0.0);
    m[(q, p)] = c(0.0, 0.0);
    m[(p, p)] = c(m[(p, p)].re, 0.0);
    m[(q, q)] = c(m[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

pub fn eigvalsh(a: &CMat) -> Result<Vec<f64>> {
    Ok(herm_eig(a)?.values)
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-1e-6, 0)` are clipped to zero; anything more negative is rejected.
pub fn psd_sqrt(a: &CMat) -> Result<CMat> {
    let e = herm_eig(a)?;
    let min = e.values.first().copied().unwrap_or(0.0);
    if min < -tol::PSD_REJECT {
        return Err(Error::NotPsd(min));
    }
    Ok(e.reconstruct_with(|x| if x > tol::PSD_CLIP { x.sqrt() } else { 0.0 }))
}

/// Singular values in descending order, via the eigenvalues of `t^dagger t`.
pub fn singular_values(t: &CMat) -> Vec<f64> {
    let g = t.adjoint().matmul(t);
    let mut vals: Vec<f64> = herm_eig(&g)
        .expect("Gram matrix is Hermitian")
        .values
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    vals.reverse();
    vals
}
