//! Numerical foundation: complex matrices, Hermitian spectra, tensor algebra
//! and seeded sampling.

pub mod eig;
pub mod matrix;
pub mod rng;

pub use eig::{eigvalsh, herm_eig, psd_sqrt, singular_values, HermEig};
pub use matrix::{align_phase, c, inner, kron_vec, norm, normalized, CMat, C64, I, ONE, ZERO};
pub use rng::Rng;

use crate::error::{Error, Result};

/// Numerical tolerances shared across modules.
pub mod tol {
    /// Relative Frobenius deviation from Hermiticity that is still accepted.
    pub const HERM_TOL: f64 = 1e-8;
    /// Target accuracy of eigenpairs.
    pub const EIG_TOL: f64 = 1e-10;
    /// Eigenvalues below this are treated as zero by spectral functions.
    pub const PSD_CLIP: f64 = 1e-10;
    /// Eigenvalues below minus this make a matrix "not PSD".
    pub const PSD_REJECT: f64 = 1e-6;
    /// Norm tolerance for state vectors.
    pub const UNIT_TOL: f64 = 1e-10;
}

pub mod pauli {
    use super::matrix::{c, CMat, I, ONE, ZERO};

    pub fn id() -> CMat {
        CMat::identity(2)
    }
    pub fn x() -> CMat {
        CMat::from_rows(&[[ZERO, ONE], [ONE, ZERO]])
    }
    pub fn y() -> CMat {
        CMat::from_rows(&[[ZERO, -I], [I, ZERO]])
    }
    pub fn z() -> CMat {
        CMat::from_rows(&[[ONE, ZERO], [ZERO, c(-1.0, 0.0)]])
    }
    /// `[I, X, Y, Z]`.
    pub fn all() -> [CMat; 4] {
        [id(), x(), y(), z()]
    }
    /// `[X, Y, Z]`.
    pub fn xyz() -> [CMat; 3] {
        [x(), y(), z()]
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kron(b)
}

/// Reduced matrix on the subsystems listed in `keep` (in ascending order).
/// Subsystem 0 is the most significant factor.
pub fn partial_trace(rho: &CMat, keep: &[usize], dims: &[usize]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.rows() != total {
        return Err(Error::DimMismatch(format!(
            "matrix {}x{} vs subsystem dims {:?}",
            rho.rows(),
            rho.cols(),
            dims
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DimMismatch(format!("invalid subsystem selection {keep:?}")));
    }
    let n = dims.len();
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let kdim: usize = keep.iter().map(|&k| dims[k]).product();
    let tdim: usize = traced.iter().map(|&k| dims[k]).product();

    // strides of each subsystem in the full index
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let compose = |sel: &[usize], mut idx: usize| -> usize {
        let mut full = 0;
        for &k in sel.iter().rev() {
            full += (idx % dims[k]) * strides[k];
            idx /= dims[k];
        }
        full
    };

    let mut out = CMat::zeros(kdim, kdim);
    for i in 0..kdim {
        let fi = compose(keep, i);
        for j in 0..kdim {
            let fj = compose(keep, j);
            let mut acc = ZERO;
            for t in 0..tdim {
                let ft = compose(&traced, t);
                acc += rho[(fi + ft, fj + ft)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Haar-random pure state on `nqubits` qubits (normalised complex Gaussian vector).
pub fn haar_state(nqubits: usize, rng: &mut Rng) -> Vec<C64> {
    assert!(nqubits >= 1);
    let dim = 1usize << nqubits;
    let v: Vec<C64> = (0..dim).map(|_| c(rng.normal(), rng.normal())).collect();
    normalized(&v)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix
/// (modified Gram-Schmidt with the diagonal phase fix).
pub fn haar_unitary(dim: usize, rng: &mut Rng) -> CMat {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| c(rng.normal(), rng.normal())).collect();
        for u in &cols {
            let ov = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= ov * y;
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            cols.push(v.iter().map(|z| z / nv).collect());
        }
    }
    CMat::from_cols(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_phi_plus() -> Vec<C64> {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        vec![c(k, 0.0), ZERO, ZERO, c(k, 0.0)]
    }

    #[test]
    fn kron_identity_and_ordering() {
        assert_eq!(kron(&CMat::identity(2), &CMat::identity(2)), CMat::identity(4));
        let zz = kron(&pauli::z(), &pauli::z());
        let v00 = [ONE, ZERO, ZERO, ZERO];
        assert_eq!(zz.apply(&v00), v00.to_vec());
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let v = kron_vec(&[ONE, ZERO], &[c(k, 0.0), c(k, 0.0)]);
        assert_eq!(v, vec![c(k, 0.0), c(k, 0.0), ZERO, ZERO]);
    }

    #[test]
    fn partial_trace_examples() {
        let bell = CMat::outer(&bell_phi_plus());
        let r = partial_trace(&bell, &[0], &[2, 2]).unwrap();
        assert!(r.max_abs_diff(&CMat::identity(2).scale_re(0.5)) < 1e-15);

        let p00 = CMat::outer(&[ONE, ZERO, ZERO, ZERO]);
        let r = partial_trace(&p00, &[1], &[2, 2]).unwrap();
        assert!(r.max_abs_diff(&CMat::outer(&[ONE, ZERO])) < 1e-15);

        let ra = CMat::from_real_rows(&[[0.7, 0.2], [0.2, 0.3]]);
        let rb = CMat::from_real_rows(&[[0.4, 0.0], [0.0, 0.6]]);
        let r = partial_trace(&ra.kron(&rb), &[0], &[2, 2]).unwrap();
        assert!(r.max_abs_diff(&ra) < 1e-15);
        assert!(partial_trace(&ra, &[0], &[2, 2]).is_err());
    }

    #[test]
    fn three_party_trace_keeps_middle() {
        let a = CMat::outer(&[ONE, ZERO]);
        let b = CMat::outer(&normalized(&[ONE, I]));
        let cm = CMat::outer(&[ZERO, ONE]);
        let full = a.kron(&b).kron(&cm);
        let r = partial_trace(&full, &[1], &[2, 2, 2]).unwrap();
        assert!(r.max_abs_diff(&b) < 1e-15);
        let r = partial_trace(&full, &[0, 2], &[2, 2, 2]).unwrap();
        assert!(r.max_abs_diff(&a.kron(&cm)) < 1e-15);
    }

    #[test]
    fn haar_state_moments_and_determinism() {
        let mut rng = Rng::new(42);
        let mut acc = 0.0;
        let draws = 100_000;
        for _ in 0..draws {
            let v = haar_state(1, &mut rng);
            assert!((norm(&v) - 1.0).abs() < 1e-12);
            acc += v[0].norm_sqr();
        }
        assert!((acc / draws as f64 - 0.5).abs() < 0.01);
        let a = haar_state(2, &mut Rng::new(42));
        let b = haar_state(2, &mut Rng::new(42));
        assert_eq!(a, b);
    }
}
