//! Cartan (KAK) synthesis of two-qubit unitaries.
//!
//! `U = e^{iφ} (A1⊗B1) exp(i(a XX + b YY + c ZZ)) (A2⊗B2)`. The local parts
//! come from diagonalising `UpᵀUp` in the magic basis; the nonlocal core is
//! realised with 0-3 CZ gates depending on which coordinates vanish.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{circuit_unitary, hadamard, loss_delta, rx_matrix, rz_matrix, Circuit, Gate, SynthReport};
use crate::error::{Error, Result};
use crate::qmath::{c, herm_eig, pauli, CMat, C64, I, ONE, ZERO};

const COORD_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-10;

fn magic_basis() -> CMat {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_rows(&[
        [c(k, 0.0), ZERO, ZERO, c(0.0, k)],
        [ZERO, c(0.0, k), c(k, 0.0), ZERO],
        [ZERO, c(0.0, k), c(-k, 0.0), ZERO],
        [c(k, 0.0), ZERO, ZERO, c(0.0, -k)],
    ])
}

fn s_gate() -> CMat {
    CMat::diag(&[ONE, I])
}

fn sdg_gate() -> CMat {
    CMat::diag(&[ONE, -I])
}

/// Equal up to a global phase.
fn same_up_to_phase(a: &CMat, b: &CMat, tol: f64) -> bool {
    loss_delta(a, b).map(|d| d < tol).unwrap_or(false)
}

fn zxz_angles(v: &CMat) -> (f64, f64, f64) {
    let su = v.scale(v.det().sqrt().inv());
    let (v00, v10) = (su[(0, 0)], su[(1, 0)]);
    let beta = 2.0 * v10.norm().atan2(v00.norm());
    // when one of the Z rotations is redundant, fold it into the outer one
    if v10.norm() < 1e-12 {
        return (-2.0 * v00.arg(), beta, 0.0);
    }
    if v00.norm() < 1e-12 {
        return (2.0 * (I * v10).arg(), beta, 0.0);
    }
    let (sum, dif) = (-2.0 * v00.arg(), 2.0 * (I * v10).arg());
    ((sum + dif) / 2.0, beta, (sum - dif) / 2.0)
}

fn push_rot(out: &mut Vec<Gate>, g: fn(f64, usize) -> Gate, theta: f64, q: usize) {
    if super::normalize_angle(theta).abs() > ANGLE_TOL {
        out.push(g(theta, q));
    }
}

/// Shortest of: nothing, `H`, an RZ·RX·RZ Euler form, or RZ·H·RZ.
pub fn single_qubit_gates(v: &CMat, q: usize) -> Vec<Gate> {
    if same_up_to_phase(v, &CMat::identity(2), 1e-7) {
        return Vec::new();
    }
    let mut options = Vec::new();
    let (a, b, g) = zxz_angles(v);
    let mut euler = Vec::new();
    push_rot(&mut euler, Gate::rz, g, q);
    push_rot(&mut euler, Gate::rx, b, q);
    push_rot(&mut euler, Gate::rz, a, q);
    options.push(euler);

    // v·H = Rz(a')Rx(b')Rz(g') with g' = 0 gives v = Rz(a') H Rz(b')
    let (a2, b2, g2) = zxz_angles(&v.matmul(&hadamard()));
    if super::normalize_angle(g2).abs() < ANGLE_TOL {
        let mut hf = Vec::new();
        push_rot(&mut hf, Gate::rz, b2, q);
        hf.push(Gate::H(q));
        push_rot(&mut hf, Gate::rz, a2, q);
        options.push(hf);
    }
    options.into_iter().min_by_key(|o| o.len()).unwrap()
}

/// Split a 4×4 matrix proportional to `A⊗B` into its factors.
pub fn factor_local(m: &CMat) -> Result<(CMat, CMat)> {
    let (r, cc) = argmax(m);
    let (r1, c1) = (r & 1, cc & 1);
    let mut a = CMat::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            a[(i, j)] = m[(2 * i + r1, 2 * j + c1)];
        }
    }
    let a = a.scale(a.det().sqrt().inv());
    let (i0, j0) = argmax(&a);
    let mut b = CMat::zeros(2, 2);
    for k in 0..2 {
        for l in 0..2 {
            b[(k, l)] = m[(2 * i0 + k, 2 * j0 + l)] / a[(i0, j0)];
        }
    }
    let resid = a.kron(&b).max_abs_diff(m);
    if resid > 1e-6 || !resid.is_finite() {
        return Err(Error::SynthesisFailure(resid));
    }
    Ok((a, b))
}

fn argmax(m: &CMat) -> (usize, usize) {
    let mut best = (0, 0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)].norm() > m[best].norm() {
                best = (i, j);
            }
        }
    }
    best
}

enum Item {
    Local(usize, CMat),
    Cz,
}

fn both(v: &CMat) -> [Item; 2] {
    [Item::Local(0, v.clone()), Item::Local(1, v.clone())]
}

/// Merge consecutive single-qubit operations and lower everything to gates.
fn compile(items: Vec<Item>) -> Circuit {
    let mut circ = Circuit::new(2);
    let mut pending = [CMat::identity(2), CMat::identity(2)];
    let flush = |circ: &mut Circuit, pending: &mut [CMat; 2]| {
        for (q, p) in pending.iter_mut().enumerate() {
            circ.gates.extend(single_qubit_gates(p, q));
            *p = CMat::identity(2);
        }
    };
    for it in items {
        match it {
            Item::Local(q, m) => pending[q] = m.matmul(&pending[q]),
            Item::Cz => {
                flush(&mut circ, &mut pending);
                circ.gates.push(Gate::Cz(0, 1));
            }
        }
    }
    flush(&mut circ, &mut pending);
    circ
}

/// `exp(i(a XX + b YY + c ZZ))` up to phase, coordinates in (-π/4, π/4].
fn core_items(a: f64, b: f64, cz: f64) -> Vec<Item> {
    let zero = |x: f64| x.abs() < COORD_TOL;
    let quarter = |x: f64| (x.abs() - FRAC_PI_4).abs() < COORD_TOL;
    let h = hadamard();
    let mut out = Vec::new();
    let nonzero = [a, b, cz].iter().filter(|&&x| !zero(x)).count();
    if nonzero == 0 {
        return out;
    }
    if nonzero == 1 && quarter(a + b + cz) {
        // exp(±iπ/4 PP) ∝ (V⊗V)(S∓⊗S∓) CZ (V⊗V)†, V Z V† = P
        let x = a + b + cz;
        let v = if !zero(a) {
            h.clone()
        } else if !zero(b) {
            s_gate().matmul(&h)
        } else {
            CMat::identity(2)
        };
        let s = if x > 0.0 { sdg_gate() } else { s_gate() };
        out.extend(both(&v.adjoint()));
        out.push(Item::Cz);
        out.extend(both(&s));
        out.extend(both(&v));
        return out;
    }
    if zero(a) || zero(b) || zero(cz) {
        // CNOT (Rx(-2a')⊗Rz(-2c')) CNOT = exp(i(a' XX + c' ZZ)), axes permuted by V⊗V
        let (v, a1, c1) = if zero(b) {
            (CMat::identity(2), a, cz)
        } else if zero(a) {
            (s_gate(), b, cz)
        } else {
            (rx_matrix(FRAC_PI_2), a, b)
        };
        out.extend(both(&v.adjoint()));
        out.extend([Item::Local(1, h.clone()), Item::Cz, Item::Local(1, h.clone())]);
        out.push(Item::Local(0, rx_matrix(-2.0 * a1)));
        out.push(Item::Local(1, rz_matrix(-2.0 * c1)));
        out.extend([Item::Local(1, h.clone()), Item::Cz, Item::Local(1, h.clone())]);
        out.extend(both(&v));
        return out;
    }
    // CNOT·(Rx(-2a)⊗Rz(-2c))·CZ·(Rx(2b)⊗I)·CZ·CNOT, with the trailing CZ·CNOT
    // pair fused into a single controlled-(ZX)
    let s = s_gate();
    out.push(Item::Local(1, h.matmul(&sdg_gate())));
    out.push(Item::Cz);
    out.push(Item::Local(0, s.clone()));
    out.push(Item::Local(1, s.matmul(&h)));
    out.push(Item::Local(0, rx_matrix(2.0 * b)));
    out.push(Item::Cz);
    out.push(Item::Local(0, rx_matrix(-2.0 * a)));
    out.push(Item::Local(1, rz_matrix(-2.0 * cz)));
    out.extend([Item::Local(1, h.clone()), Item::Cz, Item::Local(1, h)]);
    out
}

fn real_part(m: &CMat) -> CMat {
    let mut r = m.clone();
    for z in r.data_mut() {
        *z = c(z.re, 0.0);
    }
    r
}

fn imag_part(m: &CMat) -> CMat {
    let mut r = m.clone();
    for z in r.data_mut() {
        *z = c(z.im, 0.0);
    }
    r
}

/// Real orthogonal `P` (det +1) with `Pᵀ m P` diagonal, for complex symmetric
/// unitary `m` whose real and imaginary parts commute.
fn diagonalize_symmetric_unitary(m: &CMat) -> Result<(CMat, Vec<C64>)> {
    let (re, im) = (real_part(m), imag_part(m));
    let mut worst = f64::INFINITY;
    for kappa in [0.577_215_664_9, 1.324_717_957_2, 0.297_524_180_1, 2.502_907_875_1, -0.662_743_419_3] {
        let a = &re + &im.scale_re(kappa);
        let e = herm_eig(&a.hermitian_part())?;
        let mut p = real_part(&e.vectors);
        // re-orthonormalise the real vectors
        let mut cols: Vec<Vec<C64>> = Vec::new();
        for j in 0..4 {
            let mut v = p.col(j);
            for u in &cols {
                let ov = crate::qmath::inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= ov * y;
                }
            }
            cols.push(crate::qmath::normalized(&v));
        }
        p = CMat::from_cols(&cols);
        if p.det().re < 0.0 {
            let neg: Vec<C64> = p.col(0).iter().map(|z| -z).collect();
            p.set_col(0, &neg);
        }
        let d = p.transpose().matmul(m).matmul(&p);
        let off = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|ij| d[ij].norm())
            .fold(0.0, f64::max);
        if off < 1e-9 {
            return Ok((p, (0..4).map(|k| d[(k, k)]).collect()));
        }
        worst = worst.min(off);
    }
    Err(Error::SynthesisFailure(worst))
}

fn solve_real(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
    for k in 0..4 {
        let piv = (k..4).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..4 {
            let f = a[i][k] / a[k][k];
            for j in k..4 {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; 4];
    for k in (0..4).rev() {
        let s: f64 = (k + 1..4).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Reduce to (-π/4, π/4]; returns the reduced value and the parity of the
/// number of π/2 shifts removed.
fn reduce(x: f64) -> (f64, bool) {
    let m = ((x - FRAC_PI_4) / FRAC_PI_2 - 1e-12).ceil();
    (x - m * FRAC_PI_2, (m as i64).rem_euclid(2) == 1)
}

/// KAK parts of a 4×4 unitary: `(K1, (a, b, c), K2)` with
/// `U ∝ K1 exp(i(aXX+bYY+cZZ)) K2`, coordinates reduced to (-π/4, π/4].
pub fn kak_parts(u: &CMat) -> Result<(CMat, [f64; 3], CMat)> {
    let b = magic_basis();
    let bd = b.adjoint();
    let u1 = u.scale(u.det().powf(-0.25));
    let up = bd.matmul(&u1).matmul(&b);
    let m2 = up.transpose().matmul(&up);
    let (p, d) = diagonalize_symmetric_unitary(&m2)?;
    let mut theta: Vec<f64> = d.iter().map(|z| z.arg() / 2.0).collect();
    let k1m_of = |theta: &[f64]| {
        let dinv = CMat::diag(&theta.iter().map(|&t| C64::from_polar(1.0, -t)).collect::<Vec<_>>());
        up.matmul(&p).matmul(&dinv)
    };
    let mut k1m = k1m_of(&theta);
    if k1m.det().re < 0.0 {
        theta[0] += PI;
        k1m = k1m_of(&theta);
    }
    let mut k1 = b.matmul(&k1m).matmul(&bd);
    let k2 = b.matmul(&p.transpose()).matmul(&bd);

    let paulis = [pauli::x(), pauli::y(), pauli::z()];
    let diag_of = |p: &CMat| -> [f64; 4] {
        let m = bd.matmul(&p.kron(p)).matmul(&b);
        [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re]
    };
    let (dx, dy, dz) = (diag_of(&paulis[0]), diag_of(&paulis[1]), diag_of(&paulis[2]));
    let rows = [0, 1, 2, 3].map(|k| [1.0, dx[k], dy[k], dz[k]]);
    let sol = solve_real(rows, [theta[0], theta[1], theta[2], theta[3]]);
    let mut coords = [0.0; 3];
    for (i, p) in paulis.iter().enumerate() {
        let (r, odd) = reduce(sol[i + 1]);
        coords[i] = r;
        if odd {
            k1 = k1.matmul(&p.kron(p));
        }
    }
    Ok((k1, coords, k2))
}

pub fn kak_decompose(u: &CMat) -> Result<SynthReport> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimMismatch(format!("expected 4x4 unitary, got {}x{}", u.rows(), u.cols())));
    }
    let dev = u.unitarity_deviation();
    if dev > 1e-8 {
        return Err(Error::NotUnitary(dev));
    }
    let (k1, [a, b, cz], k2) = kak_parts(u)?;
    let (a1, b1) = factor_local(&k1)?;
    let (a2, b2) = factor_local(&k2)?;
    let mut items = vec![Item::Local(0, a2), Item::Local(1, b2)];
    items.extend(core_items(a, b, cz));
    items.extend([Item::Local(0, a1), Item::Local(1, b1)]);
    let circuit = compile(items);
    let delta = loss_delta(&circuit_unitary(&circuit)?, u)?;
    if delta > 1e-6 {
        return Err(Error::SynthesisFailure(delta));
    }
    Ok(SynthReport { depth: circuit.depth(), cz_count: circuit.cz_count(), circuit, delta })
}
