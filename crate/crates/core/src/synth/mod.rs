//! Two-qubit circuits over {H, RX, RZ, CZ}: Gram-Schmidt completion of a
//! target state to a unitary, KAK synthesis, evaluation and the loss δ.
//!
//! Qubit 0 is the most significant bit of a basis index.

pub mod fixtures;
mod kak;
mod prep;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, inner, norm, singular_values, tol, CMat, C64, ONE, ZERO};

pub use kak::{factor_local, kak_decompose, single_qubit_gates};
pub use prep::{prepare_state, PrepReport};

/// Reduce an angle to `(-π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    Rx(f64, usize),
    Rz(f64, usize),
    Cz(usize, usize),
}

impl Gate {
    pub fn rx(theta: f64, q: usize) -> Gate {
        Gate::Rx(normalize_angle(theta), q)
    }

    pub fn rz(theta: f64, q: usize) -> Gate {
        Gate::Rz(normalize_angle(theta), q)
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::Rx(_, q) | Gate::Rz(_, q) => vec![q],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    /// 2×2 matrix of a single-qubit gate; `None` for CZ.
    pub fn matrix(&self) -> Option<CMat> {
        match *self {
            Gate::H(_) => Some(hadamard()),
            Gate::Rx(t, _) => Some(rx_matrix(t)),
            Gate::Rz(t, _) => Some(rz_matrix(t)),
            Gate::Cz(..) => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::Rx(t, q) => write!(f, "RX {:.10} {q}", normalize_angle(t)),
            Gate::Rz(t, q) => write!(f, "RZ {:.10} {q}", normalize_angle(t)),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
        }
    }
}

pub fn hadamard() -> CMat {
    CMat::from_real_rows(&[[1.0, 1.0], [1.0, -1.0]]).scale_re(std::f64::consts::FRAC_1_SQRT_2)
}

/// `exp(-iθX/2)`.
pub fn rx_matrix(theta: f64) -> CMat {
    let (s, co) = (theta / 2.0).sin_cos();
    CMat::from_rows(&[[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
}

/// `exp(-iθZ/2)`.
pub fn rz_matrix(theta: f64) -> CMat {
    let h = theta / 2.0;
    CMat::diag(&[C64::from_polar(1.0, -h), C64::from_polar(1.0, h)])
}

pub fn cz_matrix() -> CMat {
    CMat::diag(&[ONE, ONE, ONE, -ONE])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        validate_gate(&g, self.width)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(Error::Invalid("circuit width must be at least 1".into()));
        }
        self.gates.iter().try_for_each(|g| validate_gate(g, self.width))
    }

    pub fn cz_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cz(..))).count()
    }

    /// Number of layers when every gate is scheduled as early as its qubits allow.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.width];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.width);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}

fn validate_gate(g: &Gate, width: usize) -> Result<()> {
    match *g {
        Gate::Rx(t, _) | Gate::Rz(t, _) if !t.is_finite() => {
            return Err(Error::Invalid(format!("non-finite angle in {g:?}")));
        }
        Gate::Cz(a, b) if a == b => return Err(Error::Invalid(format!("CZ on a single qubit {a}"))),
        _ => {}
    }
    if let Some(&q) = g.qubits().iter().find(|&&q| q >= width) {
        return Err(Error::Invalid(format!("qubit {q} outside width {width}")));
    }
    Ok(())
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty circuit".into()))?;
        let width = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["QUBITS", n] => n.parse::<usize>().map_err(|e| Error::Parse(format!("QUBITS: {e}")))?,
            _ => return Err(Error::Parse(format!("expected 'QUBITS n', got '{header}'"))),
        };
        let mut circ = Circuit::new(width);
        for line in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let q = |t: &str| t.parse::<usize>().map_err(|e| Error::Parse(format!("'{line}': {e}")));
            let a = |t: &str| t.parse::<f64>().map_err(|e| Error::Parse(format!("'{line}': {e}")));
            let g = match tok[..] {
                ["H", q0] => Gate::H(q(q0)?),
                ["RX", t, q0] => Gate::Rx(a(t)?, q(q0)?),
                ["RZ", t, q0] => Gate::Rz(a(t)?, q(q0)?),
                ["CZ", q0, q1] => Gate::Cz(q(q0)?, q(q1)?),
                _ => return Err(Error::Parse(format!("unrecognised gate line '{line}'"))),
            };
            circ.push(g).map_err(|e| Error::Parse(e.to_string()))?;
        }
        circ.validate()?;
        Ok(circ)
    }
}

/// Apply one gate in place to a `2^width` amplitude vector.
pub fn apply_gate(state: &mut [C64], width: usize, g: &Gate) {
    match *g {
        Gate::Cz(a, b) => {
            let (ma, mb) = (1usize << (width - 1 - a), 1usize << (width - 1 - b));
            for (i, amp) in state.iter_mut().enumerate() {
                if i & ma != 0 && i & mb != 0 {
                    *amp = -*amp;
                }
            }
        }
        _ => {
            let m = g.matrix().expect("single-qubit gate");
            let q = g.qubits()[0];
            apply_1q(state, width, q, &m);
        }
    }
}

pub(crate) fn apply_1q(state: &mut [C64], width: usize, q: usize, m: &CMat) {
    let mask = 1usize << (width - 1 - q);
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    for i in 0..state.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (state[i], state[j]);
            state[i] = m00 * a + m01 * b;
            state[j] = m10 * a + m11 * b;
        }
    }
}

pub const MAX_UNITARY_WIDTH: usize = 5;

pub fn circuit_unitary(circ: &Circuit) -> Result<CMat> {
    if circ.width > MAX_UNITARY_WIDTH {
        return Err(Error::WidthExceeded(circ.width, MAX_UNITARY_WIDTH));
    }
    circ.validate()?;
    let dim = 1usize << circ.width;
    let cols: Vec<Vec<C64>> = (0..dim)
        .map(|k| {
            let mut v = vec![ZERO; dim];
            v[k] = ONE;
            for g in &circ.gates {
                apply_gate(&mut v, circ.width, g);
            }
            v
        })
        .collect();
    Ok(CMat::from_cols(&cols))
}

/// `δ = sqrt(1 - |Tr(U_f† U_t)|² / d²)`.
pub fn loss_delta(uf: &CMat, ut: &CMat) -> Result<f64> {
    if !uf.is_square() || uf.rows() != ut.rows() || ut.rows() != ut.cols() {
        return Err(Error::DimMismatch(format!(
            "{}x{} vs {}x{}",
            uf.rows(),
            uf.cols(),
            ut.rows(),
            ut.cols()
        )));
    }
    let d = uf.rows() as f64;
    let tr = uf.adjoint().matmul(ut).trace().norm();
    Ok((1.0 - (tr / d).powi(2)).max(0.0).sqrt())
}

pub const SCHMIDT_TOL: f64 = 1e-6;

pub fn schmidt_coefficients(v: &[C64]) -> Vec<f64> {
    assert_eq!(v.len(), 4, "two-qubit state expected");
    singular_values(&CMat::from_rows(&[[v[0], v[1]], [v[2], v[3]]]))
}

pub fn schmidt_rank(v: &[C64], tol: f64) -> usize {
    schmidt_coefficients(v).iter().filter(|&&s| s > tol).count()
}

fn check_unit(v: &[C64]) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > tol::UNIT_TOL {
        return Err(Error::NotUnit(n));
    }
    Ok(())
}

/// Orthonormal completion of `v1` against the computational basis, in order,
/// skipping candidates whose residual norm is below 1e-8.
pub fn gram_schmidt_complete(v1: &[C64]) -> Result<CMat> {
    check_unit(v1)?;
    let d = v1.len();
    let mut cols: Vec<Vec<C64>> = vec![v1.to_vec()];
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let mut w = vec![ZERO; d];
        w[k] = ONE;
        // two passes keep orthogonality at machine precision
        for _ in 0..2 {
            for u in &cols {
                let ov = inner(u, &w);
                for (x, y) in w.iter_mut().zip(u) {
                    *x -= ov * y;
                }
            }
        }
        let n = norm(&w);
        if n >= 1e-8 {
            cols.push(w.iter().map(|z| z / n).collect());
        }
    }
    Ok(CMat::from_cols(&cols))
}

/// Unitary taking `|0…0⟩` to `v`.
pub fn unitary_from_state(v: &[C64]) -> Result<CMat> {
    gram_schmidt_complete(v)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthReport {
    pub circuit: Circuit,
    pub delta: f64,
    pub depth: usize,
    pub cz_count: usize,
}
