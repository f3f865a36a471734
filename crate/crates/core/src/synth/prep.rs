//! Shallow preparation of a two-qubit state from `|00⟩` with at most one CZ.
//!
//! One layer of single-qubit gates, a CZ, then one local unitary per qubit.
//! The local freedom left by the Schmidt decomposition is searched over a
//! small grid so the final locals lower to as few gates as possible.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{circuit_unitary, hadamard, rx_matrix, rz_matrix, schmidt_coefficients, single_qubit_gates, Circuit, Gate};
use crate::error::{Error, Result};
use crate::qmath::{herm_eig, inner, norm, CMat, C64, ONE};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrepReport {
    pub circuit: Circuit,
    pub fidelity: f64,
    pub depth: usize,
}

fn amp_matrix(v: &[C64]) -> CMat {
    CMat::from_rows(&[[v[0], v[1]], [v[2], v[3]]])
}

/// Left singular vectors, descending singular values.
fn left_singular(m: &CMat) -> CMat {
    let e = herm_eig(&m.matmul(&m.adjoint()).hermitian_part()).expect("2x2 Hermitian");
    CMat::from_cols(&[e.vector(1), e.vector(0)])
}

fn inv2(m: &CMat) -> CMat {
    let d = m.det();
    CMat::from_rows(&[[m[(1, 1)] / d, -m[(0, 1)] / d], [-m[(1, 0)] / d, m[(0, 0)] / d]])
}

fn first_column_unitary(a: &[C64]) -> CMat {
    let b = [-a[1].conj(), a[0].conj()];
    CMat::from_cols(&[a.to_vec(), b.to_vec()])
}

fn simple_locals() -> Vec<CMat> {
    let base = vec![
        CMat::identity(2),
        hadamard(),
        rx_matrix(FRAC_PI_2),
        rx_matrix(-FRAC_PI_2),
        rx_matrix(PI),
        rz_matrix(FRAC_PI_2),
        rz_matrix(-FRAC_PI_2),
        rz_matrix(PI),
    ];
    let mut out = Vec::new();
    for a in &base {
        for b in &base {
            out.push(a.matmul(b));
        }
    }
    out
}

fn final_state(circ: &Circuit) -> Result<Vec<C64>> {
    Ok(circuit_unitary(circ)?.col(0))
}

pub fn prepare_state(v: &[C64]) -> Result<PrepReport> {
    if v.len() != 4 {
        return Err(Error::DimMismatch(format!("two-qubit state expected, got length {}", v.len())));
    }
    let n = norm(v);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(n));
    }
    let sv = schmidt_coefficients(v);
    let mv = amp_matrix(v);

    let mut candidates: Vec<Circuit> = Vec::new();
    if sv[1] < 1e-9 {
        // product state
        let u = left_singular(&mv);
        let a = u.col(0);
        let bvec: Vec<C64> = {
            let row = mv.adjoint().apply(&a);
            row.iter().map(|z| z.conj() / sv[0]).collect()
        };
        let mut circ = Circuit::new(2);
        circ.gates.extend(single_qubit_gates(&first_column_unitary(&a), 0));
        circ.gates.extend(single_qubit_gates(&first_column_unitary(&bvec), 1));
        candidates.push(circ);
    } else {
        let theta = 2.0 * sv[1].atan2(sv[0]);
        let degenerate = (sv[0] - sv[1]).abs() < 1e-9;
        let mut pre0 = vec![Gate::rx(theta, 0), Gate::rx(-theta, 0)];
        if degenerate {
            pre0.push(Gate::H(0));
        }
        let pre1 = [Gate::H(1), Gate::rx(FRAC_PI_2, 1), Gate::rx(-FRAC_PI_2, 1)];
        let uv = left_singular(&mv);
        for g0 in &pre0 {
            for g1 in &pre1 {
                let mut head = Circuit::new(2);
                head.gates = vec![*g0, *g1, Gate::Cz(0, 1)];
                let mchi = amp_matrix(&final_state(&head)?);
                let uchi = left_singular(&mchi);
                let a_list: Vec<CMat> = if degenerate {
                    simple_locals()
                } else {
                    (0..8)
                        .map(|k| {
                            let d = CMat::diag(&[ONE, C64::from_polar(1.0, k as f64 * PI / 4.0)]);
                            uv.matmul(&d).matmul(&uchi.adjoint())
                        })
                        .collect()
                };
                let mchi_inv = inv2(&mchi);
                for a in a_list {
                    let b = mchi_inv.matmul(&a.adjoint()).matmul(&mv).transpose();
                    if b.unitarity_deviation() > 1e-8 {
                        continue;
                    }
                    let mut circ = head.clone();
                    circ.gates.extend(single_qubit_gates(&a, 0));
                    circ.gates.extend(single_qubit_gates(&b, 1));
                    candidates.push(circ);
                }
            }
        }
    }
    let mut best: Option<PrepReport> = None;
    for circ in candidates {
        let out = final_state(&circ)?;
        let fidelity = inner(v, &out).norm_sqr();
        if fidelity < 1.0 - 1e-9 {
            continue;
        }
        let depth = circ.depth();
        let better = match &best {
            None => true,
            Some(b) => (depth, circ.gates.len()) < (b.depth, b.circuit.gates.len()),
        };
        if better {
            best = Some(PrepReport { circuit: circ, fidelity, depth });
        }
    }
    best.ok_or(Error::SynthesisFailure(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwf::StateLabel;
    use crate::qmath::{haar_state, Rng};

    #[test]
    fn prepares_every_reference_state() {
        for l in StateLabel::ALL {
            let r = prepare_state(&l.vector()).unwrap();
            assert!(r.fidelity >= 1.0 - 1e-9, "{l}");
            assert!(r.circuit.cz_count() <= 1);
        }
    }

    #[test]
    fn ns3pp_is_shallow() {
        let r = prepare_state(&StateLabel::Ns3pp.vector()).unwrap();
        assert!(r.depth <= 4, "depth {}", r.depth);
    }

    #[test]
    fn random_and_product_states() {
        let mut rng = Rng::new(12);
        for _ in 0..50 {
            let v = haar_state(2, &mut rng);
            assert!(prepare_state(&v).unwrap().fidelity > 1.0 - 1e-9);
        }
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let plus0 = [crate::qmath::c(k, 0.0), crate::qmath::ZERO, crate::qmath::c(0.0, k), crate::qmath::ZERO];
        let r = prepare_state(&plus0).unwrap();
        assert_eq!(r.circuit.cz_count(), 0);
        assert!(prepare_state(&[ONE, ONE, crate::qmath::ZERO, crate::qmath::ZERO]).is_err());
    }
}
