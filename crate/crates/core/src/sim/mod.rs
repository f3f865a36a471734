//! Statevector and density-matrix simulation, Kraus channels, sampling,
//! readout errors and the nine-qubit Shor code experiment.

mod measure;
mod shor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, eigvalsh, norm, CMat, C64, ONE, ZERO};
use crate::synth::{apply_gate, Circuit};

pub use measure::{apply_readout_error, measure_shots, Basis, Born, ReadoutModel, ShotTable};
pub use shor::{
    depolarize_inject, sample_shor_errors, shor_protect, shor_run, sweep_depolarizing, ShorCode, ShorErrors,
    ShorOutcome, SweepRow, SWEEP_CSV_HEADER,
};

pub const DENSITY_MAX_QUBITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(&self) -> CMat {
        match self {
            Pauli::X => crate::qmath::pauli::x(),
            Pauli::Y => crate::qmath::pauli::y(),
            Pauli::Z => crate::qmath::pauli::z(),
        }
    }
}

/// Apply a Pauli to qubit `q` of a raw amplitude vector (qubit 0 most significant).
pub fn apply_pauli(amps: &mut [C64], width: usize, q: usize, p: Pauli) {
    let mask = 1usize << (width - 1 - q);
    match p {
        Pauli::Z => {
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *a = -*a;
                }
            }
        }
        Pauli::X | Pauli::Y => {
            for i in 0..amps.len() {
                if i & mask == 0 {
                    let j = i | mask;
                    let (a0, a1) = (amps[i], amps[j]);
                    if p == Pauli::X {
                        amps[i] = a1;
                        amps[j] = a0;
                    } else {
                        amps[i] = c(0.0, -1.0) * a1;
                        amps[j] = c(0.0, 1.0) * a0;
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVec {
    nqubits: usize,
    amps: Vec<C64>,
}

impl StateVec {
    pub fn zero(nqubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << nqubits];
        amps[0] = ONE;
        StateVec { nqubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::DimMismatch(format!("amplitude count {n} is not a power of two")));
        }
        let nv = norm(&amps);
        if (nv - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnit(nv));
        }
        Ok(StateVec { nqubits: n.trailing_zeros() as usize, amps })
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        apply_pauli(&mut self.amps, self.nqubits, q, p);
    }

    pub fn apply_1q(&mut self, q: usize, m: &CMat) {
        crate::synth::apply_1q(&mut self.amps, self.nqubits, q, m);
    }

    pub fn density(&self) -> Result<DensityMat> {
        DensityMat::from_matrix(CMat::outer(&self.amps))
    }
}

pub fn run_circuit(circ: &Circuit, input: &StateVec) -> Result<StateVec> {
    if circ.width != input.nqubits {
        return Err(Error::WidthMismatch(circ.width, input.nqubits));
    }
    circ.validate()?;
    let mut out = input.clone();
    for g in &circ.gates {
        apply_gate(&mut out.amps, out.nqubits, g);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMat {
    nqubits: usize,
    matrix: CMat,
}

impl DensityMat {
    /// Validates Hermiticity, unit trace (1e-9) and positivity (min eigenvalue ≥ -1e-8).
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let d = matrix.rows();
        if !matrix.is_square() || d < 2 || !d.is_power_of_two() {
            return Err(Error::DimMismatch(format!("{}x{} is not a qubit density matrix", matrix.rows(), matrix.cols())));
        }
        let nqubits = d.trailing_zeros() as usize;
        if nqubits > DENSITY_MAX_QUBITS {
            return Err(Error::WidthExceeded(nqubits, DENSITY_MAX_QUBITS));
        }
        if matrix.hermitian_deviation() > 1e-9 * matrix.frobenius_norm().max(1.0) {
            return Err(Error::NotDensity("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let matrix = matrix.hermitian_part();
        let min = eigvalsh(&matrix)?[0];
        if min < -1e-8 {
            return Err(Error::NotDensity(format!("minimum eigenvalue {min:e}")));
        }
        Ok(DensityMat { nqubits, matrix })
    }

    pub fn from_pure(v: &[C64]) -> Result<Self> {
        DensityMat::from_matrix(CMat::outer(v))
    }

    pub fn maximally_mixed(nqubits: usize) -> Self {
        let d = 1 << nqubits;
        DensityMat { nqubits, matrix: CMat::identity(d).scale_re(1.0 / d as f64) }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }
}

/// Embed an operator acting on `targets` (first target = most significant
/// bit of the operator index) into an `n`-qubit operator.
pub fn embed(op: &CMat, targets: &[usize], n: usize) -> CMat {
    let dim = 1usize << n;
    let k = targets.len();
    let tmask: usize = targets.iter().map(|&t| 1usize << (n - 1 - t)).sum();
    let sub = |i: usize| -> usize {
        targets.iter().enumerate().fold(0, |acc, (pos, &t)| acc | (((i >> (n - 1 - t)) & 1) << (k - 1 - pos)))
    };
    let mut out = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if i & !tmask == j & !tmask {
                out[(i, j)] = op[(sub(i), sub(j))];
            }
        }
    }
    out
}

/// Deviation of `Σ K†K` from the identity (max-entry norm).
pub fn completeness_deviation(kraus: &[CMat]) -> f64 {
    if kraus.is_empty() {
        return f64::INFINITY;
    }
    let d = kraus[0].rows();
    let mut acc = CMat::zeros(d, d);
    for k in kraus {
        acc = &acc + &k.adjoint().matmul(k);
    }
    acc.max_abs_diff(&CMat::identity(d))
}

pub fn apply_kraus(rho: &DensityMat, kraus: &[CMat], targets: &[usize]) -> Result<DensityMat> {
    let kdim = 1usize << targets.len();
    if targets.iter().any(|&t| t >= rho.nqubits) || kraus.iter().any(|k| k.rows() != kdim || k.cols() != kdim) {
        return Err(Error::DimMismatch(format!("Kraus operators do not act on targets {targets:?}")));
    }
    let dev = completeness_deviation(kraus);
    if dev > 1e-10 {
        return Err(Error::NotCptp(dev));
    }
    let mut out = CMat::zeros(rho.matrix.rows(), rho.matrix.rows());
    for k in kraus {
        let full = embed(k, targets, rho.nqubits);
        out = &out + &full.sandwich(&rho.matrix);
    }
    DensityMat::from_matrix(out)
}
