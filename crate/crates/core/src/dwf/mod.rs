//! Discrete phase space over GF(d), d in {2, 4}: mutually unbiased bases,
//! quantum nets, phase-point operators, discrete Wigner functions and the
//! negative eigenstates of the phase-point operators.

pub mod field;
pub mod states;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{herm_eig, pauli, CMat, C64};

pub use field::{build_striations, line_through, GfElem, Line, PhasePoint, Striation};
pub use states::{canonical_states, NamedState, StateLabel};

/// `d + 1` orthonormal bases; `bases[i]` holds its vectors as columns.
#[derive(Clone, Debug)]
pub struct MubSet {
    pub d: usize,
    pub bases: Vec<CMat>,
}

impl MubSet {
    pub fn vector(&self, basis: usize, k: usize) -> Vec<C64> {
        self.bases[basis].col(k)
    }

    pub fn projector(&self, basis: usize, k: usize) -> CMat {
        CMat::outer(&self.vector(basis, k))
    }
}

/// Common eigenbasis of two commuting Hermitian operators with joint spectrum
/// `{+-1} x {+-1}`, ordered by the eigenvalue of `a + 2b`.
fn joint_eigenbasis(a: &CMat, b: &CMat) -> Result<CMat> {
    let m = a + &b.scale_re(2.0);
    Ok(herm_eig(&m)?.vectors)
}

/// Complete MUB set. The first basis is the computational basis in natural
/// order. For d = 4 the remaining bases are the joint eigenbases of the
/// commuting Pauli pairs {XI, IX}, {YI, IY}, {XZ, ZY}, {ZX, YZ}.
pub fn build_mubs(d: usize) -> Result<MubSet> {
    field::check_dim(d)?;
    let [_, x, y, z] = pauli::all();
    let bases = if d == 2 {
        vec![CMat::identity(2), herm_eig(&x)?.vectors, herm_eig(&y)?.vectors]
    } else {
        let id = pauli::id();
        let k = |a: &CMat, b: &CMat| a.kron(b);
        vec![
            CMat::identity(4),
            joint_eigenbasis(&k(&x, &id), &k(&id, &x))?,
            joint_eigenbasis(&k(&y, &id), &k(&id, &y))?,
            joint_eigenbasis(&k(&x, &z), &k(&z, &y))?,
            joint_eigenbasis(&k(&z, &x), &k(&y, &z))?,
        ]
    };
    Ok(MubSet { d, bases })
}

/// Assignment of basis vectors to lines: line `j` of striation `i` carries
/// vector `(j + offsets[i]) mod d` of basis `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNet {
    pub offsets: Vec<usize>,
}

impl QuantumNet {
    pub fn new(d: usize, offsets: Vec<usize>) -> Result<Self> {
        field::check_dim(d)?;
        if offsets.len() != d + 1 || offsets.iter().any(|&o| o >= d) {
            return Err(Error::Invalid(format!("net offsets {offsets:?} invalid for d = {d}")));
        }
        Ok(QuantumNet { offsets })
    }

    pub fn zero(d: usize) -> Self {
        QuantumNet { offsets: vec![0; d + 1] }
    }

    /// All `d^(d+1)` nets in lexicographic order of their offsets.
    pub fn all(d: usize) -> Vec<QuantumNet> {
        let total = d.pow(d as u32 + 1);
        (0..total)
            .map(|mut n| {
                let mut offsets = vec![0; d + 1];
                for o in offsets.iter_mut().rev() {
                    *o = n % d;
                    n /= d;
                }
                QuantumNet { offsets }
            })
            .collect()
    }

    pub fn vector_for_line(&self, d: usize, striation: usize, line: usize) -> usize {
        (line + self.offsets[striation]) % d
    }
}

#[derive(Clone, Debug)]
pub struct PhasePointOp {
    pub alpha: PhasePoint,
    pub matrix: CMat,
}

/// Phase-point operator: the sum of the projectors on every line through
/// `alpha`, minus the identity.
pub fn phase_point_operator(
    net: &QuantumNet,
    mubs: &MubSet,
    striations: &[Striation],
    alpha: PhasePoint,
) -> Result<PhasePointOp> {
    let d = mubs.d;
    if striations.len() != d + 1 || net.offsets.len() != d + 1 || alpha.order() != d {
        return Err(Error::DimMismatch(format!(
            "net/striations/point do not match MUB dimension {d}"
        )));
    }
    let mut a = CMat::identity(d).scale_re(-1.0);
    for s in 0..=d {
        let line = line_through(d, s, alpha);
        debug_assert!(striations[s][line].points.contains(&alpha));
        let k = net.vector_for_line(d, s, line);
        a = &a + &mubs.projector(s, k);
    }
    Ok(PhasePointOp { alpha, matrix: a })
}

/// Discrete Wigner function of `rho`, indexed by [`PhasePoint::flat`].
#[derive(Clone, Debug)]
pub struct WignerFunction {
    pub d: usize,
    pub values: Vec<f64>,
}

impl WignerFunction {
    pub fn at(&self, alpha: PhasePoint) -> f64 {
        self.values[alpha.flat()]
    }

    pub fn line_sum(&self, line: &Line) -> f64 {
        line.points.iter().map(|&p| self.at(p)).sum()
    }
}

pub fn dwf(rho: &CMat, net: &QuantumNet, mubs: &MubSet, striations: &[Striation]) -> Result<WignerFunction> {
    let d = mubs.d;
    if !rho.is_square() || rho.rows() != d {
        return Err(Error::DimMismatch(format!("density matrix is {}x{}, expected {d}x{d}", rho.rows(), rho.cols())));
    }
    if (rho.trace().re - 1.0).abs() > 1e-8 || rho.hermitian_deviation() > 1e-8 {
        return Err(Error::NotDensity("W requires a Hermitian unit-trace matrix".into()));
    }
    let values = PhasePoint::all(d)
        .into_iter()
        .map(|alpha| {
            let a = phase_point_operator(net, mubs, striations, alpha)?;
            Ok(a.matrix.matmul(rho).trace().re / d as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WignerFunction { d, values })
}

/// Spectrum rounded to four decimals, stored as integers in units of 1e-4.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpectrumKey(pub Vec<i64>);

impl SpectrumKey {
    pub fn from_values(values: &[f64]) -> Self {
        SpectrumKey(values.iter().map(|v| (v * 1e4).round() as i64).collect())
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|&k| k as f64 / 1e4).collect()
    }

    /// Componentwise match against a reference spectrum.
    pub fn matches(&self, reference: &[f64], tol: f64) -> bool {
        self.0.len() == reference.len() && self.values().iter().zip(reference).all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl fmt::Display for SpectrumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values().iter().map(|v| format!("{v:.4}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Spectrum histogram of the phase-point operator at `alpha` over every quantum net.
pub fn census_spectra(mubs: &MubSet, striations: &[Striation], alpha: PhasePoint) -> Result<BTreeMap<SpectrumKey, usize>> {
    let mut counts = BTreeMap::new();
    for net in QuantumNet::all(mubs.d) {
        let op = phase_point_operator(&net, mubs, striations, alpha)?;
        let vals = herm_eig(&op.matrix)?.values;
        *counts.entry(SpectrumKey::from_values(&vals)).or_insert(0) += 1;
    }
    Ok(counts)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NegativeState {
    pub label: StateLabel,
    pub vector: Vec<C64>,
    pub eigenvalue: f64,
}

/// Unit eigenvectors of `op` with negative eigenvalues, most negative first,
/// labelled NS1, NS2, NS3 by rank.
pub fn negative_states(op: &PhasePointOp) -> Result<Vec<NegativeState>> {
    let e = herm_eig(&op.matrix)?;
    let labels = [StateLabel::Ns1, StateLabel::Ns2, StateLabel::Ns3];
    Ok(e.values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < -1e-12)
        .zip(labels)
        .map(|((k, &v), label)| NegativeState { label, vector: e.vector(k), eigenvalue: v })
        .collect())
}
