use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DensityMat, StateVec};
use crate::error::{Error, Result};
use crate::qmath::{CMat, Rng, I, ONE};
use crate::synth::hadamard;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    /// Rotation applied before a Z-basis readout: H for X, H·S† for Y.
    pub fn rotation(&self) -> CMat {
        match self {
            Basis::X => hadamard(),
            Basis::Y => hadamard().matmul(&CMat::diag(&[ONE, -I])),
            Basis::Z => CMat::identity(2),
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

pub fn setting_label(bases: &[Basis]) -> String {
    bases.iter().map(Basis::as_char).collect()
}

pub fn parse_setting(s: &str) -> Result<Vec<Basis>> {
    s.chars()
        .map(|ch| match ch {
            'X' => Ok(Basis::X),
            'Y' => Ok(Basis::Y),
            'Z' => Ok(Basis::Z),
            _ => Err(Error::Parse(format!("bad basis '{ch}' in setting '{s}'"))),
        })
        .collect()
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match parse_setting(s)?[..] {
            [b] => Ok(b),
            _ => Err(Error::Parse(format!("single basis expected, got '{s}'"))),
        }
    }
}

/// Sources of Born probabilities in a rotated product basis.
pub trait Born {
    fn nqubits(&self) -> usize;
    /// Outcome probabilities indexed by basis-state index (qubit 0 most significant).
    fn probabilities(&self, bases: &[Basis]) -> Vec<f64>;
}

impl Born for StateVec {
    fn nqubits(&self) -> usize {
        StateVec::nqubits(self)
    }

    fn probabilities(&self, bases: &[Basis]) -> Vec<f64> {
        let mut s = self.clone();
        for (q, b) in bases.iter().enumerate() {
            if *b != Basis::Z {
                s.apply_1q(q, &b.rotation());
            }
        }
        s.amplitudes().iter().map(|a| a.norm_sqr()).collect()
    }
}

impl Born for DensityMat {
    fn nqubits(&self) -> usize {
        DensityMat::nqubits(self)
    }

    fn probabilities(&self, bases: &[Basis]) -> Vec<f64> {
        let n = DensityMat::nqubits(self);
        let mut r = CMat::identity(1);
        for b in bases {
            r = r.kron(&b.rotation());
        }
        let rot = r.sandwich(self.matrix());
        (0..1 << n).map(|i| rot[(i, i)].re.max(0.0)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotTable {
    pub setting: String,
    pub shots: usize,
    pub counts: BTreeMap<String, usize>,
}

impl ShotTable {
    pub fn bases(&self) -> Result<Vec<Basis>> {
        parse_setting(&self.setting)
    }

    pub fn nqubits(&self) -> usize {
        self.setting.len()
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        *self.counts.get(bits).unwrap_or(&0) as f64 / self.shots as f64
    }

    /// Frequencies indexed by basis-state index.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.nqubits();
        let mut f = vec![0.0; 1 << n];
        for (bits, &cnt) in &self.counts {
            f[usize::from_str_radix(bits, 2).expect("bitstring")] += cnt as f64 / self.shots as f64;
        }
        f
    }

    /// Table from integer counts indexed by basis-state index.
    pub fn from_index_counts(setting: &str, counts: &[usize]) -> ShotTable {
        let n = setting.len();
        let map: BTreeMap<String, usize> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (bitstring(i, n), c))
            .collect();
        ShotTable { setting: setting.to_string(), shots: counts.iter().sum(), counts: map }
    }
}

pub fn bitstring(index: usize, n: usize) -> String {
    (0..n).map(|q| if (index >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn measure_shots<S: Born>(state: &S, bases: &[Basis], shots: usize, rng: &mut Rng) -> Result<ShotTable> {
    if shots == 0 {
        return Err(Error::Invalid("shots must be at least 1".into()));
    }
    if bases.len() != state.nqubits() {
        return Err(Error::WidthMismatch(bases.len(), state.nqubits()));
    }
    let probs = state.probabilities(bases);
    let mut cum = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cum.push(acc);
    }
    let mut counts = vec![0usize; probs.len()];
    for _ in 0..shots {
        let u = rng.uniform() * acc;
        let k = cum.partition_point(|&x| x <= u).min(probs.len() - 1);
        counts[k] += 1;
    }
    Ok(ShotTable::from_index_counts(&setting_label(bases), &counts))
}

/// Per-qubit confusion matrices, `m[j][i] = p(read j | true i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub confusion: Vec<[[f64; 2]; 2]>,
}

impl ReadoutModel {
    pub fn new(confusion: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        for m in &confusion {
            for col in 0..2 {
                let s = m[0][col] + m[1][col];
                if (s - 1.0).abs() > 1e-12 || m[0][col] < 0.0 || m[1][col] < 0.0 {
                    return Err(Error::Invalid(format!("confusion column {col} is not a distribution: {m:?}")));
                }
            }
        }
        Ok(ReadoutModel { confusion })
    }

    pub fn identity(n: usize) -> Self {
        ReadoutModel { confusion: vec![[[1.0, 0.0], [0.0, 1.0]]; n] }
    }

    pub fn symmetric(n: usize, flip: f64) -> Result<Self> {
        ReadoutModel::new(vec![[[1.0 - flip, flip], [flip, 1.0 - flip]]; n])
    }

    pub fn nqubits(&self) -> usize {
        self.confusion.len()
    }

    /// Full `2^n × 2^n` column-stochastic matrix (as a real-valued CMat).
    pub fn full_matrix(&self) -> CMat {
        let mut m = CMat::identity(1);
        for c in &self.confusion {
            m = m.kron(&CMat::from_real_rows(c));
        }
        m
    }
}

pub fn apply_readout_error(t: &ShotTable, m: &ReadoutModel, rng: &mut Rng) -> Result<ShotTable> {
    let n = t.nqubits();
    if m.nqubits() != n {
        return Err(Error::DimMismatch(format!("readout model for {} qubits, table has {n}", m.nqubits())));
    }
    let mut counts = vec![0usize; 1 << n];
    for (bits, &cnt) in &t.counts {
        let idx = usize::from_str_radix(bits, 2).map_err(|e| Error::Parse(e.to_string()))?;
        for _ in 0..cnt {
            let mut out = 0usize;
            for q in 0..n {
                let b = (idx >> (n - 1 - q)) & 1;
                let flip = m.confusion[q][1 - b][b];
                let read = if flip > 0.0 && rng.uniform() < flip { 1 - b } else { b };
                out |= read << (n - 1 - q);
            }
            counts[out] += 1;
        }
    }
    Ok(ShotTable::from_index_counts(&t.setting, &counts))
}
