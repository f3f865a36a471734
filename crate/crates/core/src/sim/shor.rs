//! Nine-qubit Shor code protecting each qubit of a two-qubit state.
//!
//! Qubits 0..9 hold the first logical qubit, 9..18 the second; the data
//! qubit of each block is its first physical qubit. Syndromes are read
//! directly as stabilizer eigenvalues, so ancillas are not materialised: an
//! error "on an ancilla" flips the corresponding syndrome bit instead.
//!
//! Injection protocol for one trial at error probability `p`:
//! 1. after encoding, every physical qubit independently suffers a uniformly
//!    chosen Pauli with probability `p/3`;
//! 2. during correction there is one further opportunity, on a slot chosen
//!    uniformly among the 18 data qubits and 16 syndrome ancillas, again with
//!    probability `p/3`. Data errors land before the syndrome is read; an X or
//!    Y on an ancilla flips its syndrome bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{apply_pauli, DensityMat, Pauli, StateVec};
use crate::error::{Error, Result};
use crate::qmath::{c, CMat, Rng, C64, ZERO};

const N: usize = 18;
const BLOCK: usize = 9;
pub const STABILIZERS_PER_BLOCK: usize = 8;
pub const ANCILLA_SLOTS: usize = 2 * STABILIZERS_PER_BLOCK;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectionError {
    Data(usize, Pauli),
    Ancilla(usize, Pauli),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShorErrors {
    pub after_encoding: Vec<(usize, Pauli)>,
    pub during_correction: Option<CorrectionError>,
}

impl ShorErrors {
    pub fn is_empty(&self) -> bool {
        self.after_encoding.is_empty() && self.during_correction.is_none()
    }
}

fn random_pauli(rng: &mut Rng) -> Pauli {
    Pauli::ALL[rng.below(3)]
}

pub fn sample_shor_errors(p: f64, rng: &mut Rng) -> ShorErrors {
    let mut e = ShorErrors::default();
    for q in 0..N {
        if rng.uniform() < p / 3.0 {
            e.after_encoding.push((q, random_pauli(rng)));
        }
    }
    let slot = rng.below(N + ANCILLA_SLOTS);
    if rng.uniform() < p / 3.0 {
        let pa = random_pauli(rng);
        e.during_correction = Some(if slot < N { CorrectionError::Data(slot, pa) } else { CorrectionError::Ancilla(slot - N, pa) });
    }
    e
}

fn mask(q: usize) -> usize {
    1usize << (N - 1 - q)
}

/// Sparse amplitude map. Codewords of this code and their Pauli/Clifford
/// images have at most a few hundred non-zero amplitudes out of 2^18.
#[derive(Clone, Debug, Default)]
pub struct SparseState(BTreeMap<usize, C64>);

const PRUNE: f64 = 1e-14;

impl SparseState {
    fn from_pairs(it: impl IntoIterator<Item = (usize, C64)>) -> Self {
        let mut m = BTreeMap::new();
        for (i, a) in it {
            *m.entry(i).or_insert(ZERO) += a;
        }
        m.retain(|_, a: &mut C64| a.norm() > PRUNE);
        SparseState(m)
    }

    pub fn nonzeros(&self) -> usize {
        self.0.len()
    }

    fn cnot(&mut self, ctrl: usize, tgt: usize) {
        let (mc, mt) = (mask(ctrl), mask(tgt));
        let m = std::mem::take(&mut self.0);
        self.0 = m.into_iter().map(|(i, a)| (if i & mc != 0 { i ^ mt } else { i }, a)).collect();
    }

    fn had(&mut self, q: usize) {
        let m = mask(q);
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let old = std::mem::take(&mut self.0);
        *self = SparseState::from_pairs(old.into_iter().flat_map(|(i, a)| {
            let lo = i & !m;
            let sign = if i & m != 0 { -k } else { k };
            [(lo, a * k), (lo | m, a * sign)]
        }));
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let m = mask(q);
        let old = std::mem::take(&mut self.0);
        self.0 = old
            .into_iter()
            .map(|(i, a)| {
                let one = i & m != 0;
                match p {
                    Pauli::X => (i ^ m, a),
                    Pauli::Z => (i, if one { -a } else { a }),
                    // Y|0> = i|1>, Y|1> = -i|0>
                    Pauli::Y => (i ^ m, if one { a * c(0.0, -1.0) } else { a * c(0.0, 1.0) }),
                }
            })
            .collect();
    }

    fn expectation(&self, x_type: bool, m: usize) -> f64 {
        if x_type {
            self.0.iter().map(|(i, z)| self.0.get(&(i ^ m)).map_or(0.0, |w| (z.conj() * w).re)).sum()
        } else {
            self.0.iter().map(|(i, z)| if (i & m).count_ones() % 2 == 1 { -z.norm_sqr() } else { z.norm_sqr() }).sum()
        }
    }

    fn run(&mut self, ops: &[Op]) {
        for op in ops {
            match *op {
                Op::Cx(c, t) => self.cnot(c, t),
                Op::H(q) => self.had(q),
            }
        }
    }
}

enum Op {
    Cx(usize, usize),
    H(usize),
}

fn encoder(o: usize) -> Vec<Op> {
    vec![
        Op::Cx(o, o + 3),
        Op::Cx(o, o + 6),
        Op::H(o),
        Op::H(o + 3),
        Op::H(o + 6),
        Op::Cx(o, o + 1),
        Op::Cx(o, o + 2),
        Op::Cx(o + 3, o + 4),
        Op::Cx(o + 3, o + 5),
        Op::Cx(o + 6, o + 7),
        Op::Cx(o + 6, o + 8),
    ]
}

/// Stabilizer generators of one block: six ZZ pairs then the two X⁶ checks.
/// Returned as (is_x_type, qubit mask).
fn stabilizers(o: usize) -> [(bool, usize); STABILIZERS_PER_BLOCK] {
    let m = |qs: &[usize]| qs.iter().map(|&q| mask(o + q)).sum::<usize>();
    [
        (false, m(&[0, 1])),
        (false, m(&[1, 2])),
        (false, m(&[3, 4])),
        (false, m(&[4, 5])),
        (false, m(&[6, 7])),
        (false, m(&[7, 8])),
        (true, m(&[0, 1, 2, 3, 4, 5])),
        (true, m(&[3, 4, 5, 6, 7, 8])),
    ]
}

pub struct ShorCode;

impl ShorCode {
    /// Encode a two-qubit state into 18 physical qubits.
    pub fn encode(v: &[C64]) -> SparseState {
        assert_eq!(v.len(), 4);
        let mut a = SparseState::from_pairs(v.iter().enumerate().map(|(k, amp)| (((k >> 1) & 1) * mask(0) + (k & 1) * mask(BLOCK), *amp)));
        a.run(&encoder(0));
        a.run(&encoder(BLOCK));
        a
    }

    /// Syndrome bits (true = eigenvalue -1), block 0 then block 1.
    pub fn syndrome(a: &SparseState) -> [bool; ANCILLA_SLOTS] {
        let mut s = [false; ANCILLA_SLOTS];
        for (b, o) in [0, BLOCK].into_iter().enumerate() {
            for (k, (x, m)) in stabilizers(o).into_iter().enumerate() {
                let e = a.expectation(x, m);
                debug_assert!((e.abs() - 1.0).abs() < 1e-8, "not a stabilizer eigenstate: {e}");
                s[b * STABILIZERS_PER_BLOCK + k] = e < 0.0;
            }
        }
        s
    }

    /// Majority-vote corrections implied by a syndrome.
    pub fn corrections(s: &[bool; ANCILLA_SLOTS]) -> Vec<(usize, Pauli)> {
        let mut out = Vec::new();
        for (b, o) in [0, BLOCK].into_iter().enumerate() {
            let s = &s[b * STABILIZERS_PER_BLOCK..(b + 1) * STABILIZERS_PER_BLOCK];
            for t in 0..3 {
                let q = match (s[2 * t], s[2 * t + 1]) {
                    (true, false) => Some(0),
                    (true, true) => Some(1),
                    (false, true) => Some(2),
                    _ => None,
                };
                if let Some(q) = q {
                    out.push((o + 3 * t + q, Pauli::X));
                }
            }
            let t = match (s[6], s[7]) {
                (true, false) => Some(0),
                (true, true) => Some(1),
                (false, true) => Some(2),
                _ => None,
            };
            if let Some(t) = t {
                out.push((o + 3 * t, Pauli::Z));
            }
        }
        out
    }

    /// Invert the encoder and keep the two data qubits.
    pub fn decode(mut a: SparseState) -> CMat {
        for o in [0, BLOCK] {
            let mut ops = encoder(o);
            ops.reverse();
            a.run(&ops);
        }
        let (m0, m1) = (mask(0), mask(BLOCK));
        // group amplitudes by the traced-out qubits
        let mut groups: BTreeMap<usize, [C64; 4]> = BTreeMap::new();
        for (i, z) in &a.0 {
            let k = usize::from(i & m0 != 0) * 2 + usize::from(i & m1 != 0);
            groups.entry(i & !(m0 | m1)).or_insert([ZERO; 4])[k] = *z;
        }
        let mut rho = CMat::zeros(4, 4);
        for g in groups.values() {
            for k in 0..4 {
                for l in 0..4 {
                    rho[(k, l)] += g[k] * g[l].conj();
                }
            }
        }
        rho
    }
}

#[derive(Clone, Debug)]
pub struct ShorOutcome {
    pub recovered: DensityMat,
    /// Uhlmann fidelity with the input, `sqrt(<v|ρ|v>)`.
    pub fidelity: f64,
}

impl ShorOutcome {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

/// Run encode → errors → syndrome → correction → decode for a fixed error pattern.
pub fn shor_run(v: &[C64], errors: &ShorErrors) -> Result<ShorOutcome> {
    if v.len() != 4 {
        return Err(Error::WidthMismatch(v.len().trailing_zeros() as usize, 2));
    }
    let mut a = ShorCode::encode(v);
    for &(q, p) in &errors.after_encoding {
        a.apply_pauli(q, p);
    }
    if let Some(CorrectionError::Data(q, p)) = errors.during_correction {
        a.apply_pauli(q, p);
    }
    let mut s = ShorCode::syndrome(&a);
    if let Some(CorrectionError::Ancilla(slot, p)) = errors.during_correction {
        if p != Pauli::Z {
            s[slot] = !s[slot];
        }
    }
    for (q, p) in ShorCode::corrections(&s) {
        a.apply_pauli(q, p);
    }
    let rho = ShorCode::decode(a);
    let fidelity = rho.expectation(v).re.clamp(0.0, 1.0).sqrt();
    Ok(ShorOutcome { recovered: DensityMat::from_matrix(rho)?, fidelity })
}

pub fn shor_protect(state: &StateVec, p: f64, rng: &mut Rng) -> Result<ShorOutcome> {
    if state.nqubits() != 2 {
        return Err(Error::WidthMismatch(state.nqubits(), 2));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    shor_run(state.amplitudes(), &sample_shor_errors(p, rng))
}

/// With probability `p/3` apply one uniformly chosen Pauli to both qubits.
pub fn depolarize_inject(state: &StateVec, p: f64, rng: &mut Rng) -> Result<(StateVec, Option<Pauli>)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    let mut out = state.clone();
    if rng.uniform() < p / 3.0 {
        let pa = random_pauli(rng);
        for q in 0..out.nqubits() {
            out.apply_pauli(q, pa);
        }
        return Ok((out, Some(pa)));
    }
    Ok((out, None))
}

/// Unprotected arm of the sweep: each bare qubit independently suffers a
/// random Pauli with probability `p/3`.
fn bare_errors(p: f64, rng: &mut Rng) -> Vec<(usize, Pauli)> {
    let mut out = Vec::new();
    for q in 0..2 {
        if rng.uniform() < p / 3.0 {
            out.push((q, random_pauli(rng)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub state: String,
    pub p: f64,
    pub trials: usize,
    pub mean_infidelity: f64,
    pub stderr: f64,
    pub corrected: bool,
}

pub const SWEEP_CSV_HEADER: &str = "state,p,trials,mean_infidelity,stderr,corrected";

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.10e},{:.10e},{}",
            self.state,
            self.p,
            self.trials,
            self.mean_infidelity,
            self.stderr,
            u8::from(self.corrected)
        )
    }
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean infidelity with and without Shor protection over a grid of `p`.
/// Trials share their random error patterns across states.
pub fn sweep_depolarizing(states: &[(String, Vec<C64>)], ps: &[f64], trials: usize, seed: u64) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    if states.is_empty() || ps.is_empty() {
        return Err(Error::Invalid("state set and p grid must be non-empty".into()));
    }
    if let Some(&p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    let root = Rng::new(seed);
    let mut rows = Vec::new();
    let mut raw: Vec<Vec<(Vec<f64>, Vec<f64>)>> =
        vec![vec![(Vec::with_capacity(trials), Vec::with_capacity(trials)); ps.len()]; states.len()];
    for (pi, &p) in ps.iter().enumerate() {
        for t in 0..trials {
            let key = ((pi as u64) << 32) | t as u64;
            let errors = sample_shor_errors(p, &mut root.substream(key));
            let bare = bare_errors(p, &mut root.substream(key | (1 << 63)));
            for (si, (_, v)) in states.iter().enumerate() {
                let fc = if errors.is_empty() { 1.0 } else { shor_run(v, &errors)?.fidelity };
                let mut w = v.clone();
                for &(q, pa) in &bare {
                    apply_pauli(&mut w, 2, q, pa);
                }
                let fu = crate::qmath::inner(v, &w).norm();
                raw[si][pi].0.push(1.0 - fu);
                raw[si][pi].1.push(1.0 - fc);
            }
        }
    }
    for (si, (label, _)) in states.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            for (corrected, xs) in [(false, &raw[si][pi].0), (true, &raw[si][pi].1)] {
                let (mean_infidelity, stderr) = mean_stderr(xs);
                rows.push(SweepRow { state: label.clone(), p, trials, mean_infidelity, stderr, corrected });
            }
        }
    }
    Ok(rows)
}
