//! Two-qubit state tomography from the nine Pauli measurement settings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{herm_eig, pauli, CMat, Rng, C64};
use crate::sim::{apply_readout_error, measure_shots, run_circuit, Basis, ReadoutModel, ShotTable, StateVec};
use crate::synth::Circuit;

pub const DEFAULT_SHOTS: usize = 8192;
const MLE_ITERATIONS: usize = 500;
const MLE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoDesign {
    pub settings: Vec<[Basis; 2]>,
    pub shots_per_setting: usize,
}

impl TomoDesign {
    pub fn pauli(shots_per_setting: usize) -> Self {
        let b = [Basis::X, Basis::Y, Basis::Z];
        let settings = b.iter().flat_map(|&x| b.iter().map(move |&y| [x, y])).collect();
        TomoDesign { settings, shots_per_setting }
    }
}

impl Default for TomoDesign {
    fn default() -> Self {
        TomoDesign::pauli(DEFAULT_SHOTS)
    }
}

/// Outcome frequencies of one setting (possibly after mitigation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub setting: [Basis; 2],
    pub shots: usize,
    pub probs: [f64; 4],
}

impl Frequencies {
    pub fn from_table(t: &ShotTable) -> Result<Self> {
        let b = t.bases()?;
        if b.len() != 2 {
            return Err(Error::WidthMismatch(b.len(), 2));
        }
        let f = t.frequencies();
        Ok(Frequencies { setting: [b[0], b[1]], shots: t.shots, probs: [f[0], f[1], f[2], f[3]] })
    }
}

pub fn frequencies(tables: &[ShotTable]) -> Result<Vec<Frequencies>> {
    tables.iter().map(Frequencies::from_table).collect()
}

/// Simulate the design on the state prepared by `prep` from |00>.
pub fn run_tomography(prep: &Circuit, design: &TomoDesign, noise: Option<&ReadoutModel>, rng: &mut Rng) -> Result<Vec<ShotTable>> {
    if prep.width != 2 {
        return Err(Error::WidthMismatch(prep.width, 2));
    }
    let state = run_circuit(prep, &StateVec::zero(2))?;
    tomography_of(&state, design, noise, rng)
}

/// As [`run_tomography`] for an already prepared state. Each setting draws
/// from its own substream.
pub fn tomography_of(state: &StateVec, design: &TomoDesign, noise: Option<&ReadoutModel>, rng: &mut Rng) -> Result<Vec<ShotTable>> {
    let base = Rng::new(rng.next_u64());
    design
        .settings
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut r = base.substream(i as u64);
            let t = measure_shots(state, s, design.shots_per_setting, &mut r)?;
            match noise {
                Some(m) => apply_readout_error(&t, m, &mut r),
                None => Ok(t),
            }
        })
        .collect()
}

fn basis_pauli(b: Basis) -> CMat {
    match b {
        Basis::X => pauli::x(),
        Basis::Y => pauli::y(),
        Basis::Z => pauli::z(),
    }
}

fn basis_index(b: Basis) -> usize {
    match b {
        Basis::X => 1,
        Basis::Y => 2,
        Basis::Z => 3,
    }
}

fn find<'a>(data: &'a [Frequencies], s: [Basis; 2]) -> Result<&'a Frequencies> {
    data.iter()
        .find(|f| f.setting == s)
        .ok_or_else(|| Error::MissingSetting(format!("{}{}", s[0].as_char(), s[1].as_char())))
}

/// Empirical `<σ_i ⊗ σ_j>` for i, j ∈ {I, X, Y, Z}; single-qubit marginals
/// average over the three settings that contain them.
pub fn pauli_expectations(data: &[Frequencies]) -> Result<[[f64; 4]; 4]> {
    let all = [Basis::X, Basis::Y, Basis::Z];
    let mut e = [[0.0; 4]; 4];
    e[0][0] = 1.0;
    for &a in &all {
        for &b in &all {
            let f = find(data, [a, b])?;
            let (ia, ib) = (basis_index(a), basis_index(b));
            e[ia][ib] = f.probs[0] - f.probs[1] - f.probs[2] + f.probs[3];
            e[ia][0] += (f.probs[0] + f.probs[1] - f.probs[2] - f.probs[3]) / 3.0;
            e[0][ib] += (f.probs[0] - f.probs[1] + f.probs[2] - f.probs[3]) / 3.0;
        }
    }
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Mle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoResult {
    pub rho_hat: CMat,
    pub method: Method,
    pub mitigated: bool,
    /// Smallest eigenvalue of `rho_hat`; negative means the linear estimate is unphysical.
    pub min_eigenvalue: f64,
    pub fidelity_vs_target: Option<f64>,
}

impl TomoResult {
    fn new(rho_hat: CMat, method: Method, mitigated: bool) -> Result<Self> {
        let min_eigenvalue = herm_eig(&rho_hat)?.values[0];
        Ok(TomoResult { rho_hat, method, mitigated, min_eigenvalue, fidelity_vs_target: None })
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -1e-10
    }

    /// Record the fidelity `sqrt(<v|ρ̂|v>)` against a pure target.
    pub fn with_target(mut self, v: &[C64]) -> Self {
        self.fidelity_vs_target = Some(self.rho_hat.expectation(v).re.max(0.0).sqrt());
        self
    }
}

fn linear_matrix(data: &[Frequencies]) -> Result<CMat> {
    let e = pauli_expectations(data)?;
    let p = pauli::all();
    let mut rho = CMat::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            rho = &rho + &p[i].kron(&p[j]).scale_re(e[i][j] / 4.0);
        }
    }
    Ok(rho.hermitian_part())
}

pub fn linear_inversion(data: &[Frequencies], mitigated: bool) -> Result<TomoResult> {
    TomoResult::new(linear_matrix(data)?, Method::Linear, mitigated)
}

/// Closest trace-one PSD matrix in Frobenius norm (eigenvalue simplex projection).
pub fn project_to_density(m: &CMat) -> Result<CMat> {
    let e = herm_eig(&m.hermitian_part())?;
    let mut v: Vec<f64> = e.values.clone();
    let mut sorted = v.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut theta = 0.0;
    let mut acc = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    let ee = crate::qmath::HermEig { values: v, vectors: e.vectors };
    Ok(ee.reconstruct_with(|x| x))
}

fn projectors(s: [Basis; 2]) -> [CMat; 4] {
    let u = s[0].rotation().kron(&s[1].rotation());
    std::array::from_fn(|k| {
        let row: Vec<C64> = (0..4).map(|j| u[(k, j)].conj()).collect();
        CMat::outer(&row)
    })
}

/// Σ_settings Σ_k n_k log p_k(ρ).
pub fn log_likelihood(rho: &CMat, data: &[Frequencies]) -> f64 {
    let mut ll = 0.0;
    for f in data {
        for (k, pk) in projectors(f.setting).iter().enumerate() {
            let n = f.probs[k] * f.shots as f64;
            if n > 0.0 {
                let p = rho.matmul(pk).trace().re;
                ll += n * p.max(1e-300).ln();
            }
        }
    }
    ll
}

/// Maximum-likelihood estimate: projected least squares, refined by the
/// iterative RρR update; whichever has the higher likelihood is returned.
pub fn mle_reconstruct(data: &[Frequencies], mitigated: bool) -> Result<TomoResult> {
    let pls = project_to_density(&linear_matrix(data)?)?;
    let proj: Vec<(f64, [CMat; 4])> = data.iter().map(|f| (f.shots as f64, projectors(f.setting))).collect();
    let total: f64 = proj.iter().map(|(n, _)| n).sum();
    let mut rho = &pls.scale_re(0.99) + &CMat::identity(4).scale_re(0.01 / 4.0);
    for _ in 0..MLE_ITERATIONS {
        let mut r = CMat::zeros(4, 4);
        for (f, (n, ps)) in data.iter().zip(&proj) {
            for (k, pk) in ps.iter().enumerate() {
                if f.probs[k] <= 0.0 {
                    continue;
                }
                let p = rho.matmul(pk).trace().re.max(1e-300);
                r = &r + &pk.scale_re(n / total * f.probs[k] / p);
            }
        }
        let next = r.matmul(&rho).matmul(&r);
        let next = next.scale_re(1.0 / next.trace().re).hermitian_part();
        let step = next.max_abs_diff(&rho);
        rho = next;
        if step < MLE_TOL {
            break;
        }
    }
    let best = if log_likelihood(&rho, data) >= log_likelihood(&pls, data) { rho } else { pls };
    TomoResult::new(best, Method::Mle, mitigated)
}

const MAX_CONDITION: f64 = 1e6;

/// Estimate per-qubit confusion matrices by preparing all computational basis
/// states and reading them through `truth`.
pub fn calibrate_readout(truth: &ReadoutModel, shots: usize, rng: &mut Rng) -> Result<ReadoutModel> {
    let n = truth.nqubits();
    let mut counts = vec![[[0usize; 2]; 2]; n];
    let zs = vec![Basis::Z; n];
    for idx in 0..1usize << n {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[idx] = C64::new(1.0, 0.0);
        let state = StateVec::from_amplitudes(amps)?;
        let t = apply_readout_error(&measure_shots(&state, &zs, shots, rng)?, truth, rng)?;
        for (bits, &cnt) in &t.counts {
            for q in 0..n {
                let truth_bit = (idx >> (n - 1 - q)) & 1;
                let read = usize::from(bits.as_bytes()[q] == b'1');
                counts[q][read][truth_bit] += cnt;
            }
        }
    }
    let est = counts
        .iter()
        .map(|c| {
            let mut m = [[0.0; 2]; 2];
            for col in 0..2 {
                let tot = (c[0][col] + c[1][col]) as f64;
                m[0][col] = c[0][col] as f64 / tot;
                m[1][col] = 1.0 - m[0][col];
            }
            m
        })
        .collect();
    ReadoutModel::new(est)
}

fn invert_confusion(m: &[[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let g = CMat::from_real_rows(m);
    let s = crate::qmath::singular_values(&g);
    let cond = if s[1] > 0.0 { s[0] / s[1] } else { f64::INFINITY };
    if cond > MAX_CONDITION {
        return Err(Error::SingularConfusion(cond));
    }
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Ok([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

/// Apply the inverse confusion map to each setting's frequencies, clip
/// negative quasi-probabilities and renormalise.
pub fn mitigate(data: &[Frequencies], model: &ReadoutModel) -> Result<Vec<Frequencies>> {
    if model.nqubits() != 2 {
        return Err(Error::WidthMismatch(model.nqubits(), 2));
    }
    let a = invert_confusion(&model.confusion[0])?;
    let b = invert_confusion(&model.confusion[1])?;
    data.iter()
        .map(|f| {
            let mut q = [0.0; 4];
            for i in 0..4 {
                for j in 0..4 {
                    q[i] += a[i >> 1][j >> 1] * b[i & 1][j & 1] * f.probs[j];
                }
            }
            q.iter_mut().for_each(|x| *x = x.max(0.0));
            let s: f64 = q.iter().sum();
            if s <= 0.0 {
                return Err(Error::Invalid(format!("mitigated frequencies vanish for setting {:?}", f.setting)));
            }
            q.iter_mut().for_each(|x| *x /= s);
            Ok(Frequencies { setting: f.setting, shots: f.shots, probs: q })
        })
        .collect()
}

/// Entrywise `|a − b|`.
pub fn city_diff(a: &CMat, b: &CMat) -> Result<Vec<Vec<f64>>> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimMismatch(format!("{}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    Ok((0..a.rows()).map(|i| (0..a.cols()).map(|j| (a[(i, j)] - b[(i, j)]).norm()).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoReport {
    pub state: String,
    pub shots: usize,
    pub readout_flip: f64,
    pub seed: u64,
    pub raw: TomoResult,
    pub mitigated: Option<TomoResult>,
    pub city_diff: Vec<Vec<f64>>,
}

/// Full pipeline: simulate, optionally add symmetric readout flips, reconstruct
/// by MLE with and without mitigation.
pub fn tomography_pipeline(label: &str, target: &[C64], shots: usize, flip: f64, mitigate_readout: bool, seed: u64) -> Result<TomoReport> {
    if !(0.0..0.5).contains(&flip) {
        return Err(Error::OutOfRange { name: "readout_flip", value: flip });
    }
    let root = Rng::new(seed);
    let state = StateVec::from_amplitudes(target.to_vec())?;
    let design = TomoDesign::pauli(shots);
    let truth = ReadoutModel::symmetric(2, flip)?;
    let noise = (flip > 0.0).then_some(&truth);
    let tables = tomography_of(&state, &design, noise, &mut root.substream(0))?;
    let data = frequencies(&tables)?;
    let raw = mle_reconstruct(&data, false)?.with_target(target);
    let mitigated = if mitigate_readout {
        let est = calibrate_readout(&truth, shots, &mut root.substream(1))?;
        Some(mle_reconstruct(&mitigate(&data, &est)?, true)?.with_target(target))
    } else {
        None
    };
    let best = mitigated.as_ref().unwrap_or(&raw);
    let city = city_diff(&CMat::outer(target), &best.rho_hat)?;
    Ok(TomoReport { state: label.to_string(), shots, readout_flip: flip, seed, raw, mitigated, city_diff: city })
}

/// Exact frequencies of `rho` for every setting of `design` (infinite-shot limit).
pub fn exact_frequencies(rho: &CMat, design: &TomoDesign) -> Vec<Frequencies> {
    design
        .settings
        .iter()
        .map(|&s| {
            let ps = projectors(s);
            Frequencies { setting: s, shots: design.shots_per_setting, probs: std::array::from_fn(|k| rho.matmul(&ps[k]).trace().re) }
        })
        .collect()
}

pub fn pauli_operator(a: Basis, b: Basis) -> CMat {
    basis_pauli(a).kron(&basis_pauli(b))
}
