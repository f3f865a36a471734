//! Weak-measurement / measurement-reversal protection and teleportation
//! through a maximally entangled resource.

use serde::{Deserialize, Serialize};

use crate::dwf::StateLabel;
use crate::error::{Error, Result};
use crate::metrics::concurrence;
use crate::noise::KrausSet;
use crate::qmath::{c, inner, norm, pauli, CMat, Rng, C64, ONE, ZERO};
use crate::sim::{apply_kraus, DensityMat};
use crate::synth::{apply_gate, Gate};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WmQmrParams {
    pub w1: f64,
    pub w2: f64,
    pub wr1: f64,
    pub wr2: f64,
}

fn strength(name: &'static str, v: f64) -> Result<f64> {
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::OutOfRange { name, value: v })
    }
}

impl WmQmrParams {
    pub fn new(w1: f64, w2: f64, wr1: f64, wr2: f64) -> Result<Self> {
        Ok(Self { w1: strength("w1", w1)?, w2: strength("w2", w2)?, wr1: strength("wr1", wr1)?, wr2: strength("wr2", wr2)? })
    }

    /// Common WM strength `p` on both qubits, common reversal strength `q`.
    pub fn from_pq(p: f64, q: f64) -> Result<Self> {
        Self::new(p, p, q, q)
    }

    pub fn none() -> Self {
        Self { w1: 0.0, w2: 0.0, wr1: 0.0, wr2: 0.0 }
    }
}

/// Which figure's per-state (p, q) pairs to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaptionSet {
    Chsh,
    Concurrence,
    Teleportation,
}

/// Per-state WM/QMR strengths quoted alongside the AD(g=0.01, γ=5) plots.
pub fn caption_params(set: CaptionSet, label: StateLabel) -> Option<WmQmrParams> {
    use StateLabel::*;
    let (p, q) = match (set, label) {
        (_, Ns1) => (0.17, 0.54),
        (_, Ns2) => (0.05, 0.74),
        (CaptionSet::Chsh, Ns3) => (0.54, 0.54),
        (CaptionSet::Chsh, Ns3p) => (0.58, 0.58),
        (_, Ns3) => (0.05, 0.05),
        (_, Ns3p) => (0.3, 0.3),
        (CaptionSet::Chsh, PhiPlus | PhiMinus) => (0.05, 0.05),
        (_, PhiPlus | PhiMinus) => (0.01, 0.01),
        (_, PsiPlus | PsiMinus) => (0.01, 0.05),
        (_, Ns3pp) => return None,
    };
    WmQmrParams::from_pq(p, q).ok()
}

pub fn wm_operator(w1: f64, w2: f64) -> Result<CMat> {
    let a = CMat::real_diag(&[1.0, (1.0 - strength("w1", w1)?).sqrt()]);
    let b = CMat::real_diag(&[1.0, (1.0 - strength("w2", w2)?).sqrt()]);
    Ok(a.kron(&b))
}

pub fn qmr_operator(wr1: f64, wr2: f64) -> Result<CMat> {
    let a = CMat::real_diag(&[(1.0 - strength("wr1", wr1)?).sqrt(), 1.0]);
    let b = CMat::real_diag(&[(1.0 - strength("wr2", wr2)?).sqrt(), 1.0]);
    Ok(a.kron(&b))
}

#[derive(Clone, Debug)]
pub struct ProtectedState {
    pub rho_f: DensityMat,
    pub p_succ: f64,
}

/// Unnormalised `M_QMR (Σ K_ij [M_WM ρ₀ M_WM†] K_ij†) M_QMR†`.
pub fn protected_numerator(rho0: &DensityMat, kraus: &KrausSet, params: &WmQmrParams) -> Result<CMat> {
    if rho0.nqubits() != 2 {
        return Err(Error::WidthMismatch(2, rho0.nqubits()));
    }
    let wm = wm_operator(params.w1, params.w2)?;
    let qmr = qmr_operator(params.wr1, params.wr2)?;
    let weak = wm.sandwich(rho0.matrix());
    let tr = weak.trace().re;
    if tr < 1e-12 {
        return Err(Error::ZeroSuccess(tr));
    }
    // the channel is linear, so evolve the normalised state and rescale
    let ops: Vec<CMat> = kraus.operators.iter().flat_map(|a| kraus.operators.iter().map(move |b| a.kron(b))).collect();
    let evolved = apply_kraus(&DensityMat::from_matrix(weak.scale_re(1.0 / tr))?, &ops, &[0, 1])?;
    Ok(qmr.sandwich(evolved.matrix()).scale_re(tr))
}

pub fn protected_evolution(rho0: &DensityMat, kraus: &KrausSet, params: &WmQmrParams) -> Result<ProtectedState> {
    let num = protected_numerator(rho0, kraus, params)?;
    let p_succ = num.trace().re;
    if p_succ < 1e-12 {
        return Err(Error::ZeroSuccess(p_succ));
    }
    let rho_f = DensityMat::from_matrix(num.scale_re(1.0 / p_succ).hermitian_part())?;
    Ok(ProtectedState { rho_f, p_succ })
}

/// Run Alice's Bell-measurement circuit (CNOT Q→A, H on Q) on `input ⊗ resource`
/// and return Bob's unnormalised conditional state for each outcome `2a + b`.
fn bob_branches(input: &[C64], resource: &[C64]) -> [Vec<C64>; 4] {
    let mut s: Vec<C64> = input.iter().flat_map(|x| resource.iter().map(move |y| x * y)).collect();
    for g in [Gate::H(1), Gate::Cz(0, 1), Gate::H(1), Gate::H(0)] {
        apply_gate(&mut s, 3, &g);
    }
    std::array::from_fn(|k| vec![s[2 * k], s[2 * k + 1]])
}

fn require_maximal(resource: &[C64]) -> Result<()> {
    let cc = concurrence(&DensityMat::from_pure(resource)?)?;
    if (cc - 1.0).abs() > 1e-9 {
        return Err(Error::NotMaximallyEntangled(cc));
    }
    Ok(())
}

/// Bob's correction for each outcome `(a, b)`, indexed `2a + b`. Each branch
/// map is linear in the input; the correction is its normalised inverse.
pub fn correction_table(resource: &[C64]) -> Result<[CMat; 4]> {
    require_maximal(resource)?;
    let e0 = bob_branches(&[ONE, ZERO], resource);
    let e1 = bob_branches(&[ZERO, ONE], resource);
    let mut out: [CMat; 4] = std::array::from_fn(|_| CMat::identity(2));
    for k in 0..4 {
        let m = CMat::from_cols(&[e0[k].clone(), e1[k].clone()]);
        let gram = m.adjoint().matmul(&m);
        let s = gram[(0, 0)].re.sqrt();
        let u = m.adjoint().scale_re(1.0 / s);
        if u.unitarity_deviation() > 1e-9 {
            return Err(Error::NotMaximallyEntangled(gram[(0, 0)].re));
        }
        out[k] = u;
    }
    Ok(out)
}

/// Name a correction as `P` or `P·S†`, `P ∈ {I, X, Z, XZ}`, up to global phase.
pub fn describe_correction(u: &CMat) -> Option<String> {
    let paulis = [("I", CMat::identity(2)), ("X", pauli::x()), ("Z", pauli::z()), ("XZ", pauli::x().matmul(&pauli::z()))];
    let sdg = CMat::diag(&[ONE, c(0.0, -1.0)]);
    for (name, p) in &paulis {
        for (suffix, tail) in [("", CMat::identity(2)), ("·S†", sdg.clone())] {
            let cand = p.matmul(&tail);
            let ov = (cand.adjoint().matmul(u)).trace().norm() / 2.0;
            if (ov - 1.0).abs() < 1e-9 {
                return Some(format!("{name}{suffix}"));
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub bob_state: Vec<C64>,
    pub a: u8,
    pub b: u8,
    pub fidelity: f64,
}

/// One run: sample Alice's outcome, apply the tabulated correction.
pub fn teleport(input: &[C64], resource: &[C64], rng: &mut Rng) -> Result<TeleportOutcome> {
    let table = correction_table(resource)?;
    teleport_with_table(input, resource, &table, rng)
}

fn teleport_with_table(input: &[C64], resource: &[C64], table: &[CMat; 4], rng: &mut Rng) -> Result<TeleportOutcome> {
    let n = norm(input);
    if input.len() != 2 || (n - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit(n));
    }
    let branches = bob_branches(input, resource);
    let probs: Vec<f64> = branches.iter().map(|v| norm(v).powi(2)).collect();
    let r = rng.uniform();
    let mut acc = 0.0;
    let mut k = 3;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            k = i;
            break;
        }
    }
    let v = &branches[k];
    let nv = norm(v);
    let bob: Vec<C64> = table[k].apply(v).iter().map(|z| z / nv).collect();
    let fidelity = inner(input, &bob).norm_sqr();
    Ok(TeleportOutcome { bob_state: bob, a: (k >> 1) as u8, b: (k & 1) as u8, fidelity })
}

/// Exhaustive check over all four branches: (probability, fidelity) per outcome.
pub fn teleport_branches(input: &[C64], resource: &[C64]) -> Result<[(f64, f64); 4]> {
    let table = correction_table(resource)?;
    let branches = bob_branches(input, resource);
    Ok(std::array::from_fn(|k| {
        let v = &branches[k];
        let p = norm(v).powi(2);
        let out = table[k].apply(v);
        let f = if p > 0.0 { inner(input, &out).norm_sqr() / p } else { 1.0 };
        (p, f)
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub mean_fidelity: f64,
    pub per_outcome_fidelity: [f64; 4],
    pub outcome_freqs: [f64; 4],
    pub corrections: Vec<String>,
    pub trials: usize,
}

/// Teleport `trials` Haar-random inputs through `resource`.
pub fn teleport_trials(resource: &[C64], trials: usize, rng: &mut Rng) -> Result<TeleportReport> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let table = correction_table(resource)?;
    let mut counts = [0usize; 4];
    let mut fsum = [0.0; 4];
    for _ in 0..trials {
        let psi = crate::qmath::haar_state(1, rng);
        let o = teleport_with_table(&psi, resource, &table, rng)?;
        let k = (2 * o.a + o.b) as usize;
        counts[k] += 1;
        fsum[k] += o.fidelity;
    }
    let per_outcome_fidelity = std::array::from_fn(|k| if counts[k] > 0 { fsum[k] / counts[k] as f64 } else { f64::NAN });
    Ok(TeleportReport {
        mean_fidelity: fsum.iter().sum::<f64>() / trials as f64,
        per_outcome_fidelity,
        outcome_freqs: counts.map(|n| n as f64 / trials as f64),
        corrections: table.iter().map(|u| describe_correction(u).unwrap_or_else(|| "general".into())).collect(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{chsh_smax, mc_teleport_stats};
    use crate::noise::{evolve_two_qubit, kraus_ad, AdParams};
    use crate::qmath::haar_state;

    #[test]
    fn operators() {
        assert!(wm_operator(0.0, 0.0).unwrap().max_abs_diff(&CMat::identity(4)) < 1e-15);
        let eps = 1e-4;
        let m = wm_operator(1.0 - eps, 0.0).unwrap();
        let want = CMat::real_diag(&[1.0, 1.0, eps.sqrt(), eps.sqrt()]);
        assert!(m.max_abs_diff(&want) < 1e-12);
        let q = qmr_operator(0.36, 0.0).unwrap();
        assert!(q.max_abs_diff(&CMat::real_diag(&[0.8, 0.8, 1.0, 1.0])) < 1e-12);
        assert!(wm_operator(1.0, 0.0).is_err());
        assert!(qmr_operator(-0.1, 0.0).is_err());
    }

    #[test]
    fn unprotected_limit_matches_plain_evolution() {
        let k = kraus_ad(7.0, &AdParams::new(0.01, 5.0).unwrap()).unwrap();
        for l in StateLabel::ALL {
            let rho = DensityMat::from_pure(&l.vector()).unwrap();
            let p = protected_evolution(&rho, &k, &WmQmrParams::none()).unwrap();
            assert!((p.p_succ - 1.0).abs() < 1e-12);
            assert!(p.rho_f.matrix().max_abs_diff(evolve_two_qubit(&rho, &k).unwrap().matrix()) < 1e-12);
        }
        let id = KrausSet { operators: vec![CMat::identity(2)], time: 0.0 };
        let rho = DensityMat::from_pure(&StateLabel::Ns2.vector()).unwrap();
        let p = protected_evolution(&rho, &id, &WmQmrParams::none()).unwrap();
        assert!(p.rho_f.matrix().max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn normalisation_consistency() {
        let k = kraus_ad(3.0, &AdParams::new(0.01, 5.0).unwrap()).unwrap();
        let rho = DensityMat::from_pure(&StateLabel::Ns2.vector()).unwrap();
        let params = WmQmrParams::from_pq(0.05, 0.74).unwrap();
        let num = protected_numerator(&rho, &k, &params).unwrap();
        let p = protected_evolution(&rho, &k, &params).unwrap();
        assert!((num.trace().re - p.p_succ).abs() < 1e-14);
        assert!(num.scale_re(1.0 / p.p_succ).max_abs_diff(p.rho_f.matrix()) < 1e-10);
        assert!(p.p_succ > 0.0 && p.p_succ <= 1.0);
    }

    #[test]
    fn protection_raises_chsh_for_ns2() {
        let a = AdParams::new(0.01, 5.0).unwrap();
        let rho = DensityMat::from_pure(&StateLabel::Ns2.vector()).unwrap();
        let params = caption_params(CaptionSet::Chsh, StateLabel::Ns2).unwrap();
        let mut wins = 0;
        let n = 100;
        for i in 1..=n {
            let k = kraus_ad(i as f64 * 0.5, &a).unwrap();
            let plain = chsh_smax(&evolve_two_qubit(&rho, &k).unwrap()).unwrap();
            let prot = chsh_smax(&protected_evolution(&rho, &k, &params).unwrap().rho_f).unwrap();
            wins += usize::from(prot > plain);
        }
        assert!(wins > n / 2, "{wins}/{n}");
    }

    #[test]
    fn bell_table_is_textbook() {
        let t = correction_table(&StateLabel::PhiPlus.vector()).unwrap();
        let names: Vec<_> = t.iter().map(|u| describe_correction(u).unwrap()).collect();
        assert_eq!(names, ["I", "X", "Z", "XZ"]);
    }

    #[test]
    fn ns3pp_teleports_perfectly_on_every_branch() {
        let r = StateLabel::Ns3pp.vector();
        for u in correction_table(&r).unwrap() {
            assert!(u.unitarity_deviation() < 1e-12);
            assert!(describe_correction(&u).is_some());
        }
        let mut rng = Rng::new(10);
        for _ in 0..1000 {
            let psi = haar_state(1, &mut rng);
            for (p, f) in teleport_branches(&psi, &r).unwrap() {
                assert!((p - 0.25).abs() < 1e-12);
                assert!(f >= 1.0 - 1e-9);
            }
        }
        let out = teleport(&[ONE, ZERO], &r, &mut rng).unwrap();
        assert!((out.bob_state[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_bell_resources_work() {
        let mut rng = Rng::new(11);
        for l in [StateLabel::PhiPlus, StateLabel::PhiMinus, StateLabel::PsiPlus, StateLabel::PsiMinus] {
            let rep = teleport_trials(&l.vector(), 2000, &mut rng).unwrap();
            assert!((rep.mean_fidelity - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn outcome_frequencies_are_uniform() {
        let rep = teleport_trials(&StateLabel::Ns3pp.vector(), 100_000, &mut Rng::new(12)).unwrap();
        for f in rep.outcome_freqs {
            assert!((f - 0.25).abs() < 0.01);
        }
        assert!(rep.per_outcome_fidelity.iter().all(|f| *f >= 1.0 - 1e-9));
    }

    #[test]
    fn rejects_partially_entangled_resources() {
        assert!(matches!(correction_table(&StateLabel::Ns1.vector()), Err(Error::NotMaximallyEntangled(_))));
        let s = mc_teleport_stats(&DensityMat::maximally_mixed(2), 10_000, &mut Rng::new(13)).unwrap();
        assert!((s.mean_fidelity - 0.5).abs() < 0.01);
    }

    #[test]
    fn caption_table() {
        let p = caption_params(CaptionSet::Concurrence, StateLabel::Ns3p).unwrap();
        assert_eq!((p.w1, p.w2, p.wr1, p.wr2), (0.3, 0.3, 0.3, 0.3));
        let p = caption_params(CaptionSet::Chsh, StateLabel::PsiMinus).unwrap();
        assert_eq!((p.w1, p.wr1), (0.01, 0.05));
    }
}
