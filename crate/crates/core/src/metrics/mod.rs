//! Figures of merit for one- and two-qubit states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, haar_state, herm_eig, pauli, psd_sqrt, CMat, Rng, C64, ZERO};
use crate::sim::DensityMat;

/// Singular values (descending) from the Hermitian dilation `[[0, A], [A†, 0]]`,
/// which avoids the square roots that amplify round-off near zero.
fn singular_values_exact(a: &CMat) -> Result<Vec<f64>> {
    let n = a.rows();
    let mut h = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            h[(i, n + j)] = a[(i, j)];
            h[(n + j, i)] = a[(i, j)].conj();
        }
    }
    let mut v = herm_eig(&h)?.values.split_off(n);
    v.reverse();
    Ok(v.into_iter().map(|x| x.max(0.0)).collect())
}

/// Uhlmann fidelity `Tr√(√ρ σ √ρ)` (not squared).
pub fn fidelity(rho: &DensityMat, sigma: &DensityMat) -> Result<f64> {
    if rho.nqubits() != sigma.nqubits() {
        return Err(Error::DimMismatch(format!("{} vs {} qubits", rho.nqubits(), sigma.nqubits())));
    }
    let a = psd_sqrt(rho.matrix())?.matmul(&psd_sqrt(sigma.matrix())?);
    Ok(singular_values_exact(&a)?.iter().sum::<f64>().min(1.0 + 1e-9))
}

/// `sqrt(<v|σ|v>)`, the fidelity against a pure reference.
pub fn fidelity_pure(v: &[C64], sigma: &DensityMat) -> f64 {
    sigma.matrix().expectation(v).re.max(0.0).sqrt()
}

fn require_two_qubits(rho: &DensityMat) -> Result<()> {
    if rho.nqubits() != 2 {
        return Err(Error::NotDensity(format!("two-qubit state expected, got {} qubits", rho.nqubits())));
    }
    Ok(())
}

/// Wootters concurrence.
pub fn concurrence(rho: &DensityMat) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = pauli::y().kron(&pauli::y());
    let s = psd_sqrt(rho.matrix())?;
    let l = singular_values_exact(&s.matmul(&yy).matmul(&s.conj()))?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix(pub [[f64; 3]; 3]);

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    fn to_cmat(self) -> CMat {
        CMat::from_real_rows(&self.0)
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> [f64; 3] {
        let s = crate::qmath::singular_values(&self.to_cmat());
        [s[0], s[1], s[2]]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

pub fn correlation_matrix(rho: &DensityMat) -> Result<CorrelationMatrix> {
    require_two_qubits(rho)?;
    let s = pauli::xyz();
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = rho.matrix().matmul(&s[i].kron(&s[j])).trace().re;
        }
    }
    Ok(CorrelationMatrix(t))
}

/// Optimal CHSH value `2√(λ₁+λ₂)` from the two largest eigenvalues of `TᵀT`.
pub fn chsh_smax(rho: &DensityMat) -> Result<f64> {
    let s = correlation_matrix(rho)?.singular_values();
    Ok(2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub cmatrix: [[f64; 3]; 3],
    pub lambda_max: f64,
    pub fbar_max: f64,
    pub n: usize,
}

const SLD_CUTOFF: f64 = 1e-12;

/// Collective spin components `J_α = (σ_α⊗I + I⊗σ_α)/2`.
fn collective_spin() -> [CMat; 3] {
    let id = CMat::identity(2);
    pauli::xyz().map(|s| (&s.kron(&id) + &id.kron(&s)).scale_re(0.5))
}

fn check_direction(n: [f64; 3]) -> Result<()> {
    let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (nn - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitDirection(nn));
    }
    Ok(())
}

/// QFI for rotations generated by `J_n`, from the explicit eigen-sum.
pub fn qfi(rho: &DensityMat, n: [f64; 3]) -> Result<f64> {
    require_two_qubits(rho)?;
    check_direction(n)?;
    let j = collective_spin();
    let jn = &(&j[0].scale_re(n[0]) + &j[1].scale_re(n[1])) + &j[2].scale_re(n[2]);
    let e = herm_eig(rho.matrix())?;
    let mut f = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let (pa, pb) = (e.values[a].max(0.0), e.values[b].max(0.0));
            if a == b || pa + pb < SLD_CUTOFF {
                continue;
            }
            let m = jn.expectation_between(&e.vector(a), &e.vector(b));
            f += 2.0 * (pa - pb).powi(2) / (pa + pb) * m.norm_sqr();
        }
    }
    Ok(f)
}

pub fn qfi_cmatrix(rho: &DensityMat) -> Result<QfiResult> {
    require_two_qubits(rho)?;
    let j = collective_spin();
    let e = herm_eig(rho.matrix())?;
    let vecs: Vec<Vec<C64>> = (0..4).map(|k| e.vector(k)).collect();
    let mut cm = [[0.0; 3]; 3];
    for a in 0..4 {
        for b in 0..4 {
            let (pa, pb) = (e.values[a].max(0.0), e.values[b].max(0.0));
            if a == b || pa + pb < SLD_CUTOFF {
                continue;
            }
            let w = (pa - pb).powi(2) / (pa + pb);
            let el: Vec<C64> = j.iter().map(|jk| jk.expectation_between(&vecs[a], &vecs[b])).collect();
            for k in 0..3 {
                for l in 0..3 {
                    cm[k][l] += w * 2.0 * (el[k] * el[l].conj()).re;
                }
            }
        }
    }
    let lambda_max = *herm_eig(&CMat::from_real_rows(&cm).hermitian_part())?.values.last().unwrap();
    Ok(QfiResult { cmatrix: cm, lambda_max, fbar_max: lambda_max / 2.0, n: 2 })
}

/// Average fidelity of standard teleportation, with Bob's optimal local
/// rotation, `1/2 + N/6` where `N = s₁+s₂+s₃` if `det T ≤ 0` and `s₁+s₂−s₃`
/// otherwise.
pub fn teleportation_fidelity(rho: &DensityMat) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let s = t.singular_values();
    let n = if t.det() <= 0.0 { s[0] + s[1] + s[2] } else { s[0] + s[1] - s[2] };
    Ok(0.5 + n / 6.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportStats {
    pub mean_fidelity: f64,
    pub deviation: f64,
    pub samples: usize,
}

fn bell_basis() -> [Vec<C64>; 4] {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    [
        vec![c(k, 0.0), ZERO, ZERO, c(k, 0.0)],
        vec![c(k, 0.0), ZERO, ZERO, c(-k, 0.0)],
        vec![ZERO, c(k, 0.0), c(k, 0.0), ZERO],
        vec![ZERO, c(k, 0.0), c(-k, 0.0), ZERO],
    ]
}

fn real_matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Orthonormal completion of up to two given unit columns.
fn complete_basis(mut cols: Vec<[f64; 3]>) -> [[f64; 3]; 3] {
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut a = 0;
    while cols.len() < 2 {
        let mut v = axes[a];
        a += 1;
        for u in &cols {
            let d: f64 = (0..3).map(|i| u[i] * v[i]).sum();
            for i in 0..3 {
                v[i] -= d * u[i];
            }
        }
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            cols.push([v[0] / n, v[1] / n, v[2] / n]);
        }
    }
    if cols.len() < 3 {
        cols.push(cross(cols[0], cols[1]));
    }
    let mut m = [[0.0; 3]; 3];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..3 {
            m[i][j] = col[i];
        }
    }
    m
}

fn transpose3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    CorrelationMatrix(*m).det()
}

/// SU(2) matrix implementing the rotation `O` on Bloch vectors.
fn su2_from_rotation(o: &[[f64; 3]; 3]) -> CMat {
    let tr = o[0][0] + o[1][1] + o[2][2];
    let (w, x, y, z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (o[2][1] - o[1][2]) / s;
        y = (o[0][2] - o[2][0]) / s;
        z = (o[1][0] - o[0][1]) / s;
    } else if o[0][0] > o[1][1] && o[0][0] > o[2][2] {
        let s = (1.0 + o[0][0] - o[1][1] - o[2][2]).sqrt() * 2.0;
        w = (o[2][1] - o[1][2]) / s;
        x = 0.25 * s;
        y = (o[0][1] + o[1][0]) / s;
        z = (o[0][2] + o[2][0]) / s;
    } else if o[1][1] > o[2][2] {
        let s = (1.0 + o[1][1] - o[0][0] - o[2][2]).sqrt() * 2.0;
        w = (o[0][2] - o[2][0]) / s;
        x = (o[0][1] + o[1][0]) / s;
        y = 0.25 * s;
        z = (o[1][2] + o[2][1]) / s;
    } else {
        let s = (1.0 + o[2][2] - o[0][0] - o[1][1]).sqrt() * 2.0;
        w = (o[1][0] - o[0][1]) / s;
        x = (o[0][2] + o[2][0]) / s;
        y = (o[1][2] + o[2][1]) / s;
        z = 0.25 * s;
    }
    CMat::from_rows(&[[c(w, -z), c(-y, -x)], [c(y, -x), c(w, z)]])
}

/// Local unitary on Bob's qubit that maximises the standard-protocol fidelity.
pub fn optimal_bob_rotation(t: &CorrelationMatrix) -> Result<CMat> {
    let d = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
    let m = real_matmul(&d, &t.0);
    // SVD m = W S Vᵀ through the eigenvectors of mᵀm
    let e = herm_eig(&CMat::from_real_rows(&real_matmul(&transpose3(&m), &m)))?;
    let mut v = [[0.0; 3]; 3];
    let mut wcols = Vec::new();
    for (j, k) in (0..3).rev().enumerate() {
        let col = e.vector(k);
        let re: Vec<f64> = col.iter().map(|z| z.re).collect();
        let nrm = re.iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..3 {
            v[i][j] = re[i] / nrm;
        }
    }
    let v = complete_basis((0..3).map(|j| [v[0][j], v[1][j], v[2][j]]).take(2).collect());
    for j in 0..2 {
        let mv: Vec<f64> = (0..3).map(|i| (0..3).map(|k| m[i][k] * v[k][j]).sum()).collect();
        let n = mv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            wcols.push([mv[0] / n, mv[1] / n, mv[2] / n]);
        } else {
            break;
        }
    }
    let w = complete_basis(wcols);
    // maximise Tr(m R) over R ∈ SO(3): R = V diag(1,1,±1) Wᵀ
    let sgn = det3(&real_matmul(&v, &transpose3(&w))).signum();
    let r = real_matmul(&real_matmul(&v, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, sgn]]), &transpose3(&w));
    Ok(su2_from_rotation(&transpose3(&r)))
}

/// Average output fidelity of standard teleportation for one input, averaged
/// over Bell-measurement outcomes.
fn teleport_once(resource: &CMat, psi: &[C64]) -> f64 {
    let corrections = [CMat::identity(2), pauli::z(), pauli::x(), pauli::y()];
    let full = CMat::outer(psi).kron(resource);
    let mut f = 0.0;
    for (b, corr) in bell_basis().iter().zip(&corrections) {
        // Bob's unnormalised state: <b|_{aA} ρ |b>_{aA}
        let mut bob = CMat::zeros(2, 2);
        for r in 0..2 {
            for s in 0..2 {
                let mut acc = ZERO;
                for i in 0..4 {
                    for j in 0..4 {
                        acc += b[i].conj() * full[(2 * i + r, 2 * j + s)] * b[j];
                    }
                }
                bob[(r, s)] = acc;
            }
        }
        f += corr.sandwich(&bob).expectation(psi).re;
    }
    f
}

/// Monte Carlo over Haar-random inputs; `deviation` is the standard deviation
/// of the per-input fidelity.
pub fn mc_teleport_stats(rho: &DensityMat, samples: usize, rng: &mut Rng) -> Result<TeleportStats> {
    if samples == 0 {
        return Err(Error::Invalid("samples must be at least 1".into()));
    }
    let u = optimal_bob_rotation(&correlation_matrix(rho)?)?;
    let local = CMat::identity(2).kron(&u);
    let resource = local.sandwich(rho.matrix());
    let fs: Vec<f64> = (0..samples).map(|_| teleport_once(&resource, &haar_state(1, rng))).collect();
    let n = samples as f64;
    let mean = fs.iter().sum::<f64>() / n;
    let var = fs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
    Ok(TeleportStats { mean_fidelity: mean, deviation: var.sqrt(), samples })
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(num / den)
}

/// `F̄_max(ρ_NS) / F̄_max(ρ_Bell)`.
pub fn ratio_zeta(ns_rho_t: &DensityMat, bell_rho_t: &DensityMat) -> Result<f64> {
    ratio(qfi_cmatrix(ns_rho_t)?.fbar_max, qfi_cmatrix(bell_rho_t)?.fbar_max)
}

/// `S_max(ρ_NS) / S_max(ρ_Bell)`.
pub fn ratio_eta(ns_rho_t: &DensityMat, bell_rho_t: &DensityMat) -> Result<f64> {
    ratio(chsh_smax(ns_rho_t)?, chsh_smax(bell_rho_t)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Fidelity,
    Concurrence,
    Smax,
    FbarMax,
    TeleFid,
    FidDev,
    Zeta,
    Eta,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::Fidelity,
        Metric::Concurrence,
        Metric::Smax,
        Metric::FbarMax,
        Metric::TeleFid,
        Metric::FidDev,
        Metric::Zeta,
        Metric::Eta,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Fidelity => "fidelity",
            Metric::Concurrence => "concurrence",
            Metric::Smax => "smax",
            Metric::FbarMax => "fbar_max",
            Metric::TeleFid => "tele_fid",
            Metric::FidDev => "fid_dev",
            Metric::Zeta => "zeta",
            Metric::Eta => "eta",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown metric '{s}'")))
    }
}

trait ExpectationBetween {
    fn expectation_between(&self, a: &[C64], b: &[C64]) -> C64;
}

impl ExpectationBetween for CMat {
    /// `<a|M|b>`.
    fn expectation_between(&self, a: &[C64], b: &[C64]) -> C64 {
        let mb = self.apply(b);
        a.iter().zip(&mb).map(|(x, y)| x.conj() * y).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwf::StateLabel;
    use crate::noise::{kraus_ad, AdParams, evolve_two_qubit};
    use crate::qmath::{haar_unitary, kron_vec};

    fn pure(l: StateLabel) -> DensityMat {
        DensityMat::from_pure(&l.vector()).unwrap()
    }

    fn random_mixed(rng: &mut Rng) -> DensityMat {
        let g = haar_unitary(4, rng);
        let mut w: Vec<f64> = (0..4).map(|_| rng.uniform().powi(3)).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        DensityMat::from_matrix(g.sandwich(&CMat::real_diag(&w)).hermitian_part()).unwrap()
    }

    #[test]
    fn fidelity_anchors_and_pure_shortcut() {
        let a = pure(StateLabel::Ns1);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
        let z0 = DensityMat::from_pure(&[c(1.0, 0.0), ZERO]).unwrap();
        let z1 = DensityMat::from_pure(&[ZERO, c(1.0, 0.0)]).unwrap();
        assert!(fidelity(&z0, &z1).unwrap() < 1e-9);
        let mut rng = Rng::new(4);
        for _ in 0..20 {
            let v = haar_state(2, &mut rng);
            let s = random_mixed(&mut rng);
            let r = DensityMat::from_pure(&v).unwrap();
            let f = fidelity(&r, &s).unwrap();
            assert!((f - fidelity_pure(&v, &s)).abs() < 1e-8);
            assert!((f - fidelity(&s, &r).unwrap()).abs() < 1e-8);
        }
        assert!(fidelity(&z0, &a).is_err());
    }

    #[test]
    fn fidelity_is_monotone_under_ad() {
        let mut rng = Rng::new(5);
        let k = kraus_ad(3.0, &AdParams::new(0.01, 5.0).unwrap()).unwrap();
        for _ in 0..10 {
            let (r, s) = (random_mixed(&mut rng), random_mixed(&mut rng));
            let before = fidelity(&r, &s).unwrap();
            let after = fidelity(&evolve_two_qubit(&r, &k).unwrap(), &evolve_two_qubit(&s, &k).unwrap()).unwrap();
            assert!(after >= before - 1e-8);
        }
    }

    #[test]
    fn concurrence_anchors_and_pure_formula() {
        assert!(concurrence(&DensityMat::from_pure(&[c(1.0, 0.0), ZERO, ZERO, ZERO]).unwrap()).unwrap() < 1e-9);
        assert!((concurrence(&pure(StateLabel::PhiPlus)).unwrap() - 1.0).abs() < 1e-9);
        assert!((concurrence(&pure(StateLabel::Ns3pp)).unwrap() - 1.0).abs() < 1e-9);
        let mut rng = Rng::new(6);
        for _ in 0..50 {
            let v = haar_state(2, &mut rng);
            let oracle = 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
            let rho = DensityMat::from_pure(&v).unwrap();
            assert!((concurrence(&rho).unwrap() - oracle).abs() < 1e-9);
            let smax = chsh_smax(&rho).unwrap();
            assert!((smax - 2.0 * (1.0 + oracle * oracle).sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn correlation_and_chsh_anchors() {
        let t = correlation_matrix(&pure(StateLabel::PhiPlus)).unwrap();
        assert_eq!(t.0.map(|r| r.map(|x| x.round())), [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
        let t = correlation_matrix(&pure(StateLabel::PsiMinus)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((t.get(i, j) - want).abs() < 1e-12);
            }
        }
        let mixed = DensityMat::maximally_mixed(2);
        assert!(correlation_matrix(&mixed).unwrap().0.iter().flatten().all(|x| x.abs() < 1e-15));
        assert!(chsh_smax(&mixed).unwrap() < 1e-12);
        for l in [StateLabel::PhiPlus, StateLabel::PhiMinus, StateLabel::PsiPlus, StateLabel::PsiMinus] {
            assert!((chsh_smax(&pure(l)).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        }
        let zero = DensityMat::from_pure(&[c(1.0, 0.0), ZERO, ZERO, ZERO]).unwrap();
        assert!((chsh_smax(&zero).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn qfi_anchors() {
        let r = qfi_cmatrix(&pure(StateLabel::PhiPlus)).unwrap();
        assert!((r.fbar_max - 2.0).abs() < 1e-6);
        // Heisenberg oracle: pure-state QFI is 4 Var(J_z) = N² for |φ+> along z
        assert!((qfi(&pure(StateLabel::PhiPlus), [0.0, 0.0, 1.0]).unwrap() - 4.0).abs() < 1e-9);
        let r = qfi_cmatrix(&DensityMat::maximally_mixed(2)).unwrap();
        assert!(r.cmatrix.iter().flatten().all(|x| x.abs() < 1e-12));
        for i in 0..3 {
            for j in 0..3 {
                let cm = qfi_cmatrix(&pure(StateLabel::Ns2)).unwrap().cmatrix;
                assert!((cm[i][j] - cm[j][i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn qfi_quadratic_form_matches_sum() {
        let mut rng = Rng::new(7);
        for _ in 0..100 {
            let rho = random_mixed(&mut rng);
            let mut n = [rng.normal(), rng.normal(), rng.normal()];
            let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            n.iter_mut().for_each(|x| *x /= nn);
            let cm = qfi_cmatrix(&rho).unwrap().cmatrix;
            let quad: f64 = (0..3).flat_map(|k| (0..3).map(move |l| (k, l))).map(|(k, l)| n[k] * cm[k][l] * n[l]).sum();
            assert!((qfi(&rho, n).unwrap() - quad).abs() < 1e-8);
        }
        assert!(matches!(qfi(&pure(StateLabel::Ns1), [1.0, 1.0, 0.0]), Err(Error::NotUnitDirection(_))));
    }

    #[test]
    fn teleportation_anchors() {
        assert!((teleportation_fidelity(&pure(StateLabel::PhiPlus)).unwrap() - 1.0).abs() < 1e-12);
        assert!((teleportation_fidelity(&DensityMat::maximally_mixed(2)).unwrap() - 0.5).abs() < 1e-12);
        let zero = DensityMat::from_pure(&[c(1.0, 0.0), ZERO, ZERO, ZERO]).unwrap();
        assert!((teleportation_fidelity(&zero).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let mut rng = Rng::new(8);
        for l in [StateLabel::PhiPlus, StateLabel::PsiMinus, StateLabel::Ns3pp] {
            let s = mc_teleport_stats(&pure(l), 200, &mut rng).unwrap();
            assert!((s.mean_fidelity - 1.0).abs() < 1e-9, "{l}");
            assert!(s.deviation < 1e-7);
        }
        let s = mc_teleport_stats(&DensityMat::maximally_mixed(2), 20_000, &mut rng).unwrap();
        assert!((s.mean_fidelity - 0.5).abs() < 1e-9);
    }

    #[test]
    fn teleportation_closed_form_matches_monte_carlo() {
        let mut rng = Rng::new(9);
        for k in 0..20 {
            let rho = if k % 2 == 0 {
                random_mixed(&mut rng)
            } else {
                let v = kron_vec(&haar_state(1, &mut rng), &haar_state(1, &mut rng));
                DensityMat::from_pure(&v).unwrap()
            };
            let f = teleportation_fidelity(&rho).unwrap();
            let s = mc_teleport_stats(&rho, 4000, &mut rng).unwrap();
            let se = s.deviation / (s.samples as f64).sqrt();
            assert!((s.mean_fidelity - f).abs() <= 3.0 * se + 1e-9, "k={k}: {f} vs {} ± {se}", s.mean_fidelity);
        }
    }

    #[test]
    fn ratios() {
        let phi = pure(StateLabel::PhiPlus);
        assert!((ratio_zeta(&phi, &phi).unwrap() - 1.0).abs() < 1e-12);
        assert!((ratio_eta(&phi, &phi).unwrap() - 1.0).abs() < 1e-12);
        let ns2 = pure(StateLabel::Ns2);
        let want = qfi_cmatrix(&ns2).unwrap().fbar_max / 2.0;
        assert!((ratio_zeta(&ns2, &phi).unwrap() - want).abs() < 1e-9);
        assert!(matches!(ratio_zeta(&phi, &DensityMat::maximally_mixed(2)), Err(Error::DegenerateDenominator(_))));
        assert_eq!("fbar_max".parse::<Metric>().unwrap(), Metric::FbarMax);
        assert!("nope".parse::<Metric>().is_err());
    }
}
