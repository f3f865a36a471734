//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use negstates::dwf::{build_mubs, build_striations, census_spectra, states::a11_fixture, PhasePoint, StateLabel};
use negstates::metrics::{chsh_smax, concurrence, fidelity_pure, mc_teleport_stats, qfi_cmatrix, teleportation_fidelity};
use negstates::noise::{ad_lambda, evolve_two_qubit, kraus_ad, kraus_rtn, rtn_lambda, AdParams, ChannelParams, RtnParams};
use negstates::protocols::{caption_params, protected_evolution, teleport_branches, teleport_trials, CaptionSet};
use negstates::qmath::{c, haar_state, haar_unitary, herm_eig, inner, normalized, CMat, Rng, C64};
use negstates::sim::{run_circuit, shor_run, sweep_depolarizing, DensityMat, Pauli, ShorErrors, StateVec};
use negstates::synth::{fixtures::printed_unitary, kak_decompose, schmidt_rank, unitary_from_state, SCHMIDT_TOL};
use negstates::tomo::{tomography_pipeline, DEFAULT_SHOTS};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn criterion_1() -> Verdict {
    let expected = [-0.8968, -0.1420, 0.2787, 1.7601];
    let a = a11_fixture();
    let start = Instant::now();
    let vals = herm_eig(&a).unwrap().values;
    let el = start.elapsed();
    let worst = vals.iter().zip(expected).map(|(v, e)| (v - e).abs()).fold(0.0, f64::max);
    verdict(
        worst <= 1e-3 && within(el, Duration::from_millis(1)),
        format!("spectrum {vals:.4?}, max deviation {worst:.2e}, {el:?}"),
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mubs = build_mubs(4).unwrap();
    let st = build_striations(4).unwrap();
    let counts = census_spectra(&mubs, &st, PhasePoint::new(4, 1, 1).unwrap()).unwrap();
    let el = start.elapsed();
    let total: usize = counts.values().sum();
    let refs: [(&[f64], usize); 3] = [
        (&[-0.5, -0.5, 0.1339, 1.866], 320),
        (&[-0.8661, -0.5, 0.8661, 1.5], 320),
        (&[-0.8968, -0.1420, 0.2787, 1.7601], 384),
    ];
    let matched = refs.iter().all(|(spec, n)| counts.iter().any(|(k, m)| m == n && k.matches(spec, 2e-4)));
    let listing: Vec<String> = counts.iter().map(|(k, n)| format!("{k}x{n}")).collect();
    verdict(
        total == 1024 && counts.len() == 3 && matched && within(el, Duration::from_secs(5)),
        format!("{} nets, buckets {}, {el:?}", total, listing.join(" ")),
    )
}

/// Largest entry deviation after aligning each column's global phase.
fn aligned_diff(a: &CMat, b: &CMat) -> f64 {
    (0..a.cols())
        .map(|j| {
            let (x, y) = (a.col(j), b.col(j));
            let ov = inner(&x, &y);
            let ph = if ov.norm() > 1e-12 { ov / ov.norm() } else { c(1.0, 0.0) };
            x.iter().zip(&y).map(|(p, q)| (p * ph - q).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Operator-norm distance to the nearest unitary: max |σᵢ − 1|.
fn distance_to_unitary(u: &CMat) -> f64 {
    let gram = u.adjoint().matmul(u).hermitian_part();
    herm_eig(&gram).unwrap().values.iter().map(|e| (e.max(0.0).sqrt() - 1.0).abs()).fold(0.0, f64::max)
}

fn criterion_3() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in StateLabel::NEGATIVE {
        let printed = printed_unitary(l).unwrap();
        let unit = distance_to_unitary(&printed);
        let regen = unitary_from_state(&normalized(&printed.col(0))).unwrap();
        let d = aligned_diff(&regen, &printed);
        let good = unit <= 1e-6 && d <= 2e-3;
        ok &= good;
        parts.push(format!("{l}: unitarity {unit:.1e} regen {d:.1e}{}", if good { "" } else { " (mismatch)" }));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut worst = (0.0f64, 1.0f64);
    for l in StateLabel::NEGATIVE.into_iter().chain([StateLabel::PhiPlus]) {
        let v = l.vector();
        let rep = kak_decompose(&unitary_from_state(&v).unwrap()).unwrap();
        let out = run_circuit(&rep.circuit, &StateVec::zero(2)).unwrap();
        // squared overlap computed directly from the amplitudes
        let f = inner(&v, out.amplitudes()).norm_sqr();
        let rank = schmidt_rank(out.amplitudes(), SCHMIDT_TOL);
        ok &= rep.delta <= 1e-6 && f >= 1.0 - 1e-6 && rank == 2;
        worst = (worst.0.max(rep.delta), worst.1.min(f));
    }
    let el = start.elapsed();
    verdict(
        ok && within(el, Duration::from_secs(1)),
        format!("max delta {:.2e}, min fidelity {:.12}, Schmidt rank 2, {el:?}", worst.0, worst.1),
    )
}

/// y'' + a y' + k y = 0, y(0) = 1, y'(0) = 0, stepped with a 30-term Taylor
/// expansion of the propagator.
fn ode_oracle(a: f64, k: f64, t: f64) -> f64 {
    let steps = ((t / 0.05).ceil() as usize).max(1);
    let h = t / steps as f64;
    let m = [[0.0, 1.0], [-k, -a]];
    let mut e = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = e;
    for n in 1..30 {
        let mut next = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = (term[i][0] * m[0][j] + term[i][1] * m[1][j]) * h / n as f64;
            }
        }
        term = next;
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] += term[i][j];
            }
        }
    }
    let mut y = [1.0, 0.0];
    for _ in 0..steps {
        y = [e[0][0] * y[0] + e[0][1] * y[1], e[1][0] * y[0] + e[1][1] * y[1]];
    }
    y[0]
}

fn criterion_5() -> Verdict {
    let rtn = RtnParams::new(0.05, 0.001).unwrap();
    let ad = AdParams::new(0.01, 5.0).unwrap();
    let exact0 = rtn_lambda(0.0, &rtn).unwrap() == 1.0 && ad_lambda(0.0, &ad).unwrap() == 0.0;

    let mut rng = Rng::new(55);
    let mut worst_kraus = 0.0f64;
    for _ in 0..1000 {
        let t = 200.0 * rng.uniform();
        let r = RtnParams::new(1e-3 + rng.uniform(), 1e-4 + 10.0 * rng.uniform()).unwrap();
        let a = AdParams::new(1e-3 + rng.uniform(), 1e-3 + 10.0 * rng.uniform()).unwrap();
        worst_kraus = worst_kraus.max(kraus_rtn(t, &r).unwrap().completeness_deviation());
        worst_kraus = worst_kraus.max(kraus_ad(t, &a).unwrap().completeness_deviation());
    }

    let mut worst_oracle = 0.0f64;
    for i in 0..50 {
        let t = 2.0 * i as f64;
        let lr = ode_oracle(2.0 * rtn.gamma, 4.0 * rtn.b * rtn.b, t);
        let y = ode_oracle(ad.g, ad.g * ad.gamma / 2.0, t);
        worst_oracle = worst_oracle.max((rtn_lambda(t, &rtn).unwrap() - lr).abs());
        worst_oracle = worst_oracle.max((ad_lambda(t, &ad).unwrap() - (1.0 - y * y)).abs());
    }
    verdict(
        exact0 && worst_kraus <= 1e-10 && worst_oracle <= 1e-12,
        format!("exact at t=0: {exact0}, completeness {worst_kraus:.1e}, oracle {worst_oracle:.1e}"),
    )
}

fn bell(label: StateLabel) -> DensityMat {
    DensityMat::from_pure(&label.vector()).unwrap()
}

/// `F̄_max` of a pure two-qubit state: largest eigenvalue of the covariance
/// matrix `4 Re(<J_k J_l> - <J_k><J_l>)` of the collective spin, halved.
fn pure_fbar_max(v: &[C64]) -> f64 {
    let id = CMat::identity(2);
    let s = [
        CMat::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]),
        CMat::from_rows(&[[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        CMat::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]),
    ];
    let j: Vec<CMat> = s.iter().map(|p| (&p.kron(&id) + &id.kron(p)).scale_re(0.5)).collect();
    let mut cov = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            let jkl = j[k].matmul(&j[l]).expectation(v);
            cov[k][l] = 4.0 * (jkl.re - j[k].expectation(v).re * j[l].expectation(v).re);
        }
    }
    let sym: Vec<[f64; 3]> = (0..3).map(|k| std::array::from_fn(|l| 0.5 * (cov[k][l] + cov[l][k]))).collect();
    herm_eig(&CMat::from_real_rows(&sym)).unwrap().values[2] / 2.0
}

fn random_mixed(rng: &mut Rng) -> DensityMat {
    let u = haar_unitary(4, rng);
    let w: Vec<f64> = (0..4).map(|_| rng.uniform().powi(3)).collect();
    let s: f64 = w.iter().sum();
    let d = CMat::real_diag(&w.iter().map(|x| x / s).collect::<Vec<_>>());
    DensityMat::from_matrix(u.matmul(&d).matmul(&u.adjoint()).hermitian_part()).unwrap()
}

fn criterion_6() -> Verdict {
    let c_phi = concurrence(&bell(StateLabel::PhiPlus)).unwrap();
    let c_ns = concurrence(&bell(StateLabel::Ns3pp)).unwrap();
    let conc_ok = (c_phi - 1.0).abs() <= 1e-9 && (c_ns - 1.0).abs() <= 1e-9;
    let tsirelson = 2.0 * 2f64.sqrt();
    let smax_dev = [StateLabel::PhiPlus, StateLabel::PhiMinus, StateLabel::PsiPlus, StateLabel::PsiMinus]
        .iter()
        .map(|&l| (chsh_smax(&bell(l)).unwrap() - tsirelson).abs())
        .fold(0.0, f64::max);
    let oracle = pure_fbar_max(&StateLabel::PhiPlus.vector());
    let fbar = qfi_cmatrix(&bell(StateLabel::PhiPlus)).unwrap().fbar_max;
    let fbar_ok = (fbar - 2.0).abs() <= 1e-6 && (oracle - 2.0).abs() <= 1e-6;

    let mut rng = Rng::new(6);
    let mut worst_z = 0.0f64;
    for i in 0..20 {
        let rho = random_mixed(&mut rng);
        let closed = teleportation_fidelity(&rho).unwrap();
        let mc = mc_teleport_stats(&rho, 100_000, &mut rng.substream(i)).unwrap();
        let sigma = (mc.deviation / (mc.samples as f64).sqrt()).max(1e-12);
        worst_z = worst_z.max((mc.mean_fidelity - closed).abs() / sigma);
    }
    verdict(
        conc_ok && smax_dev <= 1e-9 && fbar_ok && worst_z <= 3.0,
        format!(
            "C(phi+)={c_phi:.12} C(NS3pp)={c_ns:.12}, Smax dev {smax_dev:.1e}, Fbar_max {fbar:.9} (oracle {oracle:.9}), MC worst {worst_z:.2} sigma"
        ),
    )
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let ch = ChannelParams::Ad(AdParams::new(0.01, 5.0).unwrap());
    let times: Vec<f64> = (0..400).map(|i| 100.0 * i as f64 / 399.0).collect();
    let (ns2, phi) = (StateLabel::Ns2, StateLabel::PhiPlus);
    let (r_ns2, r_phi) = (bell(ns2), bell(phi));
    let wm = caption_params(CaptionSet::Chsh, ns2).unwrap();
    let (mut fid_wins, mut prot_viol, mut plain_viol) = (0, 0, 0);
    for &t in &times {
        let k = ch.kraus(t).unwrap();
        let a = evolve_two_qubit(&r_ns2, &k).unwrap();
        let b = evolve_two_qubit(&r_phi, &k).unwrap();
        if fidelity_pure(&ns2.vector(), &a) >= fidelity_pure(&phi.vector(), &b) {
            fid_wins += 1;
        }
        if chsh_smax(&protected_evolution(&r_ns2, &k, &wm).unwrap().rho_f).unwrap() > 2.0 {
            prot_viol += 1;
        }
        if chsh_smax(&b).unwrap() > 2.0 {
            plain_viol += 1;
        }
    }
    let el = start.elapsed();
    let n = times.len() as f64;
    let frac = fid_wins as f64 / n;
    verdict(
        frac >= 0.9 && prot_viol > plain_viol && within(el, Duration::from_secs(30)),
        format!(
            "F(NS2) >= F(phi+) at {:.1}%, Smax>2: protected NS2 {:.1}% vs phi+ {:.1}%, {el:?}",
            100.0 * frac,
            100.0 * prot_viol as f64 / n,
            100.0 * plain_viol as f64 / n
        ),
    )
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut rng = Rng::new(8);
    let mut roundtrip = 0.0f64;
    let mut single_ok = 0;
    for l in StateLabel::ALL {
        let v = l.vector();
        roundtrip = roundtrip.max((shor_run(&v, &ShorErrors::default()).unwrap().fidelity - 1.0).abs());
    }
    let input = haar_state(2, &mut rng);
    for q in 0..18 {
        for p in Pauli::ALL {
            let e = ShorErrors { after_encoding: vec![(q, p)], during_correction: None };
            if (shor_run(&input, &e).unwrap().fidelity - 1.0).abs() <= 1e-9 {
                single_ok += 1;
            }
        }
    }
    let labels = [StateLabel::Ns1, StateLabel::Ns2, StateLabel::Ns3, StateLabel::PhiPlus];
    let states: Vec<(String, Vec<C64>)> = labels.iter().map(|l| (l.as_str().to_string(), l.vector())).collect();
    let ps = [0.01, 0.02, 0.03, 0.04, 0.05];
    let rows = sweep_depolarizing(&states, &ps, 2000, 2024).unwrap();
    let mut all_better = true;
    let mut totals = Vec::new();
    for (name, _) in &states {
        let mine: Vec<_> = rows.iter().filter(|r| &r.state == name).collect();
        let mut sum = 0.0;
        for &p in &ps {
            let get = |corr| mine.iter().find(|r| r.p == p && r.corrected == corr).unwrap().mean_infidelity;
            all_better &= get(true) < get(false);
            sum += get(true);
        }
        totals.push((name.clone(), sum));
    }
    let best = totals.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0.clone();
    let el = start.elapsed();
    let summary: Vec<String> = totals.iter().map(|(n, s)| format!("{n}={s:.4}")).collect();
    verdict(
        roundtrip <= 1e-9 && single_ok == 54 && all_better && best == "NS2" && within(el, Duration::from_secs(300)),
        format!(
            "round trip {roundtrip:.1e}, single Paulis corrected {single_ok}/54 (27 per block), corrected < bare: {all_better}, summed corrected 1-F {}, {el:?}",
            summary.join(" ")
        ),
    )
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut min_clean = 1.0f64;
    let mut min_gain = f64::INFINITY;
    let mut min_eig = f64::INFINITY;
    for (i, l) in StateLabel::NEGATIVE.into_iter().chain([StateLabel::PhiPlus]).enumerate() {
        let v = l.vector();
        let clean = tomography_pipeline(l.as_str(), &v, DEFAULT_SHOTS, 0.0, false, 100 + i as u64).unwrap();
        let noisy = tomography_pipeline(l.as_str(), &v, DEFAULT_SHOTS, 0.05, true, 200 + i as u64).unwrap();
        let m = noisy.mitigated.as_ref().unwrap();
        let f_clean = clean.raw.fidelity_vs_target.unwrap();
        let gain = m.fidelity_vs_target.unwrap() - noisy.raw.fidelity_vs_target.unwrap();
        for r in [&clean.raw, &noisy.raw, m] {
            min_eig = min_eig.min(r.min_eigenvalue);
            ok &= r.is_psd();
        }
        ok &= f_clean >= 0.99 && gain >= 0.0;
        min_clean = min_clean.min(f_clean);
        min_gain = min_gain.min(gain);
    }
    let el = start.elapsed();
    verdict(
        ok && within(el, Duration::from_secs(60)),
        format!("min noiseless fidelity {min_clean:.4}, min mitigation gain {min_gain:+.4}, min eigenvalue {min_eig:.1e}, {el:?}"),
    )
}

fn criterion_10() -> Verdict {
    let resource = StateLabel::Ns3pp.vector();
    let mut rng = Rng::new(10);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let psi = haar_state(1, &mut rng);
        for (_, f) in teleport_branches(&psi, &resource).unwrap() {
            worst = worst.max(1.0 - f);
        }
    }
    let rep = teleport_trials(&resource, 100_000, &mut Rng::new(7)).unwrap();
    let spread = rep.outcome_freqs.iter().map(|f| (f - 0.25).abs()).fold(0.0, f64::max);
    verdict(
        worst <= 1e-9 && spread <= 0.01,
        format!("worst branch infidelity {worst:.1e}, frequencies {:?}", rep.outcome_freqs),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("phase-point spectrum", criterion_1),
        ("quantum-net census", criterion_2),
        ("tabulated preparation unitaries", criterion_3),
        ("gate synthesis", criterion_4),
        ("noise closed forms", criterion_5),
        ("metric anchors", criterion_6),
        ("figure orderings", criterion_7),
        ("Shor code", criterion_8),
        ("tomography", criterion_9),
        ("teleportation with NS3pp", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        println!("criterion {:>2} {} {name}: {}", i + 1, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        if !v.ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
