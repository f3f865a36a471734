//! Single-qubit noise channels: depolarizing, non-Markovian random telegraph
//! noise (RTN) and non-Markovian amplitude damping (AD).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, pauli, CMat, C64, ZERO};
use crate::sim::{apply_kraus, completeness_deviation, DensityMat};

/// Below this magnitude of ζ or l the removable singularity is expanded.
const SERIES_CUTOFF: f64 = 1e-6;
const IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RtnParams {
    pub b: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdParams {
    pub g: f64,
    pub gamma: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: v })
    }
}

impl RtnParams {
    pub fn new(b: f64, gamma: f64) -> Result<Self> {
        positive("b", b)?;
        positive("gamma", gamma)?;
        Ok(Self { b, gamma })
    }

    /// Markovian iff (4bτ)² < 1 with τ = 1/(2γ).
    pub fn is_markovian(&self) -> bool {
        let tau = 1.0 / (2.0 * self.gamma);
        (4.0 * self.b * tau).powi(2) < 1.0
    }
}

impl AdParams {
    pub fn new(g: f64, gamma: f64) -> Result<Self> {
        positive("g", g)?;
        positive("gamma", gamma)?;
        Ok(Self { g, gamma })
    }

    /// Markovian iff 2γ < g.
    pub fn is_markovian(&self) -> bool {
        2.0 * self.gamma < self.g
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::NegativeTime(t))
    } else {
        Ok(())
    }
}

fn real_part(z: Complex64) -> f64 {
    debug_assert!(z.im.abs() < IMAG_TOL * z.re.abs().max(1.0), "imaginary residue {}", z.im);
    z.re
}

/// sin(z x)/z, continuous through z = 0.
fn sinc_scaled(z: Complex64, x: f64) -> Complex64 {
    if z.norm() < SERIES_CUTOFF {
        let zx2 = z * z * x * x;
        c(x, 0.0) * (Complex64::new(1.0, 0.0) - zx2 / 6.0 + zx2 * zx2 / 120.0)
    } else {
        (z * x).sin() / z
    }
}

/// sinh(z x)/z, continuous through z = 0.
fn sinhc_scaled(z: Complex64, x: f64) -> Complex64 {
    if z.norm() < SERIES_CUTOFF {
        let zx2 = z * z * x * x;
        c(x, 0.0) * (Complex64::new(1.0, 0.0) + zx2 / 6.0 + zx2 * zx2 / 120.0)
    } else {
        (z * x).sinh() / z
    }
}

/// Λ(t) = e^{−γt}[cos(ζγt) + sin(ζγt)/ζ], ζ = √((2b/γ)² − 1).
pub fn rtn_lambda(t: f64, p: &RtnParams) -> Result<f64> {
    check_time(t)?;
    let disc = (2.0 * p.b / p.gamma).powi(2) - 1.0;
    let zeta = c(disc, 0.0).sqrt();
    let x = p.gamma * t;
    if disc < 0.0 && zeta.norm() >= SERIES_CUTOFF {
        // overdamped: ζ = iκ, written as decaying exponentials to avoid cosh overflow
        let k = (-disc).sqrt();
        return Ok(0.5 * (1.0 + 1.0 / k) * (-(1.0 - k) * x).exp() + 0.5 * (1.0 - 1.0 / k) * (-(1.0 + k) * x).exp());
    }
    let v = (zeta * x).cos() + sinc_scaled(zeta, x);
    Ok((-x).exp() * real_part(v))
}

/// λ(t) = 1 − e^{−gt}(g/l·sinh(lt/2) + cosh(lt/2))², l = √(g(g − 2γ)).
pub fn ad_lambda(t: f64, p: &AdParams) -> Result<f64> {
    check_time(t)?;
    let disc = p.g * (p.g - 2.0 * p.gamma);
    let l = c(disc, 0.0).sqrt();
    // e^{-gt/2}·(g/l·sinh(lt/2) + cosh(lt/2))
    let y = if disc > 0.0 && l.norm() >= SERIES_CUTOFF {
        let (l, r) = (disc.sqrt(), p.g / disc.sqrt());
        0.5 * (1.0 + r) * (-(p.g - l) * t / 2.0).exp() + 0.5 * (1.0 - r) * (-(p.g + l) * t / 2.0).exp()
    } else {
        (-p.g * t / 2.0).exp() * real_part(sinhc_scaled(l, t / 2.0) * p.g + (l * (t / 2.0)).cosh())
    };
    Ok((1.0 - y * y).clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrausSet {
    pub operators: Vec<CMat>,
    pub time: f64,
}

impl KrausSet {
    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(&self.operators)
    }
}

pub fn kraus_rtn(t: f64, p: &RtnParams) -> Result<KrausSet> {
    let l = rtn_lambda(t, p)?;
    let k0 = CMat::identity(2).scale_re(((1.0 + l) / 2.0).max(0.0).sqrt());
    let k1 = pauli::z().scale_re(((1.0 - l) / 2.0).max(0.0).sqrt());
    Ok(KrausSet { operators: vec![k0, k1], time: t })
}

pub fn kraus_ad(t: f64, p: &AdParams) -> Result<KrausSet> {
    let l = ad_lambda(t, p)?;
    let k0 = CMat::real_diag(&[1.0, (1.0 - l).sqrt()]);
    let k1 = CMat::from_rows(&[[ZERO, c(l.sqrt(), 0.0)], [ZERO, ZERO]]);
    Ok(KrausSet { operators: vec![k0, k1], time: t })
}

/// ρ ↦ (1−p)ρ + p·I/2 as four Kraus operators.
pub fn kraus_depolarizing(p: f64) -> Result<KrausSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    let mut ops = vec![CMat::identity(2).scale_re((1.0 - 0.75 * p).sqrt())];
    ops.extend(pauli::xyz().iter().map(|s| s.scale_re((p / 4.0).sqrt())));
    Ok(KrausSet { operators: ops, time: 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "lowercase")]
pub enum ChannelParams {
    Depolarizing { p: f64 },
    Rtn(RtnParams),
    Ad(AdParams),
}

impl ChannelParams {
    pub fn kraus(&self, t: f64) -> Result<KrausSet> {
        match self {
            ChannelParams::Depolarizing { p } => kraus_depolarizing(*p),
            ChannelParams::Rtn(r) => kraus_rtn(t, r),
            ChannelParams::Ad(a) => kraus_ad(t, a),
        }
    }

    pub fn is_markovian(&self) -> bool {
        match self {
            ChannelParams::Depolarizing { .. } => true,
            ChannelParams::Rtn(r) => r.is_markovian(),
            ChannelParams::Ad(a) => a.is_markovian(),
        }
    }
}

/// ρ(t) = Σ_ij (K_i⊗K_j) ρ₀ (K_i⊗K_j)†.
pub fn evolve_two_qubit(rho0: &DensityMat, kraus: &KrausSet) -> Result<DensityMat> {
    if rho0.nqubits() != 2 {
        return Err(Error::WidthMismatch(2, rho0.nqubits()));
    }
    let dev = kraus.completeness_deviation();
    if dev > 1e-10 {
        return Err(Error::NotCptp(dev));
    }
    let ops: Vec<CMat> = kraus.operators.iter().flat_map(|a| kraus.operators.iter().map(move |b| a.kron(b))).collect();
    apply_kraus(rho0, &ops, &[0, 1])
}

/// Evolve a pure two-qubit state under `channel` at every time in `times`.
pub fn evolve_pure(v: &[C64], channel: &ChannelParams, times: &[f64]) -> Result<Vec<DensityMat>> {
    let rho0 = DensityMat::from_pure(v)?;
    times.iter().map(|&t| evolve_two_qubit(&rho0, &channel.kraus(t)?)).collect()
}
