//! Reference two-qubit states: the five negative-Wigner states and the four
//! Bell states, plus the literal phase-point operator whose spectrum is
//! (-0.8968, -0.1420, 0.2787, 1.7601).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::qmath::{c, normalized, CMat, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateLabel {
    Ns1,
    Ns2,
    Ns3,
    Ns3p,
    Ns3pp,
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl StateLabel {
    pub const ALL: [StateLabel; 9] = [
        StateLabel::Ns1,
        StateLabel::Ns2,
        StateLabel::Ns3,
        StateLabel::Ns3p,
        StateLabel::Ns3pp,
        StateLabel::PhiPlus,
        StateLabel::PhiMinus,
        StateLabel::PsiPlus,
        StateLabel::PsiMinus,
    ];

    pub const NEGATIVE: [StateLabel; 5] =
        [StateLabel::Ns1, StateLabel::Ns2, StateLabel::Ns3, StateLabel::Ns3p, StateLabel::Ns3pp];

    pub fn as_str(&self) -> &'static str {
        match self {
            StateLabel::Ns1 => "NS1",
            StateLabel::Ns2 => "NS2",
            StateLabel::Ns3 => "NS3",
            StateLabel::Ns3p => "NS3p",
            StateLabel::Ns3pp => "NS3pp",
            StateLabel::PhiPlus => "bell_phip",
            StateLabel::PhiMinus => "bell_phim",
            StateLabel::PsiPlus => "bell_psip",
            StateLabel::PsiMinus => "bell_psim",
        }
    }

    pub fn is_bell(&self) -> bool {
        matches!(self, StateLabel::PhiPlus | StateLabel::PhiMinus | StateLabel::PsiPlus | StateLabel::PsiMinus)
    }

    /// Unit state vector in the `|q0 q1>` basis order 00, 01, 10, 11.
    pub fn vector(&self) -> Vec<C64> {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let raw: [C64; 4] = match self {
            // first columns of the tabulated preparation unitaries (6 decimals)
            StateLabel::Ns1 => [c(-0.742977, 0.0), c(-0.357599, 0.357599), c(0.101586, 0.101586), c(-0.414237, 0.0)],
            StateLabel::Ns2 => [c(0.788675, 0.0), c(-0.288675, 0.288675), c(-0.288675, -0.288675), c(-0.211325, 0.0)],
            StateLabel::Ns3 => [c(-0.0508479, 0.0), c(0.631483, -0.228733), c(-0.27958, -0.68233), c(0.0508479, 0.0)],
            StateLabel::Ns3p => [c(-0.575107, 0.0), c(-0.345634, 0.310025), c(-0.265082, -0.229473), c(0.575107, 0.0)],
            StateLabel::Ns3pp => [ZERO, c(0.0, k), c(k, 0.0), ZERO],
            StateLabel::PhiPlus => [c(k, 0.0), ZERO, ZERO, c(k, 0.0)],
            StateLabel::PhiMinus => [c(k, 0.0), ZERO, ZERO, c(-k, 0.0)],
            StateLabel::PsiPlus => [ZERO, c(k, 0.0), c(k, 0.0), ZERO],
            StateLabel::PsiMinus => [ZERO, c(k, 0.0), c(-k, 0.0), ZERO],
        };
        normalized(&raw)
    }

    pub fn density(&self) -> CMat {
        CMat::outer(&self.vector())
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s.trim() {
            "NS1" | "ns1" => StateLabel::Ns1,
            "NS2" | "ns2" => StateLabel::Ns2,
            "NS3" | "ns3" => StateLabel::Ns3,
            "NS3p" | "ns3p" | "NS3'" => StateLabel::Ns3p,
            "NS3pp" | "ns3pp" | "NS3''" => StateLabel::Ns3pp,
            "bell_phip" | "phi+" | "phip" => StateLabel::PhiPlus,
            "bell_phim" | "phi-" | "phim" => StateLabel::PhiMinus,
            "bell_psip" | "psi+" | "psip" => StateLabel::PsiPlus,
            "bell_psim" | "psi-" | "psim" => StateLabel::PsiMinus,
            other => return Err(Error::Parse(format!("unknown state label '{other}'"))),
        })
    }
}

/// A reference state together with the phase-point operator it was taken
/// from (for the negative states): the quantum-net offsets at the point
/// (q, p) = (1, 1) and the associated eigenvalue.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedState {
    pub label: StateLabel,
    pub vector: Vec<C64>,
    pub eigenvalue: Option<f64>,
    pub source_net: Option<Vec<usize>>,
}

pub fn canonical_states() -> Vec<NamedState> {
    StateLabel::ALL
        .iter()
        .map(|&label| {
            let (eigenvalue, source_net) = match source_of(label) {
                Some((e, n)) => (Some(e), Some(n.to_vec())),
                None => (None, None),
            };
            NamedState { label, vector: label.vector(), eigenvalue, source_net }
        })
        .collect()
}

fn source_of(label: StateLabel) -> Option<(f64, [usize; 5])> {
    SOURCES.iter().find(|(l, _, _)| *l == label).map(|&(_, e, n)| (e, n))
}

// Found by scanning all 1024 nets at (1, 1) for an operator that has the
// fixture as an eigenvector with negative eigenvalue (see tests).
const SOURCES: [(StateLabel, f64, [usize; 5]); 5] = [
    (StateLabel::Ns1, -0.896802, [1, 1, 0, 1, 1]),
    (StateLabel::Ns2, -0.5, [0, 3, 2, 2, 0]),
    (StateLabel::Ns3, -0.5, [2, 3, 2, 0, 3]),
    (StateLabel::Ns3p, -0.5, [2, 3, 2, 0, 3]),
    (StateLabel::Ns3pp, -0.5, [2, 0, 3, 0, 2]),
];

/// The literal phase-point operator with spectrum
/// (-0.8968, -0.1420, 0.2787, 1.7601).
pub fn a11_fixture() -> CMat {
    let h = 0.5;
    CMat::from_rows(&[
        [ZERO, c(-h, -h), c(h, -h), c(-h, 0.0)],
        [c(-h, h), ZERO, c(0.0, h), ZERO],
        [c(h, h), c(0.0, -h), c(1.0, 0.0), ZERO],
        [c(-h, 0.0), ZERO, ZERO, ZERO],
    ])
}
