//! Tabulated preparation unitaries for the five negative states, as printed
//! (six decimals), and the helpers used to compare against them.

use crate::dwf::StateLabel;
use crate::qmath::{c, CMat, C64, ZERO};

#[allow(clippy::approx_constant)]
const K: f64 = 0.707106781;

pub fn printed_unitary(label: StateLabel) -> Option<CMat> {
    let rows: [[C64; 4]; 4] = match label {
        StateLabel::Ns1 => [
            [c(-0.742977, 0.0), c(0.669317, 0.0), ZERO, ZERO],
            [c(-0.357599, 0.357599), c(-0.396953, 0.396953), c(0.655059, 0.0), ZERO],
            [c(0.101586, 0.101586), c(0.112766, 0.112766), c(0.0, 0.247581), c(0.944792, 0.0)],
            [c(-0.414237, 0.0), c(-0.459824, 0.0), c(-0.504778, -0.504778), c(0.231698, -0.231698)],
        ],
        StateLabel::Ns2 => [
            [c(0.788675, 0.0), c(0.61481, 0.0), ZERO, ZERO],
            [c(-0.288675, 0.288675), c(0.370311, -0.370311), c(0.747712, 0.0), ZERO],
            [c(-0.288675, -0.288675), c(0.370311, 0.370311), c(0.0, -0.589702), c(0.459701, 0.0)],
            [c(-0.211325, 0.0), c(0.271086, 0.0), c(-0.215846, -0.215846), c(-0.627963, 0.627963)],
        ],
        StateLabel::Ns3 => [
            [c(-0.0508479, 0.0), c(0.998706, 0.0), ZERO, ZERO],
            [c(0.631483, -0.228733), c(0.0321511, -0.0116456), c(0.740096, 0.0), ZERO],
            [c(-0.27958, -0.68233), c(-0.0142345, -0.03474), c(0.0277425, 0.670334), c(0.0687934, 0.0)],
            [c(0.0508479, 0.0), c(0.00258886, 0.0), c(-0.0434981, -0.0157557), c(0.378252, -0.923143)],
        ],
        StateLabel::Ns3p => [
            [c(-0.575107, 0.0), c(0.818078, 0.0), ZERO, ZERO],
            [c(-0.345634, 0.310025), c(-0.242979, 0.217946), c(0.823336, 0.0), ZERO],
            [c(-0.265082, -0.229473), c(-0.186352, -0.161319), c(-0.0371656, -0.293085), c(0.85384, 0.0)],
            [c(0.575107, 0.0), c(0.404298, 0.0), c(0.360743, 0.323577), c(0.393558, -0.34069)],
        ],
        StateLabel::Ns3pp => [
            [ZERO, ZERO, c(0.0, K), c(0.0, K)],
            [c(0.0, K), c(0.0, -K), ZERO, ZERO],
            [c(K, 0.0), c(K, 0.0), ZERO, ZERO],
            [ZERO, ZERO, c(K, 0.0), c(-K, 0.0)],
        ],
        _ => return None,
    };
    Some(CMat::from_rows(&rows))
}

/// Largest entry-wise deviation between `a` and `b` after rotating each
/// column of `a` by the global phase that best aligns it with `b`.
pub fn column_aligned_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    (0..a.cols())
        .map(|j| {
            let (ca, cb) = (a.col(j), b.col(j));
            let aligned = crate::qmath::align_phase(&cb, &ca);
            aligned.iter().zip(&cb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gram_schmidt_complete;

    #[test]
    fn printed_matrices_are_unitary() {
        for l in StateLabel::NEGATIVE {
            let u = printed_unitary(l).unwrap();
            assert!(u.unitarity_deviation() < 1e-5, "{l}: {}", u.unitarity_deviation());
        }
        assert!(printed_unitary(StateLabel::PhiPlus).is_none());
    }

    #[test]
    fn completion_reproduces_first_four() {
        for l in [StateLabel::Ns1, StateLabel::Ns2, StateLabel::Ns3, StateLabel::Ns3p] {
            let u = gram_schmidt_complete(&l.vector()).unwrap();
            let diff = column_aligned_diff(&u, &printed_unitary(l).unwrap());
            assert!(diff < 2e-3, "{l}: {diff}");
        }
    }

    #[test]
    fn first_column_of_ns3pp_matches() {
        let u = gram_schmidt_complete(&StateLabel::Ns3pp.vector()).unwrap();
        let p = printed_unitary(StateLabel::Ns3pp).unwrap();
        let a = crate::qmath::align_phase(&p.col(0), &u.col(0));
        assert!(a.iter().zip(p.col(0)).all(|(x, y)| (x - y).norm() < 1e-8));
    }
}
