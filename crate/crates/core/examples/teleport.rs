//! Teleportation through NS3'' and φ⁺: Bob's correction per outcome and
//! per-branch fidelities.

use negstates::dwf::StateLabel;
use negstates::protocols::{correction_table, describe_correction, teleport_trials};
use negstates::qmath::Rng;

fn main() -> negstates::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    for label in [StateLabel::Ns3pp, StateLabel::PhiPlus] {
        let v = label.vector();
        println!("resource {label}");
        for (k, u) in correction_table(&v)?.iter().enumerate() {
            println!("  ab={}{} -> {}", k >> 1, k & 1, describe_correction(u).unwrap_or_else(|| "general".into()));
        }
        let r = teleport_trials(&v, trials, &mut Rng::new(7))?;
        println!("  mean fidelity {:.12}", r.mean_fidelity);
        println!("  per outcome   {:?}", r.per_outcome_fidelity);
        println!("  frequencies   {:?}", r.outcome_freqs);
    }
    Ok(())
}
