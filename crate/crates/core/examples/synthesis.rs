//! Gram-Schmidt completion and KAK synthesis over {H, RX, RZ, CZ} for every
//! reference state, with the loss δ and the prepared-state fidelity.

use negstates::dwf::StateLabel;
use negstates::metrics::fidelity_pure;
use negstates::sim::{run_circuit, StateVec};
use negstates::synth::{fixtures, kak_decompose, schmidt_rank, unitary_from_state, SCHMIDT_TOL};

fn main() -> negstates::Result<()> {
    println!("state,delta,depth,cz,fidelity,schmidt_rank,printed_unitary_diff");
    for label in StateLabel::ALL {
        let v = label.vector();
        let u = unitary_from_state(&v)?;
        let rep = kak_decompose(&u)?;
        let out = run_circuit(&rep.circuit, &StateVec::zero(2))?;
        let f = fidelity_pure(&v, &out.density()?);
        let diff = fixtures::printed_unitary(label).map(|p| format!("{:.2e}", fixtures::column_aligned_diff(&u, &p)));
        println!(
            "{},{:.2e},{},{},{:.12},{},{}",
            label,
            rep.delta,
            rep.depth,
            rep.cz_count,
            f,
            schmidt_rank(out.amplitudes(), SCHMIDT_TOL),
            diff.unwrap_or_default()
        );
    }
    println!("\n{}", kak_decompose(&unitary_from_state(&StateLabel::Ns2.vector())?)?.circuit.to_text());
    Ok(())
}
