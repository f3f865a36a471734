//! The literal phase-point operator at (1, 1), its spectrum and negative
//! eigenvectors, and the Wigner function of every reference state on the
//! net it was taken from.

use negstates::dwf::{
    build_mubs, build_striations, canonical_states, dwf, negative_states, phase_point_operator, states::a11_fixture,
    PhasePoint, QuantumNet,
};
use negstates::qmath::herm_eig;

fn main() -> negstates::Result<()> {
    let a = a11_fixture();
    let e = herm_eig(&a)?;
    println!("A(1,1) spectrum: {:?}", e.values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());

    let mubs = build_mubs(4)?;
    let striations = build_striations(4)?;
    let alpha = PhasePoint::new(4, 1, 1)?;
    for s in canonical_states() {
        let Some(offsets) = s.source_net else { continue };
        let net = QuantumNet::new(4, offsets.clone())?;
        let op = phase_point_operator(&net, &mubs, &striations, alpha)?;
        let w = dwf(&negstates::qmath::CMat::outer(&s.vector), &net, &mubs, &striations)?;
        let min = w.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let found = negative_states(&op)?;
        println!(
            "{:6} net {:?}  W(1,1) = {:+.4}  min W = {:+.4}  negative eigenvalues {:?}",
            s.label.as_str(),
            offsets,
            w.at(alpha),
            min,
            found.iter().map(|n| format!("{:.4}", n.eigenvalue)).collect::<Vec<_>>()
        );
    }
    Ok(())
}
