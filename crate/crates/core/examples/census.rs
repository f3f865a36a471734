//! Spectrum census of the phase-point operator at (q, p) = (1, 1) over all
//! 4^5 quantum nets of two qubits.

use negstates::dwf::{build_mubs, build_striations, census_spectra, PhasePoint};

fn main() -> negstates::Result<()> {
    let mubs = build_mubs(4)?;
    let striations = build_striations(4)?;
    let counts = census_spectra(&mubs, &striations, PhasePoint::new(4, 1, 1)?)?;
    println!("spectrum,count");
    for (key, n) in &counts {
        println!("\"{key}\",{n}");
    }
    Ok(())
}
