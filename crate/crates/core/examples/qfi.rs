//! Maximal mean quantum Fisher information of NS1 and NS2 relative to φ⁺
//! under amplitude damping.

use negstates::dwf::StateLabel;
use negstates::metrics::{qfi_cmatrix, ratio_zeta};
use negstates::noise::{evolve_pure, AdParams, ChannelParams};

fn main() -> negstates::Result<()> {
    let ch = ChannelParams::Ad(AdParams::new(0.01, 5.0)?);
    let times: Vec<f64> = (0..=20).map(|i| 5.0 * i as f64).collect();
    let bell = evolve_pure(&StateLabel::PhiPlus.vector(), &ch, &times)?;
    let ns1 = evolve_pure(&StateLabel::Ns1.vector(), &ch, &times)?;
    let ns2 = evolve_pure(&StateLabel::Ns2.vector(), &ch, &times)?;
    println!("t,fbar_phip,zeta_NS1,zeta_NS2");
    for (i, t) in times.iter().enumerate() {
        println!(
            "{t},{:.6},{:.6},{:.6}",
            qfi_cmatrix(&bell[i])?.fbar_max,
            ratio_zeta(&ns1[i], &bell[i])?,
            ratio_zeta(&ns2[i], &bell[i])?
        );
    }
    Ok(())
}
