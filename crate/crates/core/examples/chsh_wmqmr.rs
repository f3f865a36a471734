//! Optimal CHSH value, concurrence and teleportation fidelity with and
//! without weak measurement + reversal under amplitude damping.

use negstates::dwf::StateLabel;
use negstates::metrics::{chsh_smax, concurrence, teleportation_fidelity};
use negstates::noise::{evolve_two_qubit, AdParams, ChannelParams};
use negstates::protocols::{caption_params, protected_evolution, CaptionSet};
use negstates::sim::DensityMat;

fn main() -> negstates::Result<()> {
    let ch = ChannelParams::Ad(AdParams::new(0.01, 5.0)?);
    let labels = [StateLabel::Ns1, StateLabel::Ns2, StateLabel::Ns3, StateLabel::Ns3p, StateLabel::PhiPlus, StateLabel::PsiPlus];
    println!("state,t,smax,smax_protected,concurrence,concurrence_protected,tele_fid,tele_fid_protected,p_succ_chsh");
    for l in labels {
        let rho0 = DensityMat::from_pure(&l.vector())?;
        for t in [0.0, 10.0, 25.0, 50.0, 100.0] {
            let k = ch.kraus(t)?;
            let plain = evolve_two_qubit(&rho0, &k)?;
            let prot = |set| protected_evolution(&rho0, &k, &caption_params(set, l).expect("tabulated"));
            let (pc, pk, pt) = (prot(CaptionSet::Chsh)?, prot(CaptionSet::Concurrence)?, prot(CaptionSet::Teleportation)?);
            println!(
                "{l},{t},{:.5},{:.5},{:.5},{:.5},{:.5},{:.5},{:.4}",
                chsh_smax(&plain)?,
                chsh_smax(&pc.rho_f)?,
                concurrence(&plain)?,
                concurrence(&pk.rho_f)?,
                teleportation_fidelity(&plain)?,
                teleportation_fidelity(&pt.rho_f)?,
                pc.p_succ
            );
        }
    }
    Ok(())
}
