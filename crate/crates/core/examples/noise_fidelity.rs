//! Fidelity of the reference states under non-Markovian random telegraph
//! noise and amplitude damping, sampled coarsely.

use negstates::dwf::StateLabel;
use negstates::metrics::fidelity_pure;
use negstates::noise::{evolve_pure, AdParams, ChannelParams, RtnParams};

fn main() -> negstates::Result<()> {
    let channels = [
        ("rtn b=0.05 gamma=0.001", ChannelParams::Rtn(RtnParams::new(0.05, 0.001)?), 200.0),
        ("ad g=0.01 gamma=5", ChannelParams::Ad(AdParams::new(0.01, 5.0)?), 100.0),
    ];
    let labels = [StateLabel::Ns1, StateLabel::Ns2, StateLabel::Ns3, StateLabel::PhiPlus];
    for (name, ch, t_max) in channels {
        println!("{name} (markovian: {})", ch.is_markovian());
        let times: Vec<f64> = (0..=10).map(|i| t_max * i as f64 / 10.0).collect();
        print!("{:>8}", "t");
        labels.iter().for_each(|l| print!("{:>11}", l.as_str()));
        println!();
        let series: Vec<Vec<f64>> = labels
            .iter()
            .map(|l| {
                let v = l.vector();
                Ok(evolve_pure(&v, &ch, &times)?.iter().map(|r| fidelity_pure(&v, r)).collect())
            })
            .collect::<negstates::Result<_>>()?;
        for (i, t) in times.iter().enumerate() {
            print!("{t:>8.1}");
            series.iter().for_each(|s| print!("{:>11.5}", s[i]));
            println!();
        }
        println!();
    }
    Ok(())
}
