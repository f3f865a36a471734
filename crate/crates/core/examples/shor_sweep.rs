//! Mean infidelity with and without nine-qubit Shor protection over a grid of
//! depolarizing probabilities. Prints CSV to stdout.
//!
//! cargo run --release --example shor_sweep -- [trials] [seed]

use negstates::dwf::StateLabel;
use negstates::sim::{sweep_depolarizing, SWEEP_CSV_HEADER};

fn main() -> negstates::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(500, |s| s.parse().expect("trials"));
    let seed: u64 = args.next().map_or(2024, |s| s.parse().expect("seed"));
    let states: Vec<_> = [StateLabel::Ns1, StateLabel::Ns2, StateLabel::Ns3, StateLabel::PhiPlus]
        .iter()
        .map(|l| (l.as_str().to_string(), l.vector()))
        .collect();
    let ps: Vec<f64> = (1..=10).map(|k| k as f64 * 0.005).collect();
    println!("{SWEEP_CSV_HEADER}");
    for row in sweep_depolarizing(&states, &ps, trials, seed)? {
        println!("{}", row.csv());
    }
    Ok(())
}
