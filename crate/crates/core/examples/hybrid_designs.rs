//! Capacity against the phase-matched, mixed and two-shifter designs on one
//! Rayleigh channel.

use beamsim::analytic;
use beamsim::beamform::{hybrid_double_rf, hybrid_lemma2, hybrid_mixed};
use beamsim::channel::{draw_channel, ChannelModel};
use beamsim::numerics::SeededRng;
use beamsim::rate::{achievable_rate, capacity_p2p, db_to_linear};

fn main() -> beamsim::Result<()> {
    let rho = db_to_linear(34.0);
    let k = 4;
    let chan = draw_channel(&ChannelModel::rayleigh(64, 64), &mut SeededRng::new(7, 0))?;
    let c = capacity_p2p(&chan, k, rho)?.rate_bits;
    println!("capacity            {c:8.3} bits/s/Hz");
    for m in k..=2 * k {
        let bf = match m {
            m if m == k => hybrid_lemma2(&chan, k, rho)?,
            m if m == 2 * k => hybrid_double_rf(&chan, k, rho)?,
            m => hybrid_mixed(&chan, k, m, rho)?,
        };
        let r = achievable_rate(&chan, &bf, rho)?.rate_bits;
        println!(
            "M = {m}: rate {r:8.3}, gap {:6.3}, predicted gap {:6.3}",
            c - r,
            analytic::gap_general(k, m)?
        );
    }
    Ok(())
}
