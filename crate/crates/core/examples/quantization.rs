//! Rate lost to B-bit phase shifters, averaged over 100 channels.

use beamsim::analytic::quant_gap_bound;
use beamsim::beamform::{hybrid_lemma2, quantize_rf, PhaseResolution};
use beamsim::channel::{draw_channel, ChannelModel};
use beamsim::numerics::SeededRng;
use beamsim::rate::{achievable_rate, db_to_linear};

fn main() -> beamsim::Result<()> {
    let rho = db_to_linear(34.0);
    let model = ChannelModel::rayleigh(64, 64);
    let trials = 100;
    for bits in 1..=5 {
        let mut loss = 0.0;
        for t in 0..trials {
            let chan = draw_channel(&model, &mut SeededRng::new(11, t))?;
            let analog = hybrid_lemma2(&chan, 4, rho)?;
            let digital = quantize_rf(&chan, &analog, PhaseResolution::digital(bits)?, rho)?;
            loss += achievable_rate(&chan, &analog, rho)?.rate_bits
                - achievable_rate(&chan, &digital, rho)?.rate_bits;
        }
        println!(
            "B = {bits}: mean loss {:.3}, bound {:.3}",
            loss / trials as f64,
            quant_gap_bound(4, bits)?
        );
    }
    Ok(())
}
