//! Switching off weak phase shifters: rate and RF power against beta.

use beamsim::analytic::{gap_selection, rf_power_consumption, PowerModelParams};
use beamsim::beamform::{select_phase_shifters, SelectionPolicy};
use beamsim::channel::{draw_channel, ChannelModel};
use beamsim::numerics::SeededRng;
use beamsim::rate::{achievable_rate, capacity_p2p, db_to_linear};

fn main() -> beamsim::Result<()> {
    let rho = db_to_linear(34.0);
    let model = ChannelModel::rayleigh(64, 64);
    println!("beta  rate    gap   predicted  off    P_RF (W)");
    for beta in [0.0, 10.0, 25.0, 40.0, 50.0] {
        let policy = SelectionPolicy::new(beta)?;
        let (mut rate, mut gap, mut off, mut n) = (0.0, 0.0, 0.0, 0.0);
        for t in 0..100 {
            let chan = draw_channel(&model, &mut SeededRng::new(5, t))?;
            let Ok(bf) = select_phase_shifters(&chan, 4, rho, policy) else {
                continue;
            };
            let r = achievable_rate(&chan, &bf, rho)?.rate_bits;
            rate += r;
            gap += capacity_p2p(&chan, 4, rho)?.rate_bits - r;
            off += bf.inactive_fraction();
            n += 1.0;
        }
        let power = rf_power_consumption(&PowerModelParams {
            p_ps_mw: 111.0,
            p_s_mw: 1.0,
            m: 4,
            n_t: 64,
            beta_percent: beta,
        })?;
        println!(
            "{beta:4} {:6.2} {:6.3} {:8.3} {:6.3} {power:8.3}",
            rate / n,
            gap / n,
            gap_selection(4, beta)?,
            off / n
        );
    }
    Ok(())
}
