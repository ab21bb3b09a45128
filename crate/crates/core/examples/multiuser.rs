//! Downlink zero-forcing to four single-antenna users: digital against
//! hybrid.

use beamsim::analytic::gap_multiuser;
use beamsim::beamform::{mu_zf_digital, mu_zf_hybrid};
use beamsim::channel::{draw_channel, ChannelModel};
use beamsim::numerics::SeededRng;
use beamsim::rate::{db_to_linear, sum_rate_mu};

fn main() -> beamsim::Result<()> {
    let k = 4;
    let model = ChannelModel::rayleigh(64, k);
    for db in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let rho = db_to_linear(db);
        let (mut digital, mut hybrid, mut gamma) = (0.0, 0.0, 0.0);
        let trials = 200;
        for t in 0..trials {
            let chan = draw_channel(&model, &mut SeededRng::new(8, t))?;
            let zf = mu_zf_digital(&chan, k, rho)?;
            gamma += zf.gamma_t;
            digital += sum_rate_mu(&chan, &zf, rho)?.rate_bits;
            hybrid += sum_rate_mu(&chan, &mu_zf_hybrid(&chan, k, rho)?, rho)?.rate_bits;
        }
        let n = trials as f64;
        println!(
            "{db:4} dB: C_sum {:7.3}  R_sum {:7.3}  gap {:.3} (limit {:.3})  gamma_t {:.5}",
            digital / n,
            hybrid / n,
            (digital - hybrid) / n,
            gap_multiuser(k)?,
            gamma / n
        );
    }
    Ok(())
}
