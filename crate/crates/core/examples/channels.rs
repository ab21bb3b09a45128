//! Rayleigh and geometric channel draws and their singular spectra.

use beamsim::channel::{draw_channel, steering_vector, ChannelModel};
use beamsim::numerics::SeededRng;

fn main() -> beamsim::Result<()> {
    let a = steering_vector(std::f64::consts::FRAC_PI_3, 8, 0.5)?;
    println!("steering vector at 60 deg: {:.3?}", a);

    for model in [
        ChannelModel::rayleigh(64, 64),
        ChannelModel::geometric(64, 64, 5),
    ] {
        let chan = draw_channel(&model, &mut SeededRng::new(3, 0))?;
        let svd = chan.svd(8)?;
        let power = chan.h.trace_gram() / 64.0 / 64.0;
        println!(
            "{:?}: |H|^2/(N_t N_r) = {power:.3}, sigma = {:.2?}",
            model.kind, svd.sigma
        );
        if let Some(paths) = &chan.paths {
            for p in paths {
                println!(
                    "  |beta| {:.3}  phi_t {:.3}  phi_r {:.3}",
                    p.beta.norm(),
                    p.phi_t,
                    p.phi_r
                );
            }
        }
    }
    Ok(())
}
