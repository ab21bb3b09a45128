//! The closed-form gap predictions and the RF power model.

use beamsim::analytic::*;

fn main() -> beamsim::Result<()> {
    for k in 1..=4 {
        println!(
            "K = {k}: phase-matched {:.4}, multiuser {:.4}, 2-bit bound {:.4}, 3-bit bound {:.4}",
            gap_lemma3(k)?,
            gap_multiuser(k)?,
            quant_gap_bound(k, 2)?,
            quant_gap_bound(k, 3)?
        );
    }
    for m in 3..=6 {
        println!("K = 3, M = {m}: {:.4}", gap_general(3, m)?);
    }
    for beta in [0.0, 10.0, 25.0, 50.0, 75.0] {
        let alpha = alpha_from_beta(beta)?;
        println!(
            "beta {beta:4}%: alpha {alpha:.5}, E[V~] {:.5}, gap {:.4}",
            expected_v_tilde(alpha)?,
            gap_selection(4, beta)?
        );
    }
    let p = PowerModelParams {
        p_ps_mw: 111.0,
        p_s_mw: 1.0,
        m: 4,
        n_t: 64,
        beta_percent: 50.0,
    };
    println!(
        "RF network power at 50% off: {} W",
        rf_power_consumption(&p)?
    );
    Ok(())
}
