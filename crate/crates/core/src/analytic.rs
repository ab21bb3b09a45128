//! Closed-form rate gaps and the RF power model.
//!
//! Selection ratios `beta` are taken in percent at the API and converted to a
//! fraction once, here, before entering any formula.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::erf;

fn log2_pi_over_4() -> f64 {
    (PI / 4.0).log2()
}

fn require_streams(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::Domain {
            what: "stream count",
            value: 0.0,
        })
    } else {
        Ok(())
    }
}

fn beta_fraction(beta_percent: f64) -> Result<f64> {
    if !(0.0..100.0).contains(&beta_percent) {
        return Err(Error::Domain {
            what: "beta_percent",
            value: beta_percent,
        });
    }
    Ok(beta_percent / 100.0)
}

/// Asymptotic loss of the phase-of-singular-vector design with `M = K`.
pub fn gap_lemma3(k: usize) -> Result<f64> {
    require_streams(k)?;
    Ok(-2.0 * k as f64 * log2_pi_over_4())
}

/// Loss with `K <= M <= 2K` RF chains; zero at `M = 2K`.
pub fn gap_general(k: usize, m: usize) -> Result<f64> {
    require_streams(k)?;
    if m < k || m > 2 * k {
        return Err(Error::dim(
            "gap_general",
            format!("m = {m} outside [{k}, {}]", 2 * k),
        ));
    }
    Ok(-2.0 * (2 * k - m) as f64 * log2_pi_over_4())
}

/// Upper bound on the extra loss of `bits`-bit phase shifters.
pub fn quant_gap_bound(k: usize, bits: u32) -> Result<f64> {
    require_streams(k)?;
    if bits == 0 {
        return Err(Error::Domain {
            what: "phase-shifter bits",
            value: 0.0,
        });
    }
    let delta = 2.0 * PI / 2f64.powi(bits as i32 + 1);
    Ok(-(k as f64) * delta.cos().powi(4).log2())
}

/// Multiuser zero-forcing loss; half the point-to-point value because only
/// the transmitter is phase constrained.
pub fn gap_multiuser(k: usize) -> Result<f64> {
    require_streams(k)?;
    Ok(-(k as f64) * log2_pi_over_4())
}

/// Threshold on `sqrt(N) |V|` that switches off `beta_percent` of the phase
/// shifters under the Rayleigh law of singular-vector entries.
pub fn alpha_from_beta(beta_percent: f64) -> Result<f64> {
    let beta = beta_fraction(beta_percent)?;
    Ok((-(1.0 - beta).ln()).max(0.0).sqrt())
}

/// `E[v 1{v > alpha}]` for `v` Rayleigh with scale `1/sqrt(2)`.
pub fn expected_v_tilde(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
        });
    }
    let half_root_pi = PI.sqrt() / 2.0;
    let v = half_root_pi + alpha * (-alpha * alpha).exp() - half_root_pi * erf(alpha);
    Ok(v.max(0.0))
}

/// Asymptotic loss with a fraction `beta_percent` of phase shifters off.
/// Both logarithms are base 2, which makes `beta = 0` coincide with
/// [`gap_lemma3`].
pub fn gap_selection(k: usize, beta_percent: f64) -> Result<f64> {
    require_streams(k)?;
    let beta = beta_fraction(beta_percent)?;
    let alpha = alpha_from_beta(beta_percent)?;
    let ev = expected_v_tilde(alpha)?;
    let k = k as f64;
    Ok(2.0 * k * (1.0 - beta).log2() - 4.0 * k * ev.log2())
}

/// Phase-shifter network power model. Powers are in milliwatts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerModelParams {
    pub p_ps_mw: f64,
    pub p_s_mw: f64,
    pub m: usize,
    pub n_t: usize,
    pub beta_percent: f64,
}

impl PowerModelParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [("p_ps", self.p_ps_mw), ("p_s", self.p_s_mw)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain { what, value: v });
            }
        }
        if !(0.0..=100.0).contains(&self.beta_percent) {
            return Err(Error::Domain {
                what: "beta_percent",
                value: self.beta_percent,
            });
        }
        Ok(())
    }
}

/// Total RF beamformer power in watts.
pub fn rf_power_consumption(params: &PowerModelParams) -> Result<f64> {
    params.validate()?;
    let per_branch = (1.0 - params.beta_percent / 100.0) * params.p_ps_mw + params.p_s_mw;
    Ok((params.m * params.n_t) as f64 * per_branch / 1000.0)
}

/// The "analytical" curve: capacity minus a predicted gap. May be negative at
/// low SNR, where the asymptotic gaps exceed the capacity itself.
pub fn predicted_rate(c: f64, gap: f64) -> f64 {
    c - gap
}
