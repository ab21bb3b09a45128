//! Spectral-efficiency evaluation and waterfilling.

use crate::beamform::HybridBeamformer;
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix};

/// Largest admissible condition number of the effective noise covariance.
pub const MAX_NOISE_CONDITION: f64 = 1e12;

/// Relative singular-value floor below which a channel mode counts as absent.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub rate_bits: f64,
    pub per_stream: Vec<f64>,
    pub rho_db: f64,
    pub noise_cov_condition: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(rho: f64) -> f64 {
    10.0 * rho.log10()
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "linear SNR",
            value: rho,
        })
    }
}

/// Power allocation maximising `sum log2(1 + rho p_k g_k)` subject to
/// `sum p_k = budget`.
///
/// Exact: gains are sorted and the water level is found for the largest
/// active set that keeps every allocation positive.
pub fn waterfill(gains: &[f64], rho: f64, budget: f64) -> Result<Vec<f64>> {
    check_rho(rho)?;
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::Domain {
            what: "power budget",
            value: budget,
        });
    }
    if let Some(&g) = gains.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(Error::Domain {
            what: "channel gain",
            value: g,
        });
    }
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::EmptyInput {
            what: "waterfill (all gains are zero)",
        });
    }
    order.sort_by(|&i, &j| gains[j].total_cmp(&gains[i]));
    let inv: Vec<f64> = order.iter().map(|&i| 1.0 / (rho * gains[i])).collect();

    let mut active = order.len();
    let mut level;
    loop {
        level = (budget + inv[..active].iter().sum::<f64>()) / active as f64;
        if level > inv[active - 1] || active == 1 {
            break;
        }
        active -= 1;
    }

    let mut power = vec![0.0; gains.len()];
    for (slot, &i) in order.iter().enumerate().take(active) {
        power[i] = (level - inv[slot]).max(0.0);
    }
    // Remove rounding drift so the budget is met to the last bit we can.
    let total: f64 = power.iter().sum();
    if total > 0.0 {
        let fix = budget / total;
        power.iter_mut().for_each(|p| *p *= fix);
    }
    Ok(power)
}

/// Capacity with `k` waterfilled eigen-streams.
pub fn capacity_p2p(chan: &ChannelRealization, k: usize, rho: f64) -> Result<RateReport> {
    check_rho(rho)?;
    let svd = chan.svd(k)?;
    let rank = svd.effective_rank(RANK_TOL);
    if rank < k {
        return Err(Error::RankDeficient { requested: k, rank });
    }
    let gains: Vec<f64> = svd.sigma.iter().map(|s| s * s).collect();
    let power = waterfill(&gains, rho, 1.0)?;
    let per_stream: Vec<f64> = gains
        .iter()
        .zip(&power)
        .map(|(g, p)| (1.0 + rho * p * g).log2())
        .collect();
    Ok(RateReport {
        rate_bits: per_stream.iter().sum(),
        per_stream,
        rho_db: linear_to_db(rho),
        noise_cov_condition: 1.0,
    })
}

/// `log2 det(I + rho/(Gt Gr) Rn^-1 W^H H F P F^H H^H W)` with the
/// normalisations recomputed from the supplied matrices.
pub fn achievable_rate(
    chan: &ChannelRealization,
    bf: &HybridBeamformer,
    rho: f64,
) -> Result<RateReport> {
    check_rho(rho)?;
    let f = bf.precoder();
    let w = bf.combiner().ok_or_else(|| {
        Error::Shape("achievable_rate needs a receive combiner; use sum_rate_mu".into())
    })?;
    let k = f.cols();
    if chan.h.cols() != f.rows() || chan.h.rows() != w.rows() || w.cols() != k {
        return Err(Error::dim(
            "achievable_rate",
            format!(
                "H is {}x{}, F is {}x{}, W is {}x{}",
                chan.h.rows(),
                chan.h.cols(),
                f.rows(),
                f.cols(),
                w.rows(),
                w.cols()
            ),
        ));
    }
    if bf.power.len() != k {
        return Err(Error::dim(
            "achievable_rate",
            format!("{} power entries for {k} streams", bf.power.len()),
        ));
    }
    let gamma_t = f.trace_gram() / k as f64;
    let w_gram = w.adjoint_matmul(&w);
    let gamma_r = w_gram.trace().re / k as f64;

    // Rn^{-1/2} from the eigen-decomposition of Rn = W^H W / Gr.
    let rn = w_gram.scale(1.0 / gamma_r);
    let eig = hermitian_eigen(&rn)?;
    let lmax = eig.values[0];
    let lmin = *eig.values.last().expect("k >= 1");
    let condition = if lmin > 0.0 {
        lmax / lmin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_NOISE_CONDITION) {
        return Err(Error::Singular {
            what: "effective noise covariance",
            condition,
        });
    }
    let inv_sqrt: Vec<f64> = eig.values.iter().map(|l| 1.0 / l.sqrt()).collect();
    let rn_inv_sqrt = eig
        .vectors
        .scale_columns(&inv_sqrt)
        .matmul(&eig.vectors.adjoint());

    // G = Rn^{-1/2} W^H H F sqrt(P)
    let hf = chan.h.matmul(&f);
    let sqrt_p: Vec<f64> = bf.power.iter().map(|p| p.max(0.0).sqrt()).collect();
    let eff = w.adjoint_matmul(&hf).scale_columns(&sqrt_p);
    let g = rn_inv_sqrt.matmul(&eff);
    let arg = g
        .matmul(&g.adjoint())
        .scale(rho / (gamma_t * gamma_r))
        .hermitian_part();
    let lam = hermitian_eigen(&arg)?;
    let per_stream: Vec<f64> = lam
        .values
        .iter()
        .map(|l| (1.0 + l.max(0.0)).log2())
        .collect();
    Ok(RateReport {
        rate_bits: per_stream.iter().sum(),
        per_stream,
        rho_db: linear_to_db(rho),
        noise_cov_condition: condition,
    })
}

/// Downlink sum rate with single-antenna users decoding independently;
/// interference is treated as Gaussian noise.
pub fn sum_rate_mu(
    chan: &ChannelRealization,
    bf: &HybridBeamformer,
    rho: f64,
) -> Result<RateReport> {
    check_rho(rho)?;
    if bf.w_rf.is_some() || bf.w_b.is_some() {
        return Err(Error::Shape(
            "sum_rate_mu takes a multiuser beamformer without receive matrices".into(),
        ));
    }
    let f = bf.precoder();
    let k = chan.n_r();
    if chan.h.cols() != f.rows() || f.cols() != k {
        return Err(Error::dim(
            "sum_rate_mu",
            format!(
                "H is {}x{} but F is {}x{}",
                chan.h.rows(),
                chan.h.cols(),
                f.rows(),
                f.cols()
            ),
        ));
    }
    let gamma_t = f.trace_gram() / k as f64;
    let e = chan.h.matmul(&f).scale(1.0 / gamma_t.sqrt());
    Ok(RateReport {
        per_stream: sinr_rates(&e, rho),
        rate_bits: 0.0,
        rho_db: linear_to_db(rho),
        noise_cov_condition: 1.0,
    }
    .summed())
}

/// Per-user `log2(1 + SINR_k)` for a normalised effective channel `e`.
pub(crate) fn sinr_rates(e: &ComplexMatrix, rho: f64) -> Vec<f64> {
    let k = e.rows();
    let snr = rho / k as f64;
    (0..k)
        .map(|u| {
            let row = e.row(u);
            let signal = row[u].norm_sqr();
            let interference: f64 = row
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != u)
                .map(|(_, z)| z.norm_sqr())
                .sum();
            (1.0 + snr * signal / (1.0 + snr * interference)).log2()
        })
        .collect()
}

impl RateReport {
    fn summed(mut self) -> Self {
        self.rate_bits = self.per_stream.iter().sum();
        self
    }
}
