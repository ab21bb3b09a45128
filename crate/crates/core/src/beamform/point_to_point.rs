use num_complex::Complex64;

use super::{
    assemble_p2p, phase_of, ActiveMask, BeamformerKind, HybridBeamformer, SelectionPolicy,
};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, SvdResult};
use crate::rate::RANK_TOL;

pub(crate) fn leading_svd(chan: &ChannelRealization, k: usize) -> Result<SvdResult> {
    let min_dim = chan.n_t().min(chan.n_r());
    if k == 0 || k > min_dim {
        return Err(Error::dim(
            "beamformer",
            format!("{k} streams on a {}x{} channel", chan.n_r(), chan.n_t()),
        ));
    }
    let svd = chan.svd(k)?;
    let rank = svd.effective_rank(RANK_TOL);
    if rank < k {
        return Err(Error::RankDeficient { requested: k, rank });
    }
    Ok(svd)
}

fn phase_matrix(v: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.rows(), v.cols(), |r, c| phase_of(v[(r, c)]))
}

/// Unconstrained SVD precoder and combiner; attains capacity.
pub fn digital_svd_beamformer(
    chan: &ChannelRealization,
    k: usize,
    rho: f64,
) -> Result<HybridBeamformer> {
    let svd = leading_svd(chan, k)?;
    assemble_p2p(
        chan,
        rho,
        svd.v,
        ComplexMatrix::identity(k),
        svd.u,
        ComplexMatrix::identity(k),
        ActiveMask::all_active(chan.n_t(), k),
        ActiveMask::all_active(chan.n_r(), k),
        BeamformerKind::Unconstrained,
    )
}

/// One RF chain per stream; every phase shifter copies the phase of the
/// matching singular-vector entry, with identity baseband matrices.
pub fn hybrid_lemma2(chan: &ChannelRealization, k: usize, rho: f64) -> Result<HybridBeamformer> {
    let svd = leading_svd(chan, k)?;
    assemble_p2p(
        chan,
        rho,
        phase_matrix(&svd.v),
        ComplexMatrix::identity(k),
        phase_matrix(&svd.u),
        ComplexMatrix::identity(k),
        ActiveMask::all_active(chan.n_t(), k),
        ActiveMask::all_active(chan.n_r(), k),
        BeamformerKind::PhaseOnly,
    )
}

/// Two RF chains per stream. Each singular-vector entry `|v| e^{j a}` is the
/// average of `e^{j(a + acos|v|)}` and `e^{j(a - acos|v|)}`, so the pair
/// reconstructs the singular vectors exactly.
pub fn hybrid_double_rf(chan: &ChannelRealization, k: usize, rho: f64) -> Result<HybridBeamformer> {
    hybrid_mixed(chan, k, 2 * k, rho)
}

/// Builds the RF and baseband matrices for one side: the first `pairs`
/// streams use two shifters each, the rest one.
fn mixed_side(v: &ComplexMatrix, pairs: usize) -> (ComplexMatrix, ComplexMatrix) {
    let (n, k) = v.shape();
    let m = k + pairs;
    let mut rf = ComplexMatrix::zeros(n, m);
    let mut bb = ComplexMatrix::zeros(m, k);
    // With pairs present every column of F is kept at unit norm, so the
    // single-shifter streams carry 1/sqrt(n) in the baseband.
    let single_weight = if pairs == 0 {
        1.0
    } else {
        1.0 / (n as f64).sqrt()
    };
    for s in 0..k {
        if s < pairs {
            let (c0, c1) = (2 * s, 2 * s + 1);
            for r in 0..n {
                let z = v[(r, s)];
                let angle = z.arg();
                let spread = z.norm().min(1.0).acos();
                rf[(r, c0)] = Complex64::from_polar(1.0, angle + spread);
                rf[(r, c1)] = Complex64::from_polar(1.0, angle - spread);
            }
            bb[(c0, s)] = Complex64::new(0.5, 0.0);
            bb[(c1, s)] = Complex64::new(0.5, 0.0);
        } else {
            let c = pairs + s;
            for r in 0..n {
                rf[(r, c)] = phase_of(v[(r, s)]);
            }
            bb[(c, s)] = Complex64::new(single_weight, 0.0);
        }
    }
    (rf, bb)
}

/// `K <= M <= 2K` RF chains: `M - K` streams get the two-shifter
/// construction and the remaining `2K - M` the single-shifter one.
pub fn hybrid_mixed(
    chan: &ChannelRealization,
    k: usize,
    m: usize,
    rho: f64,
) -> Result<HybridBeamformer> {
    if k == 0 || m < k || m > 2 * k {
        return Err(Error::dim(
            "hybrid_mixed",
            format!("{m} RF chains for {k} streams; need k <= m <= 2k"),
        ));
    }
    let svd = leading_svd(chan, k)?;
    hybrid_mixed_from_svd(chan, &svd, k, m, rho)
}

/// [`hybrid_mixed`] on caller-supplied singular vectors, e.g. a rotated
/// gauge of the channel's own SVD. Only the leading `k` columns are used.
pub fn hybrid_mixed_from_svd(
    chan: &ChannelRealization,
    svd: &SvdResult,
    k: usize,
    m: usize,
    rho: f64,
) -> Result<HybridBeamformer> {
    if k == 0 || m < k || m > 2 * k || svd.len() < k {
        return Err(Error::dim(
            "hybrid_mixed_from_svd",
            format!(
                "{m} RF chains, {k} streams, {} singular triplets",
                svd.len()
            ),
        ));
    }
    if svd.v.rows() != chan.n_t() || svd.u.rows() != chan.n_r() {
        return Err(Error::dim(
            "hybrid_mixed_from_svd",
            "singular vectors do not match the channel",
        ));
    }
    let pairs = m - k;
    let (f_rf, f_b) = mixed_side(&svd.v.leading_columns(k), pairs);
    let (w_rf, w_b) = mixed_side(&svd.u.leading_columns(k), pairs);
    assemble_p2p(
        chan,
        rho,
        f_rf,
        f_b,
        w_rf,
        w_b,
        ActiveMask::all_active(chan.n_t(), m),
        ActiveMask::all_active(chan.n_r(), m),
        BeamformerKind::PhaseOnly,
    )
}

fn selected_side(
    v: &ComplexMatrix,
    alpha: f64,
    side: &'static str,
) -> Result<(ComplexMatrix, ActiveMask)> {
    let (n, k) = v.shape();
    let scale = (n as f64).sqrt();
    let mask = ActiveMask::from_fn(n, k, |r, c| scale * v[(r, c)].norm() > alpha);
    for c in 0..k {
        if (0..n).all(|r| !mask.is_active(r, c)) {
            return Err(Error::DegenerateColumn { side, column: c });
        }
    }
    let rf = ComplexMatrix::from_fn(n, k, |r, c| {
        if mask.is_active(r, c) {
            phase_of(v[(r, c)])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((rf, mask))
}

/// Phase-of-singular-vector design with the shifters on weak entries
/// (`sqrt(N) |V| <= alpha`) switched off, on both sides.
pub fn select_phase_shifters(
    chan: &ChannelRealization,
    k: usize,
    rho: f64,
    policy: SelectionPolicy,
) -> Result<HybridBeamformer> {
    let svd = leading_svd(chan, k)?;
    let alpha = policy.alpha();
    let (f_rf, tx_mask) = selected_side(&svd.v, alpha, "transmit")?;
    let (w_rf, rx_mask) = selected_side(&svd.u, alpha, "receive")?;
    assemble_p2p(
        chan,
        rho,
        f_rf,
        ComplexMatrix::identity(k),
        w_rf,
        ComplexMatrix::identity(k),
        tx_mask,
        rx_mask,
        BeamformerKind::PhaseOnly,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channel, ChannelModel};
    use crate::numerics::SeededRng;
    use crate::rate::{achievable_rate, capacity_p2p};

    fn rayleigh(n: usize, stream: u64) -> ChannelRealization {
        draw_channel(
            &ChannelModel::rayleigh(n, n),
            &mut SeededRng::new(77, stream),
        )
        .unwrap()
    }

    #[test]
    fn double_rf_reconstructs_singular_vectors() {
        let chan = rayleigh(16, 0);
        let bf = hybrid_double_rf(&chan, 2, 100.0).unwrap();
        bf.check_invariants().unwrap();
        let v = chan.svd(2).unwrap().v;
        assert!(bf.precoder().sub(&v).frobenius_norm() <= 1e-10);
        assert!((bf.gamma_t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn digital_and_double_rf_reach_capacity() {
        let chan = rayleigh(16, 1);
        let rho = 1000.0;
        let c = capacity_p2p(&chan, 4, rho).unwrap().rate_bits;
        let d =
            achievable_rate(&chan, &digital_svd_beamformer(&chan, 4, rho).unwrap(), rho).unwrap();
        let x = achievable_rate(&chan, &hybrid_double_rf(&chan, 4, rho).unwrap(), rho).unwrap();
        assert!((d.rate_bits - c).abs() < 1e-9);
        assert!((x.rate_bits - c).abs() < 1e-9);
    }

    #[test]
    fn lemma2_normalisation() {
        let chan = rayleigh(32, 2);
        let bf = hybrid_lemma2(&chan, 4, 10.0).unwrap();
        bf.check_invariants().unwrap();
        assert!((bf.gamma_t - 32.0).abs() < 1e-9);
        assert!((bf.gamma_r - 32.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_boundaries() {
        let chan = rayleigh(16, 3);
        let a = hybrid_mixed(&chan, 3, 3, 10.0).unwrap();
        let b = hybrid_lemma2(&chan, 3, 10.0).unwrap();
        assert_eq!(a.f_rf, b.f_rf);
        assert_eq!(a.f_b, b.f_b);
        assert_eq!(a.power, b.power);
        let c = hybrid_mixed(&chan, 3, 6, 10.0).unwrap();
        let d = hybrid_double_rf(&chan, 3, 10.0).unwrap();
        assert_eq!(c.f_rf, d.f_rf);
        assert!(hybrid_mixed(&chan, 3, 7, 10.0).is_err());
        assert!(hybrid_mixed(&chan, 3, 2, 10.0).is_err());
    }

    #[test]
    fn selection_zero_is_lemma2() {
        let chan = rayleigh(16, 4);
        let a = select_phase_shifters(&chan, 2, 10.0, SelectionPolicy::new(0.0).unwrap()).unwrap();
        let b = hybrid_lemma2(&chan, 2, 10.0).unwrap();
        assert_eq!(a.f_rf, b.f_rf);
        assert_eq!(a.w_rf, b.w_rf);
        assert_eq!(a.inactive_fraction(), 0.0);
    }

    #[test]
    fn selection_masks_weak_entries() {
        let chan = rayleigh(64, 5);
        let bf =
            select_phase_shifters(&chan, 4, 10.0, SelectionPolicy::new(50.0).unwrap()).unwrap();
        bf.check_invariants().unwrap();
        let frac = bf.inactive_fraction();
        assert!((0.3..0.7).contains(&frac), "inactive fraction {frac}");
    }

    #[test]
    fn rank_deficient_geometric() {
        let model = ChannelModel::geometric(32, 32, 2);
        let chan = draw_channel(&model, &mut SeededRng::new(1, 1)).unwrap();
        assert!(matches!(
            hybrid_lemma2(&chan, 4, 10.0),
            Err(Error::RankDeficient { rank: 2, .. })
        ));
    }
}
