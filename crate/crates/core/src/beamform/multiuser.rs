use super::point_to_point::leading_svd;
use super::{phase_of, ActiveMask, BeamformerKind, HybridBeamformer};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

const MAX_CONDITION: f64 = 1e12;

fn check_users(chan: &ChannelRealization, k: usize) -> Result<()> {
    if chan.n_r() != k || k == 0 || k > chan.n_t() {
        return Err(Error::dim(
            "multiuser beamformer",
            format!(
                "{k} users but the channel is {}x{} (rows are single-antenna users)",
                chan.n_r(),
                chan.n_t()
            ),
        ));
    }
    Ok(())
}

fn checked_inverse(a: &ComplexMatrix, what: &'static str) -> Result<ComplexMatrix> {
    let inv = a.inverse()?;
    // Frobenius-norm bound on the 2-norm condition number.
    let condition = a.frobenius_norm() * inv.frobenius_norm();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Singular { what, condition });
    }
    Ok(inv)
}

fn assemble_mu(f_rf: ComplexMatrix, f_b: ComplexMatrix, kind: BeamformerKind) -> HybridBeamformer {
    let k = f_b.cols();
    let gamma_t = f_rf.matmul(&f_b).trace_gram() / k as f64;
    let n_t = f_rf.rows();
    let m = f_rf.cols();
    HybridBeamformer {
        f_rf,
        f_b,
        w_rf: None,
        w_b: None,
        power: vec![1.0 / k as f64; k],
        gamma_t,
        gamma_r: 1.0,
        active_mask: ActiveMask::all_active(n_t, m),
        rx_active_mask: None,
        kind,
    }
}

/// Phase-of-singular-vector RF precoder followed by a zero-forcing baseband
/// precoder `(H F_RF)^-1`. Users share power equally.
pub fn mu_zf_hybrid(chan: &ChannelRealization, k: usize, _rho: f64) -> Result<HybridBeamformer> {
    check_users(chan, k)?;
    let svd = leading_svd(chan, k)?;
    let f_rf = ComplexMatrix::from_fn(chan.n_t(), k, |r, c| phase_of(svd.v[(r, c)]));
    let f_b = checked_inverse(&chan.h.matmul(&f_rf), "H F_RF")?;
    Ok(assemble_mu(f_rf, f_b, BeamformerKind::PhaseOnly))
}

/// Fully digital zero forcing `F = H^H (H H^H)^-1`.
pub fn mu_zf_digital(chan: &ChannelRealization, k: usize, _rho: f64) -> Result<HybridBeamformer> {
    check_users(chan, k)?;
    let gram = chan.h.matmul(&chan.h.adjoint());
    let f = chan.h.adjoint().matmul(&checked_inverse(&gram, "H H^H")?);
    Ok(assemble_mu(
        f,
        ComplexMatrix::identity(k),
        BeamformerKind::Unconstrained,
    ))
}
