//! Beamformer constructions.
//!
//! Every constructor returns a [`HybridBeamformer`] whose normalisation
//! factors and power allocation are computed from the matrices it holds, so
//! a beamformer can be evaluated by [`crate::rate`] without further context.

mod multiuser;
mod point_to_point;
mod quantize;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use multiuser::{mu_zf_digital, mu_zf_hybrid};
pub use point_to_point::{
    digital_svd_beamformer, hybrid_double_rf, hybrid_lemma2, hybrid_mixed, hybrid_mixed_from_svd,
    select_phase_shifters,
};
pub use quantize::{quantize_phase, quantize_rf, quantize_rf_with, PhaseDistance};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::rate::waterfill;

/// Whether the RF matrices are phase-shifter networks or plain matrices
/// (the fully digital baselines reuse the same container).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamformerKind {
    PhaseOnly,
    Unconstrained,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseResolution {
    Analog,
    Digital { bits: u32 },
}

impl PhaseResolution {
    pub fn digital(bits: u32) -> Result<Self> {
        if (1..=16).contains(&bits) {
            Ok(PhaseResolution::Digital { bits })
        } else {
            Err(Error::Domain {
                what: "phase-shifter bits",
                value: bits as f64,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionPolicy {
    beta_percent: f64,
}

impl SelectionPolicy {
    pub fn new(beta_percent: f64) -> Result<Self> {
        crate::analytic::alpha_from_beta(beta_percent)?;
        Ok(Self { beta_percent })
    }

    pub fn beta_percent(&self) -> f64 {
        self.beta_percent
    }

    pub fn alpha(&self) -> f64 {
        crate::analytic::alpha_from_beta(self.beta_percent).expect("validated at construction")
    }
}

/// Which phase shifters are switched on, `rows x cols` row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveMask {
    rows: usize,
    cols: usize,
    on: Vec<bool>,
}

impl ActiveMask {
    pub fn all_active(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            on: vec![true; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut on = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                on.push(f(r, c));
            }
        }
        Self { rows, cols, on }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_active(&self, r: usize, c: usize) -> bool {
        self.on[r * self.cols + c]
    }

    pub fn inactive_count(&self) -> usize {
        self.on.iter().filter(|&&b| !b).count()
    }

    pub fn inactive_fraction(&self) -> f64 {
        if self.on.is_empty() {
            0.0
        } else {
            self.inactive_count() as f64 / self.on.len() as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct HybridBeamformer {
    /// `N_t x M`.
    pub f_rf: ComplexMatrix,
    /// `M x K`.
    pub f_b: ComplexMatrix,
    /// `N_r x M`; absent for multiuser downlink.
    pub w_rf: Option<ComplexMatrix>,
    /// `M x K`; absent for multiuser downlink.
    pub w_b: Option<ComplexMatrix>,
    /// Per-stream power, summing to at most one.
    pub power: Vec<f64>,
    pub gamma_t: f64,
    pub gamma_r: f64,
    pub active_mask: ActiveMask,
    pub rx_active_mask: Option<ActiveMask>,
    pub kind: BeamformerKind,
}

impl HybridBeamformer {
    pub fn streams(&self) -> usize {
        self.f_b.cols()
    }

    pub fn rf_chains(&self) -> usize {
        self.f_rf.cols()
    }

    /// `F = F_RF F_B`.
    pub fn precoder(&self) -> ComplexMatrix {
        self.f_rf.matmul(&self.f_b)
    }

    /// `W = W_RF W_B`.
    pub fn combiner(&self) -> Option<ComplexMatrix> {
        match (&self.w_rf, &self.w_b) {
            (Some(rf), Some(b)) => Some(rf.matmul(b)),
            _ => None,
        }
    }

    /// Fraction of transmit phase shifters switched off.
    pub fn inactive_fraction(&self) -> f64 {
        self.active_mask.inactive_fraction()
    }

    /// Checks the structural invariants: unit-modulus active RF entries,
    /// exact zeros elsewhere, a feasible power vector and stored
    /// normalisations that match the matrices.
    pub fn check_invariants(&self) -> Result<()> {
        if self.kind == BeamformerKind::PhaseOnly {
            check_phase_matrix("transmit", &self.f_rf, &self.active_mask)?;
            if let (Some(w), Some(mask)) = (&self.w_rf, &self.rx_active_mask) {
                check_phase_matrix("receive", w, mask)?;
            }
        }
        let total: f64 = self.power.iter().sum();
        if self.power.iter().any(|&p| p < 0.0) || total > 1.0 + 1e-12 {
            return Err(Error::Domain {
                what: "power allocation total",
                value: total,
            });
        }
        let k = self.streams() as f64;
        let gt = self.precoder().trace_gram() / k;
        if (gt - self.gamma_t).abs() > 1e-10 * gt.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Domain {
                what: "stored gamma_t",
                value: self.gamma_t,
            });
        }
        if let Some(w) = self.combiner() {
            let gr = w.trace_gram() / k;
            if (gr - self.gamma_r).abs() > 1e-10 * gr.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::Domain {
                    what: "stored gamma_r",
                    value: self.gamma_r,
                });
            }
        }
        Ok(())
    }
}

fn check_phase_matrix(side: &'static str, m: &ComplexMatrix, mask: &ActiveMask) -> Result<()> {
    if m.shape() != mask.shape() {
        return Err(Error::dim(
            "HybridBeamformer",
            format!("{side} mask shape does not match the RF matrix"),
        ));
    }
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m[(r, c)];
            let ok = if mask.is_active(r, c) {
                (z.norm() - 1.0).abs() <= 1e-12
            } else {
                z == Complex64::new(0.0, 0.0)
            };
            if !ok {
                return Err(Error::Domain {
                    what: "RF entry modulus",
                    value: z.norm(),
                });
            }
        }
    }
    Ok(())
}

/// Unit-modulus entry with the phase of `z`; zero maps to phase 0.
pub(crate) fn phase_of(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        z / z.norm()
    }
}

/// Fills in normalisations and waterfilled power for a point-to-point
/// design. Per-stream gains are the diagonal of the normalised effective
/// channel `W^H H F / sqrt(Gt Gr)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble_p2p(
    chan: &ChannelRealization,
    rho: f64,
    f_rf: ComplexMatrix,
    f_b: ComplexMatrix,
    w_rf: ComplexMatrix,
    w_b: ComplexMatrix,
    active_mask: ActiveMask,
    rx_active_mask: ActiveMask,
    kind: BeamformerKind,
) -> Result<HybridBeamformer> {
    let f = f_rf.matmul(&f_b);
    let w = w_rf.matmul(&w_b);
    let k = f.cols() as f64;
    let gamma_t = f.trace_gram() / k;
    let gamma_r = w.trace_gram() / k;
    let eff = w.adjoint_matmul(&chan.h.matmul(&f));
    let gains: Vec<f64> = (0..f.cols())
        .map(|i| eff[(i, i)].norm_sqr() / (gamma_t * gamma_r))
        .collect();
    let power = waterfill(&gains, rho, 1.0)?;
    Ok(HybridBeamformer {
        f_rf,
        f_b,
        w_rf: Some(w_rf),
        w_b: Some(w_b),
        power,
        gamma_t,
        gamma_r,
        active_mask,
        rx_active_mask: Some(rx_active_mask),
        kind,
    })
}
