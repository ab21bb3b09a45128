//! Channel realizations: i.i.d. Rayleigh fading and the sparse geometric
//! (multipath) model built from uniform-linear-array steering vectors.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{thin_svd, ComplexMatrix, SeededRng, SvdResult};

/// Rank of the cached decomposition. Every scheme in this crate asks for at
/// most this many singular triplets at a time.
const SVD_CACHE_RANK: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Rayleigh,
    Geometric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    pub n_t: usize,
    pub n_r: usize,
    #[serde(default = "default_paths")]
    pub l_paths: usize,
    #[serde(default = "default_spacing")]
    pub spacing_over_wavelength: f64,
    /// Range the path angles are drawn from, radians, within `[0, pi]`.
    #[serde(default = "default_angle_range")]
    pub angle_range: [f64; 2],
}

fn default_paths() -> usize {
    5
}

fn default_spacing() -> f64 {
    0.5
}

fn default_angle_range() -> [f64; 2] {
    [0.0, PI]
}

impl ChannelModel {
    pub fn rayleigh(n_t: usize, n_r: usize) -> Self {
        Self {
            kind: ChannelKind::Rayleigh,
            n_t,
            n_r,
            l_paths: default_paths(),
            spacing_over_wavelength: default_spacing(),
            angle_range: default_angle_range(),
        }
    }

    pub fn geometric(n_t: usize, n_r: usize, l_paths: usize) -> Self {
        Self {
            kind: ChannelKind::Geometric,
            l_paths,
            ..Self::rayleigh(n_t, n_r)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t == 0 || self.n_r == 0 {
            return Err(Error::config_field(
                "channel",
                format!(
                    "array sizes must be positive (n_t = {}, n_r = {})",
                    self.n_t, self.n_r
                ),
            ));
        }
        if self.kind == ChannelKind::Geometric
            && (self.l_paths == 0 || self.l_paths > self.n_t.min(self.n_r))
        {
            return Err(Error::config_field(
                "channel.l_paths",
                format!(
                    "{} paths; need 1 <= l_paths <= min(n_t, n_r) = {}",
                    self.l_paths,
                    self.n_t.min(self.n_r)
                ),
            ));
        }
        if !(self.spacing_over_wavelength.is_finite() && self.spacing_over_wavelength > 0.0) {
            return Err(Error::config_field(
                "channel.spacing_over_wavelength",
                format!("{} is not a positive spacing", self.spacing_over_wavelength),
            ));
        }
        let [lo, hi] = self.angle_range;
        if !(0.0..=PI).contains(&lo) || !(0.0..=PI).contains(&hi) || lo > hi {
            return Err(Error::config_field(
                "channel.angle_range",
                format!("[{lo}, {hi}] is not an interval inside [0, pi]"),
            ));
        }
        Ok(())
    }
}

/// One multipath component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Path {
    pub beta: Complex64,
    pub phi_t: f64,
    pub phi_r: f64,
}

#[derive(Debug)]
pub struct ChannelRealization {
    pub h: ComplexMatrix,
    pub model: ChannelModel,
    /// Geometric channels only, sorted by descending `|beta|`.
    pub paths: Option<Vec<Path>>,
    svd: OnceLock<Result<SvdResult, String>>,
}

impl Clone for ChannelRealization {
    fn clone(&self) -> Self {
        Self {
            h: self.h.clone(),
            model: self.model.clone(),
            paths: self.paths.clone(),
            svd: OnceLock::new(),
        }
    }
}

impl ChannelRealization {
    /// Wraps an arbitrary `n_r x n_t` matrix as a Rayleigh-kind realization.
    pub fn from_matrix(h: ComplexMatrix) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::Domain {
                what: "channel entry",
                value: f64::NAN,
            });
        }
        let model = ChannelModel::rayleigh(h.cols(), h.rows());
        Ok(Self {
            h,
            model,
            paths: None,
            svd: OnceLock::new(),
        })
    }

    /// Assembles a geometric channel from explicit paths.
    pub fn from_paths(model: &ChannelModel, paths: &[Path]) -> Result<Self> {
        model.validate()?;
        let (n_t, n_r) = (model.n_t, model.n_r);
        let d = model.spacing_over_wavelength;
        let mut sorted = paths.to_vec();
        sorted.sort_by(|a, b| b.beta.norm().total_cmp(&a.beta.norm()));
        let gain = ((n_t * n_r) as f64 / paths.len().max(1) as f64).sqrt();
        let mut h = ComplexMatrix::zeros(n_r, n_t);
        for p in &sorted {
            let a_r = steering_vector(p.phi_r, n_r, d)?;
            let a_t = steering_vector(p.phi_t, n_t, d)?;
            let coeff = p.beta * gain;
            for (r, ar) in a_r.iter().enumerate() {
                let row = coeff * ar;
                for (c, at) in a_t.iter().enumerate() {
                    h[(r, c)] += row * at.conj();
                }
            }
        }
        Ok(Self {
            h,
            model: model.clone(),
            paths: Some(sorted),
            svd: OnceLock::new(),
        })
    }

    pub fn n_t(&self) -> usize {
        self.h.cols()
    }

    pub fn n_r(&self) -> usize {
        self.h.rows()
    }

    /// Leading `m` singular triplets of `h`. Small ranks are computed once
    /// per realization and cached.
    pub fn svd(&self, m: usize) -> Result<SvdResult> {
        let min_dim = self.n_t().min(self.n_r());
        let cache_rank = SVD_CACHE_RANK.min(min_dim);
        if m > cache_rank {
            return thin_svd(&self.h, m);
        }
        let cached = self
            .svd
            .get_or_init(|| thin_svd(&self.h, cache_rank).map_err(|e| e.to_string()));
        match cached {
            Ok(full) => Ok(full.truncate(m)),
            // Recompute to hand back a typed error.
            Err(_) => thin_svd(&self.h, m),
        }
    }
}

/// Uniform linear array response toward `phi`:
/// entry `i` is `exp(j 2 pi d i cos(phi)) / sqrt(n)`.
pub fn steering_vector(phi: f64, n: usize, spacing_over_wavelength: f64) -> Result<Vec<Complex64>> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Domain {
            what: "steering angle",
            value: phi,
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput {
            what: "steering_vector",
        });
    }
    let norm = 1.0 / (n as f64).sqrt();
    let k = 2.0 * PI * spacing_over_wavelength * phi.cos();
    Ok((0..n)
        .map(|i| Complex64::from_polar(norm, k * i as f64))
        .collect())
}

/// Draws one realization. Rayleigh entries are filled row by row; geometric
/// paths draw `beta`, then `phi_t`, then `phi_r` for each path in turn.
pub fn draw_channel(model: &ChannelModel, rng: &mut SeededRng) -> Result<ChannelRealization> {
    model.validate()?;
    match model.kind {
        ChannelKind::Rayleigh => {
            let h = ComplexMatrix::from_fn(model.n_r, model.n_t, |_, _| rng.complex_gaussian());
            Ok(ChannelRealization {
                h,
                model: model.clone(),
                paths: None,
                svd: OnceLock::new(),
            })
        }
        ChannelKind::Geometric => {
            let [lo, hi] = model.angle_range;
            let paths: Vec<Path> = (0..model.l_paths)
                .map(|_| {
                    let beta = rng.complex_gaussian();
                    let phi_t = rng.uniform_range(lo, hi);
                    let phi_r = rng.uniform_range(lo, hi);
                    Path { beta, phi_t, phi_r }
                })
                .collect();
            ChannelRealization::from_paths(model, &paths)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadside_and_endfire() {
        let v = steering_vector(PI / 2.0, 4, 0.5).unwrap();
        for z in &v {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        let v = steering_vector(0.0, 4, 0.5).unwrap();
        let expected = [0.5, -0.5, 0.5, -0.5];
        for (z, e) in v.iter().zip(expected) {
            assert!((z - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn steering_rejects_out_of_range() {
        assert!(steering_vector(-0.1, 4, 0.5).is_err());
        assert!(steering_vector(PI + 1e-9, 4, 0.5).is_err());
    }

    #[test]
    fn single_path_is_rank_one() {
        let model = ChannelModel::geometric(32, 32, 1);
        let chan = draw_channel(&model, &mut SeededRng::new(3, 0)).unwrap();
        let svd = chan.svd(2).unwrap();
        assert!(svd.sigma[1] <= 1e-8 * svd.sigma[0]);
    }

    #[test]
    fn paths_sorted_by_gain() {
        let model = ChannelModel::geometric(16, 16, 5);
        let chan = draw_channel(&model, &mut SeededRng::new(9, 1)).unwrap();
        let paths = chan.paths.as_ref().unwrap();
        assert!(paths
            .windows(2)
            .all(|w| w[0].beta.norm() >= w[1].beta.norm()));
    }

    #[test]
    fn identical_streams_identical_channels() {
        let model = ChannelModel::rayleigh(8, 4);
        let a = draw_channel(&model, &mut SeededRng::new(1, 2)).unwrap();
        let b = draw_channel(&model, &mut SeededRng::new(1, 2)).unwrap();
        assert_eq!(a.h, b.h);
    }

    #[test]
    fn validation() {
        assert!(ChannelModel::geometric(4, 4, 5).validate().is_err());
        assert!(ChannelModel::rayleigh(0, 4).validate().is_err());
        let mut m = ChannelModel::rayleigh(4, 4);
        m.angle_range = [0.0, 4.0];
        assert!(m.validate().is_err());
    }
}
