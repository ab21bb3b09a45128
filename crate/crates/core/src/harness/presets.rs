//! Ready-made experiment lists reproducing the published figures.

use std::fmt;
use std::str::FromStr;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};

use super::config::{ExperimentConfig, Measure, RhoDb, Scheme, Sweep, SweepParam};

pub const DEFAULT_TRIALS: usize = 500;
pub const DEFAULT_SEED: u64 = 2016;

const ANTENNAS: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];
const SNR_GRID: [f64; 6] = [0.0, 10.0, 20.0, 30.0, 34.0, 40.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
        FigureId::Fig10,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
            FigureId::Fig10 => "fig10",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::config_field("figure", format!("unknown figure `{s}`")))
    }
}

fn base(
    name: String,
    scheme: Scheme,
    k: usize,
    m: usize,
    channel: ChannelModel,
) -> ExperimentConfig {
    ExperimentConfig {
        name,
        scheme,
        k,
        m,
        rho_db: RhoDb::One(34.0),
        trials: DEFAULT_TRIALS,
        master_seed: DEFAULT_SEED,
        measure: Measure::Rate,
        workers: 0,
        channel,
        sweep: None,
    }
}

/// Configs for one figure, using 500 trials and seed 2016.
///
/// * `fig2`: singular-vector amplitude law at `N = 16, 64`.
/// * `fig3`, `fig4`: phase-matched hybrid design against `N` (Rayleigh,
///   geometric with `L = 5`) at 34 dB.
/// * `fig7`: `B = 1..4` bit phase shifters, `N = 64`, SNR grid.
/// * `fig8`: multiuser hybrid ZF, `N_t = 64`, `K = 4`, SNR grid.
/// * `fig9`: selection threshold sweep at `N = 16, 64`.
/// * `fig10`: digital, phase-matched and 25 % selection on the SNR grid.
pub fn figure_preset(id: FigureId) -> Vec<ExperimentConfig> {
    let snr = || RhoDb::Many(SNR_GRID.to_vec());
    match id {
        FigureId::Fig2 => [16, 64]
            .into_iter()
            .map(|n| {
                let mut c = base(
                    format!("fig2-n{n}"),
                    Scheme::Digital,
                    4,
                    4,
                    ChannelModel::rayleigh(n, n),
                );
                c.measure = Measure::SingularVectorLaw;
                c
            })
            .collect(),
        FigureId::Fig3 => ANTENNAS
            .into_iter()
            .map(|n| {
                base(
                    format!("fig3-n{n}"),
                    Scheme::Lemma2,
                    4,
                    4,
                    ChannelModel::rayleigh(n, n),
                )
            })
            .collect(),
        FigureId::Fig4 => ANTENNAS
            .into_iter()
            .map(|n| {
                base(
                    format!("fig4-n{n}"),
                    Scheme::Lemma2,
                    4,
                    4,
                    ChannelModel::geometric(n, n, 5),
                )
            })
            .collect(),
        FigureId::Fig7 => (1..=4)
            .map(|bits| {
                let mut c = base(
                    format!("fig7-b{bits}"),
                    Scheme::Quantized(bits),
                    4,
                    4,
                    ChannelModel::rayleigh(64, 64),
                );
                c.rho_db = snr();
                c
            })
            .collect(),
        FigureId::Fig8 => {
            let mut c = base(
                "fig8".into(),
                Scheme::MuZfHybrid,
                4,
                4,
                ChannelModel::rayleigh(64, 4),
            );
            c.rho_db = snr();
            vec![c]
        }
        FigureId::Fig9 => [16, 64]
            .into_iter()
            .map(|n| {
                let mut c = base(
                    format!("fig9-n{n}"),
                    Scheme::Selection(0.0),
                    4,
                    4,
                    ChannelModel::rayleigh(n, n),
                );
                c.sweep = Some(Sweep {
                    param: SweepParam::Beta,
                    values: vec![0.0, 10.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0],
                });
                c
            })
            .collect(),
        FigureId::Fig10 => [
            ("digital", Scheme::Digital),
            ("lemma2", Scheme::Lemma2),
            ("selection25", Scheme::Selection(25.0)),
        ]
        .into_iter()
        .map(|(tag, scheme)| {
            let mut c = base(
                format!("fig10-{tag}"),
                scheme,
                4,
                4,
                ChannelModel::rayleigh(64, 64),
            );
            c.rho_db = snr();
            c
        })
        .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for id in FigureId::ALL {
            let cfgs = figure_preset(id);
            assert!(!cfgs.is_empty());
            for c in cfgs {
                c.validate().unwrap_or_else(|e| panic!("{}: {e}", c.name));
            }
        }
    }

    #[test]
    fn fig3_shape() {
        let c = figure_preset(FigureId::Fig3);
        assert_eq!(c.len(), 7);
        assert!(c.iter().all(|c| c.channel.n_t == c.channel.n_r));
        assert_eq!(c[6].channel.n_t, 512);
    }

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig5".parse::<FigureId>().is_err());
    }
}
