//! Monte-Carlo execution of an [`ExperimentConfig`].
//!
//! Trial `i` draws its channel from stream `(master_seed, i)`, so any trial
//! can be replayed alone and the worker count never changes a result.
//! Records are collected in trial order and all means are taken in that
//! order, which keeps summaries byte-identical across schedules.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic;
use crate::beamform::{
    digital_svd_beamformer, hybrid_double_rf, hybrid_lemma2, hybrid_mixed, mu_zf_digital,
    mu_zf_hybrid, quantize_rf, select_phase_shifters, PhaseResolution, SelectionPolicy,
};
use crate::channel::{draw_channel, ChannelRealization};
use crate::error::{Error, Result};
use crate::numerics::stats::{ks_statistic, lag1_autocorrelation, mean, rayleigh_cdf, std_error};
use crate::numerics::SeededRng;
use crate::rate::{achievable_rate, capacity_p2p, sum_rate_mu};

use super::config::{ExperimentConfig, Measure, Scheme, SweepParam};

/// One channel realization evaluated at one SNR.
///
/// Equality is bitwise on every float, so NaN placeholders compare equal
/// and reruns can be checked for exact reproduction.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub rho_db: f64,
    pub capacity_bits: f64,
    pub rate_bits: f64,
    pub gap_bits: f64,
    /// Unquantized rate for quantized schemes; otherwise NaN.
    pub reference_bits: f64,
    pub inactive_fraction: f64,
    pub gamma_t: f64,
    pub degenerate: bool,
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

fn same_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => same(a, b),
        (None, None) => true,
        _ => false,
    }
}

impl PartialEq for TrialRecord {
    fn eq(&self, o: &Self) -> bool {
        self.trial_index == o.trial_index
            && self.degenerate == o.degenerate
            && same(self.rho_db, o.rho_db)
            && same(self.capacity_bits, o.capacity_bits)
            && same(self.rate_bits, o.rate_bits)
            && same(self.gap_bits, o.gap_bits)
            && same(self.reference_bits, o.reference_bits)
            && same(self.inactive_fraction, o.inactive_fraction)
            && same(self.gamma_t, o.gamma_t)
    }
}

impl PartialEq for SummaryStats {
    fn eq(&self, o: &Self) -> bool {
        self.trial_count == o.trial_count
            && self.excluded_count == o.excluded_count
            && [
                (self.rho_db, o.rho_db),
                (self.mean_capacity, o.mean_capacity),
                (self.capacity_std_error, o.capacity_std_error),
                (self.mean_rate, o.mean_rate),
                (self.rate_std_error, o.rate_std_error),
                (self.mean_gap, o.mean_gap),
                (self.gap_std_error, o.gap_std_error),
                (self.mean_reference_gap, o.mean_reference_gap),
                (self.reference_gap_std_error, o.reference_gap_std_error),
                (self.mean_inactive_fraction, o.mean_inactive_fraction),
                (self.mean_gamma_t, o.mean_gamma_t),
                (self.rate_lag1_autocorrelation, o.rate_lag1_autocorrelation),
            ]
            .iter()
            .all(|&(a, b)| same(a, b))
            && same_opt(self.analytic_gap, o.analytic_gap)
            && same_opt(self.analytic_rate, o.analytic_rate)
    }
}

impl TrialRecord {
    fn degenerate(trial_index: usize, rho_db: f64) -> Self {
        Self {
            trial_index,
            rho_db,
            capacity_bits: f64::NAN,
            rate_bits: f64::NAN,
            gap_bits: f64::NAN,
            reference_bits: f64::NAN,
            inactive_fraction: f64::NAN,
            gamma_t: f64::NAN,
            degenerate: true,
        }
    }
}

/// Aggregates over the non-degenerate trials at one SNR. Equality is
/// bitwise, as for [`TrialRecord`].
#[derive(Clone, Debug, Serialize)]
pub struct SummaryStats {
    pub rho_db: f64,
    pub trial_count: usize,
    pub excluded_count: usize,
    pub mean_capacity: f64,
    pub capacity_std_error: f64,
    pub mean_rate: f64,
    pub rate_std_error: f64,
    pub mean_gap: f64,
    pub gap_std_error: f64,
    /// Mean of `reference - rate` (quantization loss); NaN when unused.
    pub mean_reference_gap: f64,
    pub reference_gap_std_error: f64,
    pub mean_inactive_fraction: f64,
    pub mean_gamma_t: f64,
    pub rate_lag1_autocorrelation: f64,
    /// Closed-form gap for the scheme, when one exists.
    pub analytic_gap: Option<f64>,
    /// `mean_capacity - analytic_gap`.
    pub analytic_rate: Option<f64>,
}

impl SummaryStats {
    fn from_records(rho_db: f64, records: &[&TrialRecord], analytic_gap: Option<f64>) -> Self {
        let ok: Vec<&TrialRecord> = records.iter().copied().filter(|r| !r.degenerate).collect();
        let col = |f: &dyn Fn(&TrialRecord) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<f64>>();
        let cap = col(&|r| r.capacity_bits);
        let rate = col(&|r| r.rate_bits);
        let gap = col(&|r| r.gap_bits);
        let ref_gap: Vec<f64> = ok
            .iter()
            .filter(|r| r.reference_bits.is_finite())
            .map(|r| r.reference_bits - r.rate_bits)
            .collect();
        let or_nan =
            |xs: &[f64], f: fn(&[f64]) -> f64| if xs.is_empty() { f64::NAN } else { f(xs) };
        let mean_capacity = or_nan(&cap, mean);
        Self {
            rho_db,
            trial_count: ok.len(),
            excluded_count: records.len() - ok.len(),
            mean_capacity,
            capacity_std_error: or_nan(&cap, std_error),
            mean_rate: or_nan(&rate, mean),
            rate_std_error: or_nan(&rate, std_error),
            mean_gap: or_nan(&gap, mean),
            gap_std_error: or_nan(&gap, std_error),
            mean_reference_gap: or_nan(&ref_gap, mean),
            reference_gap_std_error: or_nan(&ref_gap, std_error),
            mean_inactive_fraction: or_nan(&col(&|r| r.inactive_fraction), mean),
            mean_gamma_t: or_nan(&col(&|r| r.gamma_t), mean),
            rate_lag1_autocorrelation: if rate.len() > 2 {
                lag1_autocorrelation(&rate)
            } else {
                f64::NAN
            },
            analytic_gap,
            analytic_rate: analytic_gap.map(|g| analytic::predicted_rate(mean_capacity, g)),
        }
    }
}

/// Pooled `sqrt(N_t) |V_ij|` samples from the leading `k` right singular
/// vectors, with the KS distance to the Rayleigh(1/sqrt 2) law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawSamples {
    pub n_t: usize,
    pub samples: Vec<f64>,
    pub ks_distance: f64,
    pub excluded_count: usize,
}

/// Everything measured at one sweep value.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub config: ExperimentConfig,
    pub sweep_value: Option<f64>,
    /// One summary per SNR value, in config order.
    pub summaries: Vec<SummaryStats>,
    pub records: Vec<TrialRecord>,
    pub law: Option<LawSamples>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub name: String,
    pub sweep_param: Option<SweepParam>,
    pub points: Vec<PointResult>,
}

impl ExperimentResult {
    /// Summary rows flattened over sweep values and SNR.
    pub fn rows(&self) -> impl Iterator<Item = (&PointResult, &SummaryStats)> {
        self.points
            .iter()
            .flat_map(|p| p.summaries.iter().map(move |s| (p, s)))
    }
}

/// Closed-form gap predicted for a scheme, if the analysis covers it.
pub fn analytic_gap(cfg: &ExperimentConfig) -> Option<f64> {
    let k = cfg.k;
    match cfg.scheme {
        Scheme::Digital | Scheme::DoubleRf | Scheme::MuZfDigital => Some(0.0),
        Scheme::Lemma2 => analytic::gap_lemma3(k).ok(),
        Scheme::Mixed => analytic::gap_general(k, cfg.m).ok(),
        Scheme::Quantized(bits) => {
            Some(analytic::gap_lemma3(k).ok()? + analytic::quant_gap_bound(k, bits).ok()?)
        }
        Scheme::Selection(beta) => analytic::gap_selection(k, beta).ok(),
        Scheme::MuZfHybrid => analytic::gap_multiuser(k).ok(),
    }
}

struct Evaluation {
    capacity: f64,
    rate: f64,
    reference: f64,
    inactive: f64,
    gamma_t: f64,
}

fn evaluate(cfg: &ExperimentConfig, chan: &ChannelRealization, rho: f64) -> Result<Evaluation> {
    let k = cfg.k;
    let single = |bf: crate::beamform::HybridBeamformer| -> Result<Evaluation> {
        Ok(Evaluation {
            capacity: capacity_p2p(chan, k, rho)?.rate_bits,
            rate: achievable_rate(chan, &bf, rho)?.rate_bits,
            reference: f64::NAN,
            inactive: bf.inactive_fraction(),
            gamma_t: bf.gamma_t,
        })
    };
    match cfg.scheme {
        Scheme::Digital => single(digital_svd_beamformer(chan, k, rho)?),
        Scheme::Lemma2 => single(hybrid_lemma2(chan, k, rho)?),
        Scheme::DoubleRf => single(hybrid_double_rf(chan, k, rho)?),
        Scheme::Mixed => single(hybrid_mixed(chan, k, cfg.m, rho)?),
        Scheme::Selection(beta) => single(select_phase_shifters(
            chan,
            k,
            rho,
            SelectionPolicy::new(beta)?,
        )?),
        Scheme::Quantized(bits) => {
            let analog = hybrid_lemma2(chan, k, rho)?;
            let reference = achievable_rate(chan, &analog, rho)?.rate_bits;
            let q = quantize_rf(chan, &analog, PhaseResolution::digital(bits)?, rho)?;
            let mut e = single(q)?;
            e.reference = reference;
            Ok(e)
        }
        Scheme::MuZfDigital | Scheme::MuZfHybrid => {
            let zf = mu_zf_digital(chan, k, rho)?;
            let capacity = sum_rate_mu(chan, &zf, rho)?.rate_bits;
            let bf = if cfg.scheme == Scheme::MuZfHybrid {
                mu_zf_hybrid(chan, k, rho)?
            } else {
                zf
            };
            Ok(Evaluation {
                capacity,
                rate: sum_rate_mu(chan, &bf, rho)?.rate_bits,
                reference: f64::NAN,
                inactive: bf.inactive_fraction(),
                gamma_t: bf.gamma_t,
            })
        }
    }
}

/// Runs every trial of one sweep-free config; one record per trial and SNR.
pub fn run_trial(cfg: &ExperimentConfig, trial_index: usize) -> Result<Vec<TrialRecord>> {
    let mut rng = SeededRng::new(cfg.master_seed, trial_index as u64);
    let chan = match draw_channel(&cfg.channel, &mut rng) {
        Ok(c) => c,
        Err(e) if e.is_degenerate_trial() => {
            return Ok(cfg
                .rho_points()
                .into_iter()
                .map(|(db, _)| TrialRecord::degenerate(trial_index, db))
                .collect())
        }
        Err(e) => return Err(e),
    };
    cfg.rho_points()
        .into_iter()
        .map(|(db, rho)| match evaluate(cfg, &chan, rho) {
            Ok(e) => Ok(TrialRecord {
                trial_index,
                rho_db: db,
                capacity_bits: e.capacity,
                rate_bits: e.rate,
                gap_bits: e.capacity - e.rate,
                reference_bits: e.reference,
                inactive_fraction: e.inactive,
                gamma_t: e.gamma_t,
                degenerate: false,
            }),
            Err(err) if err.is_degenerate_trial() => Ok(TrialRecord::degenerate(trial_index, db)),
            Err(err) => Err(err),
        })
        .collect()
}

fn law_trial(cfg: &ExperimentConfig, trial_index: usize) -> Result<Option<Vec<f64>>> {
    let mut rng = SeededRng::new(cfg.master_seed, trial_index as u64);
    let chan = draw_channel(&cfg.channel, &mut rng)?;
    let svd = match chan.svd(cfg.k) {
        Ok(s) => s,
        Err(e) if e.is_degenerate_trial() => return Ok(None),
        Err(e) => return Err(e),
    };
    let scale = (chan.n_t() as f64).sqrt();
    let v = svd.v.leading_columns(cfg.k);
    Ok(Some(
        v.as_slice().iter().map(|z| scale * z.norm()).collect(),
    ))
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config_field("workers", e.to_string()))?;
    Ok(pool.install(job))
}

fn run_point(cfg: &ExperimentConfig, sweep_value: Option<f64>) -> Result<PointResult> {
    let trials = cfg.trials;
    match cfg.measure {
        Measure::Rate => {
            let per_trial: Vec<Result<Vec<TrialRecord>>> = in_pool(cfg.workers, || {
                (0..trials)
                    .into_par_iter()
                    .map(|i| run_trial(cfg, i))
                    .collect()
            })?;
            let mut records = Vec::with_capacity(trials * cfg.rho_db_values().len());
            for r in per_trial {
                records.extend(r?);
            }
            let gap = analytic_gap(cfg);
            let summaries = cfg
                .rho_db_values()
                .into_iter()
                .map(|db| {
                    let at: Vec<&TrialRecord> = records.iter().filter(|r| r.rho_db == db).collect();
                    SummaryStats::from_records(db, &at, gap)
                })
                .collect();
            Ok(PointResult {
                config: cfg.clone(),
                sweep_value,
                summaries,
                records,
                law: None,
            })
        }
        Measure::SingularVectorLaw => {
            let per_trial: Vec<Result<Option<Vec<f64>>>> = in_pool(cfg.workers, || {
                (0..trials)
                    .into_par_iter()
                    .map(|i| law_trial(cfg, i))
                    .collect()
            })?;
            let mut samples = Vec::new();
            let mut excluded = 0;
            for r in per_trial {
                match r? {
                    Some(s) => samples.extend(s),
                    None => excluded += 1,
                }
            }
            let sigma = std::f64::consts::FRAC_1_SQRT_2;
            let ks = ks_statistic(&samples, |x| rayleigh_cdf(x, sigma))?;
            Ok(PointResult {
                config: cfg.clone(),
                sweep_value,
                summaries: Vec::new(),
                records: Vec::new(),
                law: Some(LawSamples {
                    n_t: cfg.channel.n_t,
                    samples,
                    ks_distance: ks,
                    excluded_count: excluded,
                }),
            })
        }
    }
}

/// Validates the config, expands any sweep and runs every point.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let sweep = cfg.sweep.as_ref();
    let points = cfg
        .expand()?
        .iter()
        .enumerate()
        .map(|(i, p)| run_point(p, sweep.map(|s| s.values[i])))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        name: cfg.name.clone(),
        sweep_param: sweep.map(|s| s.param),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelModel;
    use crate::harness::config::RhoDb;

    fn cfg(scheme: Scheme, m: usize, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            name: "t".into(),
            scheme,
            k: 2,
            m,
            rho_db: RhoDb::Many(vec![10.0, 30.0]),
            trials,
            master_seed: 3,
            measure: Measure::Rate,
            workers: 0,
            channel: ChannelModel::rayleigh(8, 8),
            sweep: None,
        }
    }

    #[test]
    fn digital_and_double_rf_agree() {
        let d = run_experiment(&cfg(Scheme::Digital, 2, 6)).unwrap();
        let h = run_experiment(&cfg(Scheme::DoubleRf, 4, 6)).unwrap();
        for ((_, a), (_, b)) in d.rows().zip(h.rows()) {
            assert!((a.mean_rate - b.mean_rate).abs() < 1e-9);
        }
    }

    #[test]
    fn gap_identity_and_ordering() {
        let r = run_experiment(&cfg(Scheme::Lemma2, 2, 5)).unwrap();
        let recs = &r.points[0].records;
        assert_eq!(recs.len(), 10);
        for (i, rec) in recs.iter().enumerate() {
            assert_eq!(rec.trial_index, i / 2);
            assert!((rec.gap_bits - (rec.capacity_bits - rec.rate_bits)).abs() < 1e-9);
        }
    }

    #[test]
    fn worker_count_does_not_change_records() {
        let mut a = cfg(Scheme::Quantized(2), 2, 8);
        a.workers = 1;
        let mut b = a.clone();
        b.workers = 3;
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        assert_eq!(ra.points[0].records, rb.points[0].records);
        assert_eq!(ra.points[0].summaries, rb.points[0].summaries);
    }

    #[test]
    fn degenerate_trials_are_counted() {
        // A rank-2 geometric channel cannot carry 3 streams.
        let mut c = cfg(Scheme::Lemma2, 3, 4);
        c.k = 3;
        c.channel = ChannelModel::geometric(8, 8, 2);
        let r = run_experiment(&c).unwrap();
        let s = &r.points[0].summaries[0];
        assert_eq!(s.excluded_count, 4);
        assert_eq!(s.trial_count, 0);
        assert!(s.mean_rate.is_nan());
    }
}
