//! CSV writers. Missing or undefined values are written as empty fields.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::stats::rayleigh_pdf;

use super::runner::{ExperimentResult, LawSamples};

/// Column contract of the summary CSV.
pub const CSV_COLUMNS: [&str; 16] = [
    "experiment",
    "sweep_param",
    "sweep_value",
    "scheme",
    "n_t",
    "n_r",
    "k",
    "m",
    "rho_db",
    "trials",
    "mean_rate",
    "std_err",
    "analytic_rate",
    "mean_gap",
    "inactive_fraction",
    "excluded",
];

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn finish<W: Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes summary rows for any number of experiments into one stream.
pub fn write_summary<W: Write>(results: &[ExperimentResult], out: W) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for res in results {
        for (point, s) in res.rows() {
            let c = &point.config;
            w.write_record([
                res.name.clone(),
                res.sweep_param
                    .map(|p| p.name().to_string())
                    .unwrap_or_default(),
                opt(point.sweep_value),
                c.scheme.to_string(),
                c.channel.n_t.to_string(),
                c.channel.n_r.to_string(),
                c.k.to_string(),
                c.m.to_string(),
                num(s.rho_db),
                c.trials.to_string(),
                num(s.mean_rate),
                num(s.rate_std_error),
                opt(s.analytic_rate),
                num(s.mean_gap),
                num(s.mean_inactive_fraction),
                s.excluded_count.to_string(),
            ])?;
        }
    }
    Ok(w)
}

pub fn write_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    let w = write_summary(results, create(path)?)?;
    finish(w, path)
}

/// Per-trial records of every point.
pub fn write_trials_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record([
        "experiment",
        "sweep_value",
        "trial_index",
        "rho_db",
        "capacity_bits",
        "rate_bits",
        "gap_bits",
        "reference_bits",
        "inactive_fraction",
        "gamma_t",
        "degenerate",
    ])?;
    for res in results {
        for p in &res.points {
            for r in &p.records {
                w.write_record([
                    res.name.clone(),
                    opt(p.sweep_value),
                    r.trial_index.to_string(),
                    num(r.rho_db),
                    num(r.capacity_bits),
                    num(r.rate_bits),
                    num(r.gap_bits),
                    num(r.reference_bits),
                    num(r.inactive_fraction),
                    num(r.gamma_t),
                    r.degenerate.to_string(),
                ])?;
            }
        }
    }
    finish(w, path)
}

/// Normalised histogram of the amplitude samples next to the Rayleigh
/// density, `bins` equal bins over `[0, 3]`.
pub fn write_law_histogram(laws: &[(String, LawSamples)], bins: usize, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record([
        "experiment",
        "n_t",
        "bin_lo",
        "bin_hi",
        "empirical_pdf",
        "rayleigh_pdf",
        "ks_distance",
    ])?;
    let hi = 3.0;
    let width = hi / bins as f64;
    let sigma = std::f64::consts::FRAC_1_SQRT_2;
    for (name, law) in laws {
        let mut counts = vec![0usize; bins];
        for &x in &law.samples {
            let b = (x / width) as usize;
            if b < bins {
                counts[b] += 1;
            }
        }
        let total = law.samples.len().max(1) as f64;
        for (b, &count) in counts.iter().enumerate() {
            let lo = b as f64 * width;
            w.write_record([
                name.clone(),
                law.n_t.to_string(),
                num(lo),
                num(lo + width),
                num(count as f64 / (total * width)),
                num(rayleigh_pdf(lo + 0.5 * width, sigma)),
                num(law.ks_distance),
            ])?;
        }
    }
    finish(w, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelModel;
    use crate::harness::config::{ExperimentConfig, Measure, RhoDb, Scheme, Sweep, SweepParam};
    use crate::harness::runner::run_experiment;

    #[test]
    fn header_and_rows() {
        let cfg = ExperimentConfig {
            name: "csv".into(),
            scheme: Scheme::Lemma2,
            k: 2,
            m: 2,
            rho_db: RhoDb::One(20.0),
            trials: 3,
            master_seed: 1,
            measure: Measure::Rate,
            workers: 0,
            channel: ChannelModel::rayleigh(8, 8),
            sweep: Some(Sweep {
                param: SweepParam::N,
                values: vec![4.0, 8.0],
            }),
        };
        let res = run_experiment(&cfg).unwrap();
        let w = write_summary(&[res], Vec::new()).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("csv,n,4,lemma2,4,4,2,2,20,3,"));
    }
}
