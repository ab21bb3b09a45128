//! Declarative experiment descriptions, stored as TOML.
//!
//! ```toml
//! name = "lemma2-n64"
//! scheme = "lemma2"        # or "quantized:3", "selection:25", "mixed", ...
//! k = 4
//! m = 4
//! rho_db = 34.0            # a single value or a list
//! trials = 500
//! master_seed = 1
//!
//! [channel]
//! kind = "rayleigh"
//! n_t = 64
//! n_r = 64
//!
//! [sweep]                  # optional
//! param = "n"
//! values = [16, 32, 64]
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beamform::{PhaseResolution, SelectionPolicy};
use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::rate::db_to_linear;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    Digital,
    Lemma2,
    DoubleRf,
    Mixed,
    Quantized(u32),
    Selection(f64),
    MuZfHybrid,
    MuZfDigital,
}

impl Scheme {
    pub fn is_multiuser(&self) -> bool {
        matches!(self, Scheme::MuZfHybrid | Scheme::MuZfDigital)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Digital => write!(f, "digital"),
            Scheme::Lemma2 => write!(f, "lemma2"),
            Scheme::DoubleRf => write!(f, "double_rf"),
            Scheme::Mixed => write!(f, "mixed"),
            Scheme::Quantized(b) => write!(f, "quantized:{b}"),
            Scheme::Selection(beta) => write!(f, "selection:{beta}"),
            Scheme::MuZfHybrid => write!(f, "mu_zf_hybrid"),
            Scheme::MuZfDigital => write!(f, "mu_zf_digital"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::config_field("scheme", msg);
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let scheme = match (head, arg) {
            ("digital", None) => Scheme::Digital,
            ("lemma2", None) => Scheme::Lemma2,
            ("double_rf", None) => Scheme::DoubleRf,
            ("mixed", None) => Scheme::Mixed,
            ("mu_zf_hybrid", None) => Scheme::MuZfHybrid,
            ("mu_zf_digital", None) => Scheme::MuZfDigital,
            ("quantized", Some(a)) => {
                let bits: u32 = a
                    .parse()
                    .map_err(|_| bad(format!("`{a}` is not a bit count")))?;
                PhaseResolution::digital(bits).map_err(|e| bad(e.to_string()))?;
                Scheme::Quantized(bits)
            }
            ("selection", Some(a)) => {
                let beta: f64 = a
                    .parse()
                    .map_err(|_| bad(format!("`{a}` is not a percentage")))?;
                SelectionPolicy::new(beta).map_err(|e| bad(e.to_string()))?;
                Scheme::Selection(beta)
            }
            _ => return Err(bad(format!("unknown scheme `{s}`"))),
        };
        Ok(scheme)
    }
}

impl TryFrom<String> for Scheme {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.to_string()
    }
}

impl Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse()
            .map_err(|e: Error| serde::de::Error::custom(e.to_string()))
    }
}

/// What a trial measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Capacity and achievable rate of the scheme.
    #[default]
    Rate,
    /// Pooled `sqrt(N_t) |V|` samples compared with the Rayleigh law.
    SingularVectorLaw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoDb {
    One(f64),
    Many(Vec<f64>),
}

impl RhoDb {
    pub fn values(&self) -> Vec<f64> {
        match self {
            RhoDb::One(v) => vec![*v],
            RhoDb::Many(v) => v.clone(),
        }
    }
}

/// Parameters a sweep can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Both array sizes (transmit only for multiuser schemes).
    N,
    NT,
    NR,
    K,
    M,
    RhoDb,
    Bits,
    Beta,
    LPaths,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::N => "n",
            SweepParam::NT => "n_t",
            SweepParam::NR => "n_r",
            SweepParam::K => "k",
            SweepParam::M => "m",
            SweepParam::RhoDb => "rho_db",
            SweepParam::Bits => "bits",
            SweepParam::Beta => "beta",
            SweepParam::LPaths => "l_paths",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let all = [
            SweepParam::N,
            SweepParam::NT,
            SweepParam::NR,
            SweepParam::K,
            SweepParam::M,
            SweepParam::RhoDb,
            SweepParam::Bits,
            SweepParam::Beta,
            SweepParam::LPaths,
        ];
        all.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            Error::config_field(
                "sweep.param",
                format!(
                    "unknown parameter `{s}`; expected one of {}",
                    all.map(|p| p.name()).join(", ")
                ),
            )
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub scheme: Scheme,
    pub k: usize,
    pub m: usize,
    pub rho_db: RhoDb,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub measure: Measure,
    /// Worker threads; 0 uses all available cores.
    #[serde(default)]
    pub workers: usize,
    pub channel: ChannelModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::config_field("name", "must not be empty"));
        }
        if self.trials == 0 {
            return Err(Error::config_field("trials", "must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::config_field("sweep.values", "must not be empty"));
            }
        }
        for point in self.expand()? {
            point.validate_point()?;
        }
        Ok(())
    }

    /// Checks one fully expanded (sweep-free) configuration.
    fn validate_point(&self) -> Result<()> {
        self.channel.validate()?;
        let rho = self.rho_db.values();
        if rho.is_empty() || rho.iter().any(|r| !r.is_finite()) {
            return Err(Error::config_field("rho_db", "needs finite values in dB"));
        }
        let k = self.k;
        let min_dim = self.channel.n_t.min(self.channel.n_r);
        if k == 0 || k > min_dim {
            return Err(Error::config_field(
                "k",
                format!("{k} streams; need 1 <= k <= min(n_t, n_r) = {min_dim}"),
            ));
        }
        let m_ok = match self.scheme {
            Scheme::Mixed => (k..=2 * k).contains(&self.m),
            Scheme::DoubleRf => self.m == 2 * k,
            _ => self.m == k,
        };
        if !m_ok {
            return Err(Error::config_field(
                "m",
                format!(
                    "m = {} is not valid for scheme {} with k = {k}",
                    self.m, self.scheme
                ),
            ));
        }
        if self.scheme.is_multiuser() && self.channel.n_r != k {
            return Err(Error::config_field(
                "channel.n_r",
                format!("multiuser schemes need n_r = k = {k} single-antenna users"),
            ));
        }
        Ok(())
    }

    pub fn rho_db_values(&self) -> Vec<f64> {
        self.rho_db.values()
    }

    /// `(dB, linear)` pairs; the one place dB becomes linear.
    pub fn rho_points(&self) -> Vec<(f64, f64)> {
        self.rho_db
            .values()
            .into_iter()
            .map(|db| (db, db_to_linear(db)))
            .collect()
    }

    /// One sweep-free configuration per sweep value, tagged with the value.
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![self.clone()]);
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut c = self.clone();
                c.sweep = None;
                apply_sweep(&mut c, sweep.param, v)?;
                Ok(c)
            })
            .collect()
    }
}

fn as_count(param: SweepParam, v: f64) -> Result<usize> {
    if v.fract() != 0.0 || v < 0.0 || !v.is_finite() {
        return Err(Error::config_field(
            format!("sweep.values ({})", param.name()),
            format!("{v} is not a nonnegative integer"),
        ));
    }
    Ok(v as usize)
}

/// Applies one sweep value in place.
pub fn apply_sweep(c: &mut ExperimentConfig, param: SweepParam, v: f64) -> Result<()> {
    match param {
        SweepParam::N => {
            let n = as_count(param, v)?;
            c.channel.n_t = n;
            if !c.scheme.is_multiuser() {
                c.channel.n_r = n;
            }
        }
        SweepParam::NT => c.channel.n_t = as_count(param, v)?,
        SweepParam::NR => c.channel.n_r = as_count(param, v)?,
        SweepParam::K => {
            let old_k = c.k;
            c.k = as_count(param, v)?;
            // Keep the RF-chain relation of the scheme.
            c.m = match c.scheme {
                Scheme::DoubleRf => 2 * c.k,
                Scheme::Mixed => c.m + c.k - old_k,
                _ => c.k,
            };
            if c.scheme.is_multiuser() {
                c.channel.n_r = c.k;
            }
        }
        SweepParam::M => c.m = as_count(param, v)?,
        SweepParam::RhoDb => c.rho_db = RhoDb::One(v),
        SweepParam::Bits => {
            let bits = as_count(param, v)? as u32;
            if !matches!(c.scheme, Scheme::Quantized(_)) {
                return Err(Error::config_field(
                    "sweep.param",
                    "`bits` needs a quantized scheme",
                ));
            }
            PhaseResolution::digital(bits)
                .map_err(|e| Error::config_field("sweep.values (bits)", e.to_string()))?;
            c.scheme = Scheme::Quantized(bits);
        }
        SweepParam::Beta => {
            if !matches!(c.scheme, Scheme::Selection(_)) {
                return Err(Error::config_field(
                    "sweep.param",
                    "`beta` needs a selection scheme",
                ));
            }
            SelectionPolicy::new(v)
                .map_err(|e| Error::config_field("sweep.values (beta)", e.to_string()))?;
            c.scheme = Scheme::Selection(v);
        }
        SweepParam::LPaths => c.channel.l_paths = as_count(param, v)?,
    }
    Ok(())
}

/// Parses TOML text. Errors carry the line and, where it can be recovered,
/// the offending key.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let (line, field) = match e.span() {
            Some(span) => {
                let line_no = text[..span.start.min(text.len())].matches('\n').count() + 1;
                let line_text = text.lines().nth(line_no - 1).unwrap_or("");
                let field = line_text
                    .split_once('=')
                    .map(|(k, _)| k.trim().to_string())
                    .filter(|k| !k.is_empty() && !k.starts_with('['));
                (Some(line_no), field)
            }
            None => (None, None),
        };
        Error::Config {
            path: None,
            line,
            field,
            message: e.message().trim().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Config {
            line,
            field,
            message,
            ..
        } => Error::Config {
            path: Some(path.to_path_buf()),
            line,
            field,
            message,
        },
        other => other,
    })
}

pub fn serialize_config(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config {
        path: None,
        line: None,
        field: None,
        message: e.to_string(),
    })
}
