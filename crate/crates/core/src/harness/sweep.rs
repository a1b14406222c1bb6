//! One-dimensional parameter sweeps.
//!
//! All rate columns are normalized by the number of transmit antennas M
//! (R/M). Rows are evaluated in order; Monte Carlo trials inside a row run in
//! parallel but reduce deterministically. A row that fails records its error
//! and the sweep moves on.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::mc::{ergodic_secrecy_rate_mc_with, user_codebooks, CsitSource, McEstimate};
use super::stats::Z95;
use crate::asymptotics::{secrecy_rate_deq, secrecy_rate_deq_perfect};
use crate::channel::{db_to_linear, SystemConfig};
use crate::error::{Error, Result};
use crate::fdd::{rate_gap, rvq_distortion_bound, scaling_constant, BetaRegime, GapMode};
use crate::precoder::optimal_regularizer;
use crate::tdd::tdd_csit_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "M")]
    M,
    #[serde(rename = "rho_dB")]
    RhoDb,
    #[serde(rename = "T_t")]
    Tt,
    #[serde(rename = "B_bits")]
    BBits,
    #[serde(rename = "tau")]
    Tau,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::M => "M",
            Axis::RhoDb => "rho_dB",
            Axis::Tt => "T_t",
            Axis::BBits => "B_bits",
            Axis::Tau => "tau",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "M" => Axis::M,
            "rho_dB" => Axis::RhoDb,
            "T_t" => Axis::Tt,
            "B_bits" => Axis::BBits,
            "tau" => Axis::Tau,
            other => return Err(Error::invalid(format!("unknown sweep axis '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    /// Monte Carlo R_s/M with standard error and 95% interval.
    McRate,
    /// Large-system R_s°/M.
    DeqRate,
    /// Large-system perfect-CSIT R̄_s°/M.
    DeqPerfect,
    /// Unclamped per-user gap Δ, reported in `extra`.
    Gap,
    /// Monte Carlo mean SINRs, reported in `extra`.
    SinrMeans,
}

/// TDD settings for the `T_t` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TddSettings {
    pub coherence: usize,
    /// ρ / ρ_ul
    pub c: f64,
}

/// FDD settings: τ² = C/ρ with C from the gap target `b`; on the `B_bits`
/// axis, optionally feed RVQ-quantized channels to the precoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FddSettings {
    pub b: f64,
    pub rvq_end_to_end: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub system: SystemConfig,
    pub tdd: Option<TddSettings>,
    pub fdd: Option<FddSettings>,
    pub trials: usize,
    pub master_seed: u64,
    pub outputs: BTreeSet<Output>,
    /// Series name written at the start of every row's `extra` cell.
    pub label: String,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("sweep values must be nonempty"));
        }
        if !self.values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("sweep values must be strictly increasing"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        if self.axis == Axis::Tt && self.tdd.is_none() {
            return Err(Error::invalid("the T_t axis needs TDD settings"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub ci95_low: Option<f64>,
    pub ci95_high: Option<f64>,
    pub deq_value: Option<f64>,
    pub deq_perfect: Option<f64>,
    /// `;`-separated `key=value` annotations, starting with the series label.
    pub extra: String,
}

impl SweepRow {
    pub fn empty(axis_value: f64, extra: String) -> Self {
        SweepRow {
            axis_value,
            mc_mean: None,
            mc_stderr: None,
            ci95_low: None,
            ci95_high: None,
            deq_value: None,
            deq_perfect: None,
            extra,
        }
    }

    /// Value of `key` in `extra`, if present.
    pub fn extra_value(&self, key: &str) -> Option<&str> {
        self.extra.split(';').find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
    }

    pub fn series(&self) -> Option<&str> {
        self.extra_value("series")
    }

    pub fn error(&self) -> Option<&str> {
        self.extra_value("error")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    /// Specs that produced the rows, in order.
    pub specs: Vec<SweepSpec>,
    pub version: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub rows: Vec<SweepRow>,
    pub meta: SweepMeta,
}

impl SweepResult {
    pub fn new(axis: Axis) -> Self {
        SweepResult {
            axis,
            rows: Vec::new(),
            meta: SweepMeta {
                specs: Vec::new(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                wall_time_s: 0.0,
            },
        }
    }

    pub fn series<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.series() == Some(label))
    }

    /// Appends the rows and specs of `other`, which must share the axis.
    pub fn extend(&mut self, other: SweepResult) {
        debug_assert_eq!(self.axis, other.axis);
        self.rows.extend(other.rows);
        self.meta.specs.extend(other.meta.specs);
        self.meta.wall_time_s += other.meta.wall_time_s;
    }
}

/// The operating point of one row.
struct RowPoint {
    cfg: SystemConfig,
    prelog: f64,
    rvq_bits: Option<u32>,
}

fn resolve(spec: &SweepSpec, v: f64) -> Result<RowPoint> {
    let base = spec.system;
    let fdd_tau2 = |m: usize, k: usize, rho: f64| -> Result<Option<f64>> {
        match spec.fdd {
            Some(f) => {
                let regime = BetaRegime::from_beta(k as f64 / m as f64)?;
                Ok(Some((scaling_constant(regime, f.b)? / rho).min(1.0)))
            }
            None => Ok(None),
        }
    };
    let point = |cfg| RowPoint { cfg, prelog: 1.0, rvq_bits: None };
    match spec.axis {
        Axis::M => {
            if !(v >= 1.0 && v.fract() == 0.0) {
                return Err(Error::invalid(format!("M must be a positive integer, got {v}")));
            }
            let m = v as usize;
            let k = ((base.beta() * m as f64).round() as usize).max(1);
            let tau2 = fdd_tau2(m, k, base.rho())?.unwrap_or(base.tau2());
            Ok(point(SystemConfig::new(m, k, base.rho(), tau2)?))
        }
        Axis::RhoDb => {
            let rho = db_to_linear(v);
            let tau2 = fdd_tau2(base.m(), base.k(), rho)?.unwrap_or(base.tau2());
            Ok(point(SystemConfig::new(base.m(), base.k(), rho, tau2)?))
        }
        Axis::Tau => Ok(point(base.with_tau2(v * v)?)),
        Axis::Tt => {
            let tdd = spec.tdd.ok_or_else(|| Error::invalid("the T_t axis needs TDD settings"))?;
            let t = tdd.coherence as f64;
            if !(v > 0.0 && v < t) {
                return Err(Error::invalid(format!("training length {v} outside (0, {t})")));
            }
            let tau2 = tdd_csit_error(v, base.rho() / tdd.c)?;
            Ok(RowPoint { cfg: base.with_tau2(tau2)?, prelog: (t - v) / t, rvq_bits: None })
        }
        Axis::BBits => {
            if !(v >= 0.0 && v.fract() == 0.0) {
                return Err(Error::invalid(format!("B must be a nonnegative integer, got {v}")));
            }
            let tau2 = rvq_distortion_bound(base.m(), v)?;
            let rvq = spec.fdd.is_some_and(|f| f.rvq_end_to_end);
            Ok(RowPoint {
                cfg: base.with_tau2(tau2)?,
                prelog: 1.0,
                rvq_bits: rvq.then_some(v as u32),
            })
        }
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn evaluate_row(spec: &SweepSpec, v: f64) -> Result<SweepRow> {
    let pt = resolve(spec, v)?;
    let cfg = pt.cfg;
    let m = cfg.m() as f64;
    let k = cfg.k() as f64;
    let mut row = SweepRow::empty(v, format!("series={}", spec.label));
    let mut extras: Vec<String> = Vec::new();
    let xi = optimal_regularizer(cfg.beta(), cfg.rho())?;

    let wants_mc = spec.outputs.contains(&Output::McRate) || spec.outputs.contains(&Output::SinrMeans);
    if wants_mc {
        let est: McEstimate = match pt.rvq_bits {
            Some(bits) => {
                let books = user_codebooks(&cfg, bits, spec.master_seed)?;
                ergodic_secrecy_rate_mc_with(&cfg, spec.trials, spec.master_seed, xi, CsitSource::Rvq(&books))?
            }
            None => ergodic_secrecy_rate_mc_with(
                &cfg,
                spec.trials,
                spec.master_seed,
                xi,
                CsitSource::ErrorModel,
            )?,
        };
        if spec.outputs.contains(&Output::McRate) {
            let scale = pt.prelog / m;
            let mean = est.mean * scale;
            let se = est.std_error * scale;
            row.mc_mean = Some(mean);
            if se.is_finite() {
                row.mc_stderr = Some(se);
                row.ci95_low = Some(mean - Z95 * se);
                row.ci95_high = Some(mean + Z95 * se);
            }
        }
        if spec.outputs.contains(&Output::SinrMeans) {
            extras.push(format!("sinr_mean={}", fmt_f(est.mean_sinr)));
            extras.push(format!("sinr_eve_mean={}", fmt_f(est.mean_sinr_eve)));
        }
    }
    if spec.outputs.contains(&Output::DeqRate) {
        let deq = secrecy_rate_deq(&cfg, xi)?;
        row.deq_value = Some(pt.prelog * k * deq.rate_per_user / m);
    }
    if spec.outputs.contains(&Output::DeqPerfect) {
        row.deq_perfect = Some(k * secrecy_rate_deq_perfect(cfg.beta(), cfg.rho())? / m);
    }
    if spec.outputs.contains(&Output::Gap) {
        let gap = rate_gap(cfg.beta(), cfg.rho(), cfg.tau2(), GapMode::Unclamped)?;
        extras.push(format!("gap={}", fmt_f(gap)));
    }
    for e in extras {
        row.extra.push(';');
        row.extra.push_str(&e);
    }
    Ok(row)
}

/// Runs `spec`, one row per axis value in order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let start = Instant::now();
    let mut result = SweepResult::new(spec.axis);
    for &v in &spec.values {
        let row = evaluate_row(spec, v).unwrap_or_else(|e| {
            let msg = e.to_string().replace(';', ",");
            SweepRow::empty(v, format!("series={};error={msg}", spec.label))
        });
        result.rows.push(row);
    }
    result.meta.specs.push(spec.clone());
    result.meta.wall_time_s = start.elapsed().as_secs_f64();
    Ok(result)
}
