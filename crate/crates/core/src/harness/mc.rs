//! Ergodic Monte Carlo estimates of the finite-size secrecy sum-rate.
//!
//! Trial `i` uses stream `i` of the master seed and draws a fresh (Ĥ, E)
//! pair. Trials may run on any number of threads; results are reduced in
//! stream order, so the estimate does not depend on the thread count.

use serde::{Deserialize, Serialize};

use super::stats::{mean_and_stderr, ordered_sum, Z95};
use crate::channel::{sample_channel, sample_csit_pair, RngSpec, SystemConfig};
use crate::error::{Error, Result};
use crate::fdd::{quantized_estimate, RvqCodebook};
use crate::par::map_indexed;
use crate::precoder::{build_rci, optimal_regularizer, secrecy_sum_rate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Mean secrecy sum-rate R_s over trials, bits/s/Hz.
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    /// Average over trials and users of SINR_k.
    pub mean_sinr: f64,
    /// Average over trials and users of the eavesdropper SINR.
    pub mean_sinr_eve: f64,
}

impl McEstimate {
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - Z95 * self.std_error, self.mean + Z95 * self.std_error)
    }
}

/// Where the transmitter's channel estimate comes from.
#[derive(Debug, Clone, Copy)]
pub enum CsitSource<'a> {
    /// Ĥ and E drawn per the Gaussian error model with the configured τ².
    ErrorModel,
    /// H drawn with unit variance; each row of Ĥ is ‖h_k‖ times user k's
    /// RVQ codeword. The configured τ² is ignored.
    Rvq(&'a [RvqCodebook]),
}

struct Trial {
    rate: f64,
    sinr: f64,
    eve: f64,
}

fn run_trial(cfg: &SystemConfig, xi: f64, source: CsitSource<'_>, rng: RngSpec) -> Result<Trial> {
    let (h, hhat) = match source {
        CsitSource::ErrorModel => {
            let pair = sample_csit_pair(cfg, rng)?;
            (pair.h, pair.hhat)
        }
        CsitSource::Rvq(books) => {
            let h = sample_channel(cfg, rng);
            let hhat = quantized_estimate(&h, books)?;
            (h, hhat)
        }
    };
    let prec = build_rci(&hhat, xi)?;
    let rp = secrecy_sum_rate(&h, &prec, cfg.rho())?;
    let k = rp.sinr_intended.len() as f64;
    Ok(Trial {
        rate: rp.secrecy_sum_rate,
        sinr: rp.sinr_intended.iter().sum::<f64>() / k,
        eve: rp.sinr_eve.iter().sum::<f64>() / k,
    })
}

/// Monte Carlo mean of R_s with ξ chosen for perfect CSIT at the configured
/// (β, ρ).
pub fn ergodic_secrecy_rate_mc(cfg: &SystemConfig, trials: usize, master_seed: u64) -> Result<McEstimate> {
    let xi = optimal_regularizer(cfg.beta(), cfg.rho())?;
    ergodic_secrecy_rate_mc_with(cfg, trials, master_seed, xi, CsitSource::ErrorModel)
}

pub fn ergodic_secrecy_rate_mc_with(
    cfg: &SystemConfig,
    trials: usize,
    master_seed: u64,
    xi: f64,
    source: CsitSource<'_>,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if let CsitSource::Rvq(books) = source {
        if books.len() != cfg.k() {
            return Err(Error::DimensionMismatch(format!(
                "{} codebooks for {} users",
                books.len(),
                cfg.k()
            )));
        }
    }
    let outcomes: Vec<Trial> = map_indexed(trials, |i| {
        run_trial(cfg, xi, source, RngSpec::new(master_seed, i as u64))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let rates: Vec<f64> = outcomes.iter().map(|t| t.rate).collect();
    let sinrs: Vec<f64> = outcomes.iter().map(|t| t.sinr).collect();
    let eves: Vec<f64> = outcomes.iter().map(|t| t.eve).collect();
    let (mean, std_error) = mean_and_stderr(&rates);
    Ok(McEstimate {
        mean,
        std_error,
        trials,
        mean_sinr: ordered_sum(&sinrs) / trials as f64,
        mean_sinr_eve: ordered_sum(&eves) / trials as f64,
    })
}

/// One seeded RVQ codebook per user. User k's codebook uses stream
/// `u64::MAX - k` of `seed`, disjoint from the trial streams.
pub fn user_codebooks(cfg: &SystemConfig, bits: u32, seed: u64) -> Result<Vec<RvqCodebook>> {
    (0..cfg.k())
        .map(|k| RvqCodebook::generate(bits, cfg.m(), RngSpec::new(seed, u64::MAX - k as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_is_one_realization() {
        let cfg = SystemConfig::new(6, 4, 31.0, 0.05).unwrap();
        let est = ergodic_secrecy_rate_mc(&cfg, 1, 99).unwrap();
        let pair = sample_csit_pair(&cfg, RngSpec::new(99, 0)).unwrap();
        let xi = optimal_regularizer(cfg.beta(), cfg.rho()).unwrap();
        let p = build_rci(&pair.hhat, xi).unwrap();
        let want = secrecy_sum_rate(&pair.h, &p, cfg.rho()).unwrap().secrecy_sum_rate;
        assert_eq!(est.mean, want);
        assert!(est.std_error.is_nan());
    }

    #[test]
    fn rejects_zero_trials_and_missing_csit() {
        let cfg = SystemConfig::new(4, 4, 10.0, 0.0).unwrap();
        assert!(ergodic_secrecy_rate_mc(&cfg, 0, 1).is_err());
        let cfg = cfg.with_tau2(1.0).unwrap();
        assert!(matches!(ergodic_secrecy_rate_mc(&cfg, 3, 1), Err(Error::DegenerateEstimate)));
    }

    #[test]
    fn stderr_shrinks_with_more_trials() {
        let cfg = SystemConfig::new(4, 4, 10.0, 0.01).unwrap();
        let a = ergodic_secrecy_rate_mc(&cfg, 1000, 5).unwrap();
        let b = ergodic_secrecy_rate_mc(&cfg, 2000, 5).unwrap();
        let ratio = b.std_error / a.std_error;
        let ideal = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ratio - ideal).abs() < 0.2 * ideal, "ratio {ratio}");
    }

    #[test]
    fn rvq_source_runs() {
        let cfg = SystemConfig::new(4, 2, 100.0, 0.0).unwrap();
        let books = user_codebooks(&cfg, 6, 3).unwrap();
        let xi = optimal_regularizer(cfg.beta(), cfg.rho()).unwrap();
        let est = ergodic_secrecy_rate_mc_with(&cfg, 50, 3, xi, CsitSource::Rvq(&books)).unwrap();
        assert!(est.mean.is_finite() && est.mean >= 0.0);
        assert!(ergodic_secrecy_rate_mc_with(&cfg, 5, 3, xi, CsitSource::Rvq(&books[..1])).is_err());
    }
}
