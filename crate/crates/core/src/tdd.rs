//! TDD uplink-training optimizer.
//!
//! Out of a coherence interval of `T` channel uses, `T_t` carry orthogonal
//! uplink pilots. The resulting CSIT error is τ² = 1/(1 + T_t ρ_ul) and the
//! data phase keeps a prelog (T − T_t)/T. Downlink training is not counted.
//!
//! The optimal `T_t` is found two ways: a brute-force search over integers in
//! (K, T) of the large-system rate, and the root of a high-SNR cubic.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{large_system_point, secrecy_rate_deq_perfect};
use crate::error::{Error, Result};
use crate::fdd::BETA_ONE_TOLERANCE;
use crate::poly;
use crate::precoder::optimal_regularizer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TddConfig {
    /// Coherence interval length T in channel uses.
    pub coherence: usize,
    pub rho_ul: f64,
    /// ρ / ρ_ul
    pub c: f64,
    pub k: usize,
    pub beta: f64,
    pub rho: f64,
}

impl TddConfig {
    /// Builds the configuration from antennas, users, downlink SNR, the
    /// downlink-to-uplink SNR ratio `c` and the coherence interval.
    pub fn new(m: usize, k: usize, rho: f64, c: f64, coherence: usize) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::invalid("M and K must be >= 1"));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::invalid(format!("rho must be positive, got {rho}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("c must be positive, got {c}")));
        }
        if coherence <= k {
            return Err(Error::invalid(format!(
                "coherence interval {coherence} leaves no room for {k} pilots"
            )));
        }
        Ok(TddConfig { coherence, rho_ul: rho / c, c, k, beta: k as f64 / m as f64, rho })
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        let m = (self.k as f64 / self.beta).round() as usize;
        Self::new(m, self.k, rho, self.c, self.coherence)
    }

    pub fn with_coherence(&self, coherence: usize) -> Result<Self> {
        let m = (self.k as f64 / self.beta).round() as usize;
        Self::new(m, self.k, self.rho, self.c, coherence)
    }
}

/// τ² = 1/(1 + T_t ρ_ul)
pub fn tdd_csit_error(training: f64, rho_ul: f64) -> Result<f64> {
    if !(training.is_finite() && training > 0.0) {
        return Err(Error::invalid(format!("training length must be positive, got {training}")));
    }
    if !(rho_ul.is_finite() && rho_ul > 0.0) {
        return Err(Error::invalid(format!("uplink SNR must be positive, got {rho_ul}")));
    }
    Ok(1.0 / (1.0 + training * rho_ul))
}

/// (ξ̃, ρ̃) written directly in terms of the training length.
pub fn tdd_effective_parameters(xi: f64, rho: f64, training: f64, rho_ul: f64) -> (f64, f64) {
    let x = training * rho_ul;
    (xi * (1.0 + x) / x, rho * x / (rho + 1.0 + x))
}

/// Large-system secrecy sum-rate (all K users) with `training` pilot uses.
/// Zero at `training == T`.
pub fn tdd_secrecy_rate(cfg: &TddConfig, training: f64) -> Result<f64> {
    let t = cfg.coherence as f64;
    if !(training > 0.0 && training <= t) {
        return Err(Error::invalid(format!("training length {training} outside (0, {t}]")));
    }
    if training == t {
        return Ok(0.0);
    }
    let tau2 = tdd_csit_error(training, cfg.rho_ul)?;
    let xi = optimal_regularizer(cfg.beta, cfg.rho)?;
    let pt = large_system_point(cfg.beta, cfg.rho, tau2, xi)?;
    Ok((t - training) / t * cfg.k as f64 * pt.rate_per_user)
}

/// SNR at which the perfect-CSIT sum rate inside q is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QReference {
    /// The configured downlink SNR.
    Operating,
    /// A fixed high-SNR reference, in dB.
    FixedDb(f64),
}

/// q = −R̄_s° ln 2, with R̄_s° the perfect-CSIT large-system sum rate in bits.
pub fn training_q(cfg: &TddConfig, reference: QReference) -> Result<f64> {
    let rho = match reference {
        QReference::Operating => cfg.rho,
        QReference::FixedDb(db) => 10f64.powf(db / 10.0),
    };
    let sum_rate = cfg.k as f64 * secrecy_rate_deq_perfect(cfg.beta, rho)?;
    Ok(-sum_rate * std::f64::consts::LN_2)
}

/// Coefficients (highest power first) of the high-SNR optimality cubic in T_t.
pub fn training_cubic_coefficients(cfg: &TddConfig, q: f64) -> Result<[f64; 4]> {
    let k = cfg.k as f64;
    let c = cfg.c;
    let t = cfg.coherence as f64;
    if (cfg.beta - 1.0).abs() <= BETA_ONE_TOLERANCE {
        Ok([
            4.0 * q,
            4.0 * c * q - 4.0 * k * c,
            3.0 * c * c * q + 4.0 * k * c * t - 6.0 * k * c * c,
            6.0 * k * t * c * c,
        ])
    } else if cfg.beta < 1.0 {
        Ok([
            q,
            c * q - k * c,
            c * c * q + k * c * t - 2.0 * k * c * c,
            2.0 * k * c * c * t,
        ])
    } else {
        Err(Error::invalid(format!("training cubic needs beta <= 1, got {}", cfg.beta)))
    }
}

/// Real root of the training cubic in (K, T); if several lie there, the one
/// with the largest large-system rate.
pub fn solve_training_cubic(cfg: &TddConfig) -> Result<f64> {
    solve_training_cubic_with(cfg, QReference::Operating)
}

pub fn solve_training_cubic_with(cfg: &TddConfig, reference: QReference) -> Result<f64> {
    let q = training_q(cfg, reference)?;
    let [a, b, c, d] = training_cubic_coefficients(cfg, q)?;
    let roots = poly::cubic_roots(a, b, c, d);
    let lo = cfg.k as f64;
    let hi = cfg.coherence as f64;
    let mut best: Option<(f64, f64)> = None;
    for &r in roots.iter().filter(|&&r| r > lo && r < hi) {
        let rate = tdd_secrecy_rate(cfg, r)?;
        if best.is_none_or(|(_, br)| rate > br) {
            best = Some((r, rate));
        }
    }
    best.map(|(r, _)| r).ok_or(Error::NoRootInRange { lo, hi, roots })
}

/// |p(root)| relative to the largest coefficient magnitude.
pub fn cubic_relative_residual(cfg: &TddConfig, reference: QReference, root: f64) -> Result<f64> {
    let q = training_q(cfg, reference)?;
    let coeffs = training_cubic_coefficients(cfg, q)?;
    let scale = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    Ok(poly::eval(&coeffs, root).abs() / scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSolution {
    /// Cubic root, absent when no root lies in (K, T) or β > 1.
    pub t_opt_cubic: Option<f64>,
    pub t_opt_grid: usize,
    pub rate_at_grid_opt: f64,
    pub q: f64,
}

/// Large-system rate at every integer training length in (K, T).
pub fn training_curve(cfg: &TddConfig) -> Result<Vec<(usize, f64)>> {
    if cfg.coherence < cfg.k + 2 {
        return Err(Error::EmptyRange(format!(
            "no integer training length strictly between K={} and T={}",
            cfg.k, cfg.coherence
        )));
    }
    (cfg.k + 1..cfg.coherence).map(|tt| Ok((tt, tdd_secrecy_rate(cfg, tt as f64)?))).collect()
}

/// Brute-force argmax over integer training lengths; ties go to the smaller
/// length.
pub fn optimal_training_grid(cfg: &TddConfig) -> Result<TrainingSolution> {
    let curve = training_curve(cfg)?;
    let mut best = curve[0];
    for &(tt, r) in &curve[1..] {
        if r > best.1 {
            best = (tt, r);
        }
    }
    let q = training_q(cfg, QReference::Operating)?;
    let t_opt_cubic = if cfg.beta <= 1.0 + BETA_ONE_TOLERANCE {
        match solve_training_cubic(cfg) {
            Ok(r) => Some(r),
            Err(Error::NoRootInRange { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(TrainingSolution { t_opt_cubic, t_opt_grid: best.0, rate_at_grid_opt: best.1, q })
}

/// Number of strict interior local maxima of a sampled curve (plateaus count
/// once).
pub fn local_maxima(values: &[f64]) -> usize {
    let mut dedup: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if dedup.last() != Some(&v) {
            dedup.push(v);
        }
    }
    let n = dedup.len();
    if n < 2 {
        return usize::from(n == 1);
    }
    let mut count = 0;
    for i in 0..n {
        let left = i == 0 || dedup[i] > dedup[i - 1];
        let right = i == n - 1 || dedup[i] > dedup[i + 1];
        if left && right {
            count += 1;
        }
    }
    count
}
