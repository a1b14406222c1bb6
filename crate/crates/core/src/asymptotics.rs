//! Large-system (M, K → ∞, K/M = β fixed) closed forms.
//!
//! Imperfect CSIT enters only through the effective SNR
//! ρ̃ = ρ(1−τ²)/(ρτ²+1) and the effective regularizer ξ̃ = ξ/(1−τ²). The
//! per-user rate is clamped once, after forming the log-ratio of the two
//! deterministic equivalents; the finite-size rate in [`crate::precoder`]
//! clamps per user instead.

use serde::{Deserialize, Serialize};

use crate::channel::{check_tau2, SystemConfig};
use crate::error::{Error, Result};
use crate::precoder::optimal_regularizer;

/// g(β, ξ), the positive solution of ξ g = 1 − β g / (1 + g).
///
/// The closed form ½[sgn(ξ)√((1−β)²/ξ² + 2(1+β)/ξ + 1) + (1−β)/ξ − 1] is
/// the root (√D − b)/(2ξ) of ξg² + bg − 1 = 0 with b = ξ + β − 1 and
/// D = b² + 4ξ (= ξ² times the radicand). When b > 0 that difference cancels,
/// so the conjugate 2/(√D + b) is used instead; both branches are exact.
pub fn g_function(beta: f64, xi: f64) -> Result<f64> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::domain(format!("beta must be nonnegative, got {beta}")));
    }
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::domain(format!("xi must be finite and nonzero, got {xi}")));
    }
    let b = (beta - 1.0) + xi;
    let d = b * b + 4.0 * xi;
    if d < 0.0 {
        return Err(Error::domain(format!(
            "negative radicand in g(beta={beta}, xi={xi}): -xi lies inside the channel spectrum"
        )));
    }
    let s = d.sqrt();
    let g = if b > 0.0 { 2.0 / (s + b) } else { (s - b) / (2.0 * xi) };
    Ok(g)
}

/// ρ̃ = ρ(1−τ²)/(ρτ²+1)
pub fn effective_snr(rho: f64, tau2: f64) -> f64 {
    rho * (1.0 - tau2) / (rho * tau2 + 1.0)
}

/// ξ̃ = ξ/(1−τ²)
pub fn effective_regularizer(xi: f64, tau2: f64) -> f64 {
    xi / (1.0 - tau2)
}

fn validate(beta: f64, rho: f64, tau2: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid(format!("rho must be positive, got {rho}")));
    }
    check_tau2(tau2)
}

/// g · (ρ + ρξ(1+g)²/β) / (ρ + (1+g)²), the common shape of both intended-SINR
/// equivalents.
fn intended_form(beta: f64, rho: f64, xi: f64, g: f64) -> f64 {
    let t = (1.0 + g) * (1.0 + g);
    g * (rho + xi * rho / beta * t) / (rho + t)
}

/// Deterministic equivalent of the intended user's SINR.
pub fn deq_sinr_intended(beta: f64, rho: f64, tau2: f64, xi: f64) -> Result<f64> {
    validate(beta, rho, tau2)?;
    if tau2 >= 1.0 {
        return Err(Error::domain("tau2 = 1: effective regularizer is infinite"));
    }
    let rt = effective_snr(rho, tau2);
    let xt = effective_regularizer(xi, tau2);
    let g = g_function(beta, xt)?;
    Ok(intended_form(beta, rt, xt, g))
}

/// Deterministic equivalent of the eavesdropper alliance's SINR,
/// ρ[τ² + (1−τ²)/(1+g(β,ξ̃))²]. Equals ρ at τ² = 1.
pub fn deq_sinr_eve(beta: f64, rho: f64, tau2: f64, xi: f64) -> Result<f64> {
    validate(beta, rho, tau2)?;
    if tau2 >= 1.0 {
        return Ok(rho);
    }
    let g = g_function(beta, effective_regularizer(xi, tau2))?;
    Ok(rho * (tau2 + (1.0 - tau2) / ((1.0 + g) * (1.0 + g))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeSystemPoint {
    pub beta: f64,
    pub rho: f64,
    pub tau2: f64,
    pub xi: f64,
    /// g(β, ξ̃)
    pub g: f64,
    pub rho_tilde: f64,
    pub xi_tilde: f64,
    pub sinr_intended_deq: f64,
    pub sinr_eve_deq: f64,
    /// log₂((1+SINR°)/(1+SINR̃°)) before clamping.
    pub log_ratio: f64,
    /// [log_ratio]⁺, bits/s/Hz per user.
    pub rate_per_user: f64,
}

impl LargeSystemPoint {
    /// R_s° for `k` users.
    pub fn sum_rate(&self, k: usize) -> f64 {
        k as f64 * self.rate_per_user
    }
}

/// Large-system point at arbitrary (β, ρ, τ², ξ).
pub fn large_system_point(beta: f64, rho: f64, tau2: f64, xi: f64) -> Result<LargeSystemPoint> {
    validate(beta, rho, tau2)?;
    if tau2 >= 1.0 {
        return Err(Error::domain("tau2 = 1: no CSIT, the large-system rate is undefined"));
    }
    let rho_tilde = effective_snr(rho, tau2);
    let xi_tilde = effective_regularizer(xi, tau2);
    let g = g_function(beta, xi_tilde)?;
    let sinr_intended_deq = intended_form(beta, rho_tilde, xi_tilde, g);
    let sinr_eve_deq = rho * (tau2 + (1.0 - tau2) / ((1.0 + g) * (1.0 + g)));
    let log_ratio = ((1.0 + sinr_intended_deq) / (1.0 + sinr_eve_deq)).log2();
    Ok(LargeSystemPoint {
        beta,
        rho,
        tau2,
        xi,
        g,
        rho_tilde,
        xi_tilde,
        sinr_intended_deq,
        sinr_eve_deq,
        log_ratio,
        rate_per_user: log_ratio.max(0.0),
    })
}

/// Large-system secrecy rate of `cfg` under CSIT error, with regularizer `xi`.
pub fn secrecy_rate_deq(cfg: &SystemConfig, xi: f64) -> Result<LargeSystemPoint> {
    large_system_point(cfg.beta(), cfg.rho(), cfg.tau2(), xi)
}

/// Same, with ξ chosen by [`optimal_regularizer`] at the configured (β, ρ).
pub fn secrecy_rate_deq_default(cfg: &SystemConfig) -> Result<LargeSystemPoint> {
    let xi = optimal_regularizer(cfg.beta(), cfg.rho())?;
    secrecy_rate_deq(cfg, xi)
}

/// Perfect-CSIT (SINR°, SINR̃°) at regularizer `xi`, evaluated directly from
/// g(β, ξ) and ρ without the τ substitutions.
pub fn perfect_csit_sinrs(beta: f64, rho: f64, xi: f64) -> Result<(f64, f64)> {
    validate(beta, rho, 0.0)?;
    let g = g_function(beta, xi)?;
    let t = (1.0 + g) * (1.0 + g);
    Ok((intended_form(beta, rho, xi, g), rho / t))
}

/// Unclamped per-user log-ratio under perfect CSIT with the optimal ξ.
pub fn perfect_log_ratio(beta: f64, rho: f64) -> Result<f64> {
    let xi = optimal_regularizer(beta, rho)?;
    let (s, e) = perfect_csit_sinrs(beta, rho, xi)?;
    Ok(((1.0 + s) / (1.0 + e)).log2())
}

/// Per-user large-system secrecy rate under perfect CSIT, R̄_s°/K, with ξ from
/// [`optimal_regularizer`].
pub fn secrecy_rate_deq_perfect(beta: f64, rho: f64) -> Result<f64> {
    Ok(perfect_log_ratio(beta, rho)?.max(0.0))
}
