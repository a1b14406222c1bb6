//! FDD limited-feedback planning.
//!
//! Covers the large-system rate gap between perfect and imperfect CSIT, the
//! CSIT-error scaling τ² = C/ρ that targets a high-SNR gap of log₂ b bits,
//! the feedback-bit budget that achieves that error under random vector
//! quantization (RVQ), and a brute-force RVQ quantizer to check the
//! distortion bound τ² < 2^(−B/(M−1)).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{large_system_point, perfect_log_ratio};
use crate::channel::{CMatrix, RngSpec};
use crate::error::{Error, Result};
use crate::precoder::optimal_regularizer;

/// Loads within this distance of 1 use the β = 1 constants.
pub const BETA_ONE_TOLERANCE: f64 = 1e-9;

/// Largest codebook the brute-force quantizer accepts, in bits.
pub const MAX_CODEBOOK_BITS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRegime {
    BetaBelowOne,
    BetaEqualOne,
}

impl BetaRegime {
    /// β < 1 − 1e-9 is `BetaBelowOne`, |β − 1| ≤ 1e-9 is `BetaEqualOne`.
    /// The two constants differ, so the planned C jumps at β = 1.
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(format!("beta must be positive, got {beta}")));
        }
        if (beta - 1.0).abs() <= BETA_ONE_TOLERANCE {
            Ok(BetaRegime::BetaEqualOne)
        } else if beta < 1.0 {
            Ok(BetaRegime::BetaBelowOne)
        } else {
            Err(Error::invalid(format!(
                "beta = {beta} > 1: the high-SNR secrecy rate vanishes, no feedback plan exists"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    /// Difference of the [·]⁺-clamped per-user rates.
    Clamped,
    /// Difference of the raw log-ratios.
    Unclamped,
}

/// Per-user gap Δ = (R̄_s° − R_s°)/K between perfect CSIT and CSIT error τ²,
/// both with ξ chosen for perfect CSIT at (β, ρ).
pub fn rate_gap(beta: f64, rho: f64, tau2: f64, mode: GapMode) -> Result<f64> {
    let xi = optimal_regularizer(beta, rho)?;
    let perfect = perfect_log_ratio(beta, rho)?;
    let imperfect = large_system_point(beta, rho, tau2, xi)?.log_ratio;
    Ok(match mode {
        GapMode::Clamped => perfect.max(0.0) - imperfect.max(0.0),
        GapMode::Unclamped => perfect - imperfect,
    })
}

/// C such that τ² = C/ρ targets a high-SNR gap of log₂ b bits.
pub fn scaling_constant(regime: BetaRegime, b: f64) -> Result<f64> {
    if !(b.is_finite() && b >= 1.0) {
        return Err(Error::invalid(format!("gap factor b must be >= 1, got {b}")));
    }
    Ok(match regime {
        BetaRegime::BetaBelowOne => 0.5 * ((4.0 * b - 3.0).sqrt() - 1.0),
        BetaRegime::BetaEqualOne => 2.0 / 3.0 * ((3.0 * b - 2.0).sqrt() - 1.0),
    })
}

/// Feedback bits per user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackBits {
    /// Linear-in-dB approximation (one bit per antenna per 3 dB).
    pub approx: f64,
    /// (M−1) log₂(ρ/C), from the distortion bound with τ² = C/ρ.
    pub exact: f64,
}

impl FeedbackBits {
    /// Integer budget: ceiling of the approximation.
    pub fn rounded(&self) -> u32 {
        self.approx.ceil().max(0.0) as u32
    }
}

pub fn feedback_bits(m: usize, regime: BetaRegime, rho_db: f64, b: f64) -> Result<FeedbackBits> {
    if m < 2 {
        return Err(Error::invalid("feedback planning needs M >= 2"));
    }
    if !(b.is_finite() && b > 1.0) {
        return Err(Error::invalid(format!("gap factor b must be > 1, got {b}")));
    }
    if !rho_db.is_finite() {
        return Err(Error::invalid("rho_db must be finite"));
    }
    let dof = (m - 1) as f64;
    let offset = match regime {
        BetaRegime::BetaBelowOne => ((4.0 * b - 3.0).sqrt() - 1.0).log2() - 1.0,
        BetaRegime::BetaEqualOne => (((3.0 * b - 2.0).sqrt() - 1.0) / 3.0).log2() + 1.0,
    };
    let approx = dof / 3.0 * rho_db - dof * offset;
    let c = scaling_constant(regime, b)?;
    let rho = 10f64.powf(rho_db / 10.0);
    let exact = dof * (rho / c).log2();
    Ok(FeedbackBits { approx, exact })
}

/// A complete feedback plan at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FddPlan {
    pub b: f64,
    pub c: f64,
    pub bits: FeedbackBits,
    pub m: usize,
    pub beta_regime: BetaRegime,
}

impl FddPlan {
    pub fn new(m: usize, beta: f64, rho_db: f64, b: f64) -> Result<Self> {
        let beta_regime = BetaRegime::from_beta(beta)?;
        let c = scaling_constant(beta_regime, b)?;
        let bits = feedback_bits(m, beta_regime, rho_db, b)?;
        Ok(FddPlan { b, c, bits, m, beta_regime })
    }

    /// τ² = C/ρ at linear SNR `rho`, capped at 1.
    pub fn tau2(&self, rho: f64) -> f64 {
        (self.c / rho).min(1.0)
    }
}

/// Per-user random codebook: 2^bits unit-norm vectors, isotropic on the
/// complex unit sphere (normalized CN(0, I) draws).
#[derive(Debug, Clone, PartialEq)]
pub struct RvqCodebook {
    bits: u32,
    m: usize,
    /// Row i is codeword i.
    vectors: DMatrix<Complex64>,
}

impl RvqCodebook {
    pub fn generate(bits: u32, m: usize, rng: RngSpec) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("codebook dimension must be >= 1"));
        }
        if bits > MAX_CODEBOOK_BITS {
            return Err(Error::invalid(format!(
                "codebooks above {MAX_CODEBOOK_BITS} bits are not enumerated; use the analytic bound"
            )));
        }
        let size = 1usize << bits;
        let mut rng = rng.rng();
        let mut vectors = DMatrix::<Complex64>::zeros(size, m);
        for i in 0..size {
            let mut norm2 = 0.0;
            for j in 0..m {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                vectors[(i, j)] = Complex64::new(re, im);
                norm2 += re * re + im * im;
            }
            let inv = norm2.sqrt().recip();
            for j in 0..m {
                vectors[(i, j)] *= inv;
            }
        }
        Ok(RvqCodebook { bits, m, vectors })
    }

    /// Builds a codebook from explicit codewords (normalized here).
    pub fn from_vectors(m: usize, codewords: &[Vec<Complex64>]) -> Result<Self> {
        if codewords.iter().any(|c| c.len() != m) {
            return Err(Error::DimensionMismatch("codeword length differs from M".into()));
        }
        let mut vectors = DMatrix::<Complex64>::zeros(codewords.len(), m);
        for (i, c) in codewords.iter().enumerate() {
            let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for j in 0..m {
                vectors[(i, j)] = c[j] / n;
            }
        }
        let bits = (codewords.len().max(1) as f64).log2().ceil() as u32;
        Ok(RvqCodebook { bits, m, vectors })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn codeword(&self, i: usize) -> Vec<Complex64> {
        self.vectors.row(i).iter().copied().collect()
    }
}

/// Index of the codeword best aligned with the direction of `h`, and
/// sin²θ = 1 − |⟨h/‖h‖, c⟩|² for that codeword. Ties go to the lowest index.
pub fn rvq_quantize(h: &[Complex64], codebook: &RvqCodebook) -> Result<(usize, f64)> {
    if codebook.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    if h.len() != codebook.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector has {} entries, codebook dimension is {}",
            h.len(),
            codebook.dim()
        )));
    }
    let norm2: f64 = h.iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(Error::domain("cannot quantize the direction of a zero vector"));
    }
    let mut best = (0usize, -1.0f64);
    for (i, row) in codebook.vectors.row_iter().enumerate() {
        let mut ip = Complex64::new(0.0, 0.0);
        for (c, x) in row.iter().zip(h) {
            ip += x.conj() * c;
        }
        let a = ip.norm_sqr();
        if a > best.1 {
            best = (i, a);
        }
    }
    let sin2 = (1.0 - best.1 / norm2).max(0.0);
    Ok((best.0, sin2))
}

/// Replaces every row of `h` with its norm times its quantized direction.
/// Magnitudes are known to the transmitter; only directions are fed back.
pub fn quantized_estimate(h: &CMatrix, codebooks: &[RvqCodebook]) -> Result<CMatrix> {
    if codebooks.len() != h.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} codebooks for {} users",
            codebooks.len(),
            h.nrows()
        )));
    }
    let mut hhat = CMatrix::zeros(h.nrows(), h.ncols());
    for (k, cb) in codebooks.iter().enumerate() {
        let row: Vec<Complex64> = h.row(k).iter().copied().collect();
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let (idx, _) = rvq_quantize(&row, cb)?;
        for j in 0..h.ncols() {
            hhat[(k, j)] = cb.vectors[(idx, j)] * norm;
        }
    }
    Ok(hhat)
}

/// Mean sin²θ over `draws` CN(0, I) channels quantized against one seeded
/// codebook. Stream 0 of `seed` draws the codebook, streams 1..=draws the
/// channels.
pub fn mean_quantization_error(m: usize, bits: u32, draws: usize, seed: u64) -> Result<f64> {
    if draws == 0 {
        return Err(Error::invalid("draws must be >= 1"));
    }
    let cb = RvqCodebook::generate(bits, m, RngSpec::new(seed, 0))?;
    let one = |i: usize| -> Result<f64> {
        let mut rng = RngSpec::new(seed, i as u64 + 1).rng();
        let h: Vec<Complex64> = (0..m)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        Ok(rvq_quantize(&h, &cb)?.1)
    };
    let errs: Vec<f64> = crate::par::map_indexed(draws, one).into_iter().collect::<Result<_>>()?;
    Ok(crate::harness::stats::ordered_sum(&errs) / draws as f64)
}

/// The RVQ distortion bound 2^(−B/(M−1)).
pub fn rvq_distortion_bound(m: usize, bits: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::invalid("the distortion bound needs M >= 2"));
    }
    Ok(2f64.powf(-bits / (m - 1) as f64))
}
