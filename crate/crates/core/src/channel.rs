//! Channel and CSIT-error generation.
//!
//! Randomness is keyed by [`RngSpec`]: a ChaCha8 generator seeded with
//! `seed_from_u64(master_seed)` and switched to stream `stream_id`. Normal
//! variates come from `rand_distr::StandardNormal` (ziggurat). Matrices are
//! filled row-major, real part before imaginary part, so a given
//! `(master_seed, stream_id)` reproduces the same draws on every platform.
//!
//! A circularly-symmetric CN(0, σ²) entry has independent real and imaginary
//! parts, each N(0, σ²/2).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Immutable scenario: `m` transmit antennas, `k` single-antenna users,
/// downlink SNR `rho` (linear, ρ = 1/σ²) and CSIT error variance `tau2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    m: usize,
    k: usize,
    rho: f64,
    tau2: f64,
    beta: f64,
}

impl SystemConfig {
    pub fn new(m: usize, k: usize, rho: f64, tau2: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("M must be at least 1"));
        }
        if k == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::invalid(format!("rho must be positive and finite, got {rho}")));
        }
        check_tau2(tau2)?;
        Ok(SystemConfig { m, k, rho, tau2, beta: k as f64 / m as f64 })
    }

    pub fn with_rho_db(m: usize, k: usize, rho_db: f64, tau2: f64) -> Result<Self> {
        Self::new(m, k, db_to_linear(rho_db), tau2)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_db(&self) -> f64 {
        linear_to_db(self.rho)
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    /// Load K/M.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_tau2(&self, tau2: f64) -> Result<Self> {
        Self::new(self.m, self.k, self.rho, tau2)
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.m, self.k, rho, self.tau2)
    }
}

pub(crate) fn check_tau2(tau2: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau2) {
        return Err(Error::invalid(format!("tau2 must lie in [0, 1], got {tau2}")));
    }
    Ok(())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Key of one reproducible random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngSpec { master_seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One joint draw of the true channel and its transmitter-side estimate.
///
/// `h` rows are the users' channels; `h == hhat + e` holds exactly for the
/// stored matrices because `e` is recomputed as `h - hhat` after the sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair {
    pub h: CMatrix,
    pub hhat: CMatrix,
    pub e: CMatrix,
}

/// Fills a `rows x cols` matrix with CN(0, variance) entries drawn from `rng`.
/// Draws are consumed even when `variance` is zero so that stream positions
/// do not depend on the variance.
pub fn sample_cn_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut R,
) -> CMatrix {
    let scale = (variance / 2.0).sqrt();
    let data: Vec<Complex64> = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if variance == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(scale * re, scale * im)
            }
        })
        .collect();
    DMatrix::from_row_slice(rows, cols, &data)
}

/// K x M channel with i.i.d. CN(0, 1) entries.
pub fn sample_channel(cfg: &SystemConfig, rng: RngSpec) -> CMatrix {
    sample_cn_matrix(cfg.k(), cfg.m(), 1.0, &mut rng.rng())
}

/// Draws Ĥ ~ CN(0, 1 - τ²) then E ~ CN(0, τ²) from the same stream and forms
/// H = Ĥ + E.
pub fn sample_csit_pair(cfg: &SystemConfig, rng: RngSpec) -> Result<ChannelPair> {
    let tau2 = cfg.tau2();
    check_tau2(tau2)?;
    let mut rng = rng.rng();
    let hhat = sample_cn_matrix(cfg.k(), cfg.m(), 1.0 - tau2, &mut rng);
    let err = sample_cn_matrix(cfg.k(), cfg.m(), tau2, &mut rng);
    let h = &hhat + &err;
    let e = &h - &hhat;
    Ok(ChannelPair { h, hhat, e })
}
