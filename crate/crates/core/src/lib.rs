//! Regularized channel inversion (RCI) precoding for the MISO broadcast
//! channel with confidential messages under imperfect CSIT.
//!
//! * [`channel`]: i.i.d. Rayleigh channels and the Gaussian CSIT-error model.
//! * [`precoder`]: the RCI precoder and exact finite-size secrecy rates.
//! * [`asymptotics`]: large-system deterministic equivalents.
//! * [`fdd`]: CSIT-error scaling and feedback-bit planning under RVQ.
//! * [`tdd`]: uplink training length optimization.
//! * [`harness`]: Monte Carlo, sweeps, figure recipes, CSV output.
//!
//! Rates are in bits/s/Hz throughout.

pub mod asymptotics;
pub mod channel;
pub mod error;
pub mod fdd;
pub mod harness;
mod par;
pub mod poly;
pub mod precoder;
pub mod tdd;

pub use asymptotics::{
    deq_sinr_eve, deq_sinr_intended, g_function, secrecy_rate_deq, secrecy_rate_deq_default,
    secrecy_rate_deq_perfect,
    LargeSystemPoint,
};
pub use channel::{sample_channel, sample_csit_pair, ChannelPair, CMatrix, RngSpec, SystemConfig};
pub use error::{Error, Result};
pub use precoder::{
    build_rci, optimal_regularizer, secrecy_sum_rate, sinr_eavesdropper, sinr_intended, Precoder,
    RatePoint,
};
