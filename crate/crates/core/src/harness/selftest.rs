//! Quick invariant checks runnable from the command line.

use rand::Rng;

use super::mc::ergodic_secrecy_rate_mc;
use crate::asymptotics::{g_function, secrecy_rate_deq, secrecy_rate_deq_perfect};
use crate::channel::{sample_csit_pair, RngSpec, SystemConfig};
use crate::error::Result;
use crate::fdd::{feedback_bits, mean_quantization_error, rvq_distortion_bound, BetaRegime};
use crate::precoder::{build_rci, optimal_regularizer};
use crate::tdd::{cubic_relative_residual, solve_training_cubic, QReference, TddConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_selftest() -> Vec<Check> {
    vec![
        check("g fixed-point identity", || {
            let mut rng = RngSpec::new(1, 0).rng();
            let mut worst: f64 = 0.0;
            for _ in 0..1000 {
                let beta = 2.0 * (1.0 - rng.random::<f64>());
                let xi = 10.0 * (1.0 - rng.random::<f64>());
                let g = g_function(beta, xi)?;
                worst = worst.max((xi * g + beta * g / (1.0 + g) - 1.0).abs());
            }
            Ok((worst < 1e-10, format!("max residual {worst:.3e}")))
        }),
        check("perfect-CSIT reduction", || {
            let mut worst: f64 = 0.0;
            for &b in &[0.25, 0.5, 0.75, 1.0] {
                for &db in &[0.0, 10.0, 20.0, 30.0, 40.0] {
                    let cfg = SystemConfig::with_rho_db(100, (100.0 * b) as usize, db, 0.0)?;
                    let xi = optimal_regularizer(cfg.beta(), cfg.rho())?;
                    let a = secrecy_rate_deq(&cfg, xi)?.rate_per_user;
                    let p = secrecy_rate_deq_perfect(cfg.beta(), cfg.rho())?;
                    worst = worst.max((a - p).abs() / p.abs().max(1e-300));
                }
            }
            Ok((worst < 1e-12, format!("max relative difference {worst:.3e}")))
        }),
        check("precoder power normalization", || {
            let cfg = SystemConfig::new(8, 6, 100.0, 0.1)?;
            let mut worst: f64 = 0.0;
            for s in 0..50 {
                let pair = sample_csit_pair(&cfg, RngSpec::new(2, s))?;
                let p = build_rci(&pair.hhat, 0.1)?;
                worst = worst.max((p.total_power() - 1.0).abs());
            }
            Ok((worst < 1e-10, format!("max |tr(W^H W) - 1| {worst:.3e}")))
        }),
        check("CSIT pair identity", || {
            let cfg = SystemConfig::new(6, 4, 1.0, 0.3)?;
            let exact = (0..100).all(|s| {
                let p = sample_csit_pair(&cfg, RngSpec::new(3, s)).expect("valid config");
                ((&p.h - &p.hhat) - &p.e).iter().all(|z| z.re == 0.0 && z.im == 0.0)
            });
            Ok((exact, "H - Hhat - E == 0 over 100 draws".into()))
        }),
        check("RVQ distortion bound (M=4, B=8)", || {
            let e = mean_quantization_error(4, 8, 2000, 4)?;
            let bound = rvq_distortion_bound(4, 8.0)?;
            Ok((e < bound, format!("mean sin^2 {e:.4} < {bound:.4}")))
        }),
        check("feedback bits (M=10, beta<1, 20 dB, b=2)", || {
            let fb = feedback_bits(10, BetaRegime::BetaBelowOne, 20.0, 2.0)?;
            let fb3 = feedback_bits(10, BetaRegime::BetaBelowOne, 23.0, 2.0)?;
            let ok = (fb.approx - 66.25).abs() < 0.05 && (fb3.approx - fb.approx - 9.0).abs() < 1e-9;
            Ok((ok, format!("B = {:.4}", fb.approx)))
        }),
        check("training cubic residual", || {
            let mut worst: f64 = 0.0;
            for t in [100, 200, 400] {
                let cfg = TddConfig::new(10, 10, 1e4, 10.0, t)?;
                let r = solve_training_cubic(&cfg)?;
                worst = worst.max(cubic_relative_residual(&cfg, QReference::Operating, r)?);
            }
            Ok((worst < 1e-6, format!("max relative residual {worst:.3e}")))
        }),
        check("Monte Carlo determinism", || {
            let cfg = SystemConfig::new(4, 4, 100.0, 0.01)?;
            let a = ergodic_secrecy_rate_mc(&cfg, 64, 11)?;
            let b = ergodic_secrecy_rate_mc(&cfg, 64, 11)?;
            Ok((a == b, format!("mean {:.6}", a.mean)))
        }),
    ]
}
