//! Finite-size Monte Carlo against the large-system limit.

use rci_secrecy::harness::ergodic_secrecy_rate_mc;
use rci_secrecy::{secrecy_rate_deq_default, SystemConfig};

fn relative_error(m: usize, tau2: f64, trials: usize) -> f64 {
    let cfg = SystemConfig::with_rho_db(m, m, 20.0, tau2).unwrap();
    let mc = ergodic_secrecy_rate_mc(&cfg, trials, 3).unwrap().mean / m as f64;
    let deq = secrecy_rate_deq_default(&cfg).unwrap().rate_per_user;
    (mc - deq).abs() / deq
}

#[test]
fn error_shrinks_with_dimension() {
    let errs: Vec<f64> = [8, 16, 32, 64].iter().map(|&m| relative_error(m, 0.01, 400)).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 0.08, "{errs:?}");
}

#[test]
fn perfect_csit_converges_quickly() {
    assert!(relative_error(64, 0.0, 200) < 0.03);
}
